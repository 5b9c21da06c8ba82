import numpy as np
import pytest

import tfsqueeze as tq
from tfsqueeze.errors import FormatError, IFOutOfRangeError, InvalidParameterError

from conftest import interior_mask


def make_grid(rows, fs=1.0, df=1.0):
    data = np.asarray(rows, dtype=complex)
    t = np.arange(data.shape[0]) / fs
    f = np.arange(data.shape[1]) * df
    return tq.TFRGrid(data, t, f, 1.0, "test", fs)


def ridges_and_edges_oracle(column):
    """Pure-python scan: strict interior maxima and inter-ridge minima."""
    mag = np.abs(column)
    n = mag.size
    ridges = [k for k in range(1, n - 1) if mag[k] > mag[k - 1] and mag[k] > mag[k + 1]]
    edges = [0]
    for a, b in zip(ridges, ridges[1:]):
        best = a + 1
        for k in range(a + 1, b):
            if mag[k] < mag[best]:
                best = k
        edges.append(best)
    edges.append(n)
    return ridges, edges


class TestFilterGrid:
    def test_gamma_zero_keeps_everything_nonzero(self, tone32, w128):
        sig, _ = tone32
        grid = tq.stft(sig, w128, 128)
        assert np.all(np.abs(grid.data) > 0)  # tone STFT has no exact zeros
        out = tq.filter_grid(grid, 0.0)
        assert np.array_equal(out.data, grid.data)
        assert out.method_tag == "stft+filtered"

    def test_near_one_keeps_only_the_peak(self):
        grid = make_grid([[1.0, 5.0, 2.0], [0.5, 1.0, 5.0]])
        out = tq.filter_grid(grid, 0.999999)
        assert np.count_nonzero(out.data) == 2
        assert out.data[0, 1] == 5.0 and out.data[1, 2] == 5.0

    def test_fmam_nonzeros_strictly_decrease(self, fmam, w128):
        sig, _ = fmam
        grid = tq.stft(sig, w128, 128)
        out = tq.filter_grid(grid, 0.1)
        assert np.count_nonzero(out.data) < np.count_nonzero(grid.data)

    def test_per_frame_reference_keeps_every_frame_peak(self):
        grid = make_grid([[1.0, 0.1], [100.0, 10.0]])
        global_out = tq.filter_grid(grid, 0.5)
        frame_out = tq.filter_grid(grid, 0.5, per_frame=True)
        assert np.count_nonzero(global_out.data[0]) == 0
        assert np.count_nonzero(frame_out.data[0]) == 1

    @pytest.mark.parametrize("gamma", [-0.1, 1.0, 2.0])
    def test_rejects_bad_gamma(self, gamma, tone32, w128):
        sig, _ = tone32
        grid = tq.stft(sig, w128, 128)
        with pytest.raises(InvalidParameterError):
            tq.filter_grid(grid, gamma)


class TestLocalMaxima:
    def test_single_peak_column(self):
        est = tq.local_maxima(make_grid([[0, 1, 3, 2, 1]]))
        assert est.ridge_bins[0].tolist() == [2]
        assert est.basin_edges[0].tolist() == [0, 5]

    def test_constant_column_has_no_ridge(self):
        est = tq.local_maxima(make_grid([[2, 2, 2, 2]]))
        assert est.ridge_bins[0].size == 0
        assert est.basin_edges[0].tolist() == [0, 4]

    def test_two_ridges_with_tied_minimum(self):
        # minima candidates bins 2 and 3 tie at 1; the lower bin wins
        est = tq.local_maxima(make_grid([[0, 2, 1, 1, 4, 0]]))
        assert est.ridge_bins[0].tolist() == [1, 4]
        assert est.basin_edges[0].tolist() == [0, 2, 6]

    def test_edges_never_ridge(self):
        est = tq.local_maxima(make_grid([[5, 1, 0, 1, 5]]))
        assert est.ridge_bins[0].size == 0

    def test_matches_exhaustive_oracle_on_random_columns(self):
        rng = np.random.default_rng(4)
        formats = [
            rng.random((50, 17)),
            np.round(rng.random((50, 17)) * 4),          # many plateaus and ties
            rng.random((50, 17)) * (rng.random((50, 17)) > 0.4),  # zeros
        ]
        for block in formats:
            est = tq.local_maxima(make_grid(block))
            for n in range(block.shape[0]):
                ridges, edges = ridges_and_edges_oracle(block[n])
                assert est.ridge_bins[n].tolist() == ridges
                assert est.basin_edges[n].tolist() == edges

    def test_partition_invariants(self, fmam, w128):
        sig, _ = fmam
        grid = tq.stft(sig, w128, 128)
        est = tq.local_maxima(grid)
        for n in range(est.n_frames):
            edges = est.basin_edges[n]
            ridges = est.ridge_bins[n]
            assert edges[0] == 0 and edges[-1] == grid.n_bins
            assert np.all(np.diff(edges) > 0)
            assert len(ridges) == len(edges) - 1
            for i, r in enumerate(ridges):
                assert edges[i] <= r < edges[i + 1]
                if i > 0:
                    assert r > edges[i]  # strictly inside, never on the edge

    def test_tone_single_ridge_at_f0(self, tone32, w128):
        sig, _ = tone32
        grid = tq.stft(sig, w128, 128)
        _, est = tq.estimate_ridges(grid, gamma=0.1)
        interior = interior_mask(grid.n_frames, w128)
        for n in np.nonzero(interior)[0]:
            assert est.ridge_bins[n].tolist() == [32]
        assert est.gamma_used == 0.1

    def test_fmam_two_ridges_below_nyquist(self, fmam, w128):
        sig, model = fmam
        half = tq.half_circle(tq.stft(sig, w128, 128))
        _, est = tq.estimate_ridges(half, gamma=0.2)
        interior = interior_mask(half.n_frames, w128)
        assert np.all(est.counts()[interior] == 2)
        assert tq.ridge_mae(est, model, frames=interior) <= 1.0


class TestInjectIf:
    def test_constant_trajectory(self, crossover, w1024):
        sig, _ = crossover
        grid = tq.stft(sig, w1024, 1024)
        est = tq.inject_if(grid, [lambda t: 250.0 * np.ones_like(t)])
        for n in range(est.n_frames):
            assert est.ridge_bins[n].tolist() == [250]

    def test_crossing_trajectories_merge(self, crossover, w1024):
        sig, model = crossover
        grid = tq.stft(sig, w1024, 1024)
        est = tq.inject_if(grid, [m.if_hz for m in model.modes])
        n_cross = int(np.argmin(np.abs(grid.time_axis_s - 0.25)))
        assert est.ridge_bins[n_cross].tolist() == [250]
        n_mid = int(np.argmin(np.abs(grid.time_axis_s - 0.5)))
        assert est.ridge_bins[n_mid].tolist() == [150, 250, 350]

    def test_out_of_range_on_half_circle(self, crossover, w1024):
        sig, _ = crossover
        half = tq.half_circle(tq.stft(sig, w1024, 1024))
        with pytest.raises(IFOutOfRangeError):
            tq.inject_if(half, [lambda t: 600.0 * np.ones_like(t)])

    def test_midpoint_edges(self, crossover, w1024):
        sig, _ = crossover
        grid = tq.stft(sig, w1024, 1024)
        est = tq.inject_if(grid, [lambda t: 100.0 * np.ones_like(t),
                                  lambda t: 105.0 * np.ones_like(t)])
        # midpoint of 100 and 105 is 102.5; the tie resolves to the lower bin
        assert est.basin_edges[0].tolist() == [0, 102, 1024]

    def test_adjacent_ridges_stay_in_own_basins(self, crossover, w1024):
        sig, _ = crossover
        grid = tq.stft(sig, w1024, 1024)
        est = tq.inject_if(grid, [lambda t: 250.0 * np.ones_like(t),
                                  lambda t: 251.0 * np.ones_like(t)])
        edges = est.basin_edges[0]
        ridges = est.ridge_bins[0]
        assert ridges.tolist() == [250, 251]
        assert edges.tolist() == [0, 251, 1024]
        for i, r in enumerate(ridges):
            assert edges[i] <= r < edges[i + 1]


class TestTrajectoryCsv:
    def test_interpolation(self, tmp_path):
        path = tmp_path / "traj.csv"
        path.write_text("time_s,f1_hz,f2_hz\n0.0,100,200\n1.0,110,180\n")
        tracks = tq.load_trajectories_csv(path)
        assert len(tracks) == 2
        assert np.isclose(tracks[0](np.array(0.5)), 105.0)
        assert np.isclose(tracks[1](np.array(0.25)), 195.0)

    def test_clamps_outside_span(self, tmp_path):
        path = tmp_path / "traj.csv"
        path.write_text("0.0,100\n1.0,110\n")
        track = tq.load_trajectories_csv(path)[0]
        assert track(np.array(2.0)) == 110.0

    def test_bad_rows_raise_with_position(self, tmp_path):
        path = tmp_path / "traj.csv"
        path.write_text("0.0,100\n0.5,oops\n")
        with pytest.raises(FormatError, match="line 2"):
            tq.load_trajectories_csv(path)

    def test_column_count_mismatch(self, tmp_path):
        path = tmp_path / "traj.csv"
        path.write_text("0.0,100,200\n0.5,100\n")
        with pytest.raises(FormatError, match="line 2"):
            tq.load_trajectories_csv(path)

    def test_empty_rejected(self, tmp_path):
        path = tmp_path / "traj.csv"
        path.write_text("# nothing\n")
        with pytest.raises(FormatError):
            tq.load_trajectories_csv(path)
