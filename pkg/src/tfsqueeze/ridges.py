"""Ridge detection and frequency-axis partitioning for IF estimation.

A ridge is a strict local maximum of a frame's magnitude profile. Each frame
gets a partition of its bins into basins, one ridge per basin; the squeeze
step later moves every coefficient to the ridge of the basin it sits in.
External IF trajectories can be injected in place of detected ridges, which
is what makes crossing components tractable.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .errors import FormatError, IFOutOfRangeError, InvalidParameterError
from .tfr import TFRGrid

__all__ = ["IFEstimate", "filter_grid", "local_maxima", "inject_if",
           "estimate_ridges", "load_trajectories_csv"]


@dataclass(frozen=True)
class IFEstimate:
    """Per-frame ridge bins and the basin partition of the frequency axis.

    ridge_bins[n] is a strictly increasing array of bin indices (possibly
    empty); basin_edges[n] starts at 0, ends at n_bins, and carries one
    interior edge between consecutive ridges, so basin i is the half-open
    bin range [edges[i], edges[i+1]) and contains exactly ridge i. A frame
    with no ridge keeps the single basin [0, n_bins) and is left untouched
    by the squeeze step.
    """

    ridge_bins: tuple[np.ndarray, ...]
    basin_edges: tuple[np.ndarray, ...]
    gamma_used: float
    time_axis_s: np.ndarray
    freq_axis_hz: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "ridge_bins", tuple(self.ridge_bins))
        object.__setattr__(self, "basin_edges", tuple(self.basin_edges))

    @property
    def n_frames(self) -> int:
        return len(self.ridge_bins)

    @property
    def n_bins(self) -> int:
        return self.freq_axis_hz.size

    def counts(self) -> np.ndarray:
        """Number of ridges per frame."""
        return np.array([r.size for r in self.ridge_bins])

    def ridge_freqs_hz(self, frame: int) -> np.ndarray:
        return self.freq_axis_hz[self.ridge_bins[frame]]


def filter_grid(grid: TFRGrid, gamma: float, per_frame: bool = False) -> TFRGrid:
    """Zero every cell whose magnitude is not above gamma times the maximum.

    The reference is the global grid maximum; per_frame=True switches to each
    frame's own maximum, which keeps ridges alive in quiet frames at the cost
    of keeping noise there too.
    """
    if not (0.0 <= gamma < 1.0):
        raise InvalidParameterError("gamma must lie in [0, 1)")
    mag = np.abs(grid.data)
    ref = mag.max(axis=1, keepdims=True) if per_frame else mag.max()
    kept = np.where(mag > gamma * ref, grid.data, 0.0)
    return grid.with_data(kept, method_tag=grid.method_tag + "+filtered")


def _basin_edges_from_minima(mag_row: np.ndarray, ridges: np.ndarray,
                             n_bins: int) -> np.ndarray:
    # a ridgeless frame keeps the single basin [0, n_bins)
    edges = np.empty(max(ridges.size, 1) + 1, dtype=np.int64)
    edges[0] = 0
    edges[-1] = n_bins
    for i in range(ridges.size - 1):
        lo, hi = ridges[i] + 1, ridges[i + 1]
        edges[i + 1] = lo + int(np.argmin(mag_row[lo:hi]))
    return edges


def local_maxima(grid: TFRGrid) -> IFEstimate:
    """Detect per-frame ridges as strict interior local maxima of |G|.

    Plateaus yield no ridge and the first and last bins are never ridges.
    Basin boundaries sit at the smallest-magnitude bin strictly between
    consecutive ridges (ties resolve to the lower bin).
    """
    mag = np.abs(grid.data)
    n_frames, n_bins = mag.shape
    is_max = np.zeros(mag.shape, dtype=bool)
    if n_bins >= 3:
        is_max[:, 1:-1] = (mag[:, 1:-1] > mag[:, :-2]) & (mag[:, 1:-1] > mag[:, 2:])
    ridge_bins = []
    basin_edges = []
    for n in range(n_frames):
        ridges = np.nonzero(is_max[n])[0]
        ridge_bins.append(ridges)
        basin_edges.append(_basin_edges_from_minima(mag[n], ridges, n_bins))
    return IFEstimate(tuple(ridge_bins), tuple(basin_edges), gamma_used=0.0,
                      time_axis_s=grid.time_axis_s, freq_axis_hz=grid.freq_axis_hz)


def estimate_ridges(grid: TFRGrid, gamma: float = 0.0,
                    per_frame: bool = False) -> tuple[TFRGrid, IFEstimate]:
    """Filter-then-detect convenience: gamma-filter the grid, find its local
    maxima, and stamp the gamma that was used. Returns both the filtered grid
    and the estimate, which is the pair the squeeze step consumes."""
    filtered = filter_grid(grid, gamma, per_frame)
    est = local_maxima(filtered)
    return filtered, replace(est, gamma_used=gamma)


def inject_if(grid: TFRGrid, trajectories: Sequence[Callable[[np.ndarray], np.ndarray]]
              ) -> IFEstimate:
    """Build an estimate from externally supplied IF trajectories.

    Each trajectory maps time in seconds to frequency in Hz; per frame the
    nearest bins become the ridges (duplicates merge) and basin edges sit at
    the midpoint between consecutive ridges, nudged up when two ridges are
    adjacent so every ridge stays strictly inside its own basin.
    """
    t = grid.time_axis_s
    f = grid.freq_axis_hz
    df = grid.df_hz
    n_bins = grid.n_bins
    if not trajectories:
        raise InvalidParameterError("need at least one trajectory")
    tracks = []
    for traj in trajectories:
        values = np.broadcast_to(np.asarray(traj(t), dtype=float), t.shape)
        if np.any(values < f[0] - df / 2) or np.any(values > f[-1] + df / 2):
            raise IFOutOfRangeError(
                f"trajectory range [{values.min()}, {values.max()}] Hz "
                f"exceeds the frequency axis [{f[0]}, {f[-1]}] Hz"
            )
        tracks.append(np.clip(np.rint((values - f[0]) / df).astype(np.int64),
                              0, n_bins - 1))
    bins_per_frame = np.stack(tracks, axis=1)

    ridge_bins = []
    basin_edges = []
    for n in range(grid.n_frames):
        ridges = np.unique(bins_per_frame[n])
        edges = np.empty(ridges.size + 1, dtype=np.int64)
        edges[0] = 0
        edges[-1] = n_bins
        for i in range(ridges.size - 1):
            edges[i + 1] = max(ridges[i] + 1, (ridges[i] + ridges[i + 1]) // 2)
        ridge_bins.append(ridges)
        basin_edges.append(edges)
    return IFEstimate(tuple(ridge_bins), tuple(basin_edges), gamma_used=0.0,
                      time_axis_s=t, freq_axis_hz=f)


def load_trajectories_csv(path) -> list[Callable[[np.ndarray], np.ndarray]]:
    """Read IF trajectories from CSV columns time_s, f1_hz[, f2_hz, ...].

    Returns one callable per frequency column; lookups interpolate linearly
    between rows and clamp outside the covered time span.
    """
    times: list[float] = []
    rows: list[list[float]] = []
    n_cols = None
    saw_data = False
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if not saw_data and not _is_number(parts[0]):
                continue  # column-name header row
            saw_data = True
            if len(parts) < 2:
                raise FormatError(f"{path}: line {lineno}: need time and >= 1 frequency")
            try:
                values = [float(p) for p in parts]
            except ValueError:
                raise FormatError(f"{path}: line {lineno}: non-numeric cell in {line!r}")
            if n_cols is None:
                n_cols = len(values)
            elif len(values) != n_cols:
                raise FormatError(f"{path}: line {lineno}: expected {n_cols} columns")
            times.append(values[0])
            rows.append(values[1:])
    if not rows:
        raise FormatError(f"{path}: no trajectory rows")
    t = np.array(times)
    table = np.array(rows)
    order = np.argsort(t)
    t = t[order]
    table = table[order]

    def make(column: np.ndarray):
        return lambda tt: np.interp(tt, t, column)

    return [make(table[:, j].copy()) for j in range(table.shape[1])]


def _is_number(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False
