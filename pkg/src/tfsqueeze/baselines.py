"""Reference post-processors: SST, reassignment, SET, and LMSST.

All four start from the same hop-1 STFT. SST, SET and LMSST move (or keep)
complex coefficients along the frequency axis only; the reassignment method
moves spectrogram energy in both time and frequency and therefore cannot be
inverted, which its grid records with a NaN reconstruction factor.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidParameterError
from .signals import Signal
from .tfr import TFRGrid, frame_matrix, stft
from .windows import WindowSpec, halfwidth_bins

__all__ = ["phase_if_map", "group_delay_map", "sst", "reassignment",
           "set_extract", "lmsst", "SIGNIFICANCE_FLOOR"]

# Coefficients below this fraction of the grid's peak magnitude have no
# usable phase; they are left in place (conservative methods) or dropped (SET).
SIGNIFICANCE_FLOOR = 1e-8


def phase_if_map(sig: Signal, w: WindowSpec, nfft: int
                 ) -> tuple[TFRGrid, np.ndarray, np.ndarray]:
    """STFT plus its phase-derived IF estimate.

    Returns (grid, f_hat_hz, significant). f_hat[n, k] is the frequency the
    coefficient at bin k belongs to, obtained from the derivative-window
    transform: f_hat = f_k - Im(V_dg / V) / (2*pi). Where the magnitude is
    below the significance floor, f_hat falls back to the bin's own
    frequency and significant is False.
    """
    grid = stft(sig, w, nfft)
    v_d = frame_matrix(sig, w.d_values, nfft)
    mag = np.abs(grid.data)
    significant = mag > SIGNIFICANCE_FLOOR * mag.max()
    f_hat = np.broadcast_to(grid.freq_axis_hz, grid.data.shape).copy()
    with np.errstate(divide="ignore", invalid="ignore"):
        shift = np.imag(v_d / grid.data) / (2.0 * np.pi)
    f_hat[significant] -= shift[significant]
    return grid, f_hat, significant


def group_delay_map(sig: Signal, w: WindowSpec, nfft: int, grid: TFRGrid,
                    significant: np.ndarray) -> np.ndarray:
    """Reassigned time t_hat = t + Re(V_tg / V), in seconds.

    Falls back to the frame's own time where the coefficient is below the
    significance floor.
    """
    v_t = frame_matrix(sig, w.t_values, nfft)
    t_hat = np.broadcast_to(grid.time_axis_s[:, None], grid.data.shape).copy()
    with np.errstate(divide="ignore", invalid="ignore"):
        shift = np.real(v_t / grid.data)
    t_hat[significant] += shift[significant]
    return t_hat


def _freq_bins(f_hat: np.ndarray, grid: TFRGrid) -> np.ndarray:
    """Nearest DFT bin to each estimated frequency, wrapped on the circle."""
    return np.rint(f_hat / grid.df_hz).astype(np.int64) % grid.n_bins


def _scatter_complex(values: np.ndarray, rows: np.ndarray, cols: np.ndarray,
                     shape: tuple[int, int]) -> np.ndarray:
    flat = rows * shape[1] + cols
    acc_re = np.bincount(flat, weights=values.real, minlength=shape[0] * shape[1])
    acc_im = np.bincount(flat, weights=values.imag, minlength=shape[0] * shape[1])
    return (acc_re + 1j * acc_im).reshape(shape)


def sst(sig: Signal, w: WindowSpec, nfft: int) -> TFRGrid:
    """Synchrosqueezing: add each significant coefficient into the bin
    nearest its phase-derived IF. Frame sums are conserved, so the result
    reconstructs exactly through istft."""
    grid, f_hat, significant = phase_if_map(sig, w, nfft)
    target = _freq_bins(f_hat, grid)
    rows, cols = np.nonzero(significant)
    out = np.where(significant, 0.0, grid.data)
    out = out + _scatter_complex(grid.data[rows, cols], rows, target[rows, cols],
                                 grid.data.shape)
    return grid.with_data(out, method_tag="sst")


def reassignment(sig: Signal, w: WindowSpec, nfft: int) -> TFRGrid:
    """Classic two-dimensional reassignment of spectrogram energy |V|^2.

    Energy moves to (t + Re(V_tg/V), IF estimate); time targets clamp to the
    grid, frequency targets wrap on the DFT circle. Total energy is
    conserved, invertibility is not: rho is NaN and istft refuses the grid.
    """
    grid, f_hat, significant = phase_if_map(sig, w, nfft)
    t_hat = group_delay_map(sig, w, nfft, grid, significant)
    t0 = float(grid.time_axis_s[0])
    frame_target = np.clip(
        np.rint((t_hat - t0) * grid.source_fs_hz).astype(np.int64),
        0, grid.n_frames - 1,
    )
    bin_target = _freq_bins(f_hat, grid)
    power = np.abs(grid.data) ** 2
    flat = frame_target.ravel() * grid.n_bins + bin_target.ravel()
    out = np.bincount(flat, weights=power.ravel(),
                      minlength=grid.n_frames * grid.n_bins)
    out = out.reshape(grid.data.shape).astype(np.complex128)
    return grid.with_data(out, method_tag="rm", rho=float("nan"))


def set_extract(sig: Signal, w: WindowSpec, nfft: int) -> TFRGrid:
    """Synchroextracting: keep a coefficient only when its IF estimate rounds
    back onto its own bin; everything else, including the insignificant
    floor, is discarded. Sharp but deliberately lossy."""
    grid, f_hat, significant = phase_if_map(sig, w, nfft)
    target = _freq_bins(f_hat, grid)
    own = np.arange(grid.n_bins)[None, :]
    keep = significant & (target == own)
    return grid.with_data(np.where(keep, grid.data, 0.0), method_tag="set")


def lmsst(sig: Signal, w: WindowSpec, nfft: int,
          delta_bins: int | None = None) -> TFRGrid:
    """Local-maximum squeezing: each coefficient moves to the largest-magnitude
    bin within delta_bins of its own. Ties pick the lower bin. The move is a
    frequency-only permutation of frame mass, so reconstruction stays exact.

    delta_bins defaults to the window's measured -3 dB half width in bins.
    """
    grid = stft(sig, w, nfft)
    if delta_bins is None:
        delta_bins = halfwidth_bins(w, sig.sample_rate_hz, nfft)
    if delta_bins < 0:
        raise InvalidParameterError("delta_bins must be >= 0")
    if delta_bins == 0:
        return grid.with_data(grid.data.copy(), method_tag="lmsst")

    mag = np.abs(grid.data)
    n_frames, n_bins = mag.shape
    bins = np.arange(n_bins)
    best_val = np.full(mag.shape, -1.0)
    best_idx = np.zeros(mag.shape, dtype=np.int64)
    # scan candidates in ascending bin order; strict > keeps the lowest tie
    for d in range(-delta_bins, delta_bins + 1):
        lo = max(0, -d)
        hi = min(n_bins, n_bins - d)
        cand = mag[:, lo + d : hi + d]
        view_val = best_val[:, lo:hi]
        view_idx = best_idx[:, lo:hi]
        better = cand > view_val
        view_val[better] = cand[better]
        view_idx[better] = np.broadcast_to(bins[lo + d : hi + d], cand.shape)[better]

    rows = np.repeat(np.arange(n_frames), n_bins)
    out = _scatter_complex(grid.data.ravel(), rows, best_idx.ravel(), mag.shape)
    return grid.with_data(out, method_tag="lmsst")
