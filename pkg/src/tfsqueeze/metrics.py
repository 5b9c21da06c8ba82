"""Concentration, accuracy, and conservation metrics for method comparison."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateGridError,
    InvalidParameterError,
    NoGroundTruthError,
    ShapeMismatchError,
)
from .ridges import IFEstimate
from .signals import ModeModel, Signal
from .tfr import TFRGrid

__all__ = ["MethodReport", "renyi_entropy", "ridge_mae", "recon_rel_l2",
           "framesum_max_dev", "nonzero_fraction"]


@dataclass(frozen=True)
class MethodReport:
    """Summary numbers for one method run. None marks a metric that does not
    apply (no reconstruction factor, or no ground truth)."""

    method_tag: str
    renyi_entropy_bits: float
    nonzero_fraction: float
    recon_rel_l2: float | None
    ridge_mae_bins: float | None
    framesum_max_dev: float

    FIELD_ORDER = ("method_tag", "renyi_entropy_bits", "nonzero_fraction",
                   "recon_rel_l2", "ridge_mae_bins", "framesum_max_dev")

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.FIELD_ORDER}


def renyi_entropy(grid: TFRGrid, alpha: float = 3.0) -> float:
    """Renyi entropy in bits of the grid's energy distribution.

    P = |G|^2 / sum|G|^2 and H = log2(sum P^alpha) / (1 - alpha); lower
    means more concentrated. alpha=3 is the usual time-frequency choice.
    """
    if alpha <= 0 or alpha == 1.0:
        raise InvalidParameterError("alpha must be positive and != 1")
    p = np.abs(grid.data.ravel()) ** 2
    total = p.sum()
    if total == 0.0:
        raise DegenerateGridError("cannot measure entropy of an all-zero grid")
    p = p / total
    return float(np.log2(np.sum(p**alpha)) / (1.0 - alpha))


def nonzero_fraction(grid: TFRGrid) -> float:
    """Fraction of grid cells holding a nonzero coefficient."""
    return float(np.count_nonzero(grid.data) / grid.data.size)


def ridge_mae(ifest: IFEstimate, model: ModeModel,
              frames: np.ndarray | None = None) -> float:
    """Mean absolute gap, in bins, between detected ridges and true IFs.

    Only frames whose ridge count equals the number of modes contribute;
    each true IF is matched to its nearest detected ridge. ``frames`` may
    restrict the evaluation (boolean mask or index array), e.g. to interior
    frames. Raises when no frame qualifies.
    """
    if len(model) == 0:
        raise NoGroundTruthError("mode model has no components")
    t = ifest.time_axis_s
    f0 = float(ifest.freq_axis_hz[0])
    df = float(ifest.freq_axis_hz[1] - ifest.freq_axis_hz[0])
    true_bins = (model.if_matrix_hz(t) - f0) / df  # (n_modes, n_frames), fractional

    selected = np.arange(ifest.n_frames) if frames is None else np.arange(ifest.n_frames)[frames]
    errors = []
    for n in selected:
        ridges = ifest.ridge_bins[n]
        if ridges.size != len(model):
            continue
        for truth in true_bins[:, n]:
            nearest = ridges[np.argmin(np.abs(ridges - truth))]
            errors.append(abs(float(nearest) - truth))
    if not errors:
        raise NoGroundTruthError("no frame has a ridge count matching the mode count")
    return float(np.mean(errors))


def recon_rel_l2(original: Signal, recovered: Signal) -> float:
    """Relative L2 reconstruction error ||orig - rec|| / ||orig||."""
    if len(original) != len(recovered):
        raise ShapeMismatchError(
            f"signal lengths differ: {len(original)} vs {len(recovered)}"
        )
    if original.sample_rate_hz != recovered.sample_rate_hz:
        raise ShapeMismatchError("sample rates differ")
    denom = float(np.linalg.norm(original.samples))
    if denom == 0.0:
        raise InvalidParameterError("original signal is identically zero")
    return float(np.linalg.norm(original.samples - recovered.samples) / denom)


def framesum_max_dev(g_in: TFRGrid, g_out: TFRGrid) -> float:
    """Worst-frame relative deviation between input and output frame sums.

    Zero (to rounding) certifies that a post-processor conserved per-frame
    mass and therefore reconstructs exactly.
    """
    if g_in.n_frames != g_out.n_frames:
        raise ShapeMismatchError(
            f"frame counts differ: {g_in.n_frames} vs {g_out.n_frames}"
        )
    sums_in = g_in.data.sum(axis=1)
    sums_out = g_out.data.sum(axis=1)
    scale = float(np.max(np.abs(sums_in))) + 1e-30
    return float(np.max(np.abs(sums_out - sums_in)) / scale)
