"""tfsqueeze: modular high-resolution time-frequency post-processing.

Squeezes the coefficients of an invertible hop-1 STFT onto per-frame ridge
estimates, preserving exact reconstruction, alongside the classic
post-processors (SST, reassignment, SET, LMSST) and the metrics to compare
them.
"""

from .baselines import lmsst, phase_if_map, reassignment, set_extract, sst
from .errors import (
    DegenerateGridError,
    FormatError,
    IFOutOfRangeError,
    InvalidParameterError,
    NoGroundTruthError,
    NonInvertibleGridError,
    ShapeMismatchError,
    TFSqueezeError,
    UnsupportedFormatError,
)
from .io_export import (
    export_grid_csv,
    export_heatmap_pgm,
    export_report_json,
    import_grid_csv,
)
from .metrics import (
    MethodReport,
    framesum_max_dev,
    nonzero_fraction,
    recon_rel_l2,
    renyi_entropy,
    ridge_mae,
)
from .ridges import (
    IFEstimate,
    estimate_ridges,
    filter_grid,
    inject_if,
    load_trajectories_csv,
    local_maxima,
)
from .signals import (
    Mode,
    ModeModel,
    Signal,
    add_noise,
    gen_chirp_surrogate,
    gen_crossover,
    gen_fmam,
    gen_tone,
    ideal_tfr,
    load_signal,
    save_signal_csv,
)
from .squeeze import mode_reconstruct, modular_reassign, reconstruct
from .tfr import TFRGrid, energy, half_circle, istft, stft
from .windows import WindowSpec, gaussian_window, window_response_width

__version__ = "0.1.0"
