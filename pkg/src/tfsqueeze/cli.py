"""Command-line front end: generate signals, run methods, compare, reconstruct.

Exit codes are stable for scripting: 0 success, 2 configuration error,
3 I/O or parse error, 4 semantic error (reconstruction from a
non-invertible grid).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import baselines, metrics, ridges, signals, squeeze, tfr, windows
from .errors import (
    FormatError,
    IFOutOfRangeError,
    InvalidParameterError,
    NonInvertibleGridError,
    NoGroundTruthError,
    TFSqueezeError,
    UnsupportedFormatError,
)
from .io_export import (
    export_grid_csv,
    export_heatmap_pgm,
    export_report_json,
    import_grid_csv,
)

METHODS = ("stft", "sst", "rm", "set", "lmsst", "proposed")
GENERATORS = ("fmam", "crossover", "chirp", "tone")


@dataclass
class RunConfig:
    """Validated knobs for one analysis run."""

    method: str
    input: str
    sigma_s: float | None
    nfft: int | None
    gamma: float
    delta_bins: int | None
    seed: int
    snr_db: float | None
    output_dir: Path
    per_frame_max: bool = False
    if_from: Path | None = None


def _resolve_input(name: str, seed: int, snr_db: float | None, opts
                   ) -> tuple[signals.Signal, signals.ModeModel | None]:
    if name == "fmam":
        sig, model = signals.gen_fmam()
    elif name == "crossover":
        sig, model = signals.gen_crossover()
    elif name == "chirp":
        fs = opts.fs if opts.fs is not None else 1024.0
        sig, model = signals.gen_chirp_surrogate(
            opts.f_start, opts.f_end, opts.power, fs, opts.dur)
    elif name == "tone":
        fs = opts.fs if opts.fs is not None else 128.0
        sig, model = signals.gen_tone(opts.f0, fs, opts.dur)
    else:
        sig, model = signals.load_signal(name), None
    if snr_db is not None:
        sig = signals.add_noise(sig, snr_db, seed)
    return sig, model


def _default_sigma(fs_hz: float) -> float:
    # 0.04 s suits the 128 Hz experiment, 0.02 s the 1024 Hz ones; wider
    # windows split ridges at IF turning points on the 128 Hz signal
    return 0.04 if fs_hz <= 256.0 else 0.02


def _default_nfft(n_samples: int) -> int:
    return min(4096, 1 << int(np.ceil(np.log2(max(2, n_samples)))))


# hop-1 grids are dense (n_samples x nfft complex): cap the cell count so a
# long recording fails fast instead of exhausting memory
MAX_GRID_CELLS = 1 << 27


def _prepare(cfg: RunConfig, sig: signals.Signal
             ) -> tuple[windows.WindowSpec, int]:
    sigma = cfg.sigma_s if cfg.sigma_s is not None else _default_sigma(sig.sample_rate_hz)
    nfft = cfg.nfft if cfg.nfft is not None else _default_nfft(len(sig))
    w = windows.gaussian_window(sigma, sig.sample_rate_hz)
    if nfft < len(w):
        raise InvalidParameterError(
            f"nfft={nfft} is smaller than the window length {len(w)}; "
            "raise --nfft or lower --sigma"
        )
    if len(sig) * nfft > MAX_GRID_CELLS:
        raise InvalidParameterError(
            f"grid of {len(sig)} frames x {nfft} bins exceeds the "
            f"{MAX_GRID_CELLS} cell budget; analyze a shorter slice or lower --nfft"
        )
    return w, nfft


def _run_method(method: str, sig: signals.Signal, w: windows.WindowSpec,
                nfft: int, cfg: RunConfig
                ) -> tuple[tfr.TFRGrid, tfr.TFRGrid, ridges.IFEstimate | None]:
    """Returns (reallocated input grid, method output grid, proposed's estimate).

    The first grid is the one the method actually moved mass from (the
    gamma-filtered grid for 'proposed'), which is the right reference for
    the conservation metric.
    """
    base = tfr.stft(sig, w, nfft)
    if method == "stft":
        return base, base, None
    if method == "sst":
        return base, baselines.sst(sig, w, nfft), None
    if method == "rm":
        return base, baselines.reassignment(sig, w, nfft), None
    if method == "set":
        return base, baselines.set_extract(sig, w, nfft), None
    if method == "lmsst":
        return base, baselines.lmsst(sig, w, nfft, cfg.delta_bins), None
    if method == "proposed":
        filtered, est = ridges.estimate_ridges(base, cfg.gamma, cfg.per_frame_max)
        if cfg.if_from is not None:
            est = ridges.inject_if(filtered, ridges.load_trajectories_csv(cfg.if_from))
        return filtered, squeeze.modular_reassign(filtered, est), est
    raise InvalidParameterError(f"unknown method {method!r}")


def _interior_mask(n_frames: int, half: int) -> np.ndarray:
    mask = np.zeros(n_frames, dtype=bool)
    mask[half:n_frames - half] = True
    return mask


def _build_report(method: str, base: tfr.TFRGrid, out: tfr.TFRGrid,
                  sig: signals.Signal, model: signals.ModeModel | None,
                  w: windows.WindowSpec, cfg: RunConfig) -> metrics.MethodReport:
    recon = None
    if out.invertible:
        recon = metrics.recon_rel_l2(sig, tfr.istft(out))
    mae = None
    if model is not None:
        view = tfr.half_circle(out) if sig.is_real else out
        _, est = ridges.estimate_ridges(view, cfg.gamma)
        try:
            mae = metrics.ridge_mae(est, model,
                                    frames=_interior_mask(out.n_frames, w.half))
        except NoGroundTruthError:
            mae = None
    return metrics.MethodReport(
        method_tag=out.method_tag,
        renyi_entropy_bits=metrics.renyi_entropy(out),
        nonzero_fraction=metrics.nonzero_fraction(out),
        recon_rel_l2=recon,
        ridge_mae_bins=mae,
        framesum_max_dev=metrics.framesum_max_dev(base, out),
    )


def _write_trajectory_csv(model: signals.ModeModel, times: np.ndarray, path) -> None:
    table = model.if_matrix_hz(times)
    header = "time_s," + ",".join(f"f{i + 1}_hz" for i in range(len(model)))
    lines = [header]
    for j, t in enumerate(times):
        lines.append(f"{t:.17g}," + ",".join(f"{v:.17g}" for v in table[:, j]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_ridge_csv(est: ridges.IFEstimate, path) -> None:
    width = max((r.size for r in est.ridge_bins), default=0)
    header = "time_s," + ",".join(f"f{i + 1}_hz" for i in range(width))
    lines = [header]
    for n, t in enumerate(est.time_axis_s):
        freqs = [f"{f:.17g}" for f in est.freq_axis_hz[est.ridge_bins[n]]]
        freqs.extend([""] * (width - len(freqs)))
        lines.append(f"{t:.17g}," + ",".join(freqs))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def cmd_generate(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    sig, model = _resolve_input(args.generator, args.seed, args.snr_db, args)
    signals.save_signal_csv(sig, out_dir / "signal.csv")
    if model is not None:
        _write_trajectory_csv(model, sig.times_s, out_dir / "true_if.csv")
    return 0


def _config_from_args(args, method: str) -> RunConfig:
    return RunConfig(
        method=method,
        input=args.input,
        sigma_s=args.sigma,
        nfft=args.nfft,
        gamma=args.gamma,
        delta_bins=args.delta_bins,
        seed=args.seed,
        snr_db=args.snr_db,
        output_dir=Path(args.out),
        per_frame_max=args.per_frame_max,
        if_from=Path(args.if_from) if args.if_from else None,
    )


def cmd_analyze(args) -> int:
    cfg = _config_from_args(args, args.method)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    sig, model = _resolve_input(cfg.input, cfg.seed, cfg.snr_db, args)
    w, nfft = _prepare(cfg, sig)
    base, out, est = _run_method(cfg.method, sig, w, nfft, cfg)

    export_grid_csv(out, cfg.output_dir / "grid.csv")
    export_heatmap_pgm(out, cfg.output_dir / "heatmap.pgm")
    report = _build_report(cfg.method, base, out, sig, model, w, cfg)
    export_report_json([report], cfg.output_dir / "report.json")
    if est is not None:
        _write_ridge_csv(est, cfg.output_dir / "ridges.csv")
    if args.reconstruct:
        recovered = squeeze.reconstruct(out)  # raises on non-invertible grids
        signals.save_signal_csv(recovered, cfg.output_dir / "recovered.csv")
        print(f"recon_rel_l2={metrics.recon_rel_l2(sig, recovered):.17g}")
    return 0


def cmd_compare(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise InvalidParameterError(f"unknown methods {unknown}; choose from {METHODS}")
    if len(methods) < 2:
        raise InvalidParameterError("compare needs at least two methods")
    cfg = _config_from_args(args, methods[0])
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    sig, model = _resolve_input(cfg.input, cfg.seed, cfg.snr_db, args)
    w, nfft = _prepare(cfg, sig)

    reports = []
    for method in methods:
        cfg.method = method
        base, out, _ = _run_method(method, sig, w, nfft, cfg)
        reports.append(_build_report(method, base, out, sig, model, w, cfg))
        export_heatmap_pgm(out, cfg.output_dir / f"heatmap_{method}.pgm")
    reports.sort(key=lambda r: r.renyi_entropy_bits)
    export_report_json(reports, cfg.output_dir / "report.json")
    return 0


def cmd_reconstruct(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    grid = import_grid_csv(args.grid)
    reference = signals.load_signal(args.reference) if args.reference else None

    if args.mode_track:
        tracks = ridges.load_trajectories_csv(args.mode_track)
        for i, track in enumerate(tracks, start=1):
            mode = squeeze.mode_reconstruct(grid, track, args.gamma_band)
            signals.save_signal_csv(mode, out_dir / f"mode_{i}.csv")
        return 0

    recovered = squeeze.reconstruct(grid)
    signals.save_signal_csv(recovered, out_dir / "recovered.csv")
    if reference is not None:
        print(f"recon_rel_l2={metrics.recon_rel_l2(reference, recovered):.17g}")
    return 0


def _add_input_options(p: argparse.ArgumentParser):
    p.add_argument("--input", default="fmam",
                   help="generator name (fmam, crossover, chirp, tone) or a CSV/WAV path")
    p.add_argument("--sigma", type=float, default=None,
                   help="window width in seconds (default 0.04 below 256 Hz, else 0.02)")
    p.add_argument("--nfft", type=int, default=None,
                   help="DFT size (default: next power of two covering the signal)")
    p.add_argument("--gamma", type=float, default=0.1,
                   help="magnitude filter threshold, fraction of the grid maximum")
    p.add_argument("--delta-bins", type=int, default=None,
                   help="LMSST search half width in bins (default: window -3 dB half width)")
    p.add_argument("--snr-db", type=float, default=None,
                   help="add white Gaussian noise at this SNR")
    p.add_argument("--seed", type=int, default=0, help="noise seed")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--if-from", default=None,
                   help="CSV of external IF trajectories to inject (proposed method)")
    p.add_argument("--per-frame-max", action="store_true",
                   help="gamma filter relative to each frame's own maximum")
    _add_generator_options(p)


def _add_generator_options(p: argparse.ArgumentParser):
    p.add_argument("--f0", type=float, default=32.0, help="tone frequency (Hz)")
    p.add_argument("--fs", type=float, default=None,
                   help="tone/chirp sample rate (Hz; default 128 tone, 1024 chirp)")
    p.add_argument("--dur", type=float, default=1.0, help="tone/chirp duration (s)")
    p.add_argument("--f-start", type=float, default=30.0, help="chirp start frequency (Hz)")
    p.add_argument("--f-end", type=float, default=400.0, help="chirp end frequency (Hz)")
    p.add_argument("--power", type=float, default=3.0, help="chirp sweep exponent")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tfsqueeze",
        description="Time-frequency post-processing: ridge-squeezed STFT and baselines",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="write a synthetic signal and its true IFs")
    p_gen.add_argument("generator", choices=GENERATORS)
    p_gen.add_argument("--snr-db", type=float, default=None)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", default="out")
    _add_generator_options(p_gen)
    p_gen.set_defaults(func=cmd_generate)

    p_an = sub.add_parser("analyze", help="run one method and export its grid")
    p_an.add_argument("--method", choices=METHODS, default="proposed")
    p_an.add_argument("--reconstruct", action="store_true",
                      help="also invert the output grid back to a signal")
    _add_input_options(p_an)
    p_an.set_defaults(func=cmd_analyze)

    p_cmp = sub.add_parser("compare", help="run several methods on one input")
    p_cmp.add_argument("--methods", default=",".join(METHODS),
                       help="comma-separated method list")
    _add_input_options(p_cmp)
    p_cmp.set_defaults(func=cmd_compare)

    p_rec = sub.add_parser("reconstruct", help="invert an exported grid CSV")
    p_rec.add_argument("grid", help="grid CSV produced by analyze")
    p_rec.add_argument("--reference", default=None,
                       help="signal CSV to compute the reconstruction error against")
    p_rec.add_argument("--mode-track", default=None,
                       help="trajectory CSV; reconstruct one mode per column")
    p_rec.add_argument("--gamma-band", type=float, default=3.0,
                       help="half width in Hz of the per-mode band")
    p_rec.add_argument("--out", default="out")
    p_rec.set_defaults(func=cmd_reconstruct)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except NonInvertibleGridError as exc:
        print(f"error: non-invertible: {exc}", file=sys.stderr)
        return 4
    except (FormatError, UnsupportedFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (InvalidParameterError, IFOutOfRangeError, TFSqueezeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry():
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    entry()
