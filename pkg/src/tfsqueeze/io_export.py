"""Deterministic, diffable persistence: grid CSV, PGM heatmaps, JSON reports.

Every writer emits the same bytes for the same input: text is UTF-8 with LF
endings, floats carry 17 significant digits, and nothing embeds timestamps.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import DegenerateGridError, FormatError
from .metrics import MethodReport
from .tfr import TFRGrid

__all__ = ["export_grid_csv", "import_grid_csv", "export_heatmap_pgm",
           "export_report_json"]

_HEADER_KEYS = ("method", "fs", "nfft", "rho", "freq0", "dfreq", "t0", "dt")


def export_grid_csv(grid: TFRGrid, path) -> None:
    """Write a grid as eight '# key=value' header lines plus one row per
    frame of 're+imj' cells. Reading back reproduces every value exactly."""
    header = [
        f"# method={grid.method_tag}",
        f"# fs={grid.source_fs_hz:.17g}",
        f"# nfft={grid.n_bins}",
        f"# rho={grid.rho:.17g}",
        f"# freq0={grid.freq_axis_hz[0]:.17g}",
        f"# dfreq={grid.df_hz:.17g}",
        f"# t0={grid.time_axis_s[0]:.17g}",
        f"# dt={grid.dt_s:.17g}",
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(header) + "\n")
        for row in grid.data:
            fh.write(",".join(f"{c.real:.17g}{c.imag:+.17g}j" for c in row) + "\n")


def import_grid_csv(path) -> TFRGrid:
    """Read a grid written by export_grid_csv."""
    meta: dict[str, str] = {}
    rows: list[np.ndarray] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                key, sep, value = body.partition("=")
                if not sep:
                    raise FormatError(f"{path}: line {lineno}: malformed header {line!r}")
                meta[key.strip()] = value.strip()
                continue
            try:
                row = np.array([complex(cell) for cell in line.split(",")])
            except ValueError:
                raise FormatError(f"{path}: line {lineno}: unparseable cell in row")
            if rows and row.size != rows[0].size:
                raise FormatError(
                    f"{path}: line {lineno}: row has {row.size} cells, "
                    f"expected {rows[0].size}"
                )
            rows.append(row)
    missing = [k for k in _HEADER_KEYS if k not in meta]
    if missing:
        raise FormatError(f"{path}: missing header keys {missing}")
    try:
        fs = float(meta["fs"])
        nfft = int(meta["nfft"])
        rho = float(meta["rho"])
        freq0 = float(meta["freq0"])
        dfreq = float(meta["dfreq"])
        t0 = float(meta["t0"])
        dt = float(meta["dt"])
    except ValueError as exc:
        raise FormatError(f"{path}: bad numeric header: {exc}")
    if not rows:
        raise FormatError(f"{path}: no data rows")
    data = np.vstack(rows)
    if data.shape[1] != nfft:
        raise FormatError(
            f"{path}: rows carry {data.shape[1]} cells but header says nfft={nfft}"
        )
    time_axis = t0 + dt * np.arange(data.shape[0])
    freq_axis = freq0 + dfreq * np.arange(nfft)
    return TFRGrid(data, time_axis, freq_axis, rho, meta["method"], fs)


def export_heatmap_pgm(grid: TFRGrid, path, db_floor: float = -60.0) -> None:
    """Render |G| over [0, fs/2) as a binary 8-bit PGM (P5) image.

    One pixel per (frame, bin); magnitude in dB relative to the grid maximum,
    clipped at db_floor and mapped linearly to 0..255. Row 0 is the highest
    displayed frequency.
    """
    mag = np.abs(grid.data)
    peak = mag.max()
    if peak == 0.0:
        raise DegenerateGridError("cannot render an all-zero grid")
    keep = grid.n_bins // 2
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(mag[:, :keep] / peak)
    db = np.clip(db, db_floor, 0.0)
    pixels = np.rint(255.0 * (db - db_floor) / (-db_floor)).astype(np.uint8)
    image = pixels.T[::-1]  # rows = bins, flipped so top row is highest frequency
    with open(path, "wb") as fh:
        fh.write(f"P5\n{image.shape[1]} {image.shape[0]}\n255\n".encode("ascii"))
        fh.write(image.tobytes())


def export_report_json(reports: list[MethodReport], path) -> None:
    """Write reports as a JSON array with a fixed key order, None as null."""
    payload = [r.as_dict() for r in reports]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, allow_nan=False)
        fh.write("\n")
