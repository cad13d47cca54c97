"""CSV and SVG output.

Floats are written with 17 significant digits so values round-trip exactly.
SVG trajectory plots are plain polylines coloured along a linear ramp in ``t``.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from rmtlab.errors import IoFailure

TRAJECTORY_HEADER = ("model", "trial", "t", "path_index", "re", "im")
SPECTRUM_HEADER = ("model", "trial", "t", "re", "im")
OVERLAP_HEADER = ("trial", "index", "re_lambda", "im_lambda", "overlap_diag")
ZEROS_HEADER = ("trial", "c_re", "c_im", "re", "im")


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def ensure_dir(path) -> Path:
    p = Path(path)
    try:
        p.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(p, str(exc)) from exc
    return p


def write_rows(path, header, rows) -> Path:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise IoFailure(path, str(exc)) from exc
    return path


def trajectory_rows(model: str, trial: int, grid, paths):
    for k, t in enumerate(grid):
        for j in range(paths.shape[0]):
            z = paths[j, k]
            yield (model, trial, fmt(t), j, fmt(z.real), fmt(z.imag))


def spectrum_rows(model: str, trial: int, t: float, spectrum):
    for z in np.asarray(spectrum, dtype=complex):
        yield (model, trial, fmt(t), fmt(z.real), fmt(z.imag))


def overlap_rows(trial: int, values, diag):
    for i, (z, o) in enumerate(zip(values, diag)):
        yield (trial, i, fmt(z.real), fmt(z.imag), fmt(o))


def zero_rows(trial: int, c: complex, zeros):
    for z in zeros:
        yield (trial, fmt(c.real), fmt(c.imag), fmt(z.real), fmt(z.imag))


def write_trajectories(path, records) -> Path:
    """``records`` is an iterable of ``(model, trial, grid, paths)``."""
    rows = (r for rec in records for r in trajectory_rows(*rec))
    return write_rows(path, TRAJECTORY_HEADER, rows)


def write_spectra(path, records) -> Path:
    """``records`` is an iterable of ``(model, trial, t, spectrum)``."""
    rows = (r for rec in records for r in spectrum_rows(*rec))
    return write_rows(path, SPECTRUM_HEADER, rows)


def write_overlaps(path, records) -> Path:
    """``records`` is an iterable of ``(trial, eigenvalues, diagonal overlaps)``."""
    rows = (r for rec in records for r in overlap_rows(*rec))
    return write_rows(path, OVERLAP_HEADER, rows)


def write_zeros(path, records) -> Path:
    """``records`` is an iterable of ``(trial, c, zeros)``."""
    rows = (r for rec in records for r in zero_rows(*rec))
    return write_rows(path, ZEROS_HEADER, rows)


def read_csv(path) -> list[dict]:
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            return list(csv.DictReader(fh))
    except OSError as exc:
        raise IoFailure(path, str(exc)) from exc


def _ramp(s: float) -> str:
    # blue -> magenta -> orange
    stops = np.array([[33, 102, 172], [178, 24, 137], [244, 165, 30]], dtype=float)
    s = min(max(s, 0.0), 1.0) * (len(stops) - 1)
    i = min(int(s), len(stops) - 2)
    rgb = stops[i] + (s - i) * (stops[i + 1] - stops[i])
    return "#{:02x}{:02x}{:02x}".format(*np.round(rgb).astype(int))


def trajectory_svg(grid, paths, size: int = 640, title: str = "", clip: float | None = None) -> str:
    """Render eigenvalue paths as SVG.

    Each path is split into short segments whose colour follows ``t``
    linearly from the first to the last grid point. ``clip`` bounds the plotted
    window to ``|Re|, |Im| <= clip`` (points outside are dropped).
    """
    grid = np.asarray(grid, dtype=float)
    paths = np.asarray(paths, dtype=complex)
    pts = paths.reshape(-1)
    if clip is not None:
        pts = pts[(np.abs(pts.real) <= clip) & (np.abs(pts.imag) <= clip)]
    if pts.size == 0:
        pts = np.zeros(1, dtype=complex)
    lo_x, hi_x = pts.real.min(), pts.real.max()
    lo_y, hi_y = pts.imag.min(), pts.imag.max()
    span = max(hi_x - lo_x, hi_y - lo_y, 1e-12)
    pad = 0.05 * span
    scale = (size - 20) / (span + 2 * pad)

    def xy(z):
        return (10 + (z.real - lo_x + pad) * scale, size - 10 - (z.imag - lo_y + pad) * scale)

    t0, t1 = grid[0], grid[-1]
    denom = (t1 - t0) if t1 != t0 else 1.0
    segments = max(1, min(64, grid.shape[0] - 1))
    cuts = np.linspace(0, grid.shape[0] - 1, segments + 1).round().astype(int)
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    if title:
        lines.append(f'<title>{title}</title>')
    for j in range(paths.shape[0]):
        for a, b in zip(cuts[:-1], cuts[1:]):
            seg = paths[j, a : b + 1]
            if clip is not None:
                keep = (np.abs(seg.real) <= clip) & (np.abs(seg.imag) <= clip)
                if keep.sum() < 2:
                    continue
                seg = seg[keep]
            colour = _ramp((0.5 * (grid[a] + grid[b]) - t0) / denom)
            coords = " ".join("{:.2f},{:.2f}".format(*xy(z)) for z in seg)
            lines.append(
                f'<polyline points="{coords}" fill="none" stroke="{colour}" stroke-width="1"/>'
            )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_svg(path, text: str) -> Path:
    path = Path(path)
    try:
        path.write_text(text)
    except OSError as exc:
        raise IoFailure(path, str(exc)) from exc
    return path
