"""Plain-text and image writers for fields, spectra and sweep results."""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .fields import ScalarField

FLOAT_FMT = "%.12e"

CONCURRENCE_COLUMNS = ("d_over_a", "b", "C_paper", "C_normalized", "purity_paper", "purity_oracle")
OVERLAP_COLUMNS = ("d_over_a", "b", "imag_residual", "blocked_fraction")
SPECTRUM_COLUMNS = ("basis", "p_or_krho", "l", "re", "im", "abs2")


def _fmt(v) -> str:
    if v is None:
        return "nan"
    if isinstance(v, (str, int, np.integer)):
        return str(v)
    return FLOAT_FMT % v


def write_rows(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with path.open("w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def write_field_csv(path, f: ScalarField) -> Path:
    """One row per sample: ``x_m, y_m, re, im``."""
    g = f.grid
    data = np.column_stack(
        [g.X.ravel(), g.Y.ravel(), f.amplitude.real.ravel(), f.amplitude.imag.ravel()]
    )
    path = Path(path)
    np.savetxt(path, data, fmt=FLOAT_FMT, delimiter=",", header="x_m,y_m,re,im", comments="")
    return path


def read_field_csv(path, grid, wavelength: float) -> ScalarField:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    amp = (data[:, 2] + 1j * data[:, 3]).reshape(grid.shape)
    return ScalarField(grid, amp, wavelength)


def to_gray(image: np.ndarray, lo: float | None = None, hi: float | None = None) -> np.ndarray:
    """Linearly map ``image`` onto ``0..255``; phase maps use ``lo=-pi, hi=pi``."""
    image = np.asarray(image, dtype=float)
    lo = image.min() if lo is None else lo
    hi = image.max() if hi is None else hi
    if hi <= lo:
        return np.zeros(image.shape, dtype=np.uint8)
    scaled = np.clip((image - lo) / (hi - lo), 0.0, 1.0)
    return np.rint(scaled * 255).astype(np.uint8)


def write_pgm(path, image: np.ndarray, lo: float | None = None, hi: float | None = None) -> Path:
    """Binary 8-bit portable graymap; row 0 is the largest y (image orientation)."""
    gray = to_gray(image, lo, hi)[::-1]
    h, w = gray.shape
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(gray).tobytes())
    return path


def read_pgm(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    m = re.match(rb"P5\s+(\d+)\s+(\d+)\s+(\d+)\s", raw)
    if m is None:
        raise ValueError("not a binary PGM file")
    w, h, maxval = (int(v) for v in m.groups())
    if maxval != 255:
        raise ValueError("only 8-bit graymaps are supported")
    return np.frombuffer(raw[m.end() : m.end() + w * h], dtype=np.uint8).reshape(h, w)


def write_manifest(path, payload: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")
    return path
