"""Paraxial angular-spectrum propagation."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .fields import ScalarField, TransverseGrid

log = logging.getLogger(__name__)

EDGE_WARN_RATIO = 1e-8


class EdgeIntensityWarning(RuntimeWarning):
    """Propagated power reaches the window edge; periodic wrap-around may bias results."""


@dataclass(frozen=True, eq=False)
class TransferFunction:
    """``T(kx, ky, z) = exp(i k z - i (kx^2 + ky^2) z / 2k)`` in FFT order."""

    values: np.ndarray
    z: float
    k: float

    @classmethod
    def build(cls, grid: TransverseGrid, z: float, wavelength: float) -> "TransferFunction":
        k = 2 * np.pi / wavelength
        values = np.exp(1j * (k * z - grid.k_squared * (z / (2 * k))))
        values.setflags(write=False)
        return cls(values, z, k)


def edge_ratio(f: ScalarField) -> float:
    """Peak intensity on the outermost grid frame relative to the field peak."""
    I = f.intensity
    peak = I.max()
    if peak == 0:
        return 0.0
    edge = max(I[0, :].max(), I[-1, :].max(), I[:, 0].max(), I[:, -1].max())
    return float(edge / peak)


def propagate(f: ScalarField, z: float, check_edges: bool = True) -> ScalarField:
    """Propagate ``f`` by ``z`` meters with ``F^-1{ T * F[f] }``.

    The transform pair is unitary on the grid, so norms and inner products
    are preserved to rounding error.
    """
    if z < 0:
        raise ValueError("propagation distance must be non-negative")
    if z == 0:
        return f
    T = TransferFunction.build(f.grid, z, f.wavelength)
    out = np.fft.ifft2(T.values * np.fft.fft2(f.amplitude))
    result = ScalarField(f.grid, out, f.wavelength, normalized=f.normalized)
    if check_edges:
        ratio = edge_ratio(result)
        if ratio > EDGE_WARN_RATIO:
            warnings.warn(
                f"edge intensity {ratio:.2e} of peak after z={z} m; enlarge the window",
                EdgeIntensityWarning,
                stacklevel=2,
            )
    return result
