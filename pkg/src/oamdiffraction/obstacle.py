"""Opaque circular screens and the modified Kirchhoff boundary condition."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np

from .fields import BlockedFieldError, ScalarField, TransverseGrid, normalize

log = logging.getLogger(__name__)

# exp(-s) is exactly 0.0 in float64 for s > ~745; beyond this the smooth
# transmission equals 1.0 bit-for-bit and need not be evaluated.
_EXP_UNDERFLOW = 800.0


@dataclass(frozen=True)
class ObstacleSpec:
    """Circular screen of radius ``radius`` centered at ``(displacement, 0)``."""

    radius: float
    displacement: float = 0.0
    order: int = 12
    edge: Literal["smooth", "hard"] = "smooth"

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("obstacle radius must be positive")
        if int(self.order) != self.order or self.order < 1:
            raise ValueError("super-Gaussian order must be a positive integer")
        if self.edge not in ("smooth", "hard"):
            raise ValueError(f"unknown edge type {self.edge!r}")

    def displaced(self, d: float) -> "ObstacleSpec":
        return ObstacleSpec(self.radius, d, self.order, self.edge)


class ObstacleResult(NamedTuple):
    field: ScalarField
    blocked_fraction: float


def _bounding_slices(grid: TransverseGrid, cx: float, half: float):
    """Index slices of the grid samples within ``half`` of ``(cx, 0)``."""
    ix = np.searchsorted(grid.x, [cx - half, cx + half])
    iy = np.searchsorted(grid.y, [-half, half])
    return slice(max(iy[0] - 1, 0), iy[1] + 1), slice(max(ix[0] - 1, 0), ix[1] + 1)


def transmission(grid: TransverseGrid, obstacle: ObstacleSpec) -> np.ndarray:
    """Real transmission map of the screen on ``grid``.

    Smooth edge: ``1 - exp(-[((x-d)^2 + y^2)/a^2]^m)``.
    Hard edge: Heaviside of ``(x-d)^2 + y^2 - a^2`` (samples on the rim transmit).
    """
    a, d, m = obstacle.radius, obstacle.displacement, int(obstacle.order)
    t = np.ones(grid.shape)
    if obstacle.edge == "hard":
        reach = a
    else:
        reach = a * _EXP_UNDERFLOW ** (1.0 / (2 * m))
    sy, sx = _bounding_slices(grid, d, reach)
    s = ((grid.x[sx][np.newaxis, :] - d) ** 2 + grid.y[sy][:, np.newaxis] ** 2) / a**2
    if obstacle.edge == "hard":
        t[sy, sx] = (s >= 1.0).astype(float)
    else:
        t[sy, sx] = -np.expm1(-(s**m))
    return t


def apply_obstacle(u: ScalarField, obstacle: ObstacleSpec) -> ObstacleResult:
    """Multiply ``u`` by the screen transmission and renormalize.

    Returns the normalized field just behind the screen and the fraction of
    input power the screen removed.

    Raises
    ------
    BlockedFieldError
        If no power is transmitted.
    """
    t = transmission(u.grid, obstacle)
    behind = u.with_amplitude(u.amplitude * t)
    p_in = float(np.vdot(u.amplitude, u.amplitude).real)
    p_out = float(np.vdot(behind.amplitude, behind.amplitude).real)
    if p_out == 0.0:
        raise BlockedFieldError(f"obstacle {obstacle} blocks the entire field")
    blocked = 1.0 - p_out / p_in
    log.debug("obstacle %s blocks %.6f of the input power", obstacle, blocked)
    return ObstacleResult(normalize(behind), blocked)
