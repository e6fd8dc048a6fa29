"""Laguerre-Gaussian and Bessel-Gaussian modes at the waist plane ``z = 0``.

Every generator normalizes numerically on the grid; analytic normalization
constants are never used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
from scipy.special import jv

from .fields import ScalarField, TransverseGrid, normalize

#: Fraction of the obstacle radius at which the LG intensity ring is placed.
DEFAULT_RING_FACTOR = 0.8


def assoc_laguerre(p: int, alpha: float, x: np.ndarray) -> np.ndarray:
    """Generalized Laguerre polynomial ``L_p^alpha(x)`` by upward recurrence."""
    if p < 0:
        raise ValueError("radial index p must be non-negative")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if p == 0:
        return prev
    cur = 1.0 + alpha - x
    for k in range(1, p):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
    return cur


def lg_mode(grid: TransverseGrid, p: int, l: int, w: float, wavelength: float) -> ScalarField:
    """Normalized LG mode ``(sqrt2 rho/w)^|l| L_p^|l|(2 rho^2/w^2) exp(i l phi - rho^2/w^2)``."""
    if p < 0:
        raise ValueError("radial index p must be non-negative")
    if not (w > 0 and wavelength > 0):
        raise ValueError("waist and wavelength must be positive")
    rho, phi = grid.polar
    s = rho / w
    radial = (math.sqrt(2) * s) ** abs(l) * assoc_laguerre(p, abs(l), 2 * s**2) * np.exp(-(s**2))
    return normalize(ScalarField(grid, radial * np.exp(1j * l * phi), wavelength))


def bg_mode(grid: TransverseGrid, k_rho: float, l: int, w: float, wavelength: float) -> ScalarField:
    """Normalized BG mode ``J_l(k_rho rho) exp(i l phi - rho^2/w^2)``.

    ``J_{-l} = (-1)^l J_l`` is kept, so ``bg_mode(-l) == (-1)^l conj(bg_mode(l))``.
    """
    if k_rho < 0:
        raise ValueError("radial wavenumber must be non-negative")
    if not (w > 0 and wavelength > 0):
        raise ValueError("waist and wavelength must be positive")
    rho, phi = grid.polar
    radial = jv(l, k_rho * rho) * np.exp(-((rho / w) ** 2))
    return normalize(ScalarField(grid, radial * np.exp(1j * l * phi), wavelength))


def lg_waist_for_obstacle(a: float, l0: int, ring_factor: float = DEFAULT_RING_FACTOR) -> float:
    """LG waist that puts the intensity ring ``sqrt(|l0|/2) w`` at ``ring_factor * a``."""
    if l0 == 0:
        raise ValueError("the waist rule is undefined for l0 = 0")
    if a <= 0:
        raise ValueError("obstacle radius must be positive")
    return ring_factor * a * math.sqrt(2.0 / abs(l0))


@dataclass(frozen=True)
class ModeSpec:
    family: Literal["LG", "BG"]
    l: int
    waist: float
    wavelength: float
    p: Optional[int] = None
    k_rho: Optional[float] = None

    def __post_init__(self):
        if self.family not in ("LG", "BG"):
            raise ValueError(f"unknown mode family {self.family!r}")
        if self.family == "LG":
            if self.p is None or self.k_rho is not None:
                raise ValueError("LG modes take a radial index p and no k_rho")
            if self.p < 0:
                raise ValueError("radial index p must be non-negative")
        else:
            if self.k_rho is None or self.p is not None:
                raise ValueError("BG modes take a radial wavenumber k_rho and no p")
            if self.k_rho < 0:
                raise ValueError("radial wavenumber must be non-negative")
        if not (self.waist > 0 and self.wavelength > 0):
            raise ValueError("waist and wavelength must be positive")

    @classmethod
    def lg(cls, p: int, l: int, waist: float, wavelength: float) -> "ModeSpec":
        return cls("LG", l, waist, wavelength, p=p)

    @classmethod
    def bg(cls, k_rho: float, l: int, waist: float, wavelength: float) -> "ModeSpec":
        return cls("BG", l, waist, wavelength, k_rho=k_rho)

    def with_l(self, l: int) -> "ModeSpec":
        return ModeSpec(self.family, l, self.waist, self.wavelength, self.p, self.k_rho)

    def field(self, grid: TransverseGrid) -> ScalarField:
        if self.family == "LG":
            return lg_mode(grid, self.p, self.l, self.waist, self.wavelength)
        return bg_mode(grid, self.k_rho, self.l, self.waist, self.wavelength)
