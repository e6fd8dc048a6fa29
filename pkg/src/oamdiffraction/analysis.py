"""Modal decompositions, mutual overlap and phase-structure diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Literal, Optional, Sequence

import numpy as np

from .fields import BlockedFieldError, ScalarField, check_compatible, inner_product
from .modes import bg_mode, lg_mode
from .propagator import propagate

#: Largest tolerated imaginary part of the mutual overlap.
OVERLAP_IMAG_TOL = 1e-6

BG_LATTICE_SAMPLES = 64
BG_LATTICE_SPAN = 3.0


class SymmetryViolationError(ValueError):
    """The mutual overlap has a non-negligible imaginary part."""


@dataclass(frozen=True)
class ModalSpectrum:
    """Projection coefficients of a field onto a mode basis.

    ``coefficients`` maps ``(p, l)`` for LG, or ``(k_index, l)`` for BG, to
    the complex amplitude. For BG the radial wavenumber of ``k_index`` is
    ``k_rho[k_index]``; each lattice mode is unit-normalized, so ``|c|^2`` is a
    per-sample weight rather than a spectral density.
    """

    basis: Literal["LG", "BG"]
    waist: float
    coefficients: dict
    k_rho: Optional[np.ndarray] = field(default=None, compare=False)

    @property
    def captured_power(self) -> float:
        return float(sum(abs(c) ** 2 for c in self.coefficients.values()))

    def power_by_l(self) -> dict:
        out: dict = {}
        for (_, l), c in self.coefficients.items():
            out[l] = out.get(l, 0.0) + abs(c) ** 2
        return dict(sorted(out.items()))

    def __getitem__(self, key) -> complex:
        return self.coefficients[key]

    def rows(self):
        """``(basis, p_or_krho, l, re, im, abs2)`` tuples in index order."""
        for (i, l), c in sorted(self.coefficients.items()):
            label = i if self.basis == "LG" else float(self.k_rho[i])
            yield (self.basis, label, l, c.real, c.imag, abs(c) ** 2)


def lg_basis(grid, p_max: int, l_range: tuple[int, int], w: float, wavelength: float):
    """Yield ``((p, l), mode)`` for ``0 <= p <= p_max`` and ``l_min <= l <= l_max``."""
    l_min, l_max = l_range
    for l in range(l_min, l_max + 1):
        for p in range(p_max + 1):
            yield (p, l), lg_mode(grid, p, l, w, wavelength)


def default_bg_lattice(kappa: float) -> np.ndarray:
    """Uniform radial-wavenumber lattice on ``[0, 3 kappa]`` with 64 samples."""
    return np.linspace(0.0, BG_LATTICE_SPAN * kappa, BG_LATTICE_SAMPLES)


def bg_basis(grid, k_lattice: Sequence[float], l_range: tuple[int, int], w: float, wavelength: float):
    """Yield ``((k_index, l), mode)``; modes vanishing on the grid yield ``None``."""
    l_min, l_max = l_range
    for l in range(l_min, l_max + 1):
        for i, k in enumerate(k_lattice):
            try:
                mode = bg_mode(grid, float(k), l, w, wavelength)
            except BlockedFieldError:
                # J_l(0) = 0 for l != 0: the k_rho = 0 sample carries no mode
                mode = None
            yield (i, l), mode


def _project(psi: ScalarField, basis: Iterable) -> dict:
    return {key: (0j if mode is None else inner_product(mode, psi)) for key, mode in basis}


def lg_spectrum(psi: ScalarField, p_max: int, l_range: tuple[int, int], w: float) -> ModalSpectrum:
    coeffs = _project(psi, lg_basis(psi.grid, p_max, l_range, w, psi.wavelength))
    return ModalSpectrum("LG", w, coeffs)


def bg_spectrum(
    psi: ScalarField, k_lattice: Sequence[float], l_range: tuple[int, int], w: float
) -> ModalSpectrum:
    k_lattice = np.asarray(k_lattice, dtype=float)
    coeffs = _project(psi, bg_basis(psi.grid, k_lattice, l_range, w, psi.wavelength))
    return ModalSpectrum("BG", w, coeffs, k_rho=k_lattice)


def z_invariance_check(psi0: ScalarField, z: float, basis: Iterable) -> float:
    """Largest change of any projection coefficient when field and basis move to ``z``.

    ``basis`` yields ``(key, mode)`` pairs as produced by :func:`lg_basis` or
    :func:`bg_basis`.
    """
    psi_z = propagate(psi0, z)
    worst = 0.0
    for _, mode in basis:
        if mode is None:
            continue
        c0 = inner_product(mode, psi0)
        cz = inner_product(propagate(mode, z), psi_z)
        worst = max(worst, abs(cz - c0))
    return worst


@dataclass(frozen=True)
class OverlapReport:
    b: float
    imag_residual: float
    displacement: Optional[float] = None
    descriptor: str = ""


def mutual_overlap(
    psi_plus: ScalarField,
    psi_minus: ScalarField,
    displacement: Optional[float] = None,
    descriptor: str = "",
) -> OverlapReport:
    """Overlap ``b = <psi_minus|psi_plus>`` of the two diffracted fields.

    For a screen displaced along x the overlap is real by reflection symmetry;
    the imaginary part is kept as a residual and must stay below
    :data:`OVERLAP_IMAG_TOL`.

    Raises
    ------
    SymmetryViolationError
        If the imaginary part is too large, which points at inconsistent inputs.
    """
    check_compatible(psi_plus, psi_minus)
    raw = inner_product(psi_minus, psi_plus)
    if abs(raw.imag) >= OVERLAP_IMAG_TOL:
        raise SymmetryViolationError(
            f"mutual overlap has imaginary part {raw.imag:.3e} (b = {raw.real:.6f})"
        )
    # rounding can push |b| a hair above 1 for identical inputs
    b = max(-1.0, min(1.0, raw.real))
    return OverlapReport(b, raw.imag, displacement, descriptor)


def _half_cell_shift(psi: ScalarField) -> np.ndarray:
    """Spectrally interpolate ``psi`` onto the lattice offset by half a cell in x and y."""
    g = psi.grid
    ramp = np.exp(1j * (g.kx[np.newaxis, :] * g.dx + g.ky[:, np.newaxis] * g.dy) / 2)
    return np.fft.ifft2(np.fft.fft2(psi.amplitude) * ramp)


def winding_map(amplitude: np.ndarray) -> np.ndarray:
    """Integer phase circulation around every plaquette of a sampled field.

    Entry ``[i, j]`` is the winding of the loop through samples
    ``[i, j] -> [i, j+1] -> [i+1, j+1] -> [i+1, j]`` (counter-clockwise for
    increasing x and y).
    """
    ph = np.angle(amplitude)

    def step(a, b):
        return np.angle(np.exp(1j * (b - a)))

    total = (
        step(ph[:-1, :-1], ph[:-1, 1:])
        + step(ph[:-1, 1:], ph[1:, 1:])
        + step(ph[1:, 1:], ph[1:, :-1])
        + step(ph[1:, :-1], ph[:-1, :-1])
    )
    return np.rint(total / (2 * np.pi)).astype(int)


def count_phase_singularities(
    psi: ScalarField, radius: float, noise_floor: float = 1e-6
) -> tuple[int, int]:
    """Count positive and negative topological charge within ``radius`` of the axis.

    Vortices of fields generated on the grid sit exactly on the origin sample,
    where no plaquette can enclose them. The field is therefore interpolated
    to the half-cell-shifted lattice first, whose plaquettes are centered on
    the original samples. A plaquette whose four corners all fall below
    ``noise_floor`` times the peak amplitude is ignored. A plaquette of
    circulation ``+-2 pi n`` contributes ``n`` units.
    """
    g = psi.grid
    if radius >= min(g.window) / 2:
        raise ValueError("counting radius must be less than half the window")
    amp = _half_cell_shift(psi)
    wind = winding_map(amp)
    mag = np.abs(amp)
    corner_max = np.maximum.reduce([mag[:-1, :-1], mag[:-1, 1:], mag[1:, :-1], mag[1:, 1:]])
    # plaquette [i, j] of the shifted lattice is centered on original sample [i+1, j+1]
    cx = g.x[1:][np.newaxis, :]
    cy = g.y[1:][:, np.newaxis]
    keep = (cx**2 + cy**2 < radius**2) & (corner_max >= noise_floor * mag.max())
    w = wind[keep]
    return int(w[w > 0].sum()), int(-w[w < 0].sum())


def phase_correlation_length(l0: int, w: float) -> float:
    """Phase correlation length of a ``p = 0`` LG mode, valid for ``|l0| >= 2``."""
    n = abs(l0)
    if n < 2:
        raise ValueError("phase correlation length is defined only for |l0| >= 2")
    return w / math.sqrt(2) * math.sin(math.pi / (2 * n)) * math.exp(
        math.lgamma(1.5 + n) - math.lgamma(1.0 + n)
    )


def waist_for_correlation_length(xi: float, l0: int) -> float:
    """Inverse of :func:`phase_correlation_length` in the waist."""
    return xi / phase_correlation_length(l0, 1.0)
