"""Transverse sampling grid and immutable complex scalar fields.

All integrals are approximated by Riemann sums that carry the ``dx * dy``
measure, so norms and overlaps approximate the continuum integrals directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class IncompatibleFieldsError(ValueError):
    """Two fields do not share the same grid or wavelength."""


class BlockedFieldError(ValueError):
    """A field has zero norm and cannot be normalized."""


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class TransverseGrid:
    """Uniform, FFT-compatible sampling of the transverse plane.

    Sample ``j`` along x sits at ``(j - nx // 2) * dx``, so sample
    ``(nx // 2, ny // 2)`` is exactly the origin. Arrays are indexed
    ``[iy, ix]``.
    """

    nx: int
    ny: int
    dx: float
    dy: float

    def __post_init__(self):
        if not (_is_power_of_two(self.nx) and _is_power_of_two(self.ny)):
            raise ValueError(f"grid sizes must be powers of two, got {self.nx}x{self.ny}")
        if not (self.dx > 0 and self.dy > 0):
            raise ValueError("grid spacing must be positive")

    @classmethod
    def square(cls, n: int, window: float) -> "TransverseGrid":
        """``n x n`` samples covering a ``window x window`` square (meters)."""
        return cls(n, n, window / n, window / n)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def window(self) -> tuple[float, float]:
        return (self.nx * self.dx, self.ny * self.dy)

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    @cached_property
    def x(self) -> np.ndarray:
        return (np.arange(self.nx) - self.nx // 2) * self.dx

    @cached_property
    def y(self) -> np.ndarray:
        return (np.arange(self.ny) - self.ny // 2) * self.dy

    @cached_property
    def _mesh(self):
        X, Y = np.meshgrid(self.x, self.y, indexing="xy")
        X.setflags(write=False)
        Y.setflags(write=False)
        return X, Y

    @property
    def X(self) -> np.ndarray:
        return self._mesh[0]

    @property
    def Y(self) -> np.ndarray:
        return self._mesh[1]

    @cached_property
    def polar(self) -> tuple[np.ndarray, np.ndarray]:
        """Radius and azimuth ``(rho, phi)`` at every sample."""
        rho = np.hypot(self.X, self.Y)
        phi = np.arctan2(self.Y, self.X)
        rho.setflags(write=False)
        phi.setflags(write=False)
        return rho, phi

    @cached_property
    def kx(self) -> np.ndarray:
        """Angular wavenumbers conjugate to x, in FFT (unshifted) order."""
        return 2 * np.pi * np.fft.fftfreq(self.nx, self.dx)

    @cached_property
    def ky(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.ny, self.dy)

    @cached_property
    def k_squared(self) -> np.ndarray:
        K2 = self.kx[np.newaxis, :] ** 2 + self.ky[:, np.newaxis] ** 2
        K2.setflags(write=False)
        return K2


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Complex amplitude sampled on a :class:`TransverseGrid`.

    The amplitude array is copied and frozen on construction; operations on
    fields always return new instances.
    """

    grid: TransverseGrid
    amplitude: np.ndarray
    wavelength: float
    normalized: bool = field(default=False)

    def __post_init__(self):
        amp = np.array(self.amplitude, dtype=np.complex128, copy=True)
        if amp.shape != self.grid.shape:
            raise ValueError(f"amplitude shape {amp.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(amp)):
            raise ValueError("field amplitude contains non-finite samples")
        if not self.wavelength > 0:
            raise ValueError("wavelength must be positive")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitude", amp)
        if self.normalized:
            n2 = float(np.vdot(amp, amp).real) * self.grid.cell_area
            if abs(n2 - 1.0) >= 1e-10:
                raise ValueError(f"field flagged normalized has squared norm {n2!r}")

    @property
    def k(self) -> float:
        return 2 * np.pi / self.wavelength

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.amplitude) ** 2

    @property
    def phase(self) -> np.ndarray:
        return np.angle(self.amplitude)

    def with_amplitude(self, amplitude, normalized: bool = False) -> "ScalarField":
        return ScalarField(self.grid, amplitude, self.wavelength, normalized)

    def __mul__(self, other) -> "ScalarField":
        if isinstance(other, ScalarField):
            check_compatible(self, other)
            other = other.amplitude
        return self.with_amplitude(self.amplitude * other)

    __rmul__ = __mul__

    def __add__(self, other: "ScalarField") -> "ScalarField":
        check_compatible(self, other)
        return self.with_amplitude(self.amplitude + other.amplitude)

    def __sub__(self, other: "ScalarField") -> "ScalarField":
        check_compatible(self, other)
        return self.with_amplitude(self.amplitude - other.amplitude)


def check_compatible(f: ScalarField, g: ScalarField) -> None:
    if f.grid != g.grid:
        raise IncompatibleFieldsError(f"grid mismatch: {f.grid} vs {g.grid}")
    if f.wavelength != g.wavelength:
        raise IncompatibleFieldsError(
            f"wavelength mismatch: {f.wavelength} vs {g.wavelength}"
        )


def inner_product(f: ScalarField, g: ScalarField) -> complex:
    """Discrete ``<f|g> = sum(conj(f) * g) dx dy``; conjugate-linear in ``f``."""
    check_compatible(f, g)
    return complex(np.vdot(f.amplitude, g.amplitude)) * f.grid.cell_area


def norm(f: ScalarField) -> float:
    peak = float(np.abs(f.amplitude).max())
    if peak == 0.0:
        return 0.0
    # scale first so tiny or huge amplitudes do not under/overflow when squared
    scaled = f.amplitude / peak
    return peak * float(np.sqrt(np.vdot(scaled, scaled).real * f.grid.cell_area))


def normalize(f: ScalarField) -> ScalarField:
    """Return ``f / norm(f)``.

    Raises
    ------
    BlockedFieldError
        If the field carries no power at all.
    """
    n = norm(f)
    if n == 0.0:
        raise BlockedFieldError("cannot normalize a field with zero norm (fully blocked)")
    amp = f.amplitude / n
    # second pass removes the rounding left by the first division
    amp = amp / np.sqrt(np.vdot(amp, amp).real * f.grid.cell_area)
    return ScalarField(f.grid, amp, f.wavelength, normalized=True)
