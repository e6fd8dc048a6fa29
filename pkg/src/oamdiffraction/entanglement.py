"""Concurrence of the diffracted bi-photon state.

The output state is fixed by a single number, the mutual overlap ``b`` of the
two diffracted single-photon fields. Its purity and concurrence follow in
closed form; :func:`purity_bruteforce` recomputes the purity from the fields
themselves as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .analysis import SymmetryViolationError, mutual_overlap
from .fields import ScalarField, TransverseGrid, check_compatible, inner_product
from .modes import ModeSpec
from .obstacle import ObstacleSpec, apply_obstacle

#: Largest |b| for which ``1 - 6 b^2 - b^4 >= 0``.
B_DOMAIN_LIMIT = math.sqrt(math.sqrt(10.0) - 3.0)

MIRROR_TOL = 1e-10


class ConcurrenceDomainError(ValueError):
    """The closed-form concurrence is undefined for this overlap."""

    def __init__(self, b: float, context: str = ""):
        self.b = b
        msg = (
            f"1 - 6b^2 - b^4 < 0 for b = {b:.6g}; the closed form needs "
            f"|b| <= {B_DOMAIN_LIMIT:.5f}"
        )
        super().__init__(f"{msg} ({context})" if context else msg)


def purity_from_overlap(b: float) -> float:
    """``(1 + 6 b^2 + b^4) / 2``.

    Values above 1 (reached for ``|b| > 0.403``, exactly where the closed-form
    concurrence loses its domain) are returned as computed:
    the reduced operator is not unit-trace when ``b != 0``.
    """
    if abs(b) > 1:
        raise ValueError(f"|b| must not exceed 1, got {b}")
    b2 = b * b
    return 0.5 * (1.0 + 6.0 * b2 + b2 * b2)


def concurrence_paper(b: float) -> float:
    """``sqrt(1 - 6 b^2 - b^4)``; raises :class:`ConcurrenceDomainError` outside its domain."""
    b2 = b * b
    radicand = 1.0 - 6.0 * b2 - b2 * b2
    if radicand < 0:
        # rounding at the domain edge itself is not an error
        if abs(b) <= B_DOMAIN_LIMIT:
            return 0.0
        raise ConcurrenceDomainError(b)
    return math.sqrt(radicand)


def concurrence_normalized(b: float) -> float:
    """Concurrence of the trace-renormalized reduced state, ``(1 - b^2)/(1 + b^2)``."""
    if abs(b) > 1:
        raise ValueError(f"|b| must not exceed 1, got {b}")
    b2 = b * b
    return (1.0 - b2) / (1.0 + b2)


def purity_bruteforce(
    psi_plus: ScalarField,
    psi_minus: ScalarField,
    renormalize: bool = False,
    partner: Optional[tuple[ScalarField, ScalarField]] = None,
) -> float:
    """Purity of the reduced single-photon state, computed from the fields.

    The reduced state is ``rho = sum_ij M_ij |psi_i><psi_j|`` over the two
    diffracted fields of photon 1, so ``tr(rho^2) = tr(M G M G)`` with the
    Gram matrix ``G_ij = <psi_i|psi_j>``; no four-dimensional integral is
    needed. ``M`` comes from tracing out photon 2: by default
    ``M = [[1, b], [b, 1]] / 2`` with ``b`` the mutual overlap, or, when the
    photon-2 fields ``partner = (phi_plus, phi_minus)`` behind the opposite
    screen are given, from their Gram matrix directly.
    """
    check_compatible(psi_plus, psi_minus)
    pair = (psi_plus, psi_minus)
    G = np.array([[inner_product(f, g) for g in pair] for f in pair])
    if partner is None:
        b = mutual_overlap(psi_plus, psi_minus).b
        M = 0.5 * np.array([[1.0, b], [b, 1.0]], dtype=complex)
    else:
        phi_plus, phi_minus = partner
        check_compatible(psi_plus, phi_plus)
        check_compatible(phi_plus, phi_minus)
        # rho(r, r') = 1/2 sum psi_i(r) psi_j*(r') <phi_j'|phi_i'>, with i' the partner of i
        partners = (phi_minus, phi_plus)
        M = 0.5 * np.array([[inner_product(partners[j], partners[i]) for j in range(2)] for i in range(2)])
    MG = M @ G
    if renormalize:
        MG = MG / np.trace(MG)
    return float(np.trace(MG @ MG).real)


@dataclass(frozen=True)
class BiphotonScenario:
    """Bell-entangled ``|l0, -l0> + |-l0, l0>`` pair behind screens displaced by ``+-d``."""

    family: Literal["LG", "BG"]
    l0: int
    waist: float
    wavelength: float
    obstacle: ObstacleSpec
    kappa: float = 0.0
    detection_distance: float = 0.0

    def __post_init__(self):
        if self.l0 == 0:
            raise ValueError("l0 = 0 gives a product state; use l0 != 0")
        if self.family not in ("LG", "BG"):
            raise ValueError(f"unknown mode family {self.family!r}")
        if self.detection_distance < 0:
            raise ValueError("detection distance must be non-negative")

    def mode(self, l: int) -> ModeSpec:
        if self.family == "LG":
            return ModeSpec.lg(0, l, self.waist, self.wavelength)
        return ModeSpec.bg(self.kappa, l, self.waist, self.wavelength)

    def input_pair(self, grid: TransverseGrid) -> tuple[ScalarField, ScalarField]:
        """Undiffracted ``(u_{+l0}, u_{-l0})`` at the screen plane."""
        return self.mode(self.l0).field(grid), self.mode(-self.l0).field(grid)


@dataclass(frozen=True)
class ConcurrenceResult:
    d: float
    b: float
    c_paper: float
    c_normalized: float
    purity_paper: float
    purity_oracle: Optional[float] = None
    imag_residual: float = 0.0
    blocked_fraction: float = 0.0
    mirror_b: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.c_normalized <= 1.0:
            raise ValueError(f"normalized concurrence {self.c_normalized} outside [0, 1]")


def diffracted_pair(
    scenario: BiphotonScenario, d: float, inputs: tuple[ScalarField, ScalarField]
) -> tuple[ScalarField, ScalarField, float]:
    """Fields of ``u_{+l0}`` and ``u_{-l0}`` behind the screen at ``d``, and the blocked fraction."""
    screen = scenario.obstacle.displaced(d)
    plus, blocked = apply_obstacle(inputs[0], screen)
    minus, _ = apply_obstacle(inputs[1], screen)
    return plus, minus, blocked


def run_scenario(
    scenario: BiphotonScenario,
    d: float,
    grid: TransverseGrid,
    inputs: Optional[tuple[ScalarField, ScalarField]] = None,
    oracle: bool = True,
    mirror_check: bool = False,
) -> ConcurrenceResult:
    """Overlap, purities and concurrences of the pair diffracted at displacement ``d``.

    Only the photon behind the ``+d`` screen is simulated; the ``-d`` arm is its
    mirror image. With ``mirror_check`` the ``-d`` arm is simulated as well, its
    overlap must agree with ``b`` to ``1e-10``, and the oracle purity then uses
    the explicit photon-2 fields. The detection distance does not enter.

    Raises
    ------
    ConcurrenceDomainError
        If ``b`` lies outside the domain of the closed-form concurrence.
    SymmetryViolationError
        If the mirror arm disagrees.
    """
    if inputs is None:
        inputs = scenario.input_pair(grid)
    plus, minus, blocked = diffracted_pair(scenario, d, inputs)
    report = mutual_overlap(plus, minus, displacement=d)
    b = report.b
    partner = None
    mirror_b = None
    if mirror_check:
        phi_plus, phi_minus, _ = diffracted_pair(scenario, -d, inputs)
        mirror_b = inner_product(phi_plus, phi_minus).real
        if abs(mirror_b - b) > MIRROR_TOL:
            raise SymmetryViolationError(
                f"mirror arm overlap {mirror_b:.12g} differs from b = {b:.12g} at d = {d}"
            )
        partner = (phi_plus, phi_minus)
    try:
        c_paper = concurrence_paper(b)
    except ConcurrenceDomainError as exc:
        raise ConcurrenceDomainError(b, f"d/a = {d / scenario.obstacle.radius:.6g}") from exc
    return ConcurrenceResult(
        d=d,
        b=b,
        c_paper=c_paper,
        c_normalized=concurrence_normalized(b),
        purity_paper=purity_from_overlap(b),
        purity_oracle=purity_bruteforce(plus, minus, partner=partner) if oracle else None,
        imag_residual=report.imag_residual,
        blocked_fraction=blocked,
        mirror_b=mirror_b,
    )
