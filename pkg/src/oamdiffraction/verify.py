"""Numerical invariant suite run by ``oamdiff verify``."""

from __future__ import annotations

from dataclasses import dataclass

from .analysis import lg_basis, mutual_overlap, z_invariance_check
from .entanglement import purity_bruteforce, purity_from_overlap
from .fields import TransverseGrid, inner_product, norm
from .modes import bg_mode
from .obstacle import apply_obstacle
from .propagator import propagate

DEFAULT_TOLERANCES = {
    "orthonormality": 1e-6,
    "bg_cross_l": 1e-8,
    "unitarity": 1e-10,
    "semigroup": 1e-10,
    "z_invariance": 1e-4,
    "oracle": 1e-10,
    "symmetry_zero": 1e-8,
}


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.value < self.tolerance)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<16} {self.value:.3e} < {self.tolerance:.1e}"


def run_invariants(
    grid: TransverseGrid,
    scenario_lg,
    scenario_bg,
    z: float,
    d_over_a=(0.5, 1.0, 1.5),
    tolerances: dict | None = None,
) -> list[Check]:
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    lam = scenario_lg.wavelength
    w = scenario_lg.waist
    a = scenario_lg.obstacle.radius
    checks = []

    basis = [m for _, m in lg_basis(grid, 4, (-4, 4), w, lam)]
    worst = 0.0
    # pairwise, to avoid stacking the whole basis into one matrix
    for i, f in enumerate(basis):
        for j in range(i, len(basis)):
            worst = max(worst, abs(inner_product(f, basis[j]) - (i == j)))
    checks.append(Check("orthonormality", worst, tol["orthonormality"]))

    k = scenario_bg.kappa
    wb = scenario_bg.waist
    worst = 0.0
    for l in range(-2, 3):
        for l2 in range(-2, 3):
            if l != l2:
                f = bg_mode(grid, k, l, wb, lam)
                g = bg_mode(grid, 2 * k / 3, l2, wb, lam)
                worst = max(worst, abs(inner_product(f, g)))
    checks.append(Check("bg_cross_l", worst, tol["bg_cross_l"]))

    u_plus, u_minus = scenario_lg.input_pair(grid)
    psi, _ = apply_obstacle(u_plus, scenario_lg.obstacle.displaced(a))
    f_z, g_z = propagate(psi, z), propagate(u_minus, z)
    unit = abs(inner_product(f_z, g_z) - inner_product(psi, u_minus))
    unit = max(unit, abs(inner_product(f_z, f_z).real - 1.0))
    checks.append(Check("unitarity", unit, tol["unitarity"]))
    two_step = propagate(propagate(psi, z / 3), 2 * z / 3)
    # L2 distance is dimensionless for normalized fields, unlike the raw amplitude
    checks.append(Check("semigroup", norm(two_step - f_z), tol["semigroup"]))

    dev = z_invariance_check(psi, z, lg_basis(grid, 3, (-3, 3), w, lam))
    checks.append(Check("z_invariance", dev, tol["z_invariance"]))

    worst = 0.0
    for scen in (scenario_lg, scenario_bg):
        inputs = scen.input_pair(grid)
        for r in d_over_a:
            screen = scen.obstacle.displaced(r * a)
            p, _ = apply_obstacle(inputs[0], screen)
            m, _ = apply_obstacle(inputs[1], screen)
            b = mutual_overlap(p, m).b
            worst = max(worst, abs(purity_bruteforce(p, m) - purity_from_overlap(b)))
    checks.append(Check("oracle", worst, tol["oracle"]))

    worst = 0.0
    for scen in (scenario_lg, scenario_bg):
        inputs = scen.input_pair(grid)
        p, _ = apply_obstacle(inputs[0], scen.obstacle.displaced(0.0))
        m, _ = apply_obstacle(inputs[1], scen.obstacle.displaced(0.0))
        worst = max(worst, abs(mutual_overlap(p, m).b))
    checks.append(Check("symmetry_zero", worst, tol["symmetry_zero"]))
    return checks
