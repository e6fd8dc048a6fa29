"""Parameter sweeps over the screen displacement and curve classification."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy.signal import peak_prominences

from .analysis import mutual_overlap, waist_for_correlation_length
from .entanglement import BiphotonScenario, ConcurrenceResult, diffracted_pair, run_scenario
from .fields import ScalarField, TransverseGrid
from .modes import DEFAULT_RING_FACTOR, ModeSpec, lg_waist_for_obstacle
from .obstacle import ObstacleSpec, apply_obstacle
from .propagator import propagate

log = logging.getLogger(__name__)

# Parameter set held fixed throughout (LG waists follow the obstacle rule).
OBSTACLE_RADIUS = 200e-6
EDGE_ORDER = 12
KAPPA = 30e3
BG_WAIST = 1e-3
WAVELENGTH = 710e-9
MAP_DISTANCE = 50e-3

GRID_SIZE = 1024
GRID_WINDOW = 8e-3
WINDOW_TO_WAIST = 8.0

SWEEP_SAMPLES = 51
SWEEP_MAX = 2.5
PROMINENCE = 0.005


def default_grid(n: int = GRID_SIZE, window: float = GRID_WINDOW) -> TransverseGrid:
    return TransverseGrid.square(n, window)


def default_d_over_a(samples: int = SWEEP_SAMPLES, stop: float = SWEEP_MAX) -> np.ndarray:
    return np.linspace(0.0, stop, samples)


def paper_scenario(
    family: str,
    l0: int,
    *,
    radius: float = OBSTACLE_RADIUS,
    order: int = EDGE_ORDER,
    edge: str = "smooth",
    waist: Optional[float] = None,
    kappa: float = KAPPA,
    wavelength: float = WAVELENGTH,
    ring_factor: float = DEFAULT_RING_FACTOR,
    detection_distance: float = MAP_DISTANCE,
) -> BiphotonScenario:
    """Scenario with the default parameters; LG waists follow the obstacle rule."""
    if waist is None:
        waist = lg_waist_for_obstacle(radius, l0, ring_factor) if family == "LG" else BG_WAIST
    return BiphotonScenario(
        family=family,
        l0=l0,
        waist=waist,
        wavelength=wavelength,
        obstacle=ObstacleSpec(radius, 0.0, order, edge),
        kappa=kappa if family == "BG" else 0.0,
        detection_distance=detection_distance,
    )


def correlation_scenario(l0: int, xi_over_a: float, radius: float = OBSTACLE_RADIUS, **kw) -> BiphotonScenario:
    """LG scenario whose waist gives phase correlation length ``xi_over_a * radius``."""
    w = waist_for_correlation_length(xi_over_a * radius, l0)
    return paper_scenario("LG", l0, radius=radius, waist=w, **kw)


def check_window(grid: TransverseGrid, scenario: BiphotonScenario) -> None:
    if min(grid.window) < WINDOW_TO_WAIST * scenario.waist * (1 - 1e-12):
        raise ValueError(
            f"grid window {min(grid.window):.4g} m is smaller than "
            f"{WINDOW_TO_WAIST:g} x waist {scenario.waist:.4g} m"
        )


@dataclass(frozen=True)
class SweepPlan:
    scenario: BiphotonScenario
    d_over_a: tuple
    outputs: frozenset = frozenset({"concurrence"})

    def __post_init__(self):
        d = tuple(float(v) for v in self.d_over_a)
        if len(d) < 2:
            raise ValueError("a sweep needs at least two displacement samples")
        if any(b <= a for a, b in zip(d, d[1:])):
            raise ValueError("displacement samples must be strictly increasing")
        object.__setattr__(self, "d_over_a", d)
        object.__setattr__(self, "outputs", frozenset(self.outputs))

    @property
    def displacements(self) -> np.ndarray:
        return np.asarray(self.d_over_a) * self.scenario.obstacle.radius


def count_minima(values: Sequence[float], eps: float = 0.0) -> int:
    """Number of interior strict local minima with prominence of at least ``eps``.

    The prominence of a dip is its depth below the lower of the two
    neighbouring maxima, each taken as the highest sample between the dip and
    the next deeper dip (or the end of the curve) on that side.
    """
    v = np.asarray(values, dtype=float)
    if v.size < 3:
        raise ValueError("need at least three samples to count minima")
    idx = np.flatnonzero((v[1:-1] < v[:-2]) & (v[1:-1] < v[2:])) + 1
    if idx.size == 0:
        return 0
    prom = peak_prominences(-v, idx)[0]
    return int(np.count_nonzero(prom >= eps))


def count_extrema(values: Sequence[float], eps: float = 0.0) -> int:
    """Peaks plus dips, both filtered by prominence ``eps``."""
    v = np.asarray(values, dtype=float)
    return count_minima(v, eps) + count_minima(-v, eps)


@dataclass(frozen=True)
class CurveSummary:
    quantity: str
    d_over_a: np.ndarray
    values: np.ndarray
    n_min: int
    global_min_at: float
    n_extrema: Optional[int] = None
    results: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if self.n_min < 0:
            raise ValueError("N_min must be non-negative")


def _map_ordered(fn, items, threads: int):
    if threads == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads or None) as pool:
        return list(pool.map(fn, items))


class OverlapPoint(NamedTuple):
    d: float
    b: float
    imag_residual: float
    blocked_fraction: float


def sweep_overlap(
    plan: SweepPlan, grid: TransverseGrid, prominence: float = PROMINENCE, threads: int = 1
) -> CurveSummary:
    """Mutual overlap ``b`` at every displacement of the plan."""
    s = plan.scenario
    check_window(grid, s)
    inputs = s.input_pair(grid)

    def point(d):
        plus, minus, blocked = diffracted_pair(s, d, inputs)
        rep = mutual_overlap(plus, minus, displacement=d)
        return OverlapPoint(d, rep.b, rep.imag_residual, blocked)

    points = _map_ordered(point, plan.displacements, threads)
    x = np.asarray(plan.d_over_a)
    b = np.array([p.b for p in points])
    return CurveSummary(
        quantity="b",
        d_over_a=x,
        values=b,
        n_min=count_minima(b, prominence),
        global_min_at=float(x[np.argmin(b)]),
        n_extrema=count_extrema(b, prominence),
        results=tuple(points),
    )


def sweep_concurrence(
    plan: SweepPlan,
    grid: TransverseGrid,
    prominence: float = PROMINENCE,
    threads: int = 1,
    oracle: bool = True,
) -> CurveSummary:
    """Concurrence (closed form and renormalized) at every displacement.

    The mirror arm is simulated once, at the middle sample, to confirm that the
    single-arm shortcut holds for this scenario.

    Raises
    ------
    ConcurrenceDomainError
        At the first displacement whose overlap leaves the closed-form domain.
    """
    s = plan.scenario
    check_window(grid, s)
    inputs = s.input_pair(grid)
    ds = plan.displacements
    mid = len(ds) // 2

    def point(i):
        return run_scenario(s, ds[i], grid, inputs=inputs, oracle=oracle, mirror_check=(i == mid))

    results: list[ConcurrenceResult] = _map_ordered(point, range(len(ds)), threads)
    x = np.asarray(plan.d_over_a)
    c = np.array([r.c_paper for r in results])
    return CurveSummary(
        quantity="C_paper",
        d_over_a=x,
        values=c,
        n_min=count_minima(c, prominence),
        global_min_at=float(x[np.argmin(c)]),
        results=tuple(results),
    )


class FieldMaps(NamedTuple):
    incident: ScalarField
    diffracted: ScalarField
    blocked_fraction: float

    @property
    def images(self) -> dict:
        return {
            "incident_intensity": self.incident.intensity,
            "incident_phase": self.incident.phase,
            "diffracted_intensity": self.diffracted.intensity,
            "diffracted_phase": self.diffracted.phase,
        }


def field_maps(
    mode: ModeSpec, obstacle: Optional[ObstacleSpec], z: float, grid: TransverseGrid
) -> FieldMaps:
    """Incident mode at the screen and the field ``z`` behind it.

    With ``obstacle=None`` the mode propagates freely.
    """
    u = mode.field(grid)
    if obstacle is None:
        return FieldMaps(u, propagate(u, z), 0.0)
    psi, blocked = apply_obstacle(u, obstacle)
    return FieldMaps(u, propagate(psi, z), blocked)


def minima_count_table(
    xi_over_a: Sequence[float],
    l0_values: Sequence[int],
    grid: TransverseGrid,
    d_over_a: Optional[Sequence[float]] = None,
    prominence: float = PROMINENCE,
    threads: int = 1,
) -> dict:
    """``N_min`` of the concurrence curve for each ``(xi/a, l0)``."""
    if d_over_a is None:
        d_over_a = default_d_over_a()
    table = {}
    for ratio in xi_over_a:
        for l0 in l0_values:
            plan = SweepPlan(correlation_scenario(l0, ratio), tuple(d_over_a))
            table[(ratio, l0)] = sweep_concurrence(plan, grid, prominence, threads, oracle=False).n_min
    return table
