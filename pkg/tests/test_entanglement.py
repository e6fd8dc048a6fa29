import math
import time

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oamdiffraction.entanglement import (
    B_DOMAIN_LIMIT,
    BiphotonScenario,
    ConcurrenceDomainError,
    concurrence_normalized,
    concurrence_paper,
    diffracted_pair,
    purity_bruteforce,
    purity_from_overlap,
    run_scenario,
)
from oamdiffraction.experiments import paper_scenario
from oamdiffraction.fields import TransverseGrid
from oamdiffraction.modes import lg_mode
from oamdiffraction.obstacle import ObstacleSpec

from conftest import A, LAM, random_field


def test_purity_examples():
    assert purity_from_overlap(0.0) == 0.5
    assert purity_from_overlap(0.3) == pytest.approx(0.774050, abs=1e-6)
    assert purity_from_overlap(1.0) == 4.0
    with pytest.raises(ValueError):
        purity_from_overlap(1.2)


def test_concurrence_paper_examples():
    assert concurrence_paper(0.0) == 1.0
    assert concurrence_paper(0.3) == pytest.approx(0.672235, abs=1e-6)
    with pytest.raises(ConcurrenceDomainError, match="0.40284"):
        concurrence_paper(0.8)


def test_domain_limit():
    assert B_DOMAIN_LIMIT == pytest.approx(0.40284, abs=1e-5)
    # b^4 + 6 b^2 - 1 = 0 at the limit
    assert B_DOMAIN_LIMIT**4 + 6 * B_DOMAIN_LIMIT**2 - 1 == pytest.approx(0, abs=1e-14)
    assert concurrence_paper(B_DOMAIN_LIMIT) < 1e-6
    with pytest.raises(ConcurrenceDomainError):
        concurrence_paper(B_DOMAIN_LIMIT + 1e-9)


def test_concurrence_normalized_examples():
    assert concurrence_normalized(0.0) == 1.0
    assert concurrence_normalized(1.0) == 0.0
    assert concurrence_normalized(0.3) == pytest.approx(0.834862, abs=1e-6)
    with pytest.raises(ValueError):
        concurrence_normalized(-1.5)


@given(st.floats(-B_DOMAIN_LIMIT, B_DOMAIN_LIMIT))
def test_concurrence_purity_identity(b):
    # C^2 = 2 (1 - P) for the closed forms
    assert concurrence_paper(b) ** 2 == pytest.approx(2 * (1 - purity_from_overlap(b)), abs=1e-12)


@given(st.floats(0, B_DOMAIN_LIMIT), st.floats(0, B_DOMAIN_LIMIT))
def test_concurrence_decreases_with_abs_b(b1, b2):
    lo, hi = sorted((b1, b2))
    assert concurrence_paper(hi) <= concurrence_paper(lo)
    assert concurrence_normalized(hi) <= concurrence_normalized(lo)
    assert concurrence_paper(-lo) == concurrence_paper(lo)


@given(st.floats(-1, 1))
def test_normalized_concurrence_from_renormalized_purity(b):
    # sqrt(2 (1 - P)) of the unit-trace state equals (1 - b^2)/(1 + b^2)
    p = purity_from_overlap(b) / (1 + b * b) ** 2
    assert math.sqrt(max(0.0, 2 * (1 - p))) == pytest.approx(concurrence_normalized(b), abs=1e-7)


# --- brute-force purity ----------------------------------------------------

def _orthogonal_pair(grid):
    return lg_mode(grid, 0, 1, 2e-4, LAM), lg_mode(grid, 0, -1, 2e-4, LAM)


def test_bruteforce_orthogonal(small_grid):
    p, m = _orthogonal_pair(small_grid)
    assert purity_bruteforce(p, m) == pytest.approx(0.5, abs=1e-12)
    assert purity_bruteforce(p, m, renormalize=True) == pytest.approx(0.5, abs=1e-12)


def test_bruteforce_identical(small_grid):
    f = random_field(small_grid, np.random.default_rng(3), normalized=True)
    assert purity_bruteforce(f, f) == pytest.approx(4.0, abs=1e-10)
    assert purity_bruteforce(f, f, renormalize=True) == pytest.approx(1.0, abs=1e-10)


def test_bruteforce_explicit_partner_matches(small_grid):
    s = BiphotonScenario("LG", 1, 2e-4, LAM, ObstacleSpec(1.5e-4))
    inputs = s.input_pair(small_grid)
    plus, minus, _ = diffracted_pair(s, 1e-4, inputs)
    phi = diffracted_pair(s, -1e-4, inputs)[:2]
    assert purity_bruteforce(plus, minus, partner=phi) == pytest.approx(purity_bruteforce(plus, minus), abs=1e-12)


@pytest.mark.parametrize("family, l0", [("LG", 1), ("LG", 3), ("BG", 1), ("BG", 2)])
@pytest.mark.parametrize("r", [0.5, 1.0, 1.6])
def test_bruteforce_matches_closed_form(grid, family, l0, r):
    s = paper_scenario(family, l0)
    res = run_scenario(s, r * A, grid)
    assert abs(res.purity_oracle - res.purity_paper) < 1e-10


# --- run_scenario ----------------------------------------------------------

def test_run_scenario_lg_d_equals_a(grid):
    s = paper_scenario("LG", 1)
    inputs = s.input_pair(grid)
    t0 = time.perf_counter()
    res = run_scenario(s, A, grid, inputs=inputs)
    assert time.perf_counter() - t0 < 1.0
    assert res.b == pytest.approx(-0.18378030, abs=1e-6)
    assert res.c_paper == pytest.approx(0.8923049, abs=1e-6)
    assert res.c_normalized == pytest.approx((1 - res.b**2) / (1 + res.b**2))
    assert 0 < res.blocked_fraction < 1


@pytest.mark.parametrize("family", ["LG", "BG"])
def test_run_scenario_d0(grid, family):
    res = run_scenario(paper_scenario(family, 1), 0.0, grid)
    assert abs(res.b) < 1e-8
    assert res.c_paper > 1 - 1e-6


def test_run_scenario_reflection_invariance(grid):
    s = paper_scenario("BG", 2)
    ref = run_scenario(s, 0.9 * A, grid, mirror_check=True)
    assert ref.mirror_b == pytest.approx(ref.b, abs=1e-10)
    flipped = run_scenario(paper_scenario("BG", -2), 0.9 * A, grid)
    mirrored = run_scenario(s, -0.9 * A, grid)
    for other in (flipped, mirrored):
        assert other.b == pytest.approx(ref.b, abs=1e-10)
        assert other.c_paper == pytest.approx(ref.c_paper, abs=1e-10)


def test_detection_distance_does_not_enter(grid):
    r1 = run_scenario(paper_scenario("LG", 1, detection_distance=0.0), A, grid)
    r2 = run_scenario(paper_scenario("LG", 1, detection_distance=0.3), A, grid)
    assert r1.b == r2.b


def test_domain_error_reports_displacement():
    g = TransverseGrid.square(64, 2e-3)
    # a screen much wider than the beam leaves a thin crescent with b ~ 0.82
    s = BiphotonScenario("LG", 1, 1e-4, LAM, ObstacleSpec(5e-4))
    with pytest.raises(ConcurrenceDomainError, match="d/a = 0.5"):
        run_scenario(s, 2.5e-4, g, oracle=False)


def test_scenario_validation():
    with pytest.raises(ValueError):
        BiphotonScenario("LG", 0, 1e-4, LAM, ObstacleSpec(A))
    with pytest.raises(ValueError):
        BiphotonScenario("XX", 1, 1e-4, LAM, ObstacleSpec(A))
    with pytest.raises(ValueError):
        BiphotonScenario("LG", 1, 1e-4, LAM, ObstacleSpec(A), detection_distance=-1)
