import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import cusp_orbit
from horolab.horoballs import (Horoball, OverlapCounterexample, build_family, disjointness_constant,
                               farey_min_exact, first_overlap, invariance_defect, shell_disjoint_balls,
                               summit_radius, top_distance_to_orbit)
from horolab.orbits import enumerate_orbit


def test_farey_constant_matches_fraction_oracle():
    # independent route: plain Fractions over every pair
    fr = sorted({Fraction(p, q) for q in range(1, 16) for p in range(q + 1)})
    brute = min(abs(a - b) * a.denominator * b.denominator for a, b in itertools.combinations(fr, 2))
    m, _ = farey_min_exact(15)
    assert brute == m == 1


def test_modular_family_disjoint_and_corridor():
    fam = build_family(cusp_orbit("modular", 2000.0))
    assert not isinstance(fam, OverlapCounterexample)
    assert first_overlap(fam) is None
    lo, hi = fam.corridor()
    assert 0.2 < lo <= hi <= 0.5 + 1e-12


def test_oversized_seed_rejected():
    with pytest.raises(ValueError):
        build_family(cusp_orbit("modular", 200.0), lam=4.0)


def test_inflated_family_overlaps():
    # the integer route tests |a c' - a' c| >= lam exactly, so raise lam past 1
    fam = build_family(cusp_orbit("modular", 200.0))
    fam.lam = 2.0
    bad = first_overlap(fam)
    assert bad is not None and bad.gap < 0


def test_family_is_invariant():
    fam = build_family(cusp_orbit("modular", 2000.0))
    assert invariance_defect(fam, 200, seed=1) < 1e-8


def test_picard_family_disjoint():
    fam = build_family(cusp_orbit("picard", 40.0))
    assert not isinstance(fam, OverlapCounterexample)
    lo, hi = fam.corridor()
    assert hi / lo <= 16


def test_disjointness_constant_modular_value():
    o = cusp_orbit("modular", 2000.0).restrict(1100.0)
    d = disjointness_constant(o)
    assert d.c1 == pytest.approx(0.5, abs=0.01)
    assert d.c2(2.0) == pytest.approx(d.c1 / (2 * math.sqrt(2)))


@pytest.mark.parametrize("k", [2.0, 3.0])
def test_shell_balls_disjoint(k):
    o = cusp_orbit("modular", 2000.0)
    c2 = disjointness_constant(o.restrict(1100.0)).c2(k)
    for shell in o.shells(k):
        assert shell_disjoint_balls(shell, c2).passed


def test_shell_balls_overlap_when_too_large():
    o = cusp_orbit("modular", 2000.0)
    shell = o.shells(2.0)[5]
    chk = shell_disjoint_balls(shell, 5.0)
    assert not chk.passed and chk.witness is not None


def test_tops_stay_near_orbit_of_origin():
    fam = build_family(cusp_orbit("modular", 500.0))
    assert top_distance_to_orbit(fam) < 5.0


@given(st.floats(0.01, 0.99), st.floats(0, 2 * math.pi))
@settings(max_examples=50)
def test_horoball_contains_its_center(R, theta):
    base = np.array([math.cos(theta), math.sin(theta)])
    H = Horoball(base, R)
    assert H.contains((1 - R) * base)
    assert not H.contains(-0.999 * base)


def test_summit_radius_symmetric():
    u = np.array([[1.0, 0.0]])
    v = np.array([[0.0, 1.0]])
    assert np.allclose(summit_radius(u, v), summit_radius(v, u))


def test_hyperbolic_family_builds():
    o = enumerate_orbit(__import__("horolab").load_catalog("schottky2"), 0, 1e8)
    fam = build_family(o)
    assert not isinstance(fam, OverlapCounterexample)
    assert len(fam) > 0
