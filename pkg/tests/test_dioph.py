import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import cusp_orbit
from horolab import cf
from horolab.hypcore import ball_to_half
from horolab.dioph import (SINGULAR, UNDECIDED, WITNESSED, ApproxFunction, MeasureSpec, Targets, bad_constant,
                           bad_constant_cf, cantor_cdf, dirichlet_search, geometric_grid, golden_ratio,
                           khintchine_classify, mc_shell_measure, real_line_point, singularity_profile)


@pytest.fixture(scope="module")
def orbit():
    return cusp_orbit("modular", 2.0 ** 14)


@pytest.fixture(scope="module")
def real_targets(orbit):
    return Targets.from_orbit(orbit, "real")


def test_parse_families():
    assert ApproxFunction.parse("power:2").tau == 2
    assert ApproxFunction.parse("dirichlet:0.5").eps == 0.5
    f = ApproxFunction.parse("logpower:0,w=2")
    assert f.family == "logpower" and f.w == 2
    with pytest.raises(ValueError):
        ApproxFunction.parse("nonsense")


@pytest.mark.parametrize("text", ["power:1", "power:2.5", "dirichlet:0.3", "logpower:0.5"])
def test_families_monotone_and_vanishing(text):
    f = ApproxFunction.parse(text)
    assert f.is_monotone()
    # r psi(r) stays constant for tau = 1 and the Dirichlet family
    assert f.r_psi_vanishes() == (text in ("power:2.5", "logpower:0.5"))


@given(st.floats(-2.0, 2.0), st.floats(4.0, 5000.0))
@settings(max_examples=60, deadline=None)
def test_dirichlet_theorem_real_chart(real_targets, x, N):
    # some q <= sqrt(N) has |q x - p| < 1 / sqrt(N), i.e. quality < 1 with L = q^2
    res = dirichlet_search(real_targets, [x], N)
    assert res.quality <= 1.0 + 1e-9


def test_dirichlet_refuses_beyond_enumeration(orbit):
    with pytest.raises(ValueError):
        dirichlet_search(orbit, real_line_point(0.3), 1e9)


def test_rational_point_singular(orbit):
    grid = geometric_grid(2.0, 2.0 ** 14)
    prof = singularity_profile(orbit, real_line_point(Fraction(2, 7)), grid, 0.5)
    assert prof.verdict == SINGULAR
    assert prof.eps[-1] == 0.0


def test_golden_point_witnessed(orbit):
    grid = geometric_grid(2.0, 2.0 ** 14)
    prof = singularity_profile(orbit, real_line_point(golden_ratio() - 1), grid, 0.5)
    assert prof.verdict == WITNESSED
    assert prof.tail_limsup > prof.threshold


def test_verdicts_exhaustive(orbit):
    grid = geometric_grid(2.0, 2.0 ** 14)
    rng = np.random.default_rng(0)
    for x in rng.uniform(-1, 1, 10):
        assert singularity_profile(orbit, real_line_point(x), grid, 0.5).verdict in (SINGULAR, WITNESSED, UNDECIDED)


def test_bad_constant_real_chart_matches_cf(real_targets):
    x = math.sqrt(2) - 1
    geo = bad_constant(real_targets, [x])
    arith = bad_constant_cf(cf.digits_of_quadratic(-1, 2, 1, 60), 10**3)
    # same quantity q^2 |x - p/q| by a lattice search and by convergents
    assert geo.c_hat == pytest.approx(arith.c_hat, rel=1e-6)


def test_liouville_not_badly_approximable():
    d = cf.digits_of_fraction(cf.liouville_fraction())
    assert bad_constant_cf(d, 10**8).c_hat < 1e-3


def test_khintchine_partial_sums_reflect_verdict():
    r = khintchine_classify(ApproxFunction.power(1.0), 1.0, 10**5)
    assert r.verdict == "diverges" and not r.heuristic
    assert r.partial_sums[-1] > r.partial_sums[0] + 2
    r2 = khintchine_classify(lambda x: 1.0 / x ** 3, 1.0, 10**5)
    assert r2.heuristic and r2.verdict == "converges"


def test_dirichlet_family_diverges():
    assert khintchine_classify(ApproxFunction.dirichlet(0.5), 1.0).verdict == "diverges"


@given(st.floats(0.0, 1.0))
def test_cantor_cdf_self_similar(x):
    F = cantor_cdf(np.array([x / 3, x]))
    assert F[0] == pytest.approx(F[1] / 2, abs=1e-9)
    assert cantor_cdf(np.array([(x + 2) / 3]))[0] == pytest.approx(0.5 + F[1] / 2, abs=1e-9)


def test_cantor_samples_lie_on_cantor_set():
    pts = MeasureSpec("cantor", 1).sample(np.random.default_rng(1), 200)
    # samples are boundary points; recover the real coordinate and check ternary digits
    assert pts.shape == (200, 2)
    assert np.allclose(np.linalg.norm(pts, axis=1), 1.0)
    z, _ = ball_to_half(pts)
    x = z.real
    assert np.all((x >= -1e-12) & (x <= 1 + 1e-12))
    for k in range(1, 9):
        digit = np.floor(3.0 ** k * x + 1e-9) % 3
        assert not np.any(digit == 1), k


def _exact_union_measure(points, r):
    """Normalised length of a union of arcs on the circle, by direct interval merging."""
    theta = np.arctan2(points[:, 1], points[:, 0])
    half = 2.0 * np.arcsin(np.minimum(r / 2.0, 1.0))
    iv = sorted(zip(theta - half, theta + half))
    total, cur_lo, cur_hi = 0.0, None, None
    for lo, hi in iv:
        if cur_hi is None or lo > cur_hi:
            if cur_hi is not None:
                total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        else:
            cur_hi = max(cur_hi, hi)
    total += cur_hi - cur_lo
    return min(total, 2 * math.pi) / (2 * math.pi)


def test_mc_shell_measure_matches_arc_union(orbit):
    psi = ApproxFunction.power(1.5)
    m = mc_shell_measure(orbit, psi, MeasureSpec("lebesgue", 1), range(2, 9), 60_000, 4, 2.0)
    for n, mu in zip(m.n, m.mu):
        sh = orbit.shells(2.0)[n]
        exact = _exact_union_measure(sh.points, psi(sh.L))
        sigma = math.sqrt(max(exact * (1 - exact), 1e-6) / 60_000)
        assert abs(mu - exact) <= 5 * sigma + 1e-4, n


def test_mc_shell_measure_deterministic_across_threads(orbit):
    psi = ApproxFunction.power(2.0)
    a = mc_shell_measure(orbit, psi, None, range(0, 10), 20_000, 9, threads=1)
    b = mc_shell_measure(orbit, psi, None, range(0, 10), 20_000, 9, threads=3)
    assert a.mu == b.mu and a.tail == b.tail
