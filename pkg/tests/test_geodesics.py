import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import cusp_orbit
from horolab import cf
from horolab.geodesics import (COMPLETE, PARTIAL, THROAT, GeodesicRay, cf_fast_path, coverage_horizon, depth,
                               depth_bruteforce, excursion_series, loglaw_mc, penetration)
from horolab.horoballs import Horoball, build_family
from horolab.hypcore import boundary_ball_coords


@pytest.fixture(scope="module")
def family():
    return build_family(cusp_orbit("modular", 2.0 ** 16), check=False)


def _unit(theta):
    return np.array([math.cos(theta), math.sin(theta)])


@given(st.floats(0.0, 2 * math.pi), st.floats(0.02, 0.45))
def test_depth_vanishes_on_horosphere(phi, R):
    base = _unit(0.3)
    c = (1 - R) * base
    x = c + R * _unit(phi)
    if np.linalg.norm(x) < 1 - 1e-6:
        assert abs(float(depth(x, base, R))) < 1e-7


# the peak sits at 1 - s* ~ theta / 2, so keep theta large enough for the scan grid
@given(st.floats(0.01, 0.6), st.floats(0.05, 0.45))
@settings(max_examples=60)
def test_closed_form_peak_matches_dense_scan(theta, R):
    ray = GeodesicRay(_unit(theta))
    H = Horoball(_unit(0.0), R)
    e = penetration(ray, H)
    s = np.linspace(0, 1 - 1e-9, 200_001)
    d = depth(s[:, None] * ray.xi, H.base, R)
    if e is None:
        assert d.max() <= 1e-6
    else:
        assert e.max_depth == pytest.approx(d.max(), abs=1e-6)


def test_ray_at_base_point_is_a_throat():
    e = penetration(GeodesicRay(_unit(0.0)), Horoball(_unit(0.0), 0.25))
    assert e.throat and math.isinf(e.max_depth)


def test_busemann_depth_equals_distance_to_horosphere():
    ray = GeodesicRay(_unit(0.2))
    H = Horoball(_unit(0.0), 0.3)
    e = penetration(ray, H)
    brute = depth_bruteforce(ray, H, e.t_enter, e.t_exit, 2001)
    assert brute == pytest.approx(e.max_depth, abs=1e-3)


@given(st.floats(0.01, 0.999))
def test_time_of_inverts_ray(s):
    t = GeodesicRay.time_of(s)
    ray = GeodesicRay(_unit(1.0))
    assert np.linalg.norm(ray(t)) == pytest.approx(s)


def test_ray_rejects_interior_target():
    with pytest.raises(ValueError):
        GeodesicRay(np.array([0.5, 0.0]))


def test_horoball_containing_origin_rejected():
    with pytest.raises(ValueError):
        penetration(GeodesicRay(_unit(0)), Horoball(_unit(0), 0.6))


def test_series_status(family):
    T = coverage_horizon(family)
    xi = boundary_ball_coords(complex(math.sqrt(2) - 1), 1)
    assert excursion_series(family, xi, T).status == COMPLETE
    assert excursion_series(family, xi, T + 5).status == PARTIAL
    rational = boundary_ball_coords(complex(2 / 7), 1)
    assert excursion_series(family, rational, T).status == THROAT


def test_coverage_horizon_grows_with_enumeration():
    small = build_family(cusp_orbit("modular", 2.0 ** 12), check=False)
    big = build_family(cusp_orbit("modular", 2.0 ** 16), check=False)
    assert coverage_horizon(big) == pytest.approx(coverage_horizon(small) + math.log(16), abs=0.05)


@given(st.lists(st.integers(1, 1000), min_size=5, max_size=60))
def test_cf_log_q_matches_exact_convergents(tail):
    digits = [0] + tail
    path = cf_fast_path(digits)
    qs = [q for _, q in cf.convergents(digits)]
    assert np.allclose(path.log_q, [math.log(q) for q in qs[:len(path.log_q)]], rtol=1e-12, atol=1e-12)


def test_golden_statistic_small():
    path = cf_fast_path(cf.golden_digits(5000))
    assert path.max_statistic() < 0.3


def test_large_digit_gives_large_statistic():
    digits = [0] + [1] * 40 + [10**8] + [1] * 10
    assert cf_fast_path(digits).max_statistic() > 2.0


def test_loglaw_deterministic_across_threads():
    a = loglaw_mc(48, (100, 300), seed=4, threads=1)
    b = loglaw_mc(48, (100, 300), seed=4, threads=3)
    assert a.medians == b.medians and a.quantiles == b.quantiles


def test_bounded_sampler_stays_low():
    s = loglaw_mc(64, (100, 1000), seed=0, sampler="bounded")
    assert s.medians[-1] < 0.3
