import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import cusp_orbit
from horolab.counting import (CONSISTENT, CurveSpec, check_generic, great_circle_band_area, neighborhood_measure,
                              preserving_elements, shell_report, tube_counts)
from horolab.dioph import ApproxFunction
from horolab.hypcore import boundary_ball_coords


@pytest.mark.parametrize("width", [0.01, 0.05, 0.2])
def test_band_area_closed_form_vs_monte_carlo(width):
    m = neighborhood_measure(CurveSpec.real_line(), width, 200_000, seed=1)
    assert abs(m.area - great_circle_band_area(width)) <= 5 * m.stderr


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.2, 2.0))
@settings(max_examples=30, deadline=None)
def test_circle_distance_matches_polyline(cx, cy, r):
    center = complex(cx, cy)
    exact = CurveSpec.circle(center, r)
    poly = CurveSpec.from_param(lambda t: center + r * np.exp(1j * t), 0.0, 2 * math.pi)
    rng = np.random.default_rng(0)
    x = rng.standard_normal((50, 3))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    assert np.allclose(exact.distance(x), poly.distance(x), atol=5e-8)


def test_points_on_circle_have_zero_distance():
    c = CurveSpec.circle()
    pts = boundary_ball_coords(c.center + c.radius * np.exp(1j * np.linspace(0, 6, 40)), 2)
    assert np.max(c.distance(pts)) < 1e-12


def test_real_line_preserved_by_picard_elements(picard):
    found = preserving_elements(picard, CurveSpec.real_line(), 3)
    assert len(found) > 0
    with pytest.raises(ValueError):
        check_generic(picard, CurveSpec.real_line(), 3)


def test_generic_circle_not_preserved(picard):
    assert len(preserving_elements(picard, CurveSpec.circle(), 5)) == 0


def test_polyline_rejects_coarse_vertices():
    v = boundary_ball_coords(np.array([0j, 1 + 0j, 2 + 0j]), 2)
    with pytest.raises(ValueError):
        CurveSpec("polyline", vertices=v)


def test_picard_shell_counts_quadratic():
    rep = shell_report(cusp_orbit("picard", 2.0 ** 7), 2.0, 6)
    lo, hi = rep.corridor
    assert hi / lo < 2.0
    assert rep.counts[6] > 3 * rep.counts[5]


def test_shell_report_needs_sphere():
    with pytest.raises(ValueError):
        shell_report(cusp_orbit("modular", 100.0))


def test_generic_tube_consistent_and_degenerate_has_curve_points():
    o = cusp_orbit("picard", 2.0 ** 7)
    gen = tube_counts(o, CurveSpec.circle(), ApproxFunction.power(1.0), 2.0, 6)
    assert gen.verdict == CONSISTENT
    assert all(r.on_curve <= 1 for r in gen.rows)
    deg = tube_counts(o, CurveSpec.real_line(), ApproxFunction.logpower(0.0), 2.0, 6)
    assert deg.curve_supply() > 1.0
    assert all(r.on_curve <= r.count <= r.shell_total for r in deg.rows)
