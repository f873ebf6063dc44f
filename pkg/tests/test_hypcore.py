import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from horolab.hypcore import (GaussQ, ModelPoint, MoebiusMap, apply, ball_to_half, batch_L, classify,
                             conformal_dilation_ball, half_to_ball, hyperbolic_distance, origin_image,
                             to_ball, to_half_space)

small = st.integers(-6, 6)


@st.composite
def sl2z(draw):
    """Random SL(2, Z) element as a product of T^n and S."""
    m = MoebiusMap.identity(1)
    for n in draw(st.lists(small, min_size=1, max_size=5)):
        m = m @ MoebiusMap([[1, n], [0, 1]]) @ MoebiusMap([[0, -1], [1, 0]])
    return m


@st.composite
def sl2zi(draw):
    m = MoebiusMap.identity(2)
    for a, b in draw(st.lists(st.tuples(small, small), min_size=1, max_size=4)):
        T = MoebiusMap([[GaussQ(1), GaussQ(a, b)], [GaussQ(0), GaussQ(1)]], dim=2)
        S = MoebiusMap([[GaussQ(0), GaussQ(-1)], [GaussQ(1), GaussQ(0)]], dim=2)
        m = m @ T @ S
    return m


@given(small, small, small, small)
def test_gauss_rational_matches_complex(a, b, c, d):
    x, y = GaussQ(a, b), GaussQ(c, d)
    assert complex(x * y) == complex(a, b) * complex(c, d)
    assert complex(x + y) == complex(a + c, b + d)
    if c or d:
        q = x / y
        assert abs(complex(q) - complex(a, b) / complex(c, d)) < 1e-12
        assert q * y == x


def test_gauss_rational_exact_fractions():
    x = GaussQ(Fraction(1, 3), Fraction(-2, 7))
    assert x.abs2() == Fraction(1, 9) + Fraction(4, 49)
    assert x.conj().im == Fraction(2, 7)


@given(sl2z())
def test_inverse_and_L_exact(g):
    e = g @ g.inverse()
    assert classify(e).kind == "identity"
    assert isinstance(g.L, Fraction)
    # two routes to L: matrix entries and the image of the origin.
    # 1 - |g(0)|^2 ~ 1/L cancels, so the float route loses about L ulps.
    L = float(g.L)
    assert math.isclose(L, conformal_dilation_ball(g), rel_tol=max(1e-12, 64 * L * 2.0 ** -52))
    assert math.isclose(batch_L(g.matrix[None])[0], float(g.L), rel_tol=1e-12)


@given(sl2zi())
@settings(max_examples=50)
def test_picard_L_two_routes(g):
    assert math.isclose(float(g.L), conformal_dilation_ball(g), rel_tol=1e-8)


@given(st.floats(-5, 5), st.floats(0.01, 5), st.integers(1, 2))
def test_half_ball_round_trip(x, t, dim):
    z = complex(x, 0.3 * x if dim == 2 else 0.0)
    w = half_to_ball(np.array([z]), np.array([t]), dim)[0]
    assert np.linalg.norm(w) < 1
    z2, t2 = ball_to_half(w)
    assert abs(complex(z2) - z) < 1e-9 * (1 + abs(z) ** 2 + t * t)
    assert abs(float(t2) - t) < 1e-9 * (1 + abs(z) ** 2 + t * t)


def test_infinity_maps_to_pole():
    w = half_to_ball(np.array([complex(np.inf)]), np.array([0.0]), 1)[0]
    assert w.tolist() == [1.0, 0.0]
    p = to_ball(ModelPoint.infinity(1))
    assert p.coords == (1.0, 0.0)


@given(sl2z(), st.floats(-3, 3), st.floats(0.1, 3), st.floats(-3, 3), st.floats(0.1, 3))
@settings(max_examples=60)
def test_isometry_preserves_distance(g, x1, t1, x2, t2):
    p, q = ModelPoint.half(x1, t1), ModelPoint.half(x2, t2)
    d0 = hyperbolic_distance(p, q)
    d1 = hyperbolic_distance(apply(g, p), apply(g, q))
    assert abs(d0 - d1) <= 1e-7 * max(1.0, d0)


def test_half_space_distance_formula():
    # vertical segment: rho = log(t2 / t1)
    d = hyperbolic_distance(ModelPoint.half(0.3, 1.0), ModelPoint.half(0.3, math.e ** 2))
    assert d == pytest.approx(2.0, rel=1e-12)


@given(sl2z())
def test_sandwich_inequality(g):
    w = origin_image(g)
    rho = 2.0 * math.atanh(min(float(np.linalg.norm(w)), 1 - 1e-16))
    L = float(g.L)
    assert L <= math.exp(rho) * (1 + 1e-9)
    assert math.exp(rho) <= 4 * L * (1 + 1e-9)


def test_classify_kinds():
    assert classify(MoebiusMap([[1, 1], [0, 1]])).kind == "parabolic"
    assert classify(MoebiusMap([[2, 1], [1, 1]])).kind == "hyperbolic"
    assert classify(MoebiusMap([[0, -1], [1, 0]])).kind == "elliptic"


def test_rejects_bad_determinant():
    with pytest.raises(ValueError):
        MoebiusMap([[2, 0], [0, 1]])


def test_model_round_trip_points():
    p = ModelPoint.half(0.25, 0.5)
    back = to_half_space(to_ball(p))
    assert back.coords[0] == pytest.approx(0.25) and back.coords[-1] == pytest.approx(0.5)
