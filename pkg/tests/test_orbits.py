import json

import numpy as np
import pytest

from horolab.groups import load_catalog, load_catalog_file
from horolab.hypcore import MoebiusMap, origin_image
from horolab.orbits import (enumerate_orbit, estimate_delta, gauss_ext_gcd, ext_gcd, integer_word,
                            shell_counts, word_product)


def _point_set(o, digits=9):
    return sorted(map(tuple, np.round(o.points, digits).tolist()))


@pytest.mark.parametrize("name,L_max", [("modular", 300.0), ("picard", 20.0)])
@pytest.mark.parametrize("y", [0, "interior"])
def test_direct_and_bfs_routes_agree(name, L_max, y):
    spec = load_catalog(name)
    a = enumerate_orbit(spec, y, L_max, route="direct")
    b = enumerate_orbit(spec, y, L_max, route="bfs")
    assert len(a) == len(b)
    assert _point_set(a) == _point_set(b)
    assert np.allclose(np.sort(a.L), np.sort(b.L))


def test_orbit_sorted_and_bounded():
    o = enumerate_orbit(load_catalog("modular"), 0, 500.0)
    assert np.all(np.diff(o.L) >= 0)
    assert o.L.max() <= 500.0
    assert np.allclose(np.linalg.norm(o.points, axis=1), 1.0)


def test_words_reproduce_points():
    spec = load_catalog("modular")
    o = enumerate_orbit(spec, "interior", 200.0)
    for i in range(0, len(o), max(1, len(o) // 25)):
        m = word_product(spec, o.word(i))
        g = MoebiusMap.from_array(m, 1)
        assert np.allclose(origin_image(g), o.points[i], atol=1e-9)


def test_exact_boundary_values_are_farey():
    o = enumerate_orbit(load_catalog("modular"), 0, 50.0)
    seen = [o.boundary_exact(i) for i in range(len(o))]
    assert None in seen
    for f in seen:
        if f is not None:
            # L of the cusp image p/q equals (p^2 + q^2 + ...) so q^2 <= 4 L
            assert f.denominator ** 2 <= 4 * 50


def test_gcd_helpers():
    g, x, y = ext_gcd(240, 46)
    assert g == 2 and 240 * x + 46 * y == 2
    g, x, y = gauss_ext_gcd(complex(3, 4), complex(1, 2))
    assert abs(g) > 0
    assert abs(complex(3, 4) * x + complex(1, 2) * y - g) < 1e-9


def test_integer_word_round_trip():
    spec = load_catalog("modular")
    m = np.array([[2, 1], [7, 4]], dtype=np.complex128)
    w = integer_word(spec, m)
    back = word_product(spec, w)
    assert np.allclose(back, m) or np.allclose(back, -m)


def test_schottky_free_bfs_distinct():
    spec = load_catalog("schottky2")
    o = enumerate_orbit(spec, "interior", 1e6)
    assert o.route == "bfs"
    pts = _point_set(o, 12)
    assert len(set(pts)) == len(pts)
    assert len(o) > 20


def test_shell_counts_grow_like_k_power():
    o = enumerate_orbit(load_catalog("modular"), 0, 2.0 ** 14)
    counts = shell_counts(o, 2.0, 12)
    r = [counts[n] / 2.0 ** n for n in range(4, 13)]
    assert max(r) / min(r) < 1.5


def test_delta_quick_modular():
    est = estimate_delta(load_catalog("modular"), 10.0, seed=0, n_boot=50)
    assert abs(est.value - 1.0) < 0.2
    assert est.ci[0] <= est.bootstrap_mean <= est.ci[1]


def test_catalog_file_round_trip(tmp_path):
    doc = {
        "schema": "horolab.group/1", "name": "my-modular", "dim": 1, "kind": "first",
        "generators": [[["1", "1"], ["0", "1"]], [["0", "-1"], ["1", "0"]]],
        "parabolic": [{"point": "inf", "rank": 1}], "delta": 1,
    }
    path = tmp_path / "g.json"
    path.write_text(json.dumps(doc))
    spec = load_catalog_file(str(path))
    assert spec.standard == "modular"
    a = enumerate_orbit(spec, 0, 100.0)
    b = enumerate_orbit(load_catalog("modular"), 0, 100.0)
    assert _point_set(a) == _point_set(b)


def test_catalog_file_rejects_missing_fields(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"name": "x", "dim": 1}))
    with pytest.raises(ValueError):
        load_catalog_file(str(path))


def test_rejects_tiny_L_max():
    with pytest.raises(ValueError):
        enumerate_orbit(load_catalog("modular"), 0, 0.5)
