"""End-to-end acceptance checks, one test per criterion.

Run ``pytest tests/test_acceptance.py -v``; the terminal summary prints one
PASS/FAIL line per criterion.
"""

import json
import math
import os
import subprocess
import sys
import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from conftest import cusp_orbit
from horolab import cf
from horolab.counting import CONSISTENT, CurveSpec, check_generic, shell_report, tube_counts
from horolab.dioph import (SINGULAR, ApproxFunction, MeasureSpec, geometric_grid, khintchine_classify,
                           mc_shell_measure, random_boundary_points, singularity_profile)
from horolab.games import (Concentric, GameBall, Interval, check_tree, fishman_cantor,
                           interval_packing_count, play_transfer_game, tournament)
from horolab.geodesics import cross_validate, cf_fast_path, loglaw_mc
from horolab.horoballs import build_family, disjointness_constant, farey_min_exact, shell_disjoint_balls
from horolab.orbits import enumerate_orbit, estimate_delta


def test_criterion_1_sandwich(modular):
    t0 = time.perf_counter()
    o = enumerate_orbit(modular, "interior", 1e4)
    # distance from the image point itself, L from the matrix entries
    rho = 2.0 * np.arctanh(np.linalg.norm(o.points, axis=1))
    e = np.exp(rho)
    slack = 1e-9 * e
    bad = np.count_nonzero((o.L > e + slack) | (e > 4.0 * o.L + slack))
    assert len(o) > 10_000
    assert bad == 0
    assert time.perf_counter() - t0 < 10.0


def test_criterion_2_farey_constant(modular):
    m, witness = farey_min_exact(100)
    assert m == 1 and isinstance(m, int)
    (p, q), (p2, q2) = witness
    assert abs(Fraction(p, q) - Fraction(p2, q2)) * q * q2 == 1
    o = cusp_orbit("modular", 2.0 ** 11)
    c1 = disjointness_constant(o.restrict(1100.0)).c1
    c2 = disjointness_constant(o.restrict(1100.0)).c2(2.0)
    assert 0.49 < c1 < 0.51
    for shell in o.shells(2, 10):
        assert shell_disjoint_balls(shell, c2).passed, shell.n


@pytest.mark.parametrize("name", ["modular", "picard"])
def test_criterion_3_corridor(name):
    L0 = {"modular": 3000.0, "picard": 128.0}[name]
    small = build_family(cusp_orbit(name, L0), check=False)
    big = build_family(cusp_orbit(name, 2 * L0), check=False)
    assert len(small) >= 10_000
    lo, hi = small.corridor()
    assert hi / lo <= 16.0
    lo2, hi2 = big.corridor()
    assert abs(lo2 / lo - 1) <= 0.05 and abs(hi2 / hi - 1) <= 0.05


@pytest.mark.parametrize("name,R,target,tol", [
    ("modular", 14.0, 1.0, 0.1),
    ("picard", 7.0, 2.0, 0.15),
    ("schottky2", 40.0, None, None),
])
def test_criterion_4_delta(name, R, target, tol):
    from horolab.groups import load_catalog

    spec = load_catalog(name)
    t0 = time.perf_counter()
    est = estimate_delta(spec, R, seed=0)
    assert time.perf_counter() - t0 < 60.0
    if target is not None:
        assert abs(est.value - target) <= tol
    else:
        assert 0.0 < est.value < 1.0
        assert est.gap <= 0.05
        other = estimate_delta(spec, R, seed=1)
        assert abs(other.bootstrap_mean - est.bootstrap_mean) <= 0.02


def test_criterion_5_singular_points():
    o = cusp_orbit("modular", 1e5)
    c1 = disjointness_constant(o.restrict(1100.0)).c1
    grid = geometric_grid(2.0, 1e5, 1.02)
    rng = np.random.default_rng(2024)
    pts = random_boundary_points(rng, 100, 1)
    verdicts = [singularity_profile(o, xi, grid, c1).verdict for xi in pts]
    assert verdicts.count(SINGULAR) == 0
    # orbit points: eps vanishes once N exceeds their own L (strict profile)
    tail_start = math.sqrt(grid[0] * grid[-1])
    for i in (5, 40, 300, 1000, 2000, 20_000):
        prof = singularity_profile(o, o.points[i], grid, c1)
        assert np.all(prof.eps[prof.N > o.L[i]] == 0.0)
        if o.L[i] < tail_start:
            assert prof.verdict == SINGULAR
    # golden ratio: digit route against brute-force search over q
    from_digits = cf.liminf_from_digits(cf.golden_digits(60), q_min=1000, q_max=10**6)
    brute = min(v for _, _, v in cf.brute_force_q2(mpmath.phi, 10**6, q_min=1000))
    assert abs(from_digits - 0.44721) <= 0.001
    assert abs(brute - 0.44721) <= 0.001


def test_criterion_6_khintchine(modular):
    w = modular.exponent()
    assert khintchine_classify(ApproxFunction.power(1.0), w).verdict == "diverges"
    assert khintchine_classify(ApproxFunction.power(1.5), w).verdict == "converges"
    assert khintchine_classify(ApproxFunction.power(2.0), w).verdict == "converges"
    assert khintchine_classify(ApproxFunction.logpower(0.0), w).verdict == "diverges"
    assert khintchine_classify(ApproxFunction.logpower(0.5), w).verdict == "converges"
    o = cusp_orbit("modular", 2.0 ** 21)
    m = mc_shell_measure(o, ApproxFunction.power(2.0), MeasureSpec("lebesgue", 1), range(0, 21), 10**6, 0, 2)
    assert sum(m.mu) <= 2.0
    assert m.tail[15] < 1e-3


def test_criterion_7_cantor_bound():
    o = cusp_orbit("modular", 2.0 ** 16)
    m = mc_shell_measure(o, ApproxFunction.power(2.0), MeasureSpec("cantor", 1), range(0, 16), 200_000, 7, 2)
    C = m.head_constant()
    assert 0 < C < 4.0
    # one constant measured on the first half must bound every shell
    assert all(mu <= C * b for mu, b in zip(m.mu, m.bound))
    inc = np.diff(m.qwe_partial)
    assert m.qwe_partial[-1] < 4.0
    assert inc[-1] < 0.1 * inc[0]


def test_criterion_8_game_certificates():
    t0 = time.perf_counter()
    failures, plays = 0, 0
    for beta in (Fraction(1, 3), Fraction(1, 5)):
        for kind in ("random", "adversarial"):
            recs = tournament(beta, 250, 30, kind, seed=11)
            plays += len(recs)
            failures += sum(not r.certificate.passed for r in recs)
    assert plays == 1000
    assert failures == 0
    assert time.perf_counter() - t0 < 120.0


def test_criterion_9_dimension_and_transfer():
    alpha = Fraction(1, 2)
    K, first = Interval(), GameBall(Fraction(1, 2), Fraction(1, 2))
    bounds = []
    for e in (4, 6, 8):
        beta = Fraction(1, 2 ** e)
        tree = fishman_cantor(K, alpha, beta, Concentric(alpha), 2, first)
        check_tree(tree, K, Concentric(alpha))
        assert tree.N == interval_packing_count(alpha, beta)
        bounds.append(tree.bound)
    assert bounds[0] < bounds[1] < bounds[2]
    assert bounds[2] >= 0.8
    for seed in range(10):
        tr, cert, ayesha = play_transfer_game(Fraction(1, 16), Fraction(1, 2), Fraction(1, 17), 20, seed)
        assert not ayesha.failures
        assert cert.passed


def test_criterion_10_counting(picard):
    o = cusp_orbit("picard", 2.0 ** 9)
    rep = shell_report(o, 2.0, 8)
    lo, hi = rep.corridor
    assert hi / lo <= 2.0
    circle = CurveSpec.circle()
    check_generic(picard, circle)
    gen = tube_counts(o, circle, ApproxFunction.power(1.0), 2.0, 8)
    assert gen.verdict == CONSISTENT
    deg = tube_counts(o, CurveSpec.real_line(), ApproxFunction.logpower(0.0), 2.0, 8)
    assert deg.linear_growth() > 0.5
    assert all(r.ratio >= deg.linear_growth() * r.n for r in deg.rows if r.n >= 1)
    # points on the curve itself contribute (on_curve / 2^n) n log 2 with a stable supply
    supply = [r.on_curve / 2.0 ** r.n for r in deg.rows if r.n >= 3]
    assert min(supply) >= 2.0 and max(supply) / min(supply) <= 2.0
    per_n = [(r.on_curve / (4.0 ** r.n * r.width)) / r.n for r in deg.rows if r.n >= 6]
    assert max(per_n) / min(per_n) <= 1.1


def test_criterion_11_log_law():
    fam = build_family(cusp_orbit("modular", 2.0 ** 18), check=False)
    rng = np.random.default_rng(99)
    within = total = 0
    for _ in range(100):
        digits = cf.random_digits(rng, 40)
        chk = cross_validate(fam, float(cf.value(digits)), digits)
        within += chk.within
        total += chk.total
    assert total > 100
    assert within / total >= 0.95
    golden = cf_fast_path(cf.golden_digits(20_000))
    for h in (100, 1000, 10_000):
        assert golden.max_statistic(h) < 0.3
    s = loglaw_mc(1000, (100, 1000, 10_000), seed=0)
    assert 0.6 <= s.medians[-1] <= 1.6
    assert s.increasing


CLI_RUNS = [
    "orbit --lmax 200",
    "delta --rmax 8",
    "horoballs --lmax 300",
    "dirichlet --xi phi --lmax 1000",
    "singular --xi 1/2 --lmax 10000",
    "bad --xi sqrt2-1 --lmax 10000 --horizon 100000",
    "khintchine --psi logpower:0.5",
    "mcshell --nmax 8 --samples 20000 --seed 3",
    "game --samples 16 --seed 5",
    "cantor --set cantor",
    "count --group picard --nmax 6",
    "tube --group picard --nmax 6 --curve real",
    "geodesic --xi phi --lmax 65536",
    "loglaw --samples 64 --horizon 1000 --seed 2",
]


def _cli(cmd, threads):
    env = dict(os.environ, HOROLAB_THREADS=str(threads))
    out = subprocess.run([sys.executable, "-m", "horolab.cli", *cmd.split()], env=env,
                         capture_output=True, check=False)
    assert out.returncode in (0, 2), out.stderr.decode()
    return out.stdout


def test_criterion_12_determinism():
    for cmd in CLI_RUNS:
        one, many = _cli(cmd, 1), _cli(cmd, 4)
        assert one == many, cmd
        assert json.loads(one)["command"] == cmd.split()[0]
