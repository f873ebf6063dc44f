"""``horolab`` command line: run one experiment, print a JSON report, optionally write CSV data.

Exit codes: 0 on success, 2 when the run completed but carries flags
(PARTIAL, UNDECIDED-AT-DEPTH, truncation, failed certificates), 1 on error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from . import __version__

SCHEMA = "horolab.report/1"
DEFAULT_RMAX = {"modular": 14.0, "picard": 7.0, "schottky2": 40.0}
NAMED_POINTS = ("phi", "phi-1", "sqrt2", "sqrt2-1", "liouville")


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# helpers

def _clean(v):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_clean(x) for x in v.tolist()]
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        f = float(v)
        if math.isfinite(f):
            return f
        return "nan" if math.isnan(f) else ("inf" if f > 0 else "-inf")
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, complex):
        return {"re": _clean(v.real), "im": _clean(v.imag)}
    return v


def dumps(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2) + "\n"


def _group(args):
    from .groups import resolve_group

    try:
        return resolve_group(None if args.catalog else args.group, args.catalog)
    except (OSError, ValueError) as exc:
        raise UsageError(f"--group/--catalog: {exc}") from None


def _fraction(text: str, field: str) -> Fraction:
    try:
        f = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"{field}: expected a rational such as 1/3, got {text!r}") from None
    return f


def _psi(text: str):
    from .dioph import ApproxFunction

    try:
        return ApproxFunction.parse(text)
    except (ValueError, KeyError, IndexError) as exc:
        raise UsageError(f"--psi: {exc}") from None


def _xi_value(text: str):
    """A boundary value in the half-space chart: named constant, rational, real or complex."""
    import mpmath

    if text in ("phi",):
        return float(mpmath.phi)
    if text == "phi-1":
        return float(mpmath.phi - 1)
    if text == "sqrt2":
        return math.sqrt(2.0)
    if text == "sqrt2-1":
        return math.sqrt(2.0) - 1.0
    if text == "liouville":
        from .cf import liouville_fraction

        return float(liouville_fraction())
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        pass
    try:
        return complex(text.replace("i", "j"))
    except ValueError:
        raise UsageError(f"--xi: cannot parse {text!r}") from None


def _xi_digits(text: str, n: int) -> Optional[List[int]]:
    """Exact continued-fraction digits for named quadratic points and rationals."""
    from . import cf

    if text == "phi":
        return [1] * n
    if text == "phi-1":
        return [0] + [1] * (n - 1)
    if text == "sqrt2":
        return cf.digits_of_quadratic(0, 2, 1, n)
    if text == "sqrt2-1":
        return cf.digits_of_quadratic(-1, 2, 1, n)
    if text == "liouville":
        return cf.digits_of_fraction(cf.liouville_fraction())
    try:
        return cf.digits_of_fraction(Fraction(text))
    except (ValueError, ZeroDivisionError):
        return None


def _ball_point(text: str, dim: int) -> np.ndarray:
    from .hypcore import boundary_ball_coords

    z = _xi_value(text)
    if isinstance(z, complex) and dim == 1:
        if abs(z.imag) > 0:
            raise UsageError("--xi: complex points need a d = 2 group")
        z = z.real
    return boundary_ball_coords(complex(z), dim)


def _write_csv(path: str, header: List[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for r in rows:
            fh.write(",".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in r) + "\n")


def _measured_c1(orbit, n_points: int = 4000) -> float:
    from .horoballs import disjointness_constant

    m = min(len(orbit), n_points)
    mode = "parabolic" if orbit.mode == "parabolic" else "hyperbolic"
    return disjointness_constant(orbit.points[:m], orbit.L[:m], mode).c1


# ---------------------------------------------------------------------------
# commands; each returns (payload, flags, csv files {name: (header, rows)})

def cmd_orbit(args):
    from .orbits import enumerate_orbit, shell_counts

    spec = _group(args)
    L_max = args.lmax or 1e3
    o = enumerate_orbit(spec, "interior" if args.interior else 0, L_max)
    k = args.k or 2.0
    n_max = args.nmax if args.nmax is not None else max(int(math.log(L_max, k)) - 1, 0)
    flags = ["TRUNCATED"] if o.truncated else []
    payload = {"group": spec.name, "mode": o.mode, "L_max": L_max, "points": len(o), "route": o.route,
               "k": k, "shell_counts": shell_counts(o, k, n_max), "first": [
                   {"point": o.points[i], "L": o.L[i], "word": list(o.word(i))} for i in range(min(10, len(o)))]}
    rows = ([*o.points[i].tolist(), float(o.L[i]), len(o.word(i))] for i in range(len(o)))
    hdr = [f"x{j}" for j in range(o.points.shape[1])] + ["L", "word_length"]
    return payload, flags, {"orbit.csv": (hdr, rows)}


def cmd_delta(args):
    from .orbits import estimate_delta

    spec = _group(args)
    R_max = args.rmax or DEFAULT_RMAX.get(spec.name, 10.0)
    est = estimate_delta(spec, R_max=R_max, seed=args.seed)
    payload = {"group": spec.name, "R_max": R_max, "slope": est.slope, "poincare": est.poincare, "gap": est.gap,
               "ci": list(est.ci), "bootstrap_mean": est.bootstrap_mean, "n_points": est.n_points,
               "value": est.value, "seed": args.seed}
    return payload, [], {}


def cmd_horoballs(args):
    from .horoballs import (build_family, disjointness_constant, farey_min_exact, invariance_defect,
                            OverlapCounterexample)
    from .orbits import enumerate_orbit

    spec = _group(args)
    L_max = args.lmax or 2000.0
    o = enumerate_orbit(spec, 0, L_max)
    fam = build_family(o)
    if isinstance(fam, OverlapCounterexample):
        return {"group": spec.name, "overlap": vars(fam)}, ["OVERLAP"], {}
    k = args.k or 2.0
    d = disjointness_constant(o.points, o.L, "parabolic" if o.mode == "parabolic" else "hyperbolic")
    payload = {"group": spec.name, "L_max": L_max, "entries": len(fam), "lambda": fam.lam,
               "corridor": list(fam.corridor()), "c1": d.c1, "c1_pair": list(d.pair), "k": k, "c2": d.c2(k),
               "invariance_defect": invariance_defect(fam, 200, args.seed), "seed": args.seed}
    if spec.standard == "modular":
        m, w = farey_min_exact(100)
        payload["farey_min_q100"] = {"value": m, "witness": [list(x) for x in w]}
    rows = ([*fam.base[i].tolist(), float(fam.R[i]), float(fam.L[i])] for i in range(len(fam)))
    hdr = [f"x{j}" for j in range(fam.base.shape[1])] + ["R", "L"]
    return payload, [], {"family.csv": (hdr, rows)}


def _boundary_orbit(spec, L_max):
    from .orbits import enumerate_orbit

    return enumerate_orbit(spec, 0, L_max)


def cmd_dirichlet(args):
    from .dioph import dirichlet_profile, geometric_grid

    spec = _group(args)
    N = args.lmax or 1e4
    o = _boundary_orbit(spec, N)
    xi = _ball_point(args.xi, spec.dim)
    res = dirichlet_profile(o, xi, geometric_grid(2.0, N, 1.25))
    best = o.entry(res.index)
    payload = {"group": spec.name, "xi": args.xi, "N": N, "quality": res.quality, "best_L": res.L,
               "best_point": best.point.coords, "best_word": list(best.word),
               "profile": [{"N": w[0], "L": w[2], "quality": w[3]} for w in res.witnesses]}
    return payload, [], {"dirichlet.csv": (["N", "L", "quality"], ((w[0], w[2], w[3]) for w in res.witnesses))}


def cmd_singular(args):
    from .dioph import UNDECIDED, geometric_grid, singularity_profile

    spec = _group(args)
    N = args.lmax or 1e5
    o = _boundary_orbit(spec, N)
    c1 = _measured_c1(o)
    xi = _ball_point(args.xi, spec.dim)
    prof = singularity_profile(o, xi, geometric_grid(2.0, N, 1.02), c1)
    payload = {"group": spec.name, "xi": args.xi, "N_max": N, "verdict": prof.verdict, "c1": c1,
               "threshold": prof.threshold, "tail_limsup": prof.tail_limsup,
               "eps_last": float(prof.eps[-1]), "zeros_from_N": _zeros_from(prof)}
    flags = [UNDECIDED] if prof.verdict == UNDECIDED else []
    return payload, flags, {"singular.csv": (["N", "eps"], zip(prof.N.tolist(), prof.eps.tolist()))}


def _zeros_from(prof):
    nz = np.nonzero(prof.eps != 0)[0]
    if len(nz) == 0:
        return float(prof.N[0])
    if nz[-1] == len(prof.eps) - 1:
        return None
    return float(prof.N[nz[-1] + 1])


def cmd_bad(args):
    from .dioph import Targets, bad_constant, bad_constant_cf

    spec = _group(args)
    payload = {"group": spec.name, "xi": args.xi}
    files = {}
    digits = _xi_digits(args.xi, 200) if spec.standard == "modular" else None
    if digits is not None:
        q_max = int(args.horizon or 10**6)
        res = bad_constant_cf(digits, q_max)
        payload["cf"] = {"q_max": q_max, "c_hat": res.c_hat, "tail_min": res.tail_min, "chart": "real, L = q^2"}
        files["bad_cf.csv"] = (["L", "c"], zip(res.L.tolist(), res.c.tolist()))
    L_max = args.lmax or 1e5
    o = _boundary_orbit(spec, L_max)
    res = bad_constant(o, _ball_point(args.xi, spec.dim))
    payload["ball"] = {"L_max": L_max, "c_hat": res.c_hat, "tail_min": res.tail_min}
    if spec.standard == "modular" and not isinstance(_xi_value(args.xi), complex):
        t = Targets.from_orbit(o, "real")
        rr = bad_constant(t, [_xi_value(args.xi)])
        payload["real_chart"] = {"q2_max": t.L_max, "c_hat": rr.c_hat, "tail_min": rr.tail_min}
    files["bad.csv"] = (["L", "c"], zip(res.L.tolist(), res.c.tolist()))
    return payload, [], files


def cmd_khintchine(args):
    from .dioph import khintchine_classify

    spec = _group(args)
    psi = _psi(args.psi or "power:2")
    if spec.delta is None:
        raise UsageError("--group: delta unknown for this group; run `delta` first and use a catalog file")
    w = spec.exponent()
    cutoff = int(args.horizon or 10**6)
    res = khintchine_classify(psi, w, cutoff)
    payload = {"group": spec.name, "psi": psi.params(), "w": w.w, "w_source": w.source, "cutoff": cutoff,
               "verdict": res.verdict, "heuristic": res.heuristic, "exponent": res.exponent,
               "partial_sums": [{"r": c, "sum": s} for c, s in zip(res.checkpoints, res.partial_sums)]}
    return payload, [], {}


def cmd_mcshell(args):
    from .dioph import MeasureSpec, mc_shell_measure

    spec = _group(args)
    psi = _psi(args.psi or "power:2")
    k = args.k or 2.0
    n_max = args.nmax if args.nmax is not None else 12
    o = _boundary_orbit(spec, k ** (n_max + 1))
    measure = MeasureSpec(args.measure, spec.dim)
    m = mc_shell_measure(o, psi, measure, range(0, n_max + 1), args.samples or 100_000, args.seed, k)
    payload = {"group": spec.name, "y": "infinity" if spec.parabolic else "hyperbolic", "psi": m.psi,
               "measure": m.measure, "alpha": m.alpha, "k": k, "samples": m.samples, "seed": m.seed,
               "decay_ratio": m.decay_ratio, "qw_ok": m.qw_ok,
               "shells": [{"n": n, "mu": mu, "tail": t, "bound": b, "count": c}
                          for n, mu, t, b, c in zip(m.n, m.mu, m.tail, m.bound, m.counts)],
               "sum_mu": sum(m.mu), "qwe_sum": m.qwe_partial[-1], "head_constant": m.head_constant()}
    rows = zip(m.n, m.mu, m.tail, m.bound, m.counts)
    return payload, [], {"mcshell.csv": (["n", "mu", "tail", "bound", "count"], rows)}


def cmd_game(args):
    from .games import tournament

    spec = _group(args)
    if spec.standard != "modular":
        raise UsageError("--group: games use the modular orbit of infinity (rational targets)")
    beta = _fraction(args.beta or "1/3", "--beta")
    plays = args.samples or 100
    recs = tournament(beta, plays, args.depth or 30, args.bhupen, args.seed)
    fails = [r.index for r in recs if not r.certificate.passed]
    payload = {"group": spec.name, "beta": str(beta), "depth": args.depth or 30, "plays": plays,
               "bhupen": args.bhupen, "seed": args.seed, "c1": 1, "chart": "real, L = q^2",
               "threshold": float(recs[0].certificate.threshold), "failures": fails,
               "min_normalized_gap": min(float(r.certificate.min_normalized_gap) for r in recs),
               "target_deletions": sum(r.deletions_on_targets for r in recs),
               "first_certificate": recs[0].certificate.as_json(), "first_transcript": recs[0].transcript.as_json()}
    rows = ((r.index, float(r.certificate.outcome), float(r.certificate.min_normalized_gap),
             int(r.certificate.passed)) for r in recs)
    return payload, ["CERTIFICATE-FAILED"] if fails else [], {
        "game.csv": (["index", "outcome", "min_normalized_gap", "pass"], rows)}


def cmd_cantor(args):
    from .games import CantorSet, Concentric, GameBall, Interval, check_tree, fishman_cantor, play_transfer_game

    alpha = _fraction(args.alpha or "1/2", "--alpha")
    beta = _fraction(args.beta or "1/16", "--beta")
    K = CantorSet() if args.set == "cantor" else Interval()
    first = GameBall(Fraction(0), Fraction(1)) if args.set == "cantor" else GameBall(Fraction(1, 2), Fraction(1, 2))
    strat = Concentric(alpha)
    tree = fishman_cantor(K, alpha, beta, strat, args.depth or 2, first)
    check_tree(tree, K, strat)
    payload = {"set": args.set, "alpha": str(alpha), "beta": str(beta), "stages": len(tree.stages) - 1,
               "N": tree.N, "stage_counts": tree.counts, "bound": tree.bound, "leaves": len(tree.stages[-1])}
    flags = []
    if args.set == "cantor":
        # winning on the Cantor set via a transferred absolute-game strategy
        tr, cert, ayesha = play_transfer_game(Fraction(1, 16), Fraction(1, 2), Fraction(1, 17), 20, args.seed)
        payload["transfer"] = {"alpha": "1/16", "beta": "1/2", "beta_absolute": "1/17", "turns": 20,
                               "certificate": cert.as_json(), "failures": len(ayesha.failures)}
        if not cert.passed:
            flags.append("CERTIFICATE-FAILED")
    return payload, flags, {}


def cmd_count(args):
    from .counting import shell_report

    spec = _group(args)
    k = args.k or 2.0
    n_max = args.nmax if args.nmax is not None else 8
    o = _boundary_orbit(spec, k ** (n_max + 1))
    r = shell_report(o, k, n_max)
    payload = {"group": spec.name, "k": k, "n_max": n_max, "counts": r.counts, "ratios": r.ratios,
               "corridor": list(r.corridor), "stable_from": r.stable_from}
    flags = ["TRUNCATED"] if r.last_truncated else []
    return payload, flags, {"count.csv": (["n", "count", "ratio"], zip(range(len(r.counts)), r.counts, r.ratios))}


def cmd_tube(args):
    from .counting import CurveSpec, VIOLATED, check_generic, tube_counts

    spec = _group(args)
    k = args.k or 2.0
    n_max = args.nmax if args.nmax is not None else 8
    if args.curve == "real":
        curve = CurveSpec.real_line()
    else:
        curve = CurveSpec.circle()
        check_generic(spec, curve)
    psi = _psi(args.psi or ("logpower:0" if args.curve == "real" else "power:1"))
    o = _boundary_orbit(spec, k ** (n_max + 1))
    rep = tube_counts(o, curve, psi, k, n_max)
    payload = {"group": spec.name, "curve": args.curve, "psi": psi.params(), "k": k, "verdict": rep.verdict,
               "direction": rep.direction, "spread": rep.spread, "upper_bound_consistent": rep.upper_bound_consistent,
               "curve_supply": rep.curve_supply(), "linear_growth": rep.linear_growth(),
               "rows": [{"n": r.n, "width": r.width, "count": r.count, "shell_total": r.shell_total,
                         "on_curve": r.on_curve, "ratio": r.ratio} for r in rep.rows]}
    rows = ((r.n, r.count, r.shell_total, r.on_curve, r.ratio) for r in rep.rows)
    return payload, [], {"tube.csv": (["n", "count", "shell_total", "on_curve", "ratio"], rows)}


def cmd_geodesic(args):
    from .geodesics import PARTIAL, coverage_horizon, cross_validate, excursion_series
    from .horoballs import build_family

    spec = _group(args)
    L_max = args.lmax or 2.0 ** 18
    o = _boundary_orbit(spec, L_max)
    fam = build_family(o, check=False)
    T_cov = coverage_horizon(fam)
    T = args.horizon or T_cov
    s = excursion_series(fam, _ball_point(args.xi, spec.dim), T)
    payload = {"group": spec.name, "xi": args.xi, "T": T, "coverage_horizon": T_cov, "status": s.status,
               "statistic": s.final, "t_min": s.t_min, "excursions": len(s.excursions), "note": s.note,
               "lambda": fam.lam, "corridor": list(fam.corridor())}
    digits = _xi_digits(args.xi, 200) if spec.standard == "modular" else None
    if digits is not None and not isinstance(_xi_value(args.xi), complex):
        chk = cross_validate(fam, _xi_value(args.xi), digits, min(T, T_cov))
        payload["cf_cross_check"] = {"matched": chk.matched, "total": chk.total,
                                     "fraction_within_2.5": chk.fraction_within, "max_abs_diff": chk.max_abs_diff}
    rows = ((e.t_enter, e.t_exit, e.t_at_max, e.max_depth, e.index) for e in s.excursions)
    flags = [PARTIAL] if s.status == PARTIAL else []
    return payload, flags, {"excursions.csv": (["t_enter", "t_exit", "t_at_max", "depth", "index"], rows)}


def cmd_loglaw(args):
    from .geodesics import loglaw_mc

    top = int(args.horizon or 10**4)
    horizons = [h for h in (100, 1000, 10**4, 10**5) if h < top] + [top]
    L = loglaw_mc(args.samples or 1000, horizons, args.seed, sampler=args.sampler)
    payload = {"horizons": L.horizons, "medians": L.medians, "quantiles": L.quantiles, "samples": L.samples,
               "seed": L.seed, "t_min": L.t_min, "increasing": L.increasing, "sampler": args.sampler,
               "engine": "continued fractions (modular group)"}
    return payload, [], {}


COMMANDS: Dict[str, Tuple[Callable, str]] = {
    "orbit": (cmd_orbit, "enumerate an orbit with minimal-L representatives"),
    "delta": (cmd_delta, "estimate the exponent of convergence"),
    "horoballs": (cmd_horoballs, "standard horoball family and disjointness constants"),
    "dirichlet": (cmd_dirichlet, "Dirichlet-type search for a boundary point"),
    "singular": (cmd_singular, "singularity profile and verdict"),
    "bad": (cmd_bad, "badly approximable constant"),
    "khintchine": (cmd_khintchine, "classify the Khintchine-type sum"),
    "mcshell": (cmd_mcshell, "Monte Carlo shell measures"),
    "game": (cmd_game, "absolute-game tournament with certified outcomes"),
    "cantor": (cmd_cantor, "Cantor construction and dimension lower bound"),
    "count": (cmd_count, "orbit points per shell"),
    "tube": (cmd_tube, "orbit points near a curve on the sphere"),
    "geodesic": (cmd_geodesic, "cusp excursions of a geodesic ray"),
    "loglaw": (cmd_loglaw, "logarithm-law statistic over random directions"),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="horolab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"horolab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        s = sub.add_parser(name, help=help_)
        s.add_argument("--group", default="modular", help="catalog group name")
        s.add_argument("--catalog", metavar="FILE", help="group definition file (JSON)")
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--psi", metavar="FAMILY:PARAMS", help="power:TAU, dirichlet:EPS or logpower:EPS[,w=W]")
        s.add_argument("--k", type=float)
        s.add_argument("--nmax", type=int)
        s.add_argument("--lmax", type=float)
        s.add_argument("--alpha")
        s.add_argument("--beta")
        s.add_argument("--depth", type=int)
        s.add_argument("--samples", type=int)
        s.add_argument("--horizon", type=float)
        s.add_argument("--out", metavar="DIR")
        if name in ("dirichlet", "singular", "bad", "geodesic"):
            s.add_argument("--xi", required=True, help="boundary value: phi, sqrt2-1, 1/2, 0.3+0.2i, ...")
        if name == "orbit":
            s.add_argument("--interior", action="store_true", help="orbit of the base point 0")
        if name == "delta":
            s.add_argument("--rmax", type=float, help="distance cut-off (default per group)")
        if name == "mcshell":
            s.add_argument("--measure", choices=("lebesgue", "cantor"), default="lebesgue")
        if name == "game":
            s.add_argument("--bhupen", choices=("random", "adversarial"), default="random")
        if name == "cantor":
            s.add_argument("--set", choices=("interval", "cantor"), default="interval")
        if name == "tube":
            s.add_argument("--curve", choices=("generic", "real"), default="generic")
        if name == "loglaw":
            s.add_argument("--sampler", choices=("lebesgue", "bounded"), default="lebesgue")
    return p


def _validate(args) -> None:
    if args.seed < 0 or args.seed >= 2 ** 64:
        raise UsageError("--seed: must be a 64-bit unsigned integer")
    for field in ("k",):
        v = getattr(args, field)
        if v is not None and not v > 1:
            raise UsageError(f"--{field}: must exceed 1")
    for field in ("nmax", "depth", "samples"):
        v = getattr(args, field)
        if v is not None and v < (0 if field == "nmax" else 1):
            raise UsageError(f"--{field}: out of range")
    for field in ("lmax", "horizon"):
        v = getattr(args, field)
        if v is not None and not v > 0:
            raise UsageError(f"--{field}: must be positive")


def run(argv: Optional[List[str]] = None) -> Tuple[int, str]:
    """Run a command; returns ``(exit_code, json_text)``."""
    args = build_parser().parse_args(argv)
    _validate(args)
    fn = COMMANDS[args.command][0]
    payload, flags, files = fn(args)
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("command",)}
    report = {"schema": SCHEMA, "version": __version__, "command": args.command, "config": config,
              "results": payload, "flags": sorted(set(flags))}
    text = dumps(report)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, f"{args.command}.json"), "w") as fh:
            fh.write(text)
        for name, (hdr, rows) in files.items():
            _write_csv(os.path.join(args.out, name), hdr, rows)
    return (2 if flags else 0), text


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    t0 = time.perf_counter()
    try:
        code, text = run(argv)
    except UsageError as exc:
        print(f"horolab: usage error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError, AssertionError, NotImplementedError) as exc:
        print(f"horolab: error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(text)
    # wall time stays out of the report so identical runs give identical bytes
    print(f"horolab: {time.perf_counter() - t0:.2f} s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
