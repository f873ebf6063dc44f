"""Geodesic rays from the origin, cusp excursions into horoballs, and the logarithm law.

Depth is measured on lifts: the Busemann level of a point inside a standard
horoball, normalised to vanish on the horosphere.  It differs from the
distance inside the cusp end of the quotient by a bounded additive constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from . import cf
from .hypcore import boundary_ball_coords, hyperbolic_distance_arrays
from .horoballs import Horoball, HoroballFamily
from .parallel import pmap, shard_seeds

GRAZE = 1e-12
T_MIN = 12.0
COMPLETE = "COMPLETE"
PARTIAL = "PARTIAL"
THROAT = "THROAT"
DEPTH_OFFSET_NOTE = "depth is measured on horoball lifts; it differs from cusp distance by O(1)"


@dataclass(frozen=True)
class GeodesicRay:
    """``t -> tanh(t / 2) xi``, the unit-speed ray from the origin towards ``xi``."""

    xi: np.ndarray

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float)
        n = float(np.linalg.norm(xi))
        if abs(n - 1.0) > 1e-9:
            raise ValueError("ray target must lie on the unit sphere")
        object.__setattr__(self, "xi", xi / n)

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.tanh(t / 2.0)[..., None] * self.xi

    @staticmethod
    def time_of(s):
        """Hyperbolic time at Euclidean radius ``s``."""
        return 2.0 * np.arctanh(s)


def depth(x, base, R) -> np.ndarray:
    """Busemann depth of ball points ``x`` inside the horoball ``(base, R)``; 0 on the horosphere."""
    x = np.asarray(x, dtype=float)
    base = np.asarray(base, dtype=float)
    num = np.sum((base - x) ** 2, axis=-1)
    den = 1.0 - np.sum(x * x, axis=-1)
    return np.log(R / (1.0 - R)) - np.log(num / den)


def depth_bruteforce(ray: GeodesicRay, H: Horoball, t0: float, t1: float, samples: int = 20001) -> float:
    """Max over a dense chord of the hyperbolic distance to the horosphere.

    The distance from an interior point ``x`` to the horosphere is found by a
    dense search over horosphere points in the plane of ``x``, the base and the
    origin (the nearest point lies in that plane).
    """
    ts = np.linspace(t0, t1, samples)
    pts = ray(ts)
    b = np.asarray(H.base, dtype=float)
    c = H.center
    best = 0.0
    # coarse scan for the deepest chord point, then refine the horosphere search there
    coarse = depth(pts, b, H.R)
    i = int(np.argmax(coarse))
    lo, hi = max(i - 50, 0), min(i + 50, samples - 1)
    ang = np.linspace(-math.pi, math.pi, 4001)
    for x in pts[lo:hi + 1]:
        u = x - c
        u_n = np.linalg.norm(u)
        e1 = u / u_n if u_n > 0 else (b - c) / np.linalg.norm(b - c)
        w = b - c - ((b - c) @ e1) * e1
        e2 = w / np.linalg.norm(w) if np.linalg.norm(w) > 1e-15 else np.roll(e1, 1)
        th0 = 0.0
        for width in (math.pi, 1e-2, 1e-4, 1e-6):
            th = th0 + ang * (width / math.pi)
            sphere = c + H.R * (np.cos(th)[:, None] * e1 + np.sin(th)[:, None] * e2)
            nrm = np.sum(sphere * sphere, axis=1)
            ok = nrm < 1.0 - 1e-15
            d = np.full(len(th), np.inf)
            d[ok] = hyperbolic_distance_arrays(np.broadcast_to(x, sphere[ok].shape), sphere[ok])
            th0 = float(th[int(np.argmin(d))])
        best = max(best, float(d.min()))
    return best


@dataclass
class Excursion:
    index: int  # family entry
    t_enter: float
    t_exit: float
    max_depth: float
    t_at_max: float
    s_enter: float = field(default=0.0, repr=False)
    s_exit: float = field(default=0.0, repr=False)

    @property
    def throat(self) -> bool:
        return math.isinf(self.t_exit)


def _intersections(xi, base, R):
    """Entry/exit radii ``s`` of the ray towards ``xi`` through horoballs ``(base, R)`` (vectorised)."""
    c = base @ xi
    b = (1.0 - R) * c
    disc = b * b - (1.0 - 2.0 * R)
    root = np.sqrt(np.maximum(disc, 0.0))
    return b - root, b + root, disc, c


def penetration(ray: GeodesicRay, H: Horoball) -> Optional[Excursion]:
    """The ray's passage through ``H`` or ``None`` if it misses or grazes."""
    if H.R >= 0.5:
        raise ValueError("the origin must lie outside the horoball")
    ex = _excursions(ray.xi, np.asarray(H.base, dtype=float)[None, :], np.array([H.R]), np.array([0]))
    return ex[0] if ex else None


def _excursions(xi, base, R, index) -> List[Excursion]:
    s1, s2, disc, c = _intersections(xi, base, R)
    hit = (disc > GRAZE) & (s2 > 0)
    out = []
    for j in np.nonzero(hit)[0]:
        cj = float(c[j])
        cos_t = min(max(cj, -1.0), 1.0)
        if cos_t >= 1.0 - 1e-15:
            s_star, t_exit = 1.0, math.inf
        else:
            sin_t = math.sqrt(max(1.0 - cos_t * cos_t, 0.0))
            s_star = (1.0 - sin_t) / cos_t if cos_t > 0 else 0.0
            t_exit = float(GeodesicRay.time_of(min(s2[j], 1.0 - 1e-16)))
        s_in = max(float(s1[j]), 0.0)
        t_in = float(GeodesicRay.time_of(s_in))
        if s_star >= 1.0:
            out.append(Excursion(int(index[j]), t_in, math.inf, math.inf, math.inf, s_in, 1.0))
            continue
        s_star = min(max(s_star, s_in), float(s2[j]))
        dmax = float(depth(s_star * xi, base[j], R[j]))
        out.append(Excursion(int(index[j]), t_in, t_exit, dmax, float(GeodesicRay.time_of(s_star)),
                             s_in, float(s2[j])))
    out.sort(key=lambda e: (e.t_at_max, e.index))
    return out


@dataclass
class ExcursionSeries:
    excursions: List[Excursion]
    T: float
    status: str
    statistic_t: np.ndarray
    statistic: np.ndarray
    t_min: float
    note: str = DEPTH_OFFSET_NOTE

    @property
    def final(self) -> float:
        return float(self.statistic[-1]) if len(self.statistic) else 0.0

    def to_csv(self, path, family: Optional[HoroballFamily] = None) -> None:
        with open(path, "w") as fh:
            fh.write("t_enter,t_exit,t_at_max,depth,index" + (",base" if family is not None else "") + "\n")
            for e in self.excursions:
                row = f"{e.t_enter:.17g},{e.t_exit:.17g},{e.t_at_max:.17g},{e.max_depth:.17g},{e.index}"
                if family is not None:
                    row += "," + " ".join(f"{v:.17g}" for v in family.base[e.index])
                fh.write(row + "\n")


def coverage_horizon(family: HoroballFamily) -> float:
    """Largest ``T`` for which every family ball meeting the ray before ``T`` is enumerated.

    A ball meets the segment up to radius ``s`` only if ``1 - 2R <= s``; balls
    beyond the enumeration have ``R < corridor_max / L_max``.
    """
    r_missing = family.corridor()[1] / family.orbit.L_max
    s = 1.0 - 2.0 * r_missing
    return float(GeodesicRay.time_of(s))


def excursion_series(family: HoroballFamily, xi, T: float, t_min: float = T_MIN) -> ExcursionSeries:
    """Excursions with ``t_at_max <= T`` and the running statistic ``max depth / log t``.

    Balls containing the origin are skipped.  The series is PARTIAL when ``T``
    exceeds the coverage horizon of the family, THROAT when the ray ends in a
    horoball.
    """
    ray = GeodesicRay(xi)
    ok = family.R < 0.5
    idx = np.nonzero(ok)[0]
    ex = [e for e in _excursions(ray.xi, family.base[idx], family.R[idx], idx) if e.t_enter <= T]
    status = COMPLETE if T <= coverage_horizon(family) else PARTIAL
    if any(e.throat for e in ex):
        status = THROAT
    done = [e for e in ex if not e.throat and e.t_at_max <= T]
    ts, vals, best = [], [], 0.0
    for e in done:
        if e.t_at_max >= t_min and e.t_at_max > 1.0:
            best = max(best, e.max_depth / math.log(e.t_at_max))
            ts.append(e.t_at_max)
            vals.append(best)
    return ExcursionSeries(ex, T, status, np.array(ts), np.array(vals), t_min)


# ---------------------------------------------------------------------------
# continued-fraction fast path (modular group)

@dataclass
class CFPath:
    a_next: np.ndarray  # a_{j+1}
    log_q: np.ndarray  # log q_j
    depth: np.ndarray  # log a_{j+1}
    time: np.ndarray  # 2 log q_j
    statistic: np.ndarray  # log a_{j+1} / log time (nan before the burn-in)
    truncated: bool
    t_min: float

    def max_statistic(self, horizon: Optional[int] = None) -> float:
        s = self.statistic[:horizon] if horizon else self.statistic
        s = s[np.isfinite(s)]
        return float(s.max()) if len(s) else 0.0


def cf_fast_path(digits: Sequence[int], n_max: Optional[int] = None, t_min: float = T_MIN) -> CFPath:
    """Excursion surrogates from CF digits ``[a_0; a_1, ...]`` of ``x``.

    The ``j``-th convergent ``p_j / q_j`` gives an excursion of depth about
    ``log a_{j+1}`` at time about ``2 log q_j``.
    """
    digits = list(digits)
    n = len(digits) - 1 if n_max is None else min(n_max, len(digits) - 1)
    truncated = n_max is not None and n_max > len(digits) - 1
    a = np.array(digits[1:n + 1], dtype=float)
    log_q = np.empty(n)
    # log q_j by the recursion q_j = a_j q_{j-1} + q_{j-2} kept in ratio form to avoid big integers
    lq, r = 0.0, 0.0  # log q_0 = 0, r = q_{j-1} / q_j
    for j in range(n):
        log_q[j] = lq
        # q_{j+1} = a_{j+1} q_j + q_{j-1}
        m = digits[j + 1] + r
        lq += math.log(m)
        r = 1.0 / m
    time = 2.0 * log_q
    depth_ = np.log(a)
    with np.errstate(divide="ignore", invalid="ignore"):
        stat = np.where(time >= t_min, depth_ / np.log(np.maximum(time, 1e-300)), np.nan)
    return CFPath(a, log_q, depth_, time, stat, truncated, t_min)


@dataclass
class LogLawSummary:
    horizons: List[int]
    medians: List[float]
    quantiles: List[List[float]]  # (10%, 25%, 50%, 75%, 90%) per horizon
    samples: int
    seed: int
    t_min: float
    increasing: bool


def loglaw_mc(samples: int = 1000, horizons: Sequence[int] = (100, 1000, 10000), seed: int = 0,
              t_min: float = T_MIN, sampler: str = "lebesgue", shards: int = 16,
              threads: Optional[int] = None) -> LogLawSummary:
    """Distribution of ``max_j statistic`` over seeded directions (CF fast path).

    ``sampler`` is ``lebesgue`` (uniform ``x`` in (0, 1)) or ``bounded`` (digits
    uniform in {1, 2}, a badly approximable sample).
    """
    n_max = max(horizons)
    rngs = shard_seeds(seed, shards)
    sizes = [samples // shards + (1 if i < samples % shards else 0) for i in range(shards)]

    def run(i):
        rng = rngs[i]
        rows = []
        for _ in range(sizes[i]):
            if sampler == "lebesgue":
                d = cf.random_digits(rng, n_max + 1)
            elif sampler == "bounded":
                d = [0] + rng.integers(1, 3, size=n_max + 1).tolist()
            else:
                raise ValueError(f"unknown sampler {sampler!r}")
            path = cf_fast_path(d, n_max, t_min)
            rows.append([path.max_statistic(h) for h in horizons])
        return rows

    rows = np.array([r for part in pmap(run, range(shards), threads) for r in part])
    qs = [np.quantile(rows[:, j], [0.1, 0.25, 0.5, 0.75, 0.9]).tolist() for j in range(len(horizons))]
    med = [q[2] for q in qs]
    return LogLawSummary(list(horizons), med, qs, samples, seed, t_min,
                         bool(all(b > a for a, b in zip(med, med[1:]))))


# ---------------------------------------------------------------------------
# geometric path versus CF surrogates

@dataclass
class CrossCheck:
    matched: int
    total: int
    within: int
    max_abs_diff: float
    diffs: List[float]

    @property
    def fraction_within(self) -> float:
        return self.within / self.total if self.total else 1.0


def cross_validate(family: HoroballFamily, x: float, digits: Sequence[int], T: Optional[float] = None,
                   tol: float = 2.5) -> CrossCheck:
    """Compare geometric excursion depths with ``log a_{j+1}`` for the modular family.

    Each excursion's base ``p/q`` is matched against the convergents of ``x``;
    unmatched excursions count as failures.
    """
    orbit = family.orbit
    if orbit.spec.standard != "modular":
        raise ValueError("the CF correspondence is specific to the modular group")
    T = coverage_horizon(family) if T is None else T
    xi = boundary_ball_coords(complex(x), 1)
    series = excursion_series(family, xi, T)
    conv = {}
    for j, (p, q) in enumerate(cf.convergents(list(digits))):
        if j + 1 < len(digits):
            conv[(p, q)] = j
    diffs, within, matched = [], 0, 0
    for e in series.excursions:
        if e.throat:
            continue
        f = orbit.boundary_exact(int(family.index[e.index]))
        if f is None:
            continue
        key = (f.numerator, f.denominator)
        if key in conv:
            matched += 1
            d = e.max_depth - math.log(digits[conv[key] + 1])
            diffs.append(float(d))
            within += abs(d) <= tol
        else:
            diffs.append(math.inf)
    return CrossCheck(matched, len(diffs), within, max((abs(d) for d in diffs), default=0.0), diffs)
