"""Effective Diophantine approximation by orbit points.

Everything here works on a :class:`Targets` view of an orbit: boundary points
``g(y)`` with their dilations ``L_g``, sorted by ``L``.  The default view uses
ball coordinates.  For the modular group the real-line view replaces ``L_g``
by ``q^2`` for the rational ``p/q = g(infinity)``, which is the normalisation
in which classical continued-fraction constants appear.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from . import cf
from .groups import ExponentInfo
from .hypcore import boundary_ball_coords
from .orbits import Orbit
from .parallel import pmap, shard_seeds

ExponentData = ExponentInfo

HIT_TOL = 1e-14  # distances below this count as exact hits
SINGULAR = "SINGULAR-CONSISTENT"
WITNESSED = "NONSINGULAR-WITNESSED"
UNDECIDED = "UNDECIDED-AT-DEPTH"


# ---------------------------------------------------------------------------
# approximation functions

@dataclass(frozen=True)
class ApproxFunction:
    """``psi(r) = r^-tau``, ``eps / r`` or ``r^-1 (log r)^(-(1 + eps) / w)``."""

    family: str
    tau: float = 1.0
    eps: float = 0.0
    w: float = 1.0
    r_min: float = 1.0

    def __post_init__(self):
        if self.family not in ("power", "dirichlet", "logpower"):
            raise ValueError(f"unknown approximation family {self.family!r}")
        if self.family == "logpower" and self.r_min <= 1.0:
            object.__setattr__(self, "r_min", math.e)
        if self.family == "dirichlet" and not self.eps > 0:
            raise ValueError("scaled Dirichlet function needs eps > 0")
        if self.w <= 0:
            raise ValueError("w must be positive")

    @classmethod
    def power(cls, tau: float) -> "ApproxFunction":
        return cls("power", tau=tau)

    @classmethod
    def dirichlet(cls, eps: float) -> "ApproxFunction":
        return cls("dirichlet", eps=eps)

    @classmethod
    def logpower(cls, eps: float, w: float = 1.0) -> "ApproxFunction":
        return cls("logpower", eps=eps, w=w)

    @classmethod
    def parse(cls, text: str) -> "ApproxFunction":
        """``power:2``, ``dirichlet:0.5``, ``logpower:0`` or ``logpower:0,w=2``."""
        name, _, rest = text.partition(":")
        args = [a for a in rest.split(",") if a]
        kw = {}
        pos = []
        for a in args:
            if "=" in a:
                k, v = a.split("=", 1)
                kw[k.strip()] = float(v)
            else:
                pos.append(float(a))
        if name == "power":
            return cls.power(pos[0] if pos else kw["tau"])
        if name == "dirichlet":
            return cls.dirichlet(pos[0] if pos else kw["eps"])
        if name == "logpower":
            return cls.logpower(pos[0] if pos else kw.get("eps", 0.0), kw.get("w", 1.0))
        raise ValueError(f"unknown approximation family {name!r}")

    def __call__(self, r):
        r = np.maximum(np.asarray(r, dtype=float), self.r_min)
        if self.family == "power":
            return r ** -self.tau
        if self.family == "dirichlet":
            return self.eps / r
        return 1.0 / (r * np.log(r) ** ((1.0 + self.eps) / self.w))

    def params(self) -> dict:
        if self.family == "power":
            return {"family": "power", "tau": self.tau}
        if self.family == "dirichlet":
            return {"family": "dirichlet", "eps": self.eps}
        return {"family": "logpower", "eps": self.eps, "w": self.w}

    def is_monotone(self, r_max: float = 1e12, points: int = 400) -> bool:
        r = np.geomspace(self.r_min, r_max, points)
        return bool(np.all(np.diff(self(r)) <= 0))

    def r_psi_vanishes(self, r_max: float = 1e12, points: int = 40) -> bool:
        """Sampled check that ``r psi(r)`` decreases towards 0 along a geometric grid."""
        r = np.geomspace(max(self.r_min, 10.0), r_max, points)
        v = r * self(r)
        return bool(np.all(np.diff(v) <= 0) and v[-1] < 0.5 * v[0])


# ---------------------------------------------------------------------------
# target views of an orbit

@dataclass
class Targets:
    points: np.ndarray
    L: np.ndarray
    mode: str
    L_max: float
    chart: str = "ball"
    source: Optional[np.ndarray] = field(default=None, repr=False)

    def __len__(self):
        return len(self.L)

    @classmethod
    def from_orbit(cls, orbit: Orbit, chart: str = "ball") -> "Targets":
        if orbit.mode == "interior":
            raise ValueError("Diophantine targets must be boundary orbit points")
        if chart == "ball":
            return cls(orbit.points, orbit.L, orbit.mode, orbit.L_max, "ball", np.arange(len(orbit)))
        if chart != "real":
            raise ValueError(f"unknown chart {chart!r}")
        if orbit.spec.standard != "modular" or orbit.mode != "parabolic" or not orbit.y.is_infinity:
            raise ValueError("the real-line chart needs the modular orbit of infinity")
        c = np.abs(orbit.reps[:, 1, 0].real)
        keep = c > 0
        q2 = c[keep] ** 2
        order = np.argsort(q2, kind="stable")
        idx = np.nonzero(keep)[0][order]
        x = orbit.half[idx].real[:, None]
        # the minimal representative has b^2 + d^2 <= (a^2 + c^2) / 4 + 1, so for |x| <= 2
        # every p/q near x with q^2 <= (L_max - 3/4) / 3.125 is present in the orbit
        return cls(x, q2[order], "parabolic", (orbit.L_max - 0.75) / 3.125, "real", idx)


def _as_targets(t) -> Targets:
    return t if isinstance(t, Targets) else Targets.from_orbit(t)


def _xi_array(xi, targets: Targets) -> np.ndarray:
    xi = np.asarray(xi, dtype=float).reshape(-1)
    if xi.shape[0] != targets.points.shape[1]:
        raise ValueError(f"point has {xi.shape[0]} coordinates, targets have {targets.points.shape[1]}")
    return xi


def _distances(targets: Targets, xi: np.ndarray) -> np.ndarray:
    d = np.linalg.norm(targets.points - xi, axis=1)
    d[d < HIT_TOL] = 0.0
    return d


def real_line_point(x, dim: int = 1) -> np.ndarray:
    """Ball coordinates of the real boundary value ``x`` of the half-plane."""
    return boundary_ball_coords(complex(float(x)), dim)


def golden_ratio() -> float:
    return (1.0 + math.sqrt(5.0)) / 2.0


def random_boundary_points(rng: np.random.Generator, n: int, dim: int = 1) -> np.ndarray:
    v = rng.standard_normal((n, dim + 1))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


# ---------------------------------------------------------------------------
# Dirichlet searches and the singular profile

@dataclass
class DirichletResult:
    xi: np.ndarray
    N: float
    index: int
    L: float
    quality: float
    strict: bool
    witnesses: Optional[List[tuple]] = None


def _profile(targets: Targets, xi, N_grid, strict: bool):
    d = _distances(targets, xi)
    if targets.mode == "parabolic":
        score = d * np.sqrt(targets.L)
    else:
        score = d
    pre = np.minimum.accumulate(score)
    # running argmin of the prefix minima
    new_min = np.concatenate([[True], score[1:] < pre[:-1]])
    arg = np.maximum.accumulate(np.where(new_min, np.arange(len(score)), 0))
    N = np.asarray(N_grid, dtype=float)
    cut = np.searchsorted(targets.L, N, side="left" if strict else "right")
    if np.any(cut == 0):
        raise ValueError("N below the smallest orbit dilation")
    m = pre[cut - 1]
    factor = np.sqrt(N) if targets.mode == "parabolic" else N
    return m * factor, arg[cut - 1]


def dirichlet_search(orbit, xi, N: float, strict: bool = False) -> DirichletResult:
    """Best orbit point for ``xi`` among entries with ``L_g <= N`` (``< N`` if strict).

    Quality is ``|xi - g(y)| sqrt(L_g N)`` for parabolic ``y`` and
    ``|xi - g(y)| N`` for hyperbolic ``y``.
    """
    t = _as_targets(orbit)
    if N > t.L_max:
        raise ValueError(f"orbit enumerated to L = {t.L_max:g} < N = {N:g}; quality would be overestimated")
    xi = _xi_array(xi, t)
    q, i = _profile(t, xi, [N], strict)
    i = int(i[0])
    return DirichletResult(xi, float(N), i, float(t.L[i]), float(q[0]), strict)


def dirichlet_profile(orbit, xi, N_grid: Sequence[float], strict: bool = False) -> DirichletResult:
    """:func:`dirichlet_search` at the top of ``N_grid`` with per-``N`` witnesses."""
    t = _as_targets(orbit)
    N_grid = np.asarray(N_grid, dtype=float)
    if N_grid.max() > t.L_max:
        raise ValueError(f"orbit enumerated to L = {t.L_max:g} < N = {N_grid.max():g}")
    xi = _xi_array(xi, t)
    q, idx = _profile(t, xi, N_grid, strict)
    wit = [(float(n), int(i), float(t.L[i]), float(v)) for n, i, v in zip(N_grid, idx, q)]
    i = int(idx[-1])
    return DirichletResult(xi, float(N_grid[-1]), i, float(t.L[i]), float(q[-1]), strict, wit)


def geometric_grid(N_min: float, N_max: float, ratio: float = 1.02) -> np.ndarray:
    n = int(math.floor(math.log(N_max / N_min) / math.log(ratio))) + 1
    return N_min * ratio ** np.arange(n)


@dataclass
class SingularityProfile:
    N: np.ndarray
    eps: np.ndarray
    verdict: str
    threshold: float
    tail_limsup: float
    c1: float

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("N,eps\n")
            for n, e in zip(self.N, self.eps):
                fh.write(f"{n:.17g},{e:.17g}\n")


def singularity_profile(
    orbit,
    xi,
    N_grid: Sequence[float],
    c1: float,
    strict: bool = True,
    floors: Sequence[float] = (1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6),
) -> SingularityProfile:
    """``eps(N)`` over ``N_grid`` with a three-way verdict.

    The threshold ``c1 / 3`` depends on the normalisation of the measured
    disjointness constant ``c1``.  The tail is the upper half of the grid on a
    log scale.  A profile is SINGULAR-CONSISTENT only if it is nonincreasing on
    the tail and ends below every tested floor ``threshold * f``.
    """
    t = _as_targets(orbit)
    N = np.asarray(N_grid, dtype=float)
    if N.max() > t.L_max:
        raise ValueError(f"orbit enumerated to L = {t.L_max:g} < N = {N.max():g}")
    eps, _ = _profile(t, _xi_array(xi, t), N, strict)
    thr = c1 / 3.0
    mid = math.sqrt(N[0] * N[-1])
    tail = eps[N >= mid]
    limsup = float(tail.max())
    if limsup > thr:
        verdict = WITNESSED
    elif np.all(np.diff(tail) <= 0) and tail[-1] < thr * min(floors):
        verdict = SINGULAR
    else:
        verdict = UNDECIDED
    return SingularityProfile(N, eps, verdict, thr, limsup, c1)


# ---------------------------------------------------------------------------
# badly approximable constants

@dataclass
class BadConstant:
    L: np.ndarray  # dilations at which the running minimum changes
    c: np.ndarray  # running minimum of |xi - g(y)| L_g
    c_hat: float
    tail_min: float  # minimum over L_g in [sqrt(L_max), L_max]
    L_max: float


def bad_constant(orbit, xi, L_max: Optional[float] = None) -> BadConstant:
    """``c(xi) = min_{L_g <= L_max} |xi - g(y)| L_g`` with its profile."""
    t = _as_targets(orbit)
    L_max = t.L_max if L_max is None else L_max
    if L_max > t.L_max:
        raise ValueError(f"orbit enumerated to L = {t.L_max:g} < L_max = {L_max:g}")
    xi = _xi_array(xi, t)
    n = np.searchsorted(t.L, L_max, side="right")
    L = t.L[:n]
    v = _distances(t, xi)[:n] * L
    pre = np.minimum.accumulate(v)
    change = np.concatenate([[True], pre[1:] < pre[:-1]])
    tail = v[L >= math.sqrt(L_max)]
    return BadConstant(L[change], pre[change], float(pre[-1]), float(tail.min()) if len(tail) else math.inf, L_max)


def bad_constant_cf(digits: Sequence[int], q_max: int, q_min: Optional[int] = None) -> BadConstant:
    """Continued-fraction fast path in the real-line chart (``L = q^2``).

    Convergents are the best approximants, so the minimum over convergents is
    the minimum over all rationals once ``q^2 |x - p/q| < 1/2``.
    """
    errs = [(q, v) for q, v in cf.normalized_errors(digits) if q <= q_max]
    if not errs:
        raise ValueError("no convergents below q_max")
    q = np.array([float(a) for a, _ in errs])
    v = np.array([b for _, b in errs])
    pre = np.minimum.accumulate(v)
    change = np.concatenate([[True], pre[1:] < pre[:-1]])
    lo = math.isqrt(q_max) if q_min is None else q_min
    tail = v[q >= lo]
    return BadConstant(q[change] ** 2, pre[change], float(pre[-1]), float(tail.min()) if len(tail) else math.inf, float(q_max) ** 2)


def liouville_digits(terms: int = 5) -> List[int]:
    return cf.digits_of_fraction(cf.liouville_fraction(terms))


# ---------------------------------------------------------------------------
# Khintchine-type sums

@dataclass
class KhintchineResult:
    verdict: str
    heuristic: bool
    checkpoints: List[float]
    partial_sums: List[float]
    exponent: float


def _series_terms(psi: Callable, w: float, lo: int, hi: int) -> np.ndarray:
    r = np.arange(lo, hi, dtype=float)
    return psi(r) ** w * r ** (w - 1.0)


def khintchine_partial_sums(psi: Callable, w: float, cutoff: int, r0: int = 2, chunk: int = 1 << 20):
    """Partial sums of ``sum psi(r)^w r^(w - 1)`` at dyadic checkpoints up to ``cutoff``."""
    checkpoints = [c for c in (2 ** np.arange(1, 64)) if r0 < c <= cutoff]
    if not checkpoints or checkpoints[-1] != cutoff:
        checkpoints.append(int(cutoff))
    sums = []
    total = 0.0
    r = r0
    for c in checkpoints:
        while r <= c:
            hi = min(c + 1, r + chunk)
            total += float(np.sum(_series_terms(psi, w, r, hi)))
            r = hi
        sums.append(total)
    return [float(c) for c in checkpoints], sums


def khintchine_classify(psi, w, cutoff: int = 10**6) -> KhintchineResult:
    """Closed-form convergence verdict, corroborated by partial sums.

    Power ``r^-tau`` converges iff ``tau > 1``; the scaled Dirichlet function
    always diverges; the log-power family reduces to ``sum r^-1 (log r)^-s``
    with ``s = (1 + eps) w / w_psi``, convergent iff ``s > 1``.  Any other
    callable gets a numeric verdict flagged as heuristic.
    """
    if cutoff < 1000:
        raise ValueError("cutoff must be at least 1000")
    wv = w.w if isinstance(w, ExponentInfo) else float(w)
    if isinstance(psi, ApproxFunction):
        r0 = max(2, int(math.ceil(psi.r_min)))
    else:
        r0 = 2
    cps, sums = khintchine_partial_sums(psi, wv, cutoff, r0)
    if isinstance(psi, ApproxFunction):
        if psi.family == "power":
            conv = psi.tau > 1.0
            s = wv * (psi.tau - 1.0)
        elif psi.family == "dirichlet":
            conv, s = False, 0.0
        else:
            s = (1.0 + psi.eps) * wv / psi.w
            conv = s > 1.0
        return KhintchineResult("converges" if conv else "diverges", False, cps, sums, float(s))
    # heuristic: compare increments over the last dyadic blocks with a harmonic-type tail
    inc = np.diff(sums[-6:])
    conv = bool(len(inc) >= 3 and inc[-1] < 0.5 * inc[0])
    return KhintchineResult("converges" if conv else "diverges", True, cps, sums, math.nan)


# ---------------------------------------------------------------------------
# sampling measures

def cantor_cdf(x, digits: int = 40) -> np.ndarray:
    """Cantor function on ``[0, 1]`` (distribution of the middle-thirds measure)."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    out = np.zeros_like(x)
    done = np.zeros(x.shape, dtype=bool)
    y = x.copy()
    scale = 0.5
    for _ in range(digits):
        y = y * 3.0
        d = np.floor(y)
        d = np.minimum(d, 2.0)
        y = y - d
        mid = (d == 1) & ~done
        out = np.where(mid, out + scale, out)
        done |= mid
        out = np.where(~done & (d == 2), out + scale, out)
        scale *= 0.5
    return np.where(x >= 1.0, 1.0, out)


@dataclass
class MeasureSpec:
    """Boundary measure with a sampler and its declared decay ``(C, alpha)``.

    ``lebesgue``: normalised surface measure on the boundary sphere.
    ``cantor``: middle-thirds Cantor measure on ``[0, 1]`` carried to the
    boundary through the half-plane chart (``d = 1`` only).
    """

    kind: str = "lebesgue"
    dim: int = 1
    C: float = 4.0
    alpha: Optional[float] = None
    digits: int = 40

    def __post_init__(self):
        if self.kind not in ("lebesgue", "cantor"):
            raise ValueError(f"unknown measure {self.kind!r}")
        if self.kind == "cantor" and self.dim != 1:
            raise ValueError("the Cantor sampler lives on the circle (dim = 1)")
        if self.alpha is None:
            self.alpha = float(self.dim) if self.kind == "lebesgue" else math.log(2) / math.log(3)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.kind == "lebesgue":
            return random_boundary_points(rng, n, self.dim)
        bits = rng.integers(0, 2, size=(n, self.digits), dtype=np.int8)
        x = (2.0 * bits) @ (3.0 ** -np.arange(1, self.digits + 1))
        x = x + rng.random(n) * 3.0 ** -self.digits
        return boundary_ball_coords(x.astype(np.complex128), 1)

    def interval_measure(self, a, b) -> np.ndarray:
        """Measure of real-chart intervals ``[a, b]`` (Cantor) or arc fraction (Lebesgue, d = 1)."""
        if self.kind == "cantor":
            return cantor_cdf(b, self.digits) - cantor_cdf(a, self.digits)
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        # pull back the uniform circle measure through x -> ball: density 1 / (pi (1 + x^2))
        return (np.arctan(b) - np.arctan(a)) / math.pi

    def decay_check(self, rng: np.random.Generator, trials: int = 200) -> float:
        """Worst ratio ``mu(B(x, eps r)) / (eps^alpha mu(B(x, r)))`` on random spot checks.

        Centres are drawn from the support; radii and ``eps`` from log-uniform
        ranges.  Raises if the ratio exceeds the declared ``C``.
        """
        if self.dim != 1:
            return 1.0  # surface measure on S^2: exact scaling, nothing to check
        if self.kind == "cantor":
            bits = rng.integers(0, 2, size=(trials, self.digits))
            x = (2.0 * bits) @ (3.0 ** -np.arange(1, self.digits + 1))
            r = 10.0 ** rng.uniform(-6, -1, trials)
        else:
            x = np.tan(rng.uniform(-1.4, 1.4, trials))
            r = 10.0 ** rng.uniform(-6, -1, trials)
        e = 10.0 ** rng.uniform(-3, 0, trials)
        big = self.interval_measure(x - r, x + r)
        small = self.interval_measure(x - e * r, x + e * r)
        ratio = float(np.max(small / (e ** self.alpha * big)))
        if ratio > self.C:
            raise ValueError(
                f"{self.kind} sampler violates declared decay: ratio {ratio:.3g} > C = {self.C:g}"
            )
        return ratio


# ---------------------------------------------------------------------------
# Monte Carlo shell measures

@dataclass
class ShellMeasure:
    n: List[int]
    mu: List[float]
    tail: List[float]
    bound: List[float]
    qwe_partial: List[float]
    counts: List[int]
    samples: int
    seed: int
    alpha: float
    k: float
    decay_ratio: float
    qw_ok: bool
    psi: dict = field(default_factory=dict)
    measure: str = "lebesgue"

    def head_constant(self, frac: float = 0.5) -> float:
        """Largest ``mu / bound`` over the first ``frac`` of the shells with positive estimates."""
        r = [m / b for m, b in zip(self.mu, self.bound) if b > 0 and m > 0]
        h = max(1, int(len(r) * frac))
        return max(r[:h]) if r else 0.0


def _circle_arcs(points: np.ndarray, radius: np.ndarray):
    """Merged union of boundary arcs ``{|x - p| < r}`` on the unit circle as angles in ``[-pi, pi)``."""
    theta = np.arctan2(points[:, 1], points[:, 0])
    h = 2.0 * np.arcsin(np.minimum(radius / 2.0, 1.0))
    lo, hi = theta - h, theta + h
    pieces_lo = [lo, ]
    pieces_hi = [hi, ]
    under = lo < -math.pi
    over = hi > math.pi
    pieces_lo.append(lo[under] + 2 * math.pi)
    pieces_hi.append(np.full(under.sum(), math.pi))
    pieces_lo.append(np.full(over.sum(), -math.pi))
    pieces_hi.append(hi[over] - 2 * math.pi)
    lo = np.concatenate(pieces_lo)
    hi = np.concatenate(pieces_hi)
    order = np.argsort(lo, kind="stable")
    lo, hi = lo[order], hi[order]
    run = np.maximum.accumulate(hi)
    start = np.concatenate([[True], lo[1:] > run[:-1]])
    starts = lo[start]
    block = np.cumsum(start) - 1
    ends = np.full(len(starts), -np.inf)
    np.maximum.at(ends, block, hi)
    ends = np.maximum.accumulate(ends)  # ends are nondecreasing after the merge
    return starts, ends


class _ShellTester:
    def __init__(self, points, radius, dim):
        self.dim = dim
        if dim == 1:
            self.starts, self.ends = _circle_arcs(points, radius)
        else:
            self.tree = cKDTree(points)
            self.radius = radius
            self.rmax = float(radius.max()) if len(radius) else 0.0

    def hits(self, x: np.ndarray) -> np.ndarray:
        if self.dim == 1:
            if len(self.starts) == 0:
                return np.zeros(len(x), dtype=bool)
            th = np.arctan2(x[:, 1], x[:, 0])
            i = np.searchsorted(self.starts, th, side="right") - 1
            ok = i >= 0
            return ok & (th < self.ends[np.maximum(i, 0)])
        out = np.zeros(len(x), dtype=bool)
        if self.rmax == 0:
            return out
        near = self.tree.query_ball_point(x, self.rmax)
        for s, js in enumerate(near):
            if js:
                js = np.asarray(js)
                out[s] = bool(np.any(np.linalg.norm(self.tree.data[js] - x[s], axis=1) < self.radius[js]))
        return out


def mc_shell_measure(
    orbit,
    psi: ApproxFunction,
    measure: Optional[MeasureSpec] = None,
    n_range: Sequence[int] = range(0, 16),
    samples: int = 100_000,
    seed: int = 0,
    k: float = 2.0,
    shards: int = 16,
    threads: Optional[int] = None,
) -> ShellMeasure:
    """Per-shell Monte Carlo estimates of ``mu(A(psi, n))`` and tail unions.

    ``A(psi, n)`` is the union of ``B(g(y), psi(L_g))`` over ``k^n < L_g <= k^(n+1)``.
    The tail estimate at ``n`` is the fraction of samples hit by any shell
    ``m >= n`` in ``n_range``.  The sample stream is split into a fixed number
    of seeded shards, so the result does not depend on the thread count.
    """
    t = _as_targets(orbit)
    measure = measure or MeasureSpec("lebesgue", t.points.shape[1] - 1)
    if t.chart != "ball":
        raise ValueError("shell measures use the ball chart")
    ns = list(n_range)
    top = float(k) ** (max(ns) + 1)
    if top > t.L_max * (1 + 1e-12):
        raise ValueError(f"shell {max(ns)} needs L up to {top:g}, orbit reaches {t.L_max:g}")
    decay = measure.decay_check(np.random.default_rng(np.random.SeedSequence([seed, 7])))
    qw_ok = psi.r_psi_vanishes() if isinstance(psi, ApproxFunction) else True
    if not qw_ok:
        warnings.warn("psi is not eventually below eps / r for every eps; shells need not shrink", stacklevel=2)
    dim = t.points.shape[1] - 1
    testers = []
    counts = []
    for n in ns:
        lo, hi = np.searchsorted(t.L, [float(k) ** n, float(k) ** (n + 1)], side="right")
        testers.append(_ShellTester(t.points[lo:hi], psi(t.L[lo:hi]), dim))
        counts.append(int(hi - lo))
    rngs = shard_seeds(seed, shards)
    sizes = [samples // shards + (1 if i < samples % shards else 0) for i in range(shards)]

    def run(i):
        x = measure.sample(rngs[i], sizes[i])
        hit = np.zeros(len(ns), dtype=np.int64)
        deepest = np.full(len(x), -1, dtype=np.int64)
        for j, tester in enumerate(testers):
            h = tester.hits(x)
            hit[j] = int(h.sum())
            deepest[h] = j
        tail = np.bincount(deepest + 1, minlength=len(ns) + 1)[1:]
        return hit, tail

    parts = pmap(run, range(shards), threads)
    hits = sum(p[0] for p in parts)
    deepest = sum(p[1] for p in parts)
    tail = np.cumsum(deepest[::-1])[::-1]
    a = measure.alpha
    bound = [float((float(k) ** n * float(psi(float(k) ** n))) ** a) for n in ns]
    return ShellMeasure(
        n=ns,
        mu=[float(h) / samples for h in hits],
        tail=[float(v) / samples for v in tail],
        bound=bound,
        qwe_partial=[float(v) for v in np.cumsum(bound)],
        counts=counts,
        samples=samples,
        seed=seed,
        alpha=float(a),
        k=float(k),
        decay_ratio=decay,
        qw_ok=qw_ok,
        psi=psi.params() if isinstance(psi, ApproxFunction) else {"family": "custom"},
        measure=measure.kind,
    )
