"""Horoball families, the comparability R_g ~ 1/L_g, and disjointness constants."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from scipy.spatial import cKDTree

from .hypcore import apply_half_arrays, ball_to_half, half_to_ball
from .orbits import Orbit, OrbitShell

BLOCK = 2048


@dataclass(frozen=True)
class Horoball:
    """Euclidean ball of radius ``R`` internally tangent to the unit sphere at ``base``."""

    base: np.ndarray
    R: float

    def __post_init__(self):
        if not 0 < self.R <= 1:
            raise ValueError("horoball radius must lie in (0, 1]")

    @property
    def center(self) -> np.ndarray:
        return (1.0 - self.R) * np.asarray(self.base)

    @property
    def top(self) -> np.ndarray:
        """Point of the horosphere closest to the origin, ``(1 - 2R) * base``."""
        return (1.0 - 2.0 * self.R) * np.asarray(self.base)

    def contains(self, x) -> bool:
        return float(np.linalg.norm(np.asarray(x) - self.center)) < self.R


def radius_through(P, xi) -> np.ndarray:
    """Radius of the horoball based at ``xi`` whose horosphere passes through ``P``."""
    P = np.asarray(P, dtype=float)
    xi = np.asarray(xi, dtype=float)
    num = np.sum((P - xi) ** 2, axis=-1)
    den = 2.0 * (1.0 - np.sum(P * xi, axis=-1))
    return num / den


def summit_radius(u, v) -> np.ndarray:
    """``1 - |s|`` for the summit ``s`` of the geodesic with ideal endpoints ``u, v``."""
    # with h = |u - v| / 2 = sin(theta / 2) the summit has |s| = sqrt((1 - h) / (1 + h));
    # the form below avoids the cancellation in 1 - |s| for nearby endpoints
    h = np.minimum(np.linalg.norm(np.asarray(u) - np.asarray(v), axis=-1) / 2.0, 1.0)
    q = np.sqrt((1.0 - h) / (1.0 + h))
    return (2.0 * h / (1.0 + h)) / (1.0 + q)


@dataclass
class OverlapCounterexample:
    """Two family balls that intersect; returned instead of a family."""

    i: int
    j: int
    gap: float
    lam: float


@dataclass
class HoroballFamily:
    """Standard horoballs over an enumerated orbit.

    Parabolic case: images of the seed ``{t > 1/lam}`` at infinity, so
    ``R = 1 / (1 + (|a|^2 + |c|^2) / lam)`` for the representative ``(a, c)``
    column.  Hyperbolic case: one ball per coset, based under the summit of
    ``g(axis)`` with ``R = lam * (1 - |summit|)``.
    """

    orbit: Orbit
    mode: str
    lam: float
    base: np.ndarray
    R: np.ndarray
    L: np.ndarray
    index: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.R)

    def ball(self, i: int) -> Horoball:
        return Horoball(self.base[i], float(self.R[i]))

    @property
    def tops(self) -> np.ndarray:
        return (1.0 - 2.0 * self.R)[:, None] * self.base

    @property
    def centers(self) -> np.ndarray:
        return (1.0 - self.R)[:, None] * self.base

    @property
    def ratios(self) -> np.ndarray:
        """``R_g * L_g`` per entry."""
        return self.R * self.L

    def corridor(self) -> tuple:
        r = self.ratios
        return float(r.min()), float(r.max())

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            dim = self.base.shape[1]
            w.writerow([f"x{i}" for i in range(dim)] + ["R", "L", "word_length"])
            for i in range(len(self)):
                wl = len(self.orbit.word(int(self.index[i])))
                w.writerow([f"{v:.17g}" for v in self.base[i]] + [f"{self.R[i]:.17g}", f"{self.L[i]:.17g}", wl])


def build_family(orbit: Orbit, lam: Optional[float] = None, check: bool = True):
    """Horoball family over ``orbit``; returns :class:`OverlapCounterexample` on overlap.

    ``lam`` defaults to 1 for parabolic orbits (seed at half-space height 1)
    and 1/2 for hyperbolic ones.
    """
    if orbit.mode == "parabolic":
        if not orbit.y.is_infinity:
            raise NotImplementedError("parabolic families are seeded at infinity")
        lam = 1.0 if lam is None else lam
        if not 0 < lam <= 1:
            raise ValueError("lam must lie in (0, 1]")
        a, c = orbit.reps[:, 0, 0], orbit.reps[:, 1, 0]
        w2 = a.real ** 2 + a.imag ** 2 + c.real ** 2 + c.imag ** 2
        R = 1.0 / (1.0 + w2 / lam)
        fam = HoroballFamily(orbit, "parabolic", lam, orbit.points.copy(), R, orbit.L.copy(),
                             np.arange(len(orbit)))
    elif orbit.mode == "hyperbolic":
        lam = 0.5 if lam is None else lam
        b0 = np.nonzero(orbit.base == 0)[0]
        b1 = np.nonzero(orbit.base == 1)[0]
        # pair the two endpoints of each coset
        slot = np.full(int(orbit.coset.max()) + 1, -1)
        slot[orbit.coset[b0]] = b0
        partner = slot[orbit.coset[b1]]
        keep = partner >= 0
        partner, b1 = partner[keep], b1[keep]
        u, v = orbit.points[partner], orbit.points[b1]
        mid = u + v
        norm = np.linalg.norm(mid, axis=1, keepdims=True)
        perp = np.stack([-u[:, 1], u[:, 0]], axis=1) if u.shape[1] == 2 else None
        if perp is None:
            # d = 2: any unit vector orthogonal to u within the plane of u, v
            perp = mid - np.sum(mid * u, axis=1, keepdims=True) * u
            perp /= np.linalg.norm(perp, axis=1, keepdims=True)
        direction = np.where(norm > 1e-12, mid / np.where(norm > 1e-12, norm, 1.0), perp)
        R = lam * summit_radius(u, v)
        fam = HoroballFamily(orbit, "hyperbolic", lam, direction, R, orbit.L[partner], partner)
    else:
        raise ValueError("horoball families need a boundary orbit")
    if check:
        bad = first_overlap(fam)
        if bad is not None:
            return bad
    return fam


def first_overlap(fam: HoroballFamily, limit: int = 20000) -> Optional[OverlapCounterexample]:
    """Pairwise disjointness of the ``limit`` largest balls (exact for integer groups)."""
    order = np.argsort(-fam.R, kind="stable")[:limit]
    if fam.mode == "parabolic" and fam.orbit.exact:
        # |a c' - a' c|^2 >= lam^2 is exact tangency-or-disjointness for Ford-type balls
        a = np.rint(fam.orbit.reps[order, 0, 0])
        c = np.rint(fam.orbit.reps[order, 1, 0])
        for s in range(0, len(order), BLOCK):
            det = a[s:s + BLOCK, None] * c[None, :] - a[None, :] * c[s:s + BLOCK, None]
            n2 = det.real ** 2 + det.imag ** 2
            idx = np.arange(s, min(s + BLOCK, len(order)))
            n2[np.arange(len(idx)), idx] = np.inf
            bad = n2 < fam.lam ** 2
            if bad.any():
                i, j = np.argwhere(bad)[0]
                return OverlapCounterexample(int(order[idx[i]]), int(order[j]), float(n2[i, j] - fam.lam ** 2), fam.lam)
        return None
    C, R = fam.centers[order], fam.R[order]
    for s in range(0, len(order), BLOCK):
        d = np.linalg.norm(C[s:s + BLOCK, None, :] - C[None, :, :], axis=-1)
        gap = d - (R[s:s + BLOCK, None] + R[None, :])
        idx = np.arange(s, min(s + BLOCK, len(order)))
        gap[np.arange(len(idx)), idx] = np.inf
        bad = gap < -1e-10
        if bad.any():
            i, j = np.argwhere(bad)[0]
            return OverlapCounterexample(int(order[idx[i]]), int(order[j]), float(gap[i, j]), fam.lam)
    return None


def fit_family(orbit: Orbit, lam: float = 1.0, shrink: float = 0.5, tries: int = 40) -> HoroballFamily:
    """Shrink ``lam`` geometrically until the depth-limited disjointness check passes."""
    for _ in range(tries):
        fam = build_family(orbit, lam)
        if isinstance(fam, HoroballFamily):
            return fam
        lam *= shrink
    raise RuntimeError("no disjoint family found")


def invariance_defect(fam: HoroballFamily, samples: int = 1000, seed: int = 0) -> float:
    """Max relative radius mismatch between Moebius images of family balls and family balls.

    For random pairs (generator word, ball) the image horosphere is sampled at
    one point, which determines the image radius; it is compared to the family
    ball with the same base.
    """
    rng = np.random.default_rng(seed)
    spec = fam.orbit.spec
    gens = [g.matrix for g in spec.generators]
    tree = cKDTree(fam.base)
    big = np.nonzero(fam.R > 4.0 * fam.R.min() if len(fam) > 1 else fam.R > 0)[0]
    pool = big if len(big) else np.arange(len(fam))
    worst = 0.0
    done = 0
    while done < samples:
        i = int(rng.choice(pool))
        g = np.eye(2, dtype=complex)
        for _ in range(int(rng.integers(1, 4))):
            g = gens[int(rng.integers(len(gens)))] @ g
        # top point of ball i in half-space coordinates, mapped by g
        top = fam.tops[i]
        z, t = ball_to_half(top[None, :])
        z2, t2 = apply_half_arrays(g, z, t)
        P = half_to_ball(z2, t2, spec.dim)[0]
        bz, _ = ball_to_half(fam.base[i][None, :])
        if np.isfinite(bz[0]):
            xz, _ = apply_half_arrays(g, bz, np.zeros(1))
        else:
            xz = np.array([g[0, 0] / g[1, 0]]) if abs(g[1, 0]) > 0 else np.array([complex(np.inf)])
        xi = half_to_ball(xz, np.zeros(1), spec.dim)[0]
        xi = xi / np.linalg.norm(xi)
        d, j = tree.query(xi)
        if d > 1e-9 or fam.R[j] < 1e-6:
            continue  # image lands outside the enumerated depth
        R_img = float(radius_through(P, xi))
        worst = max(worst, abs(R_img - fam.R[j]) / fam.R[j])
        done += 1
    return worst


# ---------------------------------------------------------------------------
# disjointness constants

@dataclass(frozen=True)
class DisjointnessResult:
    c1: float
    pair: tuple
    mode: str
    n_points: int

    def c2(self, k: float) -> float:
        if self.mode == "parabolic":
            return self.c1 / (2.0 * math.sqrt(k))
        return self.c1 / (2.0 * k)


def disjointness_constant(points, L=None, mode: str = "parabolic") -> DisjointnessResult:
    """``min |xi_i - xi_j| sqrt(L_i L_j)`` (parabolic) or ``min |xi_i - xi_j| max(L_i, L_j)``."""
    if isinstance(points, Orbit):
        points, L = points.points, points.L
    points = np.asarray(points, dtype=float)
    L = np.asarray(L, dtype=float)
    n = len(L)
    if n < 2:
        raise ValueError("need at least two orbit points")
    if mode not in ("parabolic", "hyperbolic"):
        raise ValueError("mode must be parabolic or hyperbolic")
    best, pair = math.inf, (-1, -1)
    blk_rows = max(1, 8_000_000 // (n * points.shape[1]))
    for s in range(0, n - 1, blk_rows):
        e = min(s + blk_rows, n)
        # pairs (i, j) with i in [s, e) and j > i
        sub = points[s + 1:]
        d = np.linalg.norm(points[s:e, None, :] - sub[None, :, :], axis=-1)
        if mode == "parabolic":
            q = d * np.sqrt(L[s:e, None] * L[None, s + 1:])
        else:
            q = d * np.maximum(L[s:e, None], L[None, s + 1:])
        i_loc = np.arange(e - s)[:, None]
        j_loc = np.arange(n - s - 1)[None, :]
        q = np.where(j_loc >= i_loc, q, np.inf)
        k = np.unravel_index(np.argmin(q), q.shape)
        if q[k] < best:
            best, pair = float(q[k]), (int(s + k[0]), int(s + 1 + k[1]))
    return DisjointnessResult(best, pair, mode, n)


def farey_points(q_max: int):
    """Reduced fractions p/q in [0, 1] with q <= q_max as int64 arrays ``(p, q)``."""
    q = np.repeat(np.arange(1, q_max + 1), np.arange(2, q_max + 2))
    p = np.concatenate([np.arange(0, k + 1) for k in range(1, q_max + 1)])
    keep = np.gcd(p, q) == 1
    return p[keep].astype(np.int64), q[keep].astype(np.int64)


def farey_min_exact(q_max: int) -> tuple:
    """Exact ``min |p/q - p'/q'| q q' = min |p q' - p' q|`` over distinct Farey fractions.

    Returns ``(minimum, witness_pair)`` with integers only.
    """
    p, q = farey_points(q_max)
    best, wit = None, None
    for s in range(0, len(p), BLOCK):
        det = np.abs(p[s:s + BLOCK, None] * q[None, :] - p[None, :] * q[s:s + BLOCK, None])
        rows = np.arange(det.shape[0])
        det[rows, s + rows] = np.iinfo(np.int64).max
        j = np.unravel_index(np.argmin(det), det.shape)
        if best is None or det[j] < best:
            best = int(det[j])
            wit = ((int(p[s + j[0]]), int(q[s + j[0]])), (int(p[j[1]]), int(q[j[1]])))
    return best, wit


@dataclass(frozen=True)
class ShellCheck:
    passed: bool
    n_pairs: int
    min_gap: float
    witness: Optional[tuple]


def shell_disjoint_balls(shell, c2: float, slack: float = 1e-12) -> ShellCheck:
    """Pairwise disjointness of ``B(xi, c2 / L)`` within one shell.

    A pair passes when ``|xi_i - xi_j| - c2/L_i - c2/L_j > slack``.
    """
    if isinstance(shell, OrbitShell):
        points, L = shell.points, shell.L
    else:
        points, L = shell
    points = np.asarray(points, dtype=float)
    L = np.asarray(L, dtype=float)
    n = len(L)
    if n < 2:
        return ShellCheck(True, 0, math.inf, None)
    r = c2 / L
    worst, wit = math.inf, None
    for s in range(0, n, BLOCK):
        d = np.linalg.norm(points[s:s + BLOCK, None, :] - points[None, :, :], axis=-1)
        gap = d - r[s:s + BLOCK, None] - r[None, :]
        rows = np.arange(gap.shape[0])
        gap[rows, s + rows] = np.inf
        gap[:, :s] = np.inf
        j = np.unravel_index(np.argmin(gap), gap.shape)
        if gap[j] < worst:
            worst, wit = float(gap[j]), (int(s + j[0]), int(j[1]))
    passed = worst > slack
    return ShellCheck(passed, n * (n - 1) // 2, worst, None if passed else wit)


def top_distance_to_orbit(fam: HoroballFamily) -> float:
    """Max over balls of ``rho(top, g(0))`` for the ball's own representative ``g``."""
    reps = fam.orbit.reps[fam.index]
    z, t = apply_half_arrays(reps, np.zeros(len(reps), complex), np.ones(len(reps)))
    g0 = half_to_ball(z, t, fam.orbit.spec.dim)
    # use the exact values of 1 - |x|^2 for both points; the coordinates alone
    # lose them to cancellation deep in the orbit
    d_top = 4.0 * fam.R * (1.0 - fam.R)
    d_g0 = 1.0 / fam.orbit.L[fam.index]
    gap = np.linalg.norm(fam.tops - g0, axis=1)
    return float((2.0 * np.arcsinh(gap / np.sqrt(d_top * d_g0))).max())
