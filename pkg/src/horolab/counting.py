"""Orbit points in shells and in thin tubes around circles on the boundary sphere."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .groups import GroupSpec
from .hypcore import apply_half_arrays, boundary_ball_coords, half_to_ball
from .orbits import Orbit
from .parallel import shard_seeds

GENERIC_CENTER = 0.37 + 0.21j
GENERIC_RADIUS = 0.53
CONSISTENT = "HEURISTIC-CONSISTENT"
VIOLATED = "HEURISTIC-VIOLATED"
ON_CURVE = 1e-12


# ---------------------------------------------------------------------------
# curves on S^2

@dataclass
class CurveSpec:
    """A curve on the boundary sphere of the 3-ball.

    ``circle``: circle ``|z - center| = radius`` in the boundary plane;
    ``line``: the extended line through ``point`` with direction angle ``angle``;
    ``polyline``: ball-coordinate vertices of a sampled arc (max chord 1e-4).
    """

    kind: str
    center: complex = 0j
    radius: float = 1.0
    point: complex = 0j
    angle: float = 0.0
    vertices: Optional[np.ndarray] = field(default=None, repr=False)
    invariance: str = "generic"

    def __post_init__(self):
        if self.kind in ("circle", "line"):
            o, nrm, R = self._space_circle()
            self._o, self._n, self._R = o, nrm, R
        elif self.kind == "polyline":
            v = np.asarray(self.vertices, dtype=float)
            if v.ndim != 2 or v.shape[1] != 3:
                raise ValueError("polyline vertices must have shape (m, 3)")
            if np.max(np.abs(np.linalg.norm(v, axis=1) - 1.0)) > 1e-10:
                raise ValueError("polyline vertices must lie on the unit sphere")
            chord = np.linalg.norm(np.diff(v, axis=0), axis=1)
            if chord.max() > 1e-4 + 1e-12:
                raise ValueError("polyline chords must not exceed 1e-4")
            self.vertices = v
            self._tree = cKDTree(v)
        else:
            raise ValueError(f"unknown curve kind {self.kind!r}")

    @classmethod
    def circle(cls, center: complex = GENERIC_CENTER, radius: float = GENERIC_RADIUS) -> "CurveSpec":
        return cls("circle", center=complex(center), radius=float(radius))

    @classmethod
    def real_line(cls) -> "CurveSpec":
        return cls("line", point=0j, angle=0.0, invariance="invariant-under-subgroup(modular)")

    @classmethod
    def from_param(cls, f: Callable[[np.ndarray], np.ndarray], t0: float, t1: float, max_chord: float = 1e-4):
        """Sample the boundary-plane arc ``t -> f(t)`` (complex) finely enough and convert to the ball."""
        m = 1025
        while True:
            t = np.linspace(t0, t1, m)
            v = boundary_ball_coords(np.asarray(f(t), dtype=np.complex128), 2)
            if np.linalg.norm(np.diff(v, axis=0), axis=1).max() <= max_chord:
                return cls("polyline", vertices=v)
            m = 2 * m - 1

    def plane_samples(self, m: int = 6) -> np.ndarray:
        s = np.linspace(0.0, 2 * math.pi, m, endpoint=False) + 0.1
        if self.kind == "circle":
            return self.center + self.radius * np.exp(1j * s)
        if self.kind == "line":
            return self.point + np.tan(s / 2 - math.pi / 2 + 0.05) * np.exp(1j * self.angle)
        raise ValueError("plane samples exist only for circles and lines")

    def _space_circle(self):
        p = boundary_ball_coords(self.plane_samples(3), 2)
        a, b, c = p
        ab, ac = b - a, c - a
        nrm = np.cross(ab, ac)
        nn = float(nrm @ nrm)
        o = a + (np.cross(nrm, ab) * (ac @ ac) + np.cross(ac, nrm) * (ab @ ab)) / (2.0 * nn)
        nrm = nrm / math.sqrt(nn)
        R = float(np.linalg.norm(a - o))
        return o, nrm, R

    def ball_points(self, m: int = 64) -> np.ndarray:
        if self.kind == "polyline":
            return self.vertices
        return boundary_ball_coords(self.plane_samples(m), 2)

    def distance(self, x) -> np.ndarray:
        """Euclidean distance from ball points ``x`` (shape ``(n, 3)``) to the curve."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.kind == "polyline":
            _, i = self._tree.query(x)
            v = self.vertices
            best = np.linalg.norm(x - v[i], axis=1)
            for j0, j1 in ((i - 1, i), (i, i + 1)):
                ok = (j0 >= 0) & (j1 < len(v))
                a = v[np.clip(j0, 0, len(v) - 1)]
                b = v[np.clip(j1, 0, len(v) - 1)]
                ab = b - a
                s = np.clip(np.sum((x - a) * ab, axis=1) / np.maximum(np.sum(ab * ab, axis=1), 1e-300), 0, 1)
                d = np.linalg.norm(x - (a + s[:, None] * ab), axis=1)
                best = np.where(ok, np.minimum(best, d), best)
            return best
        y = x - self._o
        h = y @ self._n
        perp = np.linalg.norm(y - h[:, None] * self._n, axis=1)
        return np.sqrt(h * h + (perp - self._R) ** 2)

    @property
    def resolution(self) -> float:
        return 1e-4 ** 2 / 8.0 if self.kind == "polyline" else 0.0


def _word_matrices(spec: GroupSpec, max_len: int) -> np.ndarray:
    """All products of at most ``max_len`` generators (with repetition; identity excluded)."""
    gens = np.stack([g.matrix for g in spec.generators])
    level = gens
    out = [gens]
    for _ in range(max_len - 1):
        level = np.einsum("aij,bjk->abik", gens, level).reshape(-1, 2, 2)
        out.append(level)
    return np.concatenate(out)


def preserving_elements(spec: GroupSpec, curve: CurveSpec, max_len: int = 6, tol: float = 1e-9) -> np.ndarray:
    """Nontrivial elements of word length ``<= max_len`` that map ``curve`` onto itself."""
    m = _word_matrices(spec, max_len)
    ident = (np.abs(m[:, 0, 1]) < tol) & (np.abs(m[:, 1, 0]) < tol) & (np.abs(m[:, 0, 0] - m[:, 1, 1]) < tol) \
        & (np.abs(np.abs(m[:, 0, 0]) - 1) < tol)
    m = m[~ident]
    if curve.kind == "polyline":
        pts = curve.vertices[:: max(1, len(curve.vertices) // 6)][:6]
        from .hypcore import ball_to_half
        z, _ = ball_to_half(pts)
    else:
        z = curve.plane_samples(6)
    keep = np.ones(len(m), dtype=bool)
    for zi in z:
        w, _ = apply_half_arrays(m, np.full(len(m), zi), np.zeros(len(m)))
        d = curve.distance(half_to_ball(w, np.zeros(len(m)), 2))
        keep &= d < tol
    return m[keep]


def check_generic(spec: GroupSpec, curve: CurveSpec, max_len: int = 6) -> None:
    found = preserving_elements(spec, curve, max_len)
    if len(found):
        raise ValueError(f"curve is preserved by {len(found)} group elements of word length <= {max_len}")


# ---------------------------------------------------------------------------
# counts

@dataclass
class ShellReport:
    k: float
    counts: List[int]
    ratios: List[float]
    corridor: tuple
    stable_from: int
    last_truncated: bool


def shell_report(orbit: Orbit, k: float = 2.0, n_max: int = 8, stable_from: int = 3) -> ShellReport:
    """``#A(n)`` per shell with the ratios ``#A(n) / k^(2 delta' n)`` (``2n`` for ``d = 2``)."""
    if orbit.spec.dim != 2:
        raise ValueError("shell counts on S^2 need a d = 2 group")
    shells = orbit.shells(k, n_max)
    counts = [len(s) for s in shells]
    ratios = [c / float(k) ** (2 * n) for n, c in enumerate(counts)]
    tail = ratios[stable_from:]
    return ShellReport(float(k), counts, ratios, (min(tail), max(tail)) if tail else (math.nan, math.nan),
                       stable_from, bool(shells[-1].truncated) if shells else False)


@dataclass
class TubeCount:
    n: int
    k: float
    width: float
    count: int
    shell_total: int
    on_curve: int = 0  # points lying on the curve itself (distance below ON_CURVE)

    @property
    def ratio(self) -> float:
        return self.count / (float(self.k) ** (2 * self.n) * self.width)


@dataclass
class TubeReport:
    rows: List[TubeCount]
    verdict: str
    direction: Optional[str]
    spread: float
    upper_bound_consistent: bool

    def ratios(self) -> List[float]:
        return [r.ratio for r in self.rows]

    def curve_supply(self, n_from: int = 3) -> float:
        """``b = min #(points on the curve) / k^n`` over shells ``n >= n_from``."""
        v = [r.on_curve / r.k ** r.n for r in self.rows if r.n >= n_from]
        return min(v) if v else 0.0

    def linear_growth(self, n_from: int = 3) -> float:
        """Slope ``a`` such that ``ratio(n) >= a n`` on every shell ``n >= 1``, or 0 if none works.

        The curve supply ``b`` alone forces ``ratio(n) >= b n log k`` when
        ``psi(k^n) = 1 / (k^n log k^n)``; the returned slope is the largest
        ``a <= b log k`` satisfied by the recorded ratios.
        """
        rows = [r for r in self.rows if r.n >= 1]
        if not rows:
            return 0.0
        a = self.curve_supply(n_from) * math.log(rows[0].k)
        a = min([a] + [r.ratio / r.n for r in rows])
        return max(a, 0.0)

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("n,count,shell_total,on_curve,ratio\n")
            for r in self.rows:
                fh.write(f"{r.n},{r.count},{r.shell_total},{r.on_curve},{r.ratio:.17g}\n")


def tube_counts(orbit: Orbit, curve: CurveSpec, psi: Callable, k: float = 2.0, n_max: int = 8,
                n_from: int = 3, corridor: float = 4.0) -> TubeReport:
    """``#{g(y) in shell n : dist(g(y), C) <= psi(k^n)}`` per shell.

    The verdict is HEURISTIC-CONSISTENT when the ratios ``count / (k^(2n) psi(k^n))``
    for ``n >= n_from`` stay within a factor ``corridor``, otherwise
    HEURISTIC-VIOLATED with the direction of the drift.
    """
    rows = []
    for s in orbit.shells(k, n_max):
        w = float(psi(float(k) ** s.n))
        if w <= curve.resolution:
            raise ValueError(f"shell {s.n}: width {w:g} below the curve resolution")
        d = curve.distance(s.points)
        rows.append(TubeCount(s.n, float(k), w, int(np.count_nonzero(d <= w)), len(s),
                              int(np.count_nonzero(d <= ON_CURVE))))
    tail = [r.ratio for r in rows if r.n >= n_from]
    pos = [t for t in tail if t > 0]
    spread = max(pos) / min(pos) if pos else math.inf
    if pos and len(pos) == len(tail) and spread <= corridor:
        verdict, direction = CONSISTENT, None
    else:
        verdict = VIOLATED
        direction = "increasing" if tail and tail[-1] >= tail[0] else "decreasing"
    # only the upper half of the heuristic matters for the convergence case
    upper = bool(tail) and max(tail) <= corridor * max(tail[0], min(pos) if pos else 0.0)
    return TubeReport(rows, verdict, direction, float(spread), upper)


# ---------------------------------------------------------------------------
# neighbourhood measures

@dataclass
class NeighbourhoodMeasure:
    width: float
    area: float
    stderr: float
    samples: int

    @property
    def ratio(self) -> float:
        return self.area / self.width


def great_circle_band_area(width: float) -> float:
    """Area of the points of S^2 within chordal distance ``width`` of a great circle."""
    return 4.0 * math.pi * math.sin(2.0 * math.asin(width / 2.0))


def neighborhood_measure(curve: CurveSpec, width: float, samples: int = 400_000, seed: int = 0,
                         shards: int = 8) -> NeighbourhoodMeasure:
    hits = 0
    sizes = [samples // shards + (1 if i < samples % shards else 0) for i in range(shards)]
    for rng, n in zip(shard_seeds(seed, shards), sizes):
        v = rng.standard_normal((n, 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        hits += int(np.count_nonzero(curve.distance(v) <= width))
    p = hits / samples
    return NeighbourhoodMeasure(width, 4 * math.pi * p, 4 * math.pi * math.sqrt(p * (1 - p) / samples), samples)
