"""Orbit enumeration with minimal coset representatives, shells, and delta estimation.

Two routes produce the same orbit data:

* ``"bfs"``: breadth-first search over words, left-multiplying by generators,
  reducing each candidate to the minimal-L representative of its stabilizer
  coset and pruning once ``L`` exceeds ``factor * L_max``.  Works for any group.
* ``"direct"``: for SL(2, Z) and SL(2, Z[i]) the cosets are parametrised by
  coprime integer columns, so they are listed outright.  Much faster; the BFS
  route is kept as its cross-check.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .groups import GroupSpec, short_words
from .hypcore import (
    GaussQ,
    ModelPoint,
    MoebiusMap,
    apply_half_arrays,
    batch_L,
    classify,
    half_to_ball,
    to_ball,
)

DEFAULT_WORD_CAP = 10**7
DEFAULT_FACTOR = 4.0
SNAP = 1e-9
MERGE_TOL = 1e-10


class OrbitTruncated(UserWarning):
    """The word cap was hit before the search was exhausted."""


class InsufficientOrbit(ValueError):
    pass


# ---------------------------------------------------------------------------
# vectorised integer arithmetic

def ext_gcd(a, c):
    """Vectorised extended Euclid on int64 arrays: returns ``(g, x, y)`` with ``x a + y c = g``."""
    old_r, r = np.array(a, dtype=np.int64), np.array(c, dtype=np.int64)
    old_s, s = np.ones_like(old_r), np.zeros_like(old_r)
    old_t, t = np.zeros_like(old_r), np.ones_like(old_r)
    while np.any(r != 0):
        nz = r != 0
        q = np.where(nz, old_r // np.where(nz, r, 1), 0)
        old_r, r = np.where(nz, r, old_r), np.where(nz, old_r - q * r, r)
        old_s, s = np.where(nz, s, old_s), np.where(nz, old_s - q * s, s)
        old_t, t = np.where(nz, t, old_t), np.where(nz, old_t - q * t, t)
    neg = old_r < 0
    return np.abs(old_r), np.where(neg, -old_s, old_s), np.where(neg, -old_t, old_t)


def round_gauss(z):
    z = np.asarray(z, dtype=np.complex128)
    return np.rint(z.real) + 1j * np.rint(z.imag)


def gauss_ext_gcd(a, c):
    """Extended Euclid in Z[i] on integer-valued complex arrays.

    Returns ``(g, x, y)`` with ``x a + y c = g``; ``g`` is a unit exactly when
    ``a`` and ``c`` are coprime.
    """
    old_r, r = np.array(a, dtype=np.complex128), np.array(c, dtype=np.complex128)
    old_s, s = np.ones_like(old_r), np.zeros_like(old_r)
    old_t, t = np.zeros_like(old_r), np.ones_like(old_r)
    while np.any(r != 0):
        nz = r != 0
        q = np.where(nz, round_gauss(old_r / np.where(nz, r, 1)), 0)
        old_r, r = np.where(nz, r, old_r), np.where(nz, old_r - q * r, r)
        old_s, s = np.where(nz, s, old_s), np.where(nz, old_s - q * s, s)
        old_t, t = np.where(nz, t, old_t), np.where(nz, old_t - q * t, t)
    return old_r, old_s, old_t


def _gauss_disk(radius2: float):
    """Gaussian integers with norm <= radius2, sorted by norm (ties: real, imag)."""
    r = int(math.isqrt(int(radius2)))
    x, y = np.meshgrid(np.arange(-r, r + 1), np.arange(-r, r + 1), indexing="ij")
    x, y = x.ravel(), y.ravel()
    n = x * x + y * y
    keep = n <= radius2
    x, y, n = x[keep], y[keep], n[keep]
    order = np.lexsort((y, x, n))
    return (x[order] + 1j * y[order]).astype(np.complex128), n[order]


def _expand_ranges(lo, hi):
    """Concatenate ``arange(lo[i], hi[i] + 1)``; returns ``(row, value)`` arrays."""
    counts = np.maximum(hi - lo + 1, 0)
    rows = np.repeat(np.arange(len(lo)), counts)
    starts = np.repeat(lo - np.concatenate(([0], np.cumsum(counts)[:-1])), counts)
    return rows, starts + np.arange(counts.sum())


# ---------------------------------------------------------------------------
# direct coset listings for SL(2, Z) and SL(2, Z[i])

def _direct_cusp_Z(L_max: float, block: int = 256):
    """Minimal-L representatives of the cosets g Stab(inf) in SL(2, Z)."""
    M = int(math.floor(4 * L_max - 2))
    cmax = math.isqrt(max(M, 0))
    parts = [np.array([[1, 0, 0, 1]], dtype=np.int64)]
    for c0 in range(1, cmax + 1, block):
        cs = np.arange(c0, min(c0 + block, cmax + 1), dtype=np.int64)
        amax = np.array([math.isqrt(M - int(c) * int(c)) for c in cs], dtype=np.int64)
        rows, a = _expand_ranges(-amax, amax)
        c = cs[rows]
        keep = np.gcd(a, c) == 1
        a, c = a[keep], c[keep]
        _, x, y = ext_gcd(a, c)
        d, b = x, -y
        n = np.rint(-(a * b + c * d) / (a * a + c * c)).astype(np.int64)
        b, d = b + n * a, d + n * c
        parts.append(np.stack([a, b, c, d], axis=1))
    m = np.concatenate(parts)
    four_L = (m * m).sum(axis=1) + 2
    return m[four_L <= 4 * L_max]


def _unit_normalise(c):
    """Unit ``u`` with ``u c`` in {re > 0, im >= 0}; ``c = 0`` gives ``u = 1``."""
    c = np.asarray(c, dtype=np.complex128)
    u = np.ones_like(c)
    for unit in (1, 1j, -1, -1j):
        v = unit * c
        u = np.where((v.real > 0) & (v.imag >= 0), unit, u)
    return u


def _direct_cusp_Zi(L_max: float, block: int = 128):
    """Minimal-L representatives of the cosets g Stab(inf) in SL(2, Z[i])."""
    M = int(math.floor(4 * L_max - 2))
    A, An = _gauss_disk(M)
    cq = A[(A.real > 0) & (A.imag >= 0)]
    cn = (cq * cq.conj()).real.astype(np.int64)
    ident = np.array([[1, 0, 0, 1]], dtype=np.complex128)
    parts = [ident]
    for i0 in range(0, len(cq), block):
        cs, csn = cq[i0:i0 + block], cn[i0:i0 + block]
        counts = np.searchsorted(An, M - csn, side="right")
        rows = np.repeat(np.arange(len(cs)), counts)
        idx = np.arange(counts.sum()) - np.repeat(np.concatenate(([0], np.cumsum(counts)[:-1])), counts)
        a, c = A[idx], cs[rows]
        g, x, y = gauss_ext_gcd(a, c)
        unit = np.abs(g.real) + np.abs(g.imag) == 1
        a, c, x, y, g = a[unit], c[unit], x[unit], y[unit], g[unit]
        ginv = g.conj()
        d, b = x * ginv, -y * ginv
        w2 = (a * a.conj() + c * c.conj()).real
        n = round_gauss(-(b * a.conj() + d * c.conj()) / w2)
        b, d = b + n * a, d + n * c
        parts.append(np.stack([a, b, c, d], axis=1))
    m = np.concatenate(parts)
    four_L = (m.real ** 2 + m.imag ** 2).sum(axis=1) + 2
    return m[four_L <= 4 * L_max + 1e-9]


def _direct_interior_Z(L_max: float, block: int = 512):
    """One element per point of the orbit of i under SL(2, Z), with L <= L_max."""
    budget = 4 * L_max - 2
    M = int(math.floor(budget))
    cmax = math.isqrt(M)
    out = []
    for c0 in range(0, cmax + 1, block):
        cs = np.arange(c0, min(c0 + block, cmax + 1), dtype=np.int64)
        dmax = np.array([math.isqrt(M - int(c) * int(c)) for c in cs], dtype=np.int64)
        dlo = np.where(cs == 0, 1, -dmax)
        dhi = np.where(cs == 0, 1, dmax)
        rows, d = _expand_ranges(dlo, dhi)
        c = cs[rows]
        keep = np.gcd(c, d) == 1
        c, d = c[keep], d[keep]
        _, x, y = ext_gcd(d, c)
        a0, b0 = x, -y
        w2 = (c * c + d * d).astype(float)
        nstar = -(a0 * c + b0 * d) / w2
        r = budget - w2 - 1.0 / w2
        ok = r >= 0
        half = np.sqrt(np.where(ok, r, 0.0)) / np.sqrt(w2)
        lo = np.where(ok, np.ceil(nstar - half - 1e-12), 1).astype(np.int64)
        hi = np.where(ok, np.floor(nstar + half + 1e-12), 0).astype(np.int64)
        rr, n = _expand_ranges(lo, hi)
        a, b = a0[rr] + n * c[rr], b0[rr] + n * d[rr]
        out.append(np.stack([a, b, c[rr], d[rr]], axis=1))
    m = np.concatenate(out)
    m = m[(m * m).sum(axis=1) + 2 <= 4 * L_max]
    k1 = m[:, 2] ** 2 + m[:, 3] ** 2
    k2 = m[:, 0] * m[:, 2] + m[:, 1] * m[:, 3]
    K = int(k2.__abs__().max()) + 1 if len(k2) else 1
    _, first = np.unique(k1 * (2 * K + 1) + (k2 + K), return_index=True)
    return m[np.sort(first)]


def _direct_interior_Zi(L_max: float, block: int = 4096):
    """One element per point of the orbit of j under SL(2, Z[i]), with L <= L_max."""
    budget = 4 * L_max - 2
    M = int(math.floor(budget))
    A, An = _gauss_disk(M)
    # bottom rows (c, d) up to a global sign
    c_half = A[(A.real > 0) | ((A.real == 0) & (A.imag > 0))]
    c_half_n = (c_half * c_half.conj()).real.astype(np.int64)
    rows_c, rows_d = [np.zeros(0, complex)], [np.zeros(0, complex)]
    dpos = A[(A.real > 0) | ((A.real == 0) & (A.imag > 0))]
    rows_c.append(np.zeros(len(dpos), complex))
    rows_d.append(dpos)
    counts = np.searchsorted(An, M - c_half_n, side="right")
    rr = np.repeat(np.arange(len(c_half)), counts)
    idx = np.arange(counts.sum()) - np.repeat(np.concatenate(([0], np.cumsum(counts)[:-1])), counts)
    rows_c.append(c_half[rr])
    rows_d.append(A[idx])
    c = np.concatenate(rows_c)
    d = np.concatenate(rows_d)
    out = []
    for i0 in range(0, len(c), block * 64):
        cc, dd = c[i0:i0 + block * 64], d[i0:i0 + block * 64]
        g, x, y = gauss_ext_gcd(dd, cc)
        unit = np.abs(g.real) + np.abs(g.imag) == 1
        cc, dd, x, y, g = cc[unit], dd[unit], x[unit], y[unit], g[unit]
        ginv = g.conj()
        a0, b0 = x * ginv, -y * ginv
        w2 = (cc * cc.conj() + dd * dd.conj()).real
        nstar = -(a0 * cc.conj() + b0 * dd.conj()) / w2
        r = budget - w2 - 1.0 / w2
        ok = r >= 0
        cc, dd, a0, b0, w2, nstar, r = (v[ok] for v in (cc, dd, a0, b0, w2, nstar, r))
        h = np.sqrt(r / w2)
        centre = round_gauss(nstar)
        H = np.ceil(h).astype(np.int64) + 1
        for hv in np.unique(H):
            sel = np.nonzero(H == hv)[0]
            ox, oy = np.meshgrid(np.arange(-hv, hv + 1), np.arange(-hv, hv + 1), indexing="ij")
            off = (ox.ravel() + 1j * oy.ravel())[None, :]
            n = centre[sel, None] + off
            inside = np.abs(n - nstar[sel, None]) ** 2 <= (h[sel, None] ** 2) + 1e-9
            ri, ci = np.nonzero(inside)
            nn = n[ri, ci]
            s = sel[ri]
            a, b = a0[s] + nn * cc[s], b0[s] + nn * dd[s]
            out.append(np.stack([a, b, cc[s], dd[s]], axis=1))
    m = np.concatenate(out) if out else np.zeros((0, 4), complex)
    m = m[(m.real ** 2 + m.imag ** 2).sum(axis=1) + 2 <= 4 * L_max + 1e-9]
    w2 = np.rint((np.abs(m[:, 2]) ** 2 + np.abs(m[:, 3]) ** 2)).astype(np.int64)
    ip = m[:, 0] * m[:, 2].conj() + m[:, 1] * m[:, 3].conj()
    kr = np.rint(ip.real).astype(np.int64)
    ki = np.rint(ip.imag).astype(np.int64)
    K = int(max(np.abs(kr).max(initial=0), np.abs(ki).max(initial=0))) + 1
    key = (w2 * (2 * K + 1) + (kr + K)) * (2 * K + 1) + (ki + K)
    _, first = np.unique(key, return_index=True)
    ident = np.array([[1, 0, 0, 1]], dtype=complex)
    m = m[np.sort(first)]
    if not np.any((w2[np.sort(first)] == 1) & (kr[np.sort(first)] == 0) & (ki[np.sort(first)] == 0)):
        m = np.concatenate([ident, m])
    return m


# ---------------------------------------------------------------------------
# word decomposition for the standard integer groups

def _gen_index(spec: GroupSpec, raw, dim):
    key = MoebiusMap(raw, dim=dim).key
    for i, g in enumerate(spec.generators):
        if g.key == key:
            return i
    return None


def integer_word(spec: GroupSpec, m) -> tuple:
    """Word (generator indices, leftmost first) whose product is ``m`` up to sign.

    Euclid-style reduction: peel off a translation, then an inversion, until
    the lower-left entry vanishes.  Only for the standard modular and Picard
    generating sets.
    """
    dim = spec.dim
    m = np.asarray(m, dtype=np.complex128).reshape(2, 2)
    a, b, c, d = (complex(v) for v in m.ravel())
    T = _gen_index(spec, [[1, 1], [0, 1]], dim)
    Ti = _gen_index(spec, [[1, -1], [0, 1]], dim)
    S = _gen_index(spec, [[0, -1], [1, 0]], dim)
    U = Ui = None
    if dim == 2:
        U = _gen_index(spec, [[1, "i"], [0, 1]], 2)
        Ui = _gen_index(spec, [[1, "-i"], [0, 1]], 2)
    letters: List[int] = []

    def translate(n: complex):
        re, im = int(round(n.real)), int(round(n.imag))
        letters.extend([T] * re if re > 0 else [Ti] * (-re))
        if im:
            letters.extend([U] * im if im > 0 else [Ui] * (-im))

    while abs(c) > 0.5:
        q = a / c
        n = complex(round(q.real), round(q.imag)) if dim == 2 else complex(round(q.real), 0)
        # m = T^n * m'
        translate(n)
        a, b = a - n * c, b - n * d
        # m' = S * m''
        letters.append(S)
        a, b, c, d = c, d, -a, -b
    # upper triangular [[u, b], [0, 1/u]]
    u = a
    if abs(u - 1) < 1e-9 or abs(u + 1) < 1e-9:
        translate(b * u.conjugate() if dim == 2 else b * u.real)
        return tuple(letters)
    # diag(u, 1/u) = T^u S T^{1/u} S^{-1} T^u S and m = T^{b u} diag(u, 1/u)
    translate(b * u)
    translate(u)
    letters.append(S)
    translate(1 / u)
    letters.append(S)
    translate(u)
    letters.append(S)
    return tuple(letters)


def word_product(spec: GroupSpec, word: Sequence[int]) -> np.ndarray:
    m = np.eye(2, dtype=np.complex128)
    for i in word:
        m = m @ spec.generators[i].matrix
    return m


# ---------------------------------------------------------------------------
# stabiliser reductions and keys for the BFS route

def _parabolic_stabilizer(spec: GroupSpec, y: ModelPoint, max_len: int = 4):
    """Short parabolic words fixing ``y``: a basis of their translation lattice."""
    found = []
    for _, g in short_words(spec.generators, max_len):
        c = classify(g)
        if c.kind != "parabolic":
            continue
        f = to_ball(c.fixed_points[0]).array()
        if np.linalg.norm(f - to_ball(y).array()) > 1e-9:
            continue
        found.append(g)
    if not found:
        raise ValueError(f"no parabolic stabiliser found for {y}")
    if y.is_infinity:
        trans = [complex(g.matrix[0, 1] / g.matrix[1, 1]) for g in found]
    else:
        z = y.boundary_value()
        conj = np.array([[0, -1], [1, -z]], dtype=np.complex128)
        trans = []
        for g in found:
            m = conj @ g.matrix @ np.linalg.inv(conj)
            trans.append(complex(m[0, 1] / m[1, 1]))
    order = np.argsort([abs(t) for t in trans], kind="stable")
    basis, maps = [], []
    for i in order:
        t = trans[i]
        if not basis:
            basis.append(t)
            maps.append(found[i])
        elif len(basis) == 1 and abs((t / basis[0]).imag) > 1e-9:
            basis.append(t)
            maps.append(found[i])
    return basis, maps


def _make_reducer(spec: GroupSpec, mode: str, y: Optional[ModelPoint]):
    if mode == "interior":
        return lambda m: m
    if mode == "parabolic" and y.is_infinity:
        basis, _ = _parabolic_stabilizer(spec, y)
        if len(basis) == 1:
            tau = basis[0]

            def reduce_inf(m):
                a, b, c, d = m[:, 0, 0], m[:, 0, 1], m[:, 1, 0], m[:, 1, 1]
                w2 = np.abs(a) ** 2 + np.abs(c) ** 2
                star = -(b * a.conj() + d * c.conj()) / w2
                n = np.rint((star / tau).real)
                t = n * tau
                out = m.copy()
                out[:, 0, 1] = b + t * a
                out[:, 1, 1] = d + t * c
                return out

            return reduce_inf
        t1, t2 = basis
        B = np.array([[t1.real, t2.real], [t1.imag, t2.imag]])
        Binv = np.linalg.inv(B)

        def reduce_inf2(m):
            a, b, c, d = m[:, 0, 0], m[:, 0, 1], m[:, 1, 0], m[:, 1, 1]
            w2 = np.abs(a) ** 2 + np.abs(c) ** 2
            star = -(b * a.conj() + d * c.conj()) / w2
            coef = Binv @ np.stack([star.real, star.imag])
            base = np.floor(coef)
            best_t = None
            best_e = None
            for i in (0, 1):
                for j in (0, 1):
                    n = base + np.array([[i], [j]])
                    t = n[0] * t1 + n[1] * t2
                    e = np.abs(t - star)
                    if best_t is None:
                        best_t, best_e = t, e
                    else:
                        better = e < best_e - 1e-12
                        best_t = np.where(better, t, best_t)
                        best_e = np.where(better, e, best_e)
            out = m.copy()
            out[:, 0, 1] = b + best_t * a
            out[:, 1, 1] = d + best_t * c
            return out

        return reduce_inf2
    if mode == "parabolic":
        _, maps = _parabolic_stabilizer(spec, y)
        hs = [g.matrix for g in maps]
    else:
        hs = [spec.hyperbolic_element.matrix]
    steps = []
    for h in hs:
        steps.append(h)
        steps.append(np.linalg.inv(h))

    def descend(m):
        m = m.copy()
        L = batch_L(m)
        for _ in range(10_000):
            improved = np.zeros(len(m), bool)
            for h in steps:
                cand = m @ h
                Lc = batch_L(cand)
                better = Lc < L * (1 - 1e-13)
                m[better] = cand[better]
                L = np.where(better, Lc, L)
                improved |= better
            if not improved.any():
                return m
        raise RuntimeError("stabiliser descent did not terminate")

    return descend


def _snap(x):
    return np.rint(np.asarray(x) / SNAP).astype(np.int64)


def _base_points(spec: GroupSpec, mode: str, y: Optional[ModelPoint]):
    """Half-space ``(z, t)`` of the base point(s)."""
    if mode == "interior":
        return [(0j, 1.0)]
    if mode == "parabolic":
        return [(complex(np.inf) if y.is_infinity else y.boundary_value(), 0.0)]
    return [(p.boundary_value(), 0.0) for p in spec.hyperbolic]


def _images(m, bases, dim):
    pts = []
    for z, t in bases:
        zz, tt = apply_half_arrays(m, np.full(len(m), z), np.full(len(m), t))
        w = half_to_ball(zz, tt, dim)
        if t == 0:
            w = w / np.linalg.norm(w, axis=-1, keepdims=True)
        pts.append(w)
    return pts


def _make_keyer(spec: GroupSpec, mode: str, y: Optional[ModelPoint]):
    ring = spec.ring
    bases = _base_points(spec, mode, y)
    if ring is not None and mode == "interior":
        def key_int_interior(m):
            a, b, c, d = (np.rint(m[:, i, j]) for i, j in ((0, 0), (0, 1), (1, 0), (1, 1)))
            w2 = np.rint(np.abs(c) ** 2 + np.abs(d) ** 2).astype(np.int64)
            ip = a * c.conj() + b * d.conj()
            return list(zip(w2.tolist(), np.rint(ip.real).astype(np.int64).tolist(),
                            np.rint(ip.imag).astype(np.int64).tolist()))
        return key_int_interior
    if ring is not None and mode == "parabolic" and y.is_infinity:
        def key_int_cusp(m):
            a, c = np.rint(m[:, 0, 0]), np.rint(m[:, 1, 0])
            u = np.where(c == 0, _unit_normalise(a), _unit_normalise(c)) if spec.dim == 2 else np.where(
                (c.real < 0) | ((c.real == 0) & (a.real < 0)), -1, 1)
            a, c = a * u, c * u
            return list(zip(np.rint(a.real).astype(np.int64).tolist(), np.rint(a.imag).astype(np.int64).tolist(),
                            np.rint(c.real).astype(np.int64).tolist(), np.rint(c.imag).astype(np.int64).tolist()))
        return key_int_cusp

    def key_float(m):
        pts = _images(m, bases, spec.dim)
        snapped = np.concatenate([_snap(p) for p in pts], axis=1)
        return [tuple(r) for r in snapped.tolist()]

    return key_float


# ---------------------------------------------------------------------------
# orbit containers

@dataclass(frozen=True)
class OrbitEntry:
    point: ModelPoint
    L: float
    word: tuple
    rep: MoebiusMap
    base: int


@dataclass
class OrbitShell:
    k: int
    n: int
    indices: np.ndarray
    orbit: "Orbit" = field(repr=False)
    truncated: bool = False

    def __len__(self):
        return len(self.indices)

    @property
    def points(self):
        return self.orbit.points[self.indices]

    @property
    def L(self):
        return self.orbit.L[self.indices]

    @property
    def entries(self):
        return [self.orbit.entry(int(i)) for i in self.indices]


@dataclass
class Orbit:
    """Enumerated orbit ``{g(y)}`` with minimal-L representatives.

    ``points`` holds ball coordinates, ``half`` the half-space boundary value
    (``inf`` for infinity) and ``reps`` the representative matrices.  For the
    hyperbolic case every coset contributes two entries (bases 0 and 1).
    """

    spec: GroupSpec
    mode: str
    y: Optional[ModelPoint]
    L_max: float
    points: np.ndarray
    L: np.ndarray
    reps: np.ndarray
    base: np.ndarray
    half: np.ndarray
    parent: Optional[np.ndarray] = None
    via: Optional[np.ndarray] = None
    node: Optional[np.ndarray] = None
    coset: Optional[np.ndarray] = None
    route: str = "bfs"
    truncated: bool = False
    words_explored: int = 0

    def __len__(self):
        return len(self.L)

    @property
    def exact(self) -> bool:
        return self.spec.ring is not None

    def rep(self, i: int) -> MoebiusMap:
        m = self.reps[i]
        if self.exact:
            if self.spec.dim == 1:
                vals = [[int(round(m[0, 0].real)), int(round(m[0, 1].real))],
                        [int(round(m[1, 0].real)), int(round(m[1, 1].real))]]
                return MoebiusMap(vals, dim=1)
            vals = [[GaussQ(int(round(v.real)), int(round(v.imag))) for v in row] for row in m]
            return MoebiusMap(vals, dim=2)
        return MoebiusMap.from_array(m, self.spec.dim)

    def word(self, i: int) -> tuple:
        if self.parent is None:
            return integer_word(self.spec, self.reps[i])
        out = []
        j = int(self.node[i])
        while self.parent[j] >= 0:
            out.append(int(self.via[j]))
            j = int(self.parent[j])
        return tuple(out)

    def boundary_exact(self, i: int):
        """Exact half-space boundary value of entry ``i`` (``None`` for infinity)."""
        if not self.exact or self.mode != "parabolic" or not self.y.is_infinity:
            raise ValueError("exact boundary values need an integer group and y = infinity")
        a, c = self.reps[i][0, 0], self.reps[i][1, 0]
        if c == 0:
            return None
        if self.spec.dim == 1:
            return Fraction(int(round(a.real)), int(round(c.real)))
        return GaussQ(int(round(a.real)), int(round(a.imag))) / GaussQ(int(round(c.real)), int(round(c.imag)))

    def entry(self, i: int) -> OrbitEntry:
        return OrbitEntry(
            point=ModelPoint("ball", tuple(float(v) for v in self.points[i]), self.spec.dim),
            L=float(self.L[i]),
            word=self.word(i),
            rep=self.rep(i),
            base=int(self.base[i]),
        )

    def shell_index(self, k: float) -> np.ndarray:
        """``n`` with ``k^n < L <= k^(n+1)``; ``-1`` for ``L <= 1``."""
        L = self.L
        n = np.floor(np.log(np.maximum(L, 1.0)) / math.log(k)).astype(np.int64)
        n = np.where(np.power(float(k), n) >= L, n - 1, n)
        n = np.where(np.power(float(k), n + 1) < L, n + 1, n)
        return np.where(L <= 1.0, -1, n)

    def shells(self, k: float, n_max: Optional[int] = None) -> List[OrbitShell]:
        idx = self.shell_index(k)
        top = int(idx.max()) if len(idx) else -1
        if n_max is not None:
            top = min(top, n_max)
        out = []
        order = np.argsort(idx, kind="stable")
        sorted_idx = idx[order]
        for n in range(0, top + 1):
            lo, hi = np.searchsorted(sorted_idx, [n, n + 1])
            out.append(
                OrbitShell(k, n, np.sort(order[lo:hi]), self, truncated=float(k) ** (n + 1) > self.L_max)
            )
        return out

    def restrict(self, L_max: float) -> "Orbit":
        keep = self.L <= L_max
        return Orbit(
            spec=self.spec, mode=self.mode, y=self.y, L_max=L_max,
            points=self.points[keep], L=self.L[keep], reps=self.reps[keep],
            base=self.base[keep], half=self.half[keep], parent=self.parent, via=self.via,
            node=None if self.node is None else self.node[keep],
            coset=None if self.coset is None else self.coset[keep], route=self.route,
            truncated=self.truncated, words_explored=self.words_explored,
        )


def _finalise(spec, mode, y, L_max, reps, L, **kw) -> Orbit:
    bases = _base_points(spec, mode, y)
    pts = _images(reps, bases, spec.dim)
    halves = [apply_half_arrays(reps, np.full(len(reps), z), np.full(len(reps), t))[0] for z, t in bases]
    nb = len(bases)
    points = np.concatenate(pts) if nb > 1 else pts[0]
    half = np.concatenate(halves) if nb > 1 else halves[0]
    base = np.repeat(np.arange(nb, dtype=np.int8), len(reps))
    reps_all = np.concatenate([reps] * nb)
    L_all = np.concatenate([L] * nb)
    coset = np.concatenate([np.arange(len(reps))] * nb)
    node = kw.pop("node", None)
    if node is not None:
        node = np.concatenate([node] * nb)
    order = np.lexsort(tuple(points[:, j] for j in range(points.shape[1] - 1, -1, -1)) + (base, L_all))
    return Orbit(
        spec=spec, mode=mode, y=y, L_max=L_max, points=points[order], L=L_all[order],
        reps=reps_all[order], base=base[order], half=half[order],
        node=None if node is None else node[order], coset=coset[order], **kw,
    )


def _bfs_free(spec, mode, y, L_max, factor, word_cap):
    """Reduced-word search for free (ping-pong) groups: distinct words are distinct
    elements, so no deduplication is needed and the search is fully vectorised."""
    gens = np.stack([g.matrix for g in spec.generators])
    inv = np.array(spec.inverse_of)
    m_gen = len(gens)
    reducer = _make_reducer(spec, mode, y)
    banned_root = np.zeros(m_gen, bool)
    if mode == "hyperbolic":
        h = spec.hyperbolic_element.matrix
        for i, g in enumerate(gens):
            if np.allclose(g, h) or np.allclose(g, -h) or np.allclose(g @ h, np.eye(2)) or np.allclose(g @ h, -np.eye(2)):
                banned_root[i] = True
    bound = factor * L_max
    reps = [np.eye(2, dtype=np.complex128)[None]]
    Ls = [np.ones(1)]
    parents = [np.full(1, -1, np.int64)]
    vias = [np.full(1, -1, np.int64)]
    frontier_ids = np.zeros(1, np.int64)
    frontier = reps[0]
    last = np.full(1, -1, np.int64)
    size = 1
    words = 1
    truncated = False
    while len(frontier_ids):
        cand = np.einsum("gij,fjk->fgik", gens, frontier).reshape(-1, 2, 2)
        par = np.repeat(frontier_ids, m_gen)
        prev = np.repeat(last, m_gen)
        gi = np.tile(np.arange(m_gen), len(frontier_ids))
        ok = np.where(prev >= 0, gi != inv[np.maximum(prev, 0)], ~banned_root[gi])
        words += int(ok.sum())
        if words > word_cap:
            truncated = True
            warnings.warn(
                f"orbit search hit the word cap ({word_cap}); results are truncated",
                OrbitTruncated, stacklevel=3,
            )
            break
        cand, par, gi = cand[ok], par[ok], gi[ok]
        cand = reducer(cand)
        Lc = batch_L(cand)
        ok = Lc <= bound
        cand, par, gi, Lc = cand[ok], par[ok], gi[ok], Lc[ok]
        ids = np.arange(size, size + len(cand))
        size += len(cand)
        reps.append(cand)
        Ls.append(Lc)
        parents.append(par)
        vias.append(gi)
        frontier_ids, frontier, last = ids, cand, gi
    reps = np.concatenate(reps)
    L = np.concatenate(Ls)
    parent = np.concatenate(parents)
    via = np.concatenate(vias)
    node = np.nonzero(L <= L_max)[0]
    return reps[node], L[node], parent, via, node, truncated, words


def _bfs(spec, mode, y, L_max, factor, word_cap):
    if spec.free and mode in ("interior", "hyperbolic"):
        return _bfs_free(spec, mode, y, L_max, factor, word_cap)
    gens = np.stack([g.matrix for g in spec.generators])
    m_gen = len(gens)
    reducer = _make_reducer(spec, mode, y)
    keyer = _make_keyer(spec, mode, y)
    cap = 1024
    reps = np.zeros((cap, 2, 2), np.complex128)
    reps[0] = np.eye(2)
    L = np.zeros(cap)
    L[0] = 1.0
    parent = np.full(cap, -1, np.int64)
    via = np.full(cap, -1, np.int64)
    size = 1
    index = {keyer(reps[:1])[0]: 0}
    frontier = np.array([0])
    words = 1
    truncated = False
    bound = factor * L_max
    while frontier.size:
        cand = np.einsum("gij,fjk->fgik", gens, reps[frontier]).reshape(-1, 2, 2)
        par = np.repeat(frontier, m_gen)
        gi = np.tile(np.arange(m_gen), frontier.size)
        words += len(cand)
        if words > word_cap:
            truncated = True
            warnings.warn(
                f"orbit search hit the word cap ({word_cap}); results are truncated",
                OrbitTruncated, stacklevel=3,
            )
            break
        cand = reducer(cand)
        Lc = batch_L(cand)
        if spec.ring is not None:
            cand = np.rint(cand.real) + 1j * np.rint(cand.imag)
            Lc = np.rint(4.0 * Lc) / 4.0
        ok = Lc <= bound
        cand, par, gi, Lc = cand[ok], par[ok], gi[ok], Lc[ok]
        keys = keyer(cand)
        order = np.lexsort((gi, par, Lc))
        new = []
        for j in order.tolist():
            idx = index.get(keys[j])
            if idx is None:
                if size == cap:
                    cap *= 2
                    reps = np.resize(reps, (cap, 2, 2))
                    L = np.resize(L, cap)
                    parent = np.resize(parent, cap)
                    via = np.resize(via, cap)
                idx = size
                size += 1
                index[keys[j]] = idx
            elif not Lc[j] < L[idx] * (1 - 1e-12):
                continue
            reps[idx] = cand[j]
            L[idx] = Lc[j]
            parent[idx] = par[j]
            via[idx] = gi[j]
            new.append(idx)
        frontier = np.unique(np.array(new, dtype=np.int64))
    reps, L, parent, via = reps[:size], L[:size], parent[:size], via[:size]
    node = np.arange(size)
    if spec.ring is None:
        node = _merge_close(spec, mode, y, reps, L, node)
    keep = L[node] <= L_max
    node = node[keep]
    return reps[node], L[node], parent, via, node, truncated, words


def _merge_close(spec, mode, y, reps, L, node):
    """Collapse float-keyed nodes closer than ``MERGE_TOL``, keeping min L."""
    pts = np.concatenate(_images(reps, _base_points(spec, mode, y), spec.dim), axis=1)
    pairs = cKDTree(pts).query_pairs(MERGE_TOL, output_type="ndarray")
    if len(pairs) == 0:
        return node
    drop = np.zeros(len(node), bool)
    for i, j in pairs.tolist():
        worse = j if (L[j], j) > (L[i], i) else i
        drop[worse] = True
    return node[~drop]


def _resolve_mode(spec: GroupSpec, y):
    if isinstance(y, str) and y == "interior":
        return "interior", None
    if y is None:
        y = 0
    if isinstance(y, int):
        pts = spec.distinguished
        if not 0 <= y < len(pts):
            raise ValueError(f"y index {y} out of range for {spec.name}")
        if spec.parabolic:
            return "parabolic", pts[y]
        return "hyperbolic", None
    if isinstance(y, ModelPoint):
        for i, p in enumerate(spec.distinguished):
            if p.is_infinity == y.is_infinity and (
                y.is_infinity or np.allclose(to_ball(p).array(), to_ball(y).array(), atol=1e-10)
            ):
                return _resolve_mode(spec, i)
    raise ValueError(f"{y!r} is not a distinguished point of {spec.name}")


def enumerate_orbit(
    spec: GroupSpec,
    y=0,
    L_max: float = 1e3,
    route: str = "auto",
    factor: float = DEFAULT_FACTOR,
    word_cap: int = DEFAULT_WORD_CAP,
) -> Orbit:
    """Orbit of ``y`` with minimal-L coset representatives and ``L <= L_max``.

    ``y`` is an index into ``spec.distinguished`` (or the point itself), or
    ``"interior"`` for the orbit of the base point 0 of the ball.
    """
    if L_max < 1:
        raise ValueError("L_max must be at least 1")
    mode, yp = _resolve_mode(spec, y)
    direct_ok = spec.standard is not None and (mode == "interior" or (yp is not None and yp.is_infinity))
    if route == "auto":
        route = "direct" if direct_ok else "bfs"
    if route == "direct":
        if not direct_ok:
            raise ValueError("direct enumeration needs the standard modular or Picard generators")
        if mode == "interior":
            ints = _direct_interior_Z(L_max) if spec.dim == 1 else _direct_interior_Zi(L_max)
        else:
            ints = _direct_cusp_Z(L_max) if spec.dim == 1 else _direct_cusp_Zi(L_max)
        reps = ints.astype(np.complex128).reshape(-1, 2, 2)
        L = (ints.real ** 2 + ints.imag ** 2).sum(axis=1).astype(float)
        L = (L + 2.0) / 4.0
        return _finalise(spec, mode, yp, L_max, reps, L, route="direct")
    if route != "bfs":
        raise ValueError(f"unknown route {route!r}")
    reps, L, parent, via, node, truncated, words = _bfs(spec, mode, yp, L_max, factor, word_cap)
    return _finalise(
        spec, mode, yp, L_max, reps, L, parent=parent, via=via, node=node, route="bfs",
        truncated=truncated, words_explored=words,
    )


def shell_counts(orbit: Orbit, k: float, n_max: int) -> list:
    return [len(s) for s in orbit.shells(k, n_max)]


# ---------------------------------------------------------------------------
# exponent of convergence

@dataclass(frozen=True)
class DeltaEstimate:
    slope: float
    poincare: float
    gap: float
    ci: tuple
    bootstrap_mean: float
    n_points: int
    R_max: float
    seed: int

    @property
    def value(self) -> float:
        return 0.5 * (self.slope + self.poincare)


def rho_from_L(L):
    """``rho(0, g(0)) = arccosh(2 L - 1)``."""
    return np.arccosh(np.maximum(2.0 * np.asarray(L, dtype=float) - 1.0, 1.0))


def _slope(x, y):
    return float(np.polyfit(x, y, 1)[0])


def estimate_delta(
    spec: GroupSpec,
    R_max: float,
    seed: int = 0,
    n_boot: int = 200,
    step: float = 0.05,
    route: str = "auto",
    word_cap: int = DEFAULT_WORD_CAP,
) -> DeltaEstimate:
    """Two estimates of the critical exponent from the orbit of 0 out to ``R_max``.

    (a) slope of ``log #{rho <= R}`` over ``R`` in the last half of the range;
    (b) the ``s`` at which unit-width shell sums of ``exp(-s rho)`` stop growing
    (bisection on the fitted growth rate).
    """
    L_cap = (math.cosh(R_max) + 1.0) / 2.0
    orbit = enumerate_orbit(spec, "interior", L_cap, route=route, word_cap=word_cap)
    return delta_from_distances(rho_from_L(orbit.L), R_max, seed=seed, n_boot=n_boot, step=step)


def delta_from_distances(rho, R_max, seed=0, n_boot=200, step=0.05) -> DeltaEstimate:
    rho = np.sort(np.asarray(rho, dtype=float))
    rho = rho[rho <= R_max]
    if len(rho) < 1000:
        raise InsufficientOrbit(
            f"only {len(rho)} orbit points within R_max={R_max}; need at least 1000"
        )
    R0 = R_max / 2.0
    grid = np.arange(R0, R_max + 1e-12, step)
    logN = np.log(np.searchsorted(rho, grid, side="right"))
    slope = _slope(grid, logN)

    edges = np.arange(math.floor(R0), math.floor(R_max) + 1.0)
    if len(edges) < 3:
        edges = np.linspace(R0, R_max, 4)
    bins = np.digitize(rho, edges) - 1
    inside = (bins >= 0) & (bins < len(edges) - 1)
    rb, bb = rho[inside], bins[inside]
    mids = edges[:-1]

    def growth(s):
        sums = np.bincount(bb, weights=np.exp(-s * (rb - mids[bb])), minlength=len(mids))
        return _slope(mids, np.log(sums) - s * mids)

    lo, hi = 0.0, 4.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if growth(mid) > 0:
            lo = mid
        else:
            hi = mid
    poincare = 0.5 * (lo + hi)

    rng = np.random.default_rng(seed)
    boots = np.empty(n_boot)
    for b in range(n_boot):
        pick = rng.integers(0, len(grid), len(grid))
        if np.ptp(grid[pick]) == 0:
            pick[0], pick[-1] = 0, len(grid) - 1
        boots[b] = _slope(grid[pick], logN[pick])
    ci = (float(np.quantile(boots, 0.025)), float(np.quantile(boots, 0.975)))
    return DeltaEstimate(
        slope=slope, poincare=poincare, gap=abs(slope - poincare), ci=ci,
        bootstrap_mean=float(boots.mean()), n_points=int(len(rho)), R_max=float(R_max), seed=int(seed),
    )
