"""Group presentations, the built-in catalog and JSON loading."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .hypcore import (
    GaussQ,
    ModelPoint,
    MoebiusMap,
    apply,
    apply_half_arrays,
    boundary_ball_coords,
    classify,
    parse_scalar,
    to_ball,
)

SCHEMA = "horolab.group/1"
CATALOG_NAMES = ("modular", "picard", "schottky2")


@dataclass(frozen=True)
class ParabolicPoint:
    point: ModelPoint
    rank: int


@dataclass(frozen=True)
class GroupSpec:
    """A finitely generated Kleinian group with its distinguished boundary points.

    ``generators`` is closed under inverses (maps are identified up to sign).
    Exactly one of ``parabolic`` (non-empty) or ``hyperbolic`` is used as the
    distinguished set Y.
    """

    name: str
    dim: int
    generators: tuple
    kind: str
    parabolic: tuple = ()
    hyperbolic: Optional[tuple] = None
    hyperbolic_element: Optional[MoebiusMap] = None
    delta: Optional[float] = None
    inverse_of: tuple = field(default=(), repr=False)
    standard: Optional[str] = None
    free: bool = False

    @property
    def ring(self) -> Optional[str]:
        """``"Z"`` or ``"Z[i]"`` when every generator has integral entries."""
        for g in self.generators:
            if g.exact is None:
                return None
            for v in g.exact:
                if isinstance(v, GaussQ):
                    if v.re.denominator != 1 or v.im.denominator != 1:
                        return None
                elif v.denominator != 1:
                    return None
        return "Z" if self.dim == 1 else "Z[i]"

    @property
    def distinguished(self) -> tuple:
        if self.parabolic:
            return tuple(p.point for p in self.parabolic)
        return tuple(self.hyperbolic)

    def exponent(self, index: int = 0, delta: Optional[float] = None) -> "ExponentInfo":
        """``w(y) = 2 delta - rank`` for parabolic y, ``w(y) = delta`` for hyperbolic y."""
        dl = self.delta if delta is None else delta
        if dl is None:
            raise ValueError(f"{self.name}: delta unknown, estimate it first")
        if self.parabolic:
            rank = self.parabolic[index].rank
            return ExponentInfo(2 * dl - rank, "parabolic")
        return ExponentInfo(dl, "hyperbolic")


@dataclass(frozen=True)
class ExponentInfo:
    w: float
    source: str

    def __post_init__(self):
        if not self.w > 0:
            raise ValueError("exponent w must be positive")
        if self.source not in ("parabolic", "hyperbolic"):
            raise ValueError("source must be parabolic or hyperbolic")


# ---------------------------------------------------------------------------
# construction helpers

def _close_under_inverses(gens: Sequence[MoebiusMap]):
    out = list(gens)
    keys = [g.key for g in out]
    for g in list(gens):
        inv = g.inverse()
        if inv.key not in keys:
            out.append(inv)
            keys.append(inv.key)
    inverse_of = []
    for g in out:
        k = g.inverse().key
        if k in keys:
            inverse_of.append(keys.index(k))
        else:
            # float maps: match numerically up to sign
            m = g.inverse().matrix
            j = next(
                i
                for i, h in enumerate(out)
                if np.allclose(h.matrix, m, atol=1e-9) or np.allclose(h.matrix, -m, atol=1e-9)
            )
            inverse_of.append(j)
    return tuple(out), tuple(inverse_of)


def short_words(spec_gens: Sequence[MoebiusMap], max_len: int):
    """All distinct elements (up to sign) of word length ``<= max_len``; yields ``(word, map)``."""
    seen = {MoebiusMap.identity(spec_gens[0].dim).key}
    level = [((), MoebiusMap.identity(spec_gens[0].dim))]
    for _ in range(max_len):
        nxt = []
        for w, g in level:
            for i, s in enumerate(spec_gens):
                h = s @ g
                k = h.key
                if k in seen:
                    continue
                seen.add(k)
                nxt.append(((i,) + w, h))
                yield (i,) + w, h
        level = nxt


def _chordal_pts(a: ModelPoint, b: ModelPoint) -> float:
    return float(np.linalg.norm(to_ball(a).array() - to_ball(b).array()))


def _check_nonelementary(gens, max_len=5) -> None:
    hyps = []
    for _, g in short_words(gens, max_len):
        c = classify(g)
        if c.kind in ("hyperbolic", "loxodromic"):
            fps = c.fixed_points
            for f in hyps:
                if all(_chordal_pts(p, q) > 1e-6 for p in fps for q in f):
                    return
            hyps.append(fps)
    raise ValueError("could not certify a non-elementary group from short words")


def _translation_of(g: MoebiusMap, p: ModelPoint) -> Optional[complex]:
    """Translation vector of parabolic ``g`` fixing ``p`` after conjugating ``p`` to infinity."""
    if p.is_infinity:
        m = g.matrix
    else:
        y = p.boundary_value()
        conj = np.array([[0, -1], [1, -y]], dtype=np.complex128)
        m = conj @ g.matrix @ np.linalg.inv(conj)
    if abs(m[1, 0]) > 1e-9:
        return None
    return complex(m[0, 1] / m[1, 1])


def _verify_parabolic(gens, pp: ParabolicPoint, max_len=4) -> None:
    trans = []
    for _, g in short_words(gens, max_len):
        c = classify(g)
        if c.kind != "parabolic":
            continue
        f = c.fixed_points[0]
        if _chordal_pts(f, pp.point) > 1e-9:
            continue
        t = _translation_of(g, pp.point)
        if t is not None and abs(t) > 1e-12:
            trans.append(t)
    if not trans:
        raise ValueError(f"no short parabolic word fixes {pp.point}")
    vecs = np.array([[t.real, t.imag] for t in trans])
    rank = int(np.linalg.matrix_rank(vecs, tol=1e-9))
    if rank != pp.rank:
        raise ValueError(f"declared rank {pp.rank} but short words exhibit rank {rank}")


_MODULAR = [[[1, 1], [0, 1]], [[0, -1], [1, 0]]]
_PICARD = [[[1, 1], [0, 1]], [[1, "i"], [0, 1]], [[0, -1], [1, 0]]]


def _standard_name(gens) -> Optional[str]:
    keys = {g.key for g in gens}
    for name, raw, dim in (("modular", _MODULAR, 1), ("picard", _PICARD, 2)):
        ref, _ = _close_under_inverses([MoebiusMap(m, dim=dim) for m in raw])
        if dim == gens[0].dim and keys == {g.key for g in ref}:
            return name
    return None


def make_spec(
    name: str,
    generators: Sequence[MoebiusMap],
    kind: str,
    parabolic: Sequence[ParabolicPoint] = (),
    hyperbolic_element: Optional[MoebiusMap] = None,
    delta: Optional[float] = None,
    validate: bool = True,
    free: bool = False,
) -> GroupSpec:
    gens = list(generators)
    dim = gens[0].dim
    if any(g.dim != dim for g in gens):
        raise ValueError("generators disagree on dimension")
    if kind not in ("first", "second"):
        raise ValueError("kind must be 'first' or 'second'")
    if kind == "first" and delta is not None and delta != dim:
        raise ValueError("a first-kind group has delta = d")
    if not parabolic and hyperbolic_element is None:
        raise ValueError("need parabolic points or a hyperbolic element")
    closed, inverse_of = _close_under_inverses(gens)
    hyperbolic = None
    if not parabolic:
        c = classify(hyperbolic_element)
        if c.kind not in ("hyperbolic", "loxodromic"):
            raise ValueError("distinguished element is not hyperbolic")
        hyperbolic = tuple(c.fixed_points)
    if validate:
        _check_nonelementary(closed)
        for pp in parabolic:
            _verify_parabolic(closed, pp)
    return GroupSpec(
        name=name,
        dim=dim,
        generators=closed,
        kind=kind,
        parabolic=tuple(parabolic),
        hyperbolic=hyperbolic,
        hyperbolic_element=hyperbolic_element,
        delta=delta,
        inverse_of=inverse_of,
        standard=_standard_name(closed),
        free=free,
    )


def isometric_circles(gens: Sequence[MoebiusMap]):
    """``(centre, radius)`` of ``|cz + d| = 1`` for each generator with ``c != 0``."""
    out = []
    for g in gens:
        (a, b), (c, d) = g.matrix
        if abs(c) < 1e-14:
            continue
        out.append((complex(-d / c), 1.0 / abs(c)))
    return out


def check_ping_pong(gens: Sequence[MoebiusMap], margin: float = 1e-9) -> float:
    """Minimum gap between the generators' isometric circles; raises if any two meet."""
    circles = isometric_circles(gens)
    gap = math.inf
    for i in range(len(circles)):
        for j in range(i + 1, len(circles)):
            (c1, r1), (c2, r2) = circles[i], circles[j]
            gap = min(gap, abs(c1 - c2) - r1 - r2)
    if not gap > margin:
        raise ValueError(f"isometric circles are not pairwise disjoint (gap {gap})")
    return gap


def load_catalog(name: str, validate: bool = True) -> GroupSpec:
    """Built-in groups: ``modular``, ``picard`` and ``schottky2``."""
    if name == "modular":
        gens = [MoebiusMap(m) for m in _MODULAR]
        return make_spec(
            "modular", gens, "first", [ParabolicPoint(ModelPoint.infinity(1), 1)],
            delta=1, validate=validate,
        )
    if name == "picard":
        gens = [MoebiusMap(m, dim=2) for m in _PICARD]
        return make_spec(
            "picard", gens, "first", [ParabolicPoint(ModelPoint.infinity(2), 2)],
            delta=2, validate=validate,
        )
    if name == "schottky2":
        r2 = math.sqrt(2.0)
        g1 = MoebiusMap([[r2, 1.0], [1.0, r2]])
        t8 = MoebiusMap([[1.0, 8.0], [0.0, 1.0]])
        g2 = t8 @ g1 @ t8.inverse()
        check_ping_pong([g1, g1.inverse(), g2, g2.inverse()])
        return make_spec(
            "schottky2", [g1, g2], "second", hyperbolic_element=g1, validate=validate, free=True,
        )
    raise ValueError(f"unknown catalog group {name!r}; choose from {', '.join(CATALOG_NAMES)}")


def _parse_matrix(raw, dim):
    if isinstance(raw, list) and len(raw) == 4 and not isinstance(raw[0], list):
        raw = [raw[:2], raw[2:]]
    vals = [[v if isinstance(v, (int, float)) else parse_scalar(v) for v in row] for row in raw]
    return MoebiusMap(vals, dim=dim)


def _parse_point(raw, dim) -> ModelPoint:
    if raw in ("inf", "infinity", None):
        return ModelPoint.infinity(dim)
    if isinstance(raw, (int, float)):
        return ModelPoint.half(float(raw), 0.0, dim=dim)
    return ModelPoint.half(parse_scalar(raw), 0.0, dim=dim)


def load_catalog_file(path, validate: bool = True) -> GroupSpec:
    """Load a group from a JSON document (schema ``horolab.group/1``).

    Keys: ``name``, ``dim``, ``kind``, ``generators`` (2x2 nested lists of exact
    strings such as ``"3/2"`` or ``"1+2i"``, or plain numbers), then either
    ``parabolic`` (list of ``{"point": "inf" | "p/q", "rank": k}``) or
    ``hyperbolic`` (``{"generator": index}`` or ``{"matrix": ...}``), and
    optionally ``delta`` (number or ``"estimate"``).
    """
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("schema", SCHEMA) != SCHEMA:
        raise ValueError(f"unsupported schema {doc.get('schema')!r}")
    for key in ("name", "dim", "kind", "generators"):
        if key not in doc:
            raise ValueError(f"catalog file missing field {key!r}")
    dim = int(doc["dim"])
    gens = [_parse_matrix(m, dim) for m in doc["generators"]]
    delta = doc.get("delta", "estimate")
    delta = None if delta == "estimate" else float(delta)
    parabolic = [
        ParabolicPoint(_parse_point(p["point"], dim), int(p["rank"])) for p in doc.get("parabolic", [])
    ]
    hyp = None
    if not parabolic:
        h = doc.get("hyperbolic")
        if h is None:
            raise ValueError("catalog file needs 'parabolic' or 'hyperbolic'")
        hyp = gens[int(h["generator"])] if "generator" in h else _parse_matrix(h["matrix"], dim)
    free = bool(doc.get("ping_pong"))
    if free:
        # ping-pong on the isometric circles makes the generators free
        check_ping_pong(gens + [g.inverse() for g in gens])
    return make_spec(
        doc["name"], gens, doc["kind"], parabolic, hyperbolic_element=hyp, delta=delta,
        validate=validate, free=free,
    )


def resolve_group(name: Optional[str] = None, catalog: Optional[str] = None) -> GroupSpec:
    if catalog:
        return load_catalog_file(catalog)
    return load_catalog(name or "modular")
