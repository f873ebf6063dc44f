"""Hyperbolic space models and Moebius transformations for d in {1, 2}.

Points of the upper half-space are stored as ``(x, t)`` for d = 1 and
``(x1, x2, t)`` for d = 2, with ``t >= 0`` the height.  The boundary is
``t == 0`` plus a point at infinity.  The ball model is reached through the
Cayley-type map that sends the height-one point over the origin to the ball
origin, infinity to ``(1, 0, ...)`` and the boundary origin to ``(-1, 0, ...)``.

A ``MoebiusMap`` acts on the half-space through the Poincare extension of
``z -> (az + b) / (cz + d)``.  Entries are kept exactly (``Fraction`` for real
maps, :class:`GaussQ` for complex ones) whenever they are given exactly, with
a ``complex128`` mirror used for geometry.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence, Union

import numpy as np

BOUNDARY_TOL = 1e-12
DET_TOL = 1e-12
TINY = 1e-300


class GaussQ:
    """Exact Gaussian rational ``re + im*i`` with ``Fraction`` parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, v) -> "GaussQ":
        if isinstance(v, GaussQ):
            return v
        if isinstance(v, complex):
            return cls(Fraction(v.real), Fraction(v.imag))
        return cls(Fraction(v), 0)

    def __add__(self, o):
        o = GaussQ.coerce(o)
        return GaussQ(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-GaussQ.coerce(o))

    def __rsub__(self, o):
        return GaussQ.coerce(o) - self

    def __mul__(self, o):
        o = GaussQ.coerce(o)
        return GaussQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conj(self):
        return GaussQ(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __truediv__(self, o):
        o = GaussQ.coerce(o)
        n = o.abs2()
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        p = self * o.conj()
        return GaussQ(p.re / n, p.im / n)

    def __rtruediv__(self, o):
        return GaussQ.coerce(o) / self

    def __eq__(self, o):
        try:
            o = GaussQ.coerce(o)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self) -> bool:
        return self.im == 0

    def __repr__(self):
        if self.im == 0:
            return f"GaussQ({self.re})"
        return f"GaussQ({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


Scalar = Union[int, Fraction, GaussQ]

_COMPLEX_RE = re.compile(
    r"^\s*(?P<re>[+-]?\d+(?:/\d+)?)?\s*(?:(?P<sign>[+-])?\s*(?P<im>\d+(?:/\d+)?)?\s*i)?\s*$"
)


def parse_scalar(text) -> Scalar:
    """Parse exact scalars such as ``"3/2"``, ``"-1"``, ``"1+2i"``, ``"i"``, ``"-i/2"``."""
    if isinstance(text, (int, Fraction, GaussQ)):
        return text
    s = str(text).replace(" ", "")
    if "i" not in s:
        return Fraction(s)
    m = re.fullmatch(r"([+-]?)(\d+(?:/\d+)?)?i(?:/(\d+))?", s)
    if m:
        coef = Fraction(m.group(2) or 1)
        if m.group(3):
            coef /= int(m.group(3))
        return GaussQ(0, -coef if m.group(1) == "-" else coef)
    m = re.fullmatch(r"([+-]?\d+(?:/\d+)?)([+-])(\d+(?:/\d+)?)?i", s)
    if not m:
        raise ValueError(f"cannot parse exact scalar {text!r}")
    im = Fraction(m.group(3) or 1)
    return GaussQ(Fraction(m.group(1)), im if m.group(2) == "+" else -im)


def _is_exact(v) -> bool:
    return isinstance(v, (int, Fraction, GaussQ)) and not isinstance(v, bool)


def _real_part_exact(v):
    return v.re if isinstance(v, GaussQ) else Fraction(v)


def _exact_abs2(v) -> Fraction:
    if isinstance(v, GaussQ):
        return v.abs2()
    return Fraction(v) * Fraction(v)


class MoebiusMap:
    """Element of SL(2, R) (d = 1) or SL(2, C) (d = 2), identified up to sign.

    Parameters
    ----------
    entries : nested 2x2 sequence
        Exact scalars (int, Fraction, GaussQ or parseable strings) give an exact
        map; floats or complex numbers give a floating-only map.
    dim : int, optional
        Boundary dimension d. Inferred as 1 when every entry is real.
    """

    def __init__(self, entries, dim: Optional[int] = None, check: bool = True):
        flat = [entries[0][0], entries[0][1], entries[1][0], entries[1][1]]
        flat = [parse_scalar(v) if isinstance(v, str) else v for v in flat]
        if all(_is_exact(v) for v in flat):
            if any(isinstance(v, GaussQ) and not v.is_real() for v in flat):
                flat = [GaussQ.coerce(v) for v in flat]
                inferred = 2
            else:
                flat = [_real_part_exact(v) if isinstance(v, GaussQ) else Fraction(v) for v in flat]
                inferred = 1
            self.exact = tuple(flat)
        else:
            self.exact = None
            cflat = [complex(v) for v in flat]
            inferred = 1 if all(abs(v.imag) == 0 for v in cflat) else 2
        self.dim = dim if dim is not None else inferred
        if self.dim not in (1, 2):
            raise ValueError("only d in {1, 2} is supported")
        if self.dim == 1 and inferred == 2:
            raise ValueError("complex entries require dim=2")
        self.matrix = np.array(
            [[complex(flat[0]), complex(flat[1])], [complex(flat[2]), complex(flat[3])]],
            dtype=np.complex128,
        )
        if check:
            if self.exact is not None:
                a, b, c, d = self.exact
                det = a * d - b * c
                if det != 1:
                    raise ValueError(f"determinant is {det}, expected exactly 1")
            else:
                det = np.linalg.det(self.matrix)
                if abs(det - 1) > DET_TOL * max(1.0, float(np.abs(self.matrix).max()) ** 2):
                    raise ValueError(f"determinant is {det}, expected 1")

    @classmethod
    def from_array(cls, m, dim: int) -> "MoebiusMap":
        m = np.asarray(m, dtype=np.complex128)
        out = cls.__new__(cls)
        out.exact = None
        out.dim = dim
        out.matrix = m.copy()
        return out

    @classmethod
    def identity(cls, dim: int = 1) -> "MoebiusMap":
        if dim == 1:
            return cls([[1, 0], [0, 1]])
        one, zero = GaussQ(1), GaussQ(0)
        return cls([[one, zero], [zero, one]], dim=2)

    def __matmul__(self, other: "MoebiusMap") -> "MoebiusMap":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        if self.exact is not None and other.exact is not None:
            a, b, c, d = self.exact
            e, f, g, h = other.exact
            return MoebiusMap(
                [[a * e + b * g, a * f + b * h], [c * e + d * g, c * f + d * h]],
                dim=self.dim,
                check=False,
            )
        return MoebiusMap.from_array(self.matrix @ other.matrix, self.dim)

    def inverse(self) -> "MoebiusMap":
        if self.exact is not None:
            a, b, c, d = self.exact
            return MoebiusMap([[d, -b], [-c, a]], dim=self.dim, check=False)
        (a, b), (c, d) = self.matrix
        return MoebiusMap.from_array(np.array([[d, -b], [-c, a]]), self.dim)

    @property
    def trace(self):
        if self.exact is not None:
            return self.exact[0] + self.exact[3]
        return self.matrix[0, 0] + self.matrix[1, 1]

    def canonical(self) -> "MoebiusMap":
        """Representative of ``{g, -g}`` whose first nonzero entry is positive
        (real part positive, or zero real part and positive imaginary part)."""
        if self.exact is not None:
            for v in self.exact:
                if v:
                    re_, im_ = (v.re, v.im) if isinstance(v, GaussQ) else (v, 0)
                    flip = re_ < 0 or (re_ == 0 and im_ < 0)
                    break
            if not flip:
                return self
            a, b, c, d = self.exact
            return MoebiusMap([[-a, -b], [-c, -d]], dim=self.dim, check=False)
        for v in self.matrix.ravel():
            if abs(v) > 0:
                flip = v.real < 0 or (v.real == 0 and v.imag < 0)
                break
        return MoebiusMap.from_array(-self.matrix if flip else self.matrix, self.dim)

    @property
    def key(self) -> tuple:
        """Hashable key identifying the map up to sign."""
        c = self.canonical()
        if c.exact is not None:
            return tuple(
                (v.re, v.im) if isinstance(v, GaussQ) else (v, Fraction(0)) for v in c.exact
            )
        return tuple(np.round(c.matrix.ravel().view(np.float64), 9))

    @cached_property
    def L(self):
        """Inverse conformal dilation at the ball origin, ``(|g|_F^2 + 2) / 4``.

        Exact (``Fraction``) for exact maps.
        """
        if self.exact is not None:
            return (sum(_exact_abs2(v) for v in self.exact) + 2) / 4
        return float((np.sum(np.abs(self.matrix) ** 2) + 2.0) / 4.0)

    def __eq__(self, other):
        return isinstance(other, MoebiusMap) and self.dim == other.dim and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        if self.exact is not None:
            a, b, c, d = (str(v) for v in self.exact)
            return f"MoebiusMap([[{a}, {b}], [{c}, {d}]], dim={self.dim})"
        return f"MoebiusMap({self.matrix.tolist()}, dim={self.dim})"


@dataclass(frozen=True)
class ModelPoint:
    """A point of the ball or the upper half-space model.

    ``coords`` is ``None`` for the half-space point at infinity.  ``exact`` may
    carry an exact boundary value (``Fraction`` or ``GaussQ``) of a half-space
    boundary point.
    """

    model: str
    coords: Optional[tuple]
    dim: int
    exact: Optional[object] = field(default=None, compare=False)

    def __post_init__(self):
        if self.model not in ("ball", "half"):
            raise ValueError("model must be 'ball' or 'half'")
        if self.coords is None:
            if self.model != "half":
                raise ValueError("only the half-space model has an infinity marker")
            return
        if len(self.coords) != self.dim + 1:
            raise ValueError(f"expected {self.dim + 1} coordinates")
        if self.model == "ball":
            r = math.sqrt(sum(c * c for c in self.coords))
            if r > 1 + BOUNDARY_TOL:
                raise ValueError("point lies outside the closed unit ball")
        elif self.coords[-1] < 0:
            raise ValueError("half-space height must be nonnegative")

    @property
    def is_infinity(self) -> bool:
        return self.coords is None

    @property
    def on_boundary(self) -> bool:
        if self.coords is None:
            return True
        if self.model == "half":
            return self.coords[-1] == 0
        return abs(math.sqrt(sum(c * c for c in self.coords)) - 1) <= BOUNDARY_TOL

    def array(self) -> np.ndarray:
        if self.coords is None:
            raise ValueError("infinity has no finite coordinates")
        return np.array(self.coords, dtype=float)

    @classmethod
    def ball(cls, coords) -> "ModelPoint":
        coords = tuple(float(c) for c in coords)
        return cls("ball", coords, len(coords) - 1)

    @classmethod
    def half(cls, z, t=0.0, dim: int = 1) -> "ModelPoint":
        """Half-space point over boundary value ``z`` at height ``t``.

        ``z`` may be exact; ``z=None`` or ``math.inf`` gives infinity.
        """
        if z is None or (isinstance(z, float) and math.isinf(z)):
            return cls("half", None, dim)
        exact = z if _is_exact(z) and t == 0 else None
        zc = complex(z)
        if dim == 1:
            if zc.imag != 0:
                raise ValueError("d = 1 boundary values are real")
            return cls("half", (zc.real, float(t)), 1, exact)
        return cls("half", (zc.real, zc.imag, float(t)), 2, exact)

    @classmethod
    def infinity(cls, dim: int = 1) -> "ModelPoint":
        return cls("half", None, dim)

    def boundary_value(self) -> complex:
        """Complex boundary coordinate ``z`` of a half-space point."""
        if self.model != "half":
            raise ValueError("not a half-space point")
        if self.coords is None:
            return complex(math.inf)
        if self.dim == 1:
            return complex(self.coords[0], 0.0)
        return complex(self.coords[0], self.coords[1])


# ---------------------------------------------------------------------------
# vectorised model conversions and actions

def half_to_ball(z, t, dim: int) -> np.ndarray:
    """Map half-space points ``(z, t)`` (arrays) to ball coordinates.

    ``z`` is complex (real for d = 1); infinite ``z`` is the point at infinity.
    Returns an array of shape ``z.shape + (dim + 1,)``.
    """
    z = np.asarray(z, dtype=np.complex128)
    t = np.asarray(t, dtype=float)
    z, t = np.broadcast_arrays(z, t)
    inf = ~np.isfinite(z)
    zs = np.where(inf, 0, z)
    r2 = np.abs(zs) ** 2 + t * t
    den = np.abs(zs) ** 2 + (t + 1.0) ** 2
    out = np.empty(z.shape + (dim + 1,))
    out[..., 0] = (r2 - 1.0) / den
    out[..., 1] = -2.0 * zs.real / den
    if dim == 2:
        out[..., 2] = -2.0 * zs.imag / den
    out[inf] = 0.0
    out[inf, 0] = 1.0
    return out


def ball_to_half(w) -> tuple:
    """Inverse of :func:`half_to_ball`. Returns ``(z, t)`` arrays; infinity is ``z = inf``."""
    w = np.asarray(w, dtype=float)
    dim = w.shape[-1] - 1
    y0 = w[..., 0]
    y1 = w[..., 1]
    y2 = w[..., 2] if dim == 2 else np.zeros_like(y0)
    n = y1 * y1 + y2 * y2 + (1.0 - y0) ** 2
    inf = n < 1e-300
    ns = np.where(inf, 1.0, n)
    x1 = -2.0 * y1 / ns
    x2 = -2.0 * y2 / ns
    t = 2.0 * (1.0 - y0) / ns - 1.0
    t = np.where(np.abs(t) < 1e-15, 0.0, np.maximum(t, 0.0))
    z = (x1 + 1j * x2).astype(np.complex128)
    z = np.where(inf, np.complex128(complex(np.inf, 0)), z)
    return z, np.where(inf, 0.0, t)


def apply_half_arrays(m, z, t):
    """Poincare extension of ``m`` (shape ``(2, 2)`` or ``(n, 2, 2)``) on ``(z, t)``."""
    m = np.asarray(m, dtype=np.complex128)
    a, b, c, d = m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1]
    z = np.asarray(z, dtype=np.complex128)
    t = np.asarray(t, dtype=float)
    inf = ~np.isfinite(z)
    zs = np.where(inf, 0, z)
    w = c * zs + d
    den = np.abs(w) ** 2 + np.abs(c) ** 2 * t * t
    num = (a * zs + b) * np.conj(w) + a * np.conj(c) * t * t
    degenerate = den < TINY
    safe = np.where(degenerate, 1.0, den)
    z_out = np.where(degenerate, np.complex128(complex(np.inf, 0)), num / safe)
    t_out = np.where(degenerate, 0.0, t / safe)
    # images of infinity
    c_nz = np.abs(c) > 0
    z_inf = np.where(c_nz, a / np.where(c_nz, c, 1), np.complex128(complex(np.inf, 0)))
    z_out = np.where(inf, z_inf, z_out)
    t_out = np.where(inf, 0.0, t_out)
    return z_out, t_out


def apply(g: MoebiusMap, x: ModelPoint) -> ModelPoint:
    """Image ``g(x)``, returned in the model of ``x``."""
    if g.dim != x.dim:
        raise ValueError(f"dimension mismatch: map has d={g.dim}, point has d={x.dim}")
    if x.model == "ball":
        return to_ball(apply(g, to_half_space(x)))
    if g.exact is not None and x.exact is not None or (g.exact is not None and x.is_infinity):
        ez = apply_exact_boundary(g, None if x.is_infinity else x.exact)
        if ez is None:
            return ModelPoint.infinity(x.dim)
        return ModelPoint.half(ez, 0.0, dim=x.dim)
    z = x.boundary_value()
    t = 0.0 if x.is_infinity else x.coords[-1]
    z2, t2 = apply_half_arrays(g.matrix, z, t)
    z2 = complex(z2)
    if not np.isfinite(z2):
        return ModelPoint.infinity(x.dim)
    if x.dim == 1:
        z2 = complex(z2.real, 0.0)
    return ModelPoint.half(z2, float(t2), dim=x.dim)


def apply_exact_boundary(g: MoebiusMap, z):
    """Exact image of a boundary value; ``None`` stands for infinity."""
    if g.exact is None:
        raise ValueError("map has no exact entries")
    a, b, c, d = g.exact
    if z is None:
        return None if not c else a / c
    den = c * z + d
    if not den:
        return None
    return (a * z + b) / den


def to_ball(x: ModelPoint) -> ModelPoint:
    if x.model == "ball":
        return x
    if x.is_infinity:
        coords = (1.0,) + (0.0,) * x.dim
        return ModelPoint("ball", coords, x.dim)
    w = half_to_ball(x.boundary_value(), x.coords[-1], x.dim)
    if x.coords[-1] == 0:
        w = w / np.linalg.norm(w)
    return ModelPoint("ball", tuple(float(v) for v in w), x.dim)


def to_half_space(x: ModelPoint) -> ModelPoint:
    if x.model == "half":
        return x
    z, t = ball_to_half(x.array())
    if not np.isfinite(z):
        return ModelPoint.infinity(x.dim)
    z = complex(z)
    if x.on_boundary:
        t = 0.0
    return ModelPoint.half(z if x.dim == 2 else z.real, float(t), dim=x.dim)


def boundary_ball_coords(z, dim: int) -> np.ndarray:
    """Ball coordinates of half-space boundary values (array of complex; inf allowed)."""
    return half_to_ball(z, np.zeros(np.shape(z)), dim)


# ---------------------------------------------------------------------------
# metric quantities

def _ball_array(x) -> np.ndarray:
    if isinstance(x, ModelPoint):
        return to_ball(x).array()
    return np.asarray(x, dtype=float)


def hyperbolic_distance(x, y) -> float:
    """Distance in the ball model with ``d rho = 2|dx| / (1 - |x|^2)``."""
    a = _ball_array(x)
    b = _ball_array(y)
    da = 1.0 - a @ a
    db = 1.0 - b @ b
    if da <= 0 or db <= 0:
        raise ValueError("hyperbolic distance needs interior points")
    return 2.0 * math.asinh(float(np.linalg.norm(a - b)) / math.sqrt(da * db))


def hyperbolic_distance_arrays(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    da = 1.0 - np.sum(a * a, axis=-1)
    db = 1.0 - np.sum(b * b, axis=-1)
    if np.any(da <= 0) or np.any(db <= 0):
        raise ValueError("hyperbolic distance needs interior points")
    return 2.0 * np.arcsinh(np.linalg.norm(a - b, axis=-1) / np.sqrt(da * db))


def origin_image(g: MoebiusMap) -> np.ndarray:
    """Ball coordinates of ``g(0)``."""
    z, t = apply_half_arrays(g.matrix, 0j, 1.0)
    return half_to_ball(z, t, g.dim)


def conformal_dilation(g: MoebiusMap):
    """``L_g = 1 / (1 - |g(0)|^2)``; exact for exact maps."""
    return g.L


def conformal_dilation_ball(g: MoebiusMap) -> float:
    """``L_g`` evaluated directly from ``g(0)`` in the ball (independent route)."""
    w = origin_image(g)
    return 1.0 / (1.0 - float(w @ w))


def batch_L(m) -> np.ndarray:
    """``L`` for a stack of matrices of shape ``(n, 2, 2)``."""
    m = np.asarray(m, dtype=np.complex128)
    return (np.sum(m.real ** 2 + m.imag ** 2, axis=(-2, -1)) + 2.0) / 4.0


def chordal(u, v) -> np.ndarray:
    """Euclidean distance between ball-coordinate points."""
    return np.linalg.norm(np.asarray(u, dtype=float) - np.asarray(v, dtype=float), axis=-1)


# ---------------------------------------------------------------------------
# classification

@dataclass(frozen=True)
class FixedPointClassification:
    kind: str
    fixed_points: tuple = ()


def classify(g: MoebiusMap) -> FixedPointClassification:
    """Classify ``g`` by its trace and return its boundary fixed points (half-space)."""
    dim = g.dim
    if g.exact is not None:
        a, b, c, d = g.exact
        if not b and not c and a == d and _exact_abs2(a) == 1 and (a * a) == 1:
            return FixedPointClassification("identity", ())
        tr = a + d
        tr2 = tr * tr
        real_tr2 = not isinstance(tr2, GaussQ) or tr2.is_real()
        tr2_re = tr2.re if isinstance(tr2, GaussQ) else tr2
        if real_tr2 and tr2_re == 4:
            kind = "parabolic"
            if not c:
                pts = (ModelPoint.infinity(dim),)
            else:
                pts = (ModelPoint.half((a - d) / (2 * c), 0.0, dim=dim),)
            return FixedPointClassification(kind, pts)
        if real_tr2 and 0 <= tr2_re < 4:
            kind = "elliptic"
        elif dim == 1:
            kind = "hyperbolic"
        else:
            kind = "hyperbolic" if real_tr2 and tr2_re > 4 else "loxodromic"
        if kind == "elliptic" and dim == 1:
            return FixedPointClassification(kind, ())
        if not c:
            if a == d:
                pts = (ModelPoint.infinity(dim),)
            else:
                pts = (ModelPoint.infinity(dim), ModelPoint.half(b / (d - a), 0.0, dim=dim))
            return FixedPointClassification(kind, pts)
    else:
        m = g.matrix
        if np.allclose(m, np.eye(2), atol=1e-14) or np.allclose(m, -np.eye(2), atol=1e-14):
            return FixedPointClassification("identity", ())
        tr = complex(m[0, 0] + m[1, 1])
        tr2 = tr * tr
        if abs(tr2.imag) < 1e-12 and abs(tr2.real - 4) < 1e-12:
            kind = "parabolic"
        elif abs(tr2.imag) < 1e-12 and 0 <= tr2.real < 4:
            kind = "elliptic"
        elif dim == 1 or abs(tr2.imag) < 1e-12:
            kind = "hyperbolic"
        else:
            kind = "loxodromic"
        if kind == "elliptic" and dim == 1:
            return FixedPointClassification(kind, ())
    a, b, c, d = (complex(v) for v in g.matrix.ravel())
    if abs(c) < 1e-300:
        if kind == "parabolic" or abs(a - d) < 1e-300:
            return FixedPointClassification(kind, (ModelPoint.infinity(dim),))
        roots = [None, b / (d - a)]
    else:
        disc = np.sqrt(complex((a + d) ** 2 - 4))
        roots = [(a - d + disc) / (2 * c), (a - d - disc) / (2 * c)]
        if kind == "parabolic":
            roots = [(a - d) / (2 * c)]
    pts = []
    for r in roots:
        if r is None:
            pts.append(ModelPoint.infinity(dim))
        else:
            pts.append(ModelPoint.half(r.real if dim == 1 else r, 0.0, dim=dim))
    return FixedPointClassification(kind, tuple(pts))
