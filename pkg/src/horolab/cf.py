"""Continued fractions: digit streams, convergents and approximation constants."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Iterator, List, Sequence, Tuple

import gmpy2
import mpmath
import numpy as np


def digits_of_fraction(x: Fraction, n_max: int | None = None) -> List[int]:
    """Partial quotients of a rational number (the full, finite expansion by default)."""
    x = Fraction(x)
    p, q = x.numerator, x.denominator
    out = []
    while q and (n_max is None or len(out) < n_max):
        a, r = divmod(p, q)
        out.append(a)
        p, q = q, r
    return out


def digits_of_quadratic(P: int, D: int, Q: int, n: int) -> List[int]:
    """First ``n`` partial quotients of ``(P + sqrt(D)) / Q`` (exact integer recursion).

    Requires ``D`` not a perfect square and ``Q | D - P^2``; the inputs are
    rescaled to meet the divisibility condition when necessary.
    """
    if math.isqrt(D) ** 2 == D:
        raise ValueError("D must not be a perfect square")
    if (D - P * P) % Q:
        P, D, Q = P * abs(Q), D * Q * Q, Q * abs(Q)
    s = math.isqrt(D)
    out = []
    for _ in range(n):
        # s < sqrt(D) < s + 1 pins the floor down exactly for either sign of Q
        a = (P + s) // Q if Q > 0 else (P + s + 1) // Q
        out.append(a)
        P = a * Q - P
        Q = (D - P * P) // Q
    return out


def golden_digits(n: int) -> List[int]:
    return [1] * n


def digits_of_mpf(x, n: int, dps: int = 0) -> List[int]:
    """Partial quotients of a real given as an mpmath number (precision permitting)."""
    with mpmath.workdps(dps or mpmath.mp.dps):
        out = []
        y = mpmath.mpf(x)
        for _ in range(n):
            a = int(mpmath.floor(y))
            out.append(a)
            frac = y - a
            if frac < mpmath.mpf(10) ** (-(mpmath.mp.dps - 5)):
                break
            y = 1 / frac
    return out


def random_digits(rng: np.random.Generator, n: int) -> List[int]:
    """First ``n`` partial quotients of a uniform random number in (0, 1).

    The number is drawn as a random ``B``-bit dyadic rational with
    ``B = 4 n + 64``; its first ``n`` partial quotients agree with those of any
    real in the same dyadic cell because ``q_n^2`` stays far below ``2^B``.
    """
    bits = 4 * n + 64
    words = rng.integers(0, 2**32, size=(bits + 31) // 32, dtype=np.uint64)
    m = 0
    for w in words.tolist():
        m = (m << 32) | int(w)
    m >>= 32 * len(words) - bits
    m |= 1  # odd numerator: the fraction is already reduced
    p, q = gmpy2.mpz(m), gmpy2.mpz(1) << bits
    out = [0]
    p, q = q, p  # x = p/q < 1, so the first quotient is 0; invert
    while q and len(out) < n + 1:
        a, r = gmpy2.f_divmod(p, q)
        out.append(int(a))
        p, q = q, r
    if len(out) < n + 1:
        raise ValueError("precision exhausted before n partial quotients")
    return out


def convergents(digits: Sequence[int]) -> Iterator[Tuple[int, int]]:
    """Convergents ``p_n / q_n`` of ``[a_0; a_1, ...]``."""
    p0, q0, p1, q1 = 1, 0, digits[0], 1
    yield p1, q1
    for a in digits[1:]:
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        yield p1, q1


def value(digits: Sequence[int]) -> Fraction:
    p, q = 0, 1
    for p, q in convergents(digits):
        pass
    return Fraction(p, q)


def normalized_errors(digits: Sequence[int]) -> List[Tuple[int, float]]:
    """``(q_n, q_n^2 |x - p_n / q_n|)`` for all convergents with a known tail.

    Uses ``q_n^2 |x - p_n/q_n| = 1 / (x_{n+1} + q_{n-1} / q_n)`` where
    ``x_{n+1} = [a_{n+1}; a_{n+2}, ...]`` is evaluated from the finite digit
    stream by backward recursion.
    """
    n = len(digits)
    tails = [0.0] * (n + 1)
    t = math.inf
    for j in range(n - 1, 0, -1):
        t = digits[j] + (0.0 if math.isinf(t) else 1.0 / t)
        tails[j] = t
    out = []
    q_prev, q = 0, 1
    for j in range(0, n - 1):
        if j > 0:
            q_prev, q = q, digits[j] * q + q_prev
        out.append((q, 1.0 / (tails[j + 1] + q_prev / q)))
    return out


def liminf_from_digits(digits: Sequence[int], q_min: int = 1000, q_max: int | None = None) -> float:
    """Tail-window minimum of ``q^2 |x - p/q|`` over convergents with ``q_min <= q <= q_max``.

    Convergents realise the liminf (best approximations), so the window minimum
    estimates it once ``q_min`` is past any exceptional early convergents.
    The digit stream is finite, so the last few convergents see a truncated
    tail; pick ``q_max`` well inside the stream.
    """
    vals = [v for q, v in normalized_errors(digits) if q >= q_min and (q_max is None or q <= q_max)]
    if not vals:
        raise ValueError("no convergents in the requested window")
    return min(vals)


def brute_force_q2(x, q_max: int, q_min: int = 1, threshold: float = 1.0, dps: int = 60):
    """Independent oracle: ``(q, p, q^2 |x - p/q|)`` for every ``q <= q_max`` below ``threshold``.

    A float64 pass over all ``q`` shortlists candidates with a generous margin;
    each candidate is then recomputed with ``dps`` digits.
    """
    with mpmath.workdps(dps):
        X = mpmath.mpf(x)
        xf = float(X)
        q = np.arange(q_min, q_max + 1, dtype=np.float64)
        qx = q * xf
        p = np.rint(qx)
        approx = q * np.abs(qx - p)
        margin = q * q * 4e-16 * max(1.0, abs(xf)) + 1e-9
        cand = np.nonzero(approx <= threshold + margin)[0]
        out = []
        for i in cand.tolist():
            qi = int(q[i])
            for pi in (int(p[i]) - 1, int(p[i]), int(p[i]) + 1):
                v = qi * qi * abs(X - mpmath.mpf(pi) / qi)
                if v < threshold:
                    out.append((qi, pi, float(v)))
        return out


def liouville_fraction(terms: int = 5) -> Fraction:
    """``sum_{n=1}^{terms} 10^(-n!)`` exactly."""
    return sum((Fraction(1, 10 ** math.factorial(n)) for n in range(1, terms + 1)), Fraction(0))


def bad_constant_from_digits(digits: Sequence[int], q_max: int) -> float:
    """``min q^2 |x - p/q|`` over convergents with ``q <= q_max`` (nonincreasing in ``q_max``)."""
    vals = [v for q, v in normalized_errors(digits) if q <= q_max]
    return min(vals) if vals else math.inf
