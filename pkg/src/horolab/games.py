"""Schmidt and absolute games on the real line, played in exact rational arithmetic.

Balls are closed intervals ``[c - r, c + r]`` with rational centre and radius.
Orbit points of the modular group are the rationals ``p/q`` with dilation
``L = q^2`` (the half-plane chart), which gives the exact separation constant
``c1 = 1`` since ``|p/q - p'/q'| >= 1 / (q q')``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .parallel import pmap

log = logging.getLogger(__name__)

F = Fraction
RAND_BITS = 30


class IllegalMove(ValueError):
    def __init__(self, actor: str, turn: int, reason: str):
        super().__init__(f"{actor} forfeits at turn {turn}: {reason}")
        self.actor = actor
        self.turn = turn


class NoLegalMove(RuntimeError):
    pass


class UniquenessViolation(AssertionError):
    def __init__(self, turn_ball, pair):
        super().__init__(f"two shell targets {pair[0]} and {pair[1]} meet ball {turn_ball}")
        self.pair = pair


# ---------------------------------------------------------------------------
# playing sets

class PlayingSet:
    """Oracle for a compact set ``K`` of the line: membership and snapping."""

    delta: float = 1.0

    def contains(self, x: Fraction) -> bool:
        raise NotImplementedError

    def ceil(self, t: Fraction) -> Optional[Fraction]:
        """Smallest point of ``K`` that is ``>= t`` (``None`` if there is none)."""
        raise NotImplementedError

    def floor(self, t: Fraction) -> Optional[Fraction]:
        raise NotImplementedError

    def pack(self, lo: Fraction, hi: Fraction, r: Fraction, gap: Fraction) -> List[Fraction]:
        """Greedy left-to-right centres in ``K ∩ [lo + r, hi - r]`` with ball gaps ``>= gap``."""
        out = []
        c = self.ceil(lo + r)
        while c is not None and c <= hi - r:
            out.append(c)
            c = self.ceil(c + 2 * r + gap)
        return out


@dataclass(frozen=True)
class Interval(PlayingSet):
    a: Fraction = F(0)
    b: Fraction = F(1)
    delta: float = 1.0

    def contains(self, x):
        return self.a <= x <= self.b

    def ceil(self, t):
        if t > self.b:
            return None
        return max(F(t), self.a)

    def floor(self, t):
        if t < self.a:
            return None
        return min(F(t), self.b)


@dataclass(frozen=True)
class CantorSet(PlayingSet):
    """Middle-thirds Cantor set in ``[0, 1]``; snapping resolves ``digits`` ternary places."""

    digits: int = 200
    delta: float = math.log(2) / math.log(3)

    def _walk(self, t: Fraction, up: bool, digits: Optional[int] = None) -> Fraction:
        off, scale = F(0), F(1)
        for _ in range(digits or self.digits):
            u = (t - off) / scale
            if u <= 0:
                return off
            if u >= 1:
                return off + scale
            third = scale / 3
            if u < F(1, 3):
                scale = third
            elif u > F(2, 3):
                off, scale = off + 2 * third, third
            elif u == F(1, 3) or u == F(2, 3):
                return off + u * scale
            else:
                return off + (2 * third if up else third)
        return off + scale if up else off

    def contains(self, x):
        u = F(x)
        if not 0 <= u <= 1:
            return False
        # a rational has an eventually periodic ternary expansion: follow u -> 3u mod the
        # chosen third until it hits an endpoint, the open middle third, or repeats.
        # Snapped points are stage-``digits`` endpoints, which resolve within digits + 2 steps.
        seen = set()
        for _ in range(self.digits + 2):
            if u in (0, 1, F(1, 3), F(2, 3)):
                return True
            if F(1, 3) < u < F(2, 3):
                return False
            if u in seen:
                return True
            seen.add(u)
            u = 3 * u if u < F(1, 3) else 3 * u - 2
        return False

    def ceil(self, t):
        if t > 1:
            return None
        return self._walk(F(t), True)

    def floor(self, t):
        if t < 0:
            return None
        return self._walk(F(t), False)


# ---------------------------------------------------------------------------
# balls, configuration, transcripts

@dataclass(frozen=True)
class GameBall:
    center: Fraction
    radius: Fraction

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")

    @property
    def lo(self):
        return self.center - self.radius

    @property
    def hi(self):
        return self.center + self.radius

    def contains_ball(self, other: "GameBall") -> bool:
        return abs(other.center - self.center) + other.radius <= self.radius

    def disjoint(self, other: "GameBall") -> bool:
        return abs(other.center - self.center) > self.radius + other.radius

    def as_json(self) -> dict:
        return {"center": float(self.center), "radius": float(self.radius),
                "center_exact": str(self.center), "radius_exact": str(self.radius)}


@dataclass(frozen=True)
class GameConfig:
    variant: str  # "schmidt" or "absolute"
    beta: Fraction
    alpha: Optional[Fraction] = None
    depth: int = 30

    def __post_init__(self):
        object.__setattr__(self, "beta", F(self.beta))
        if self.alpha is not None:
            object.__setattr__(self, "alpha", F(self.alpha))
        if self.variant not in ("schmidt", "absolute"):
            raise ValueError("variant must be schmidt or absolute")
        if not 0 < self.beta < 1:
            raise ValueError("beta must lie in (0, 1)")
        if self.variant == "schmidt" and (self.alpha is None or not 0 < self.alpha < 1):
            raise ValueError("the Schmidt game needs alpha in (0, 1)")
        if self.variant == "absolute" and self.beta > F(1, 3):
            raise ValueError("the absolute game needs beta <= 1/3 so Bhupen always has a move")
        if self.depth < 1:
            raise ValueError("depth must be positive")

    @property
    def shrink(self) -> Fraction:
        """Radius ratio between consecutive Bhupen balls."""
        return self.alpha * self.beta if self.variant == "schmidt" else self.beta ** 2


@dataclass
class Transcript:
    config: GameConfig
    B: List[GameBall] = field(default_factory=list)
    A: List[GameBall] = field(default_factory=list)

    @property
    def outcome(self) -> Fraction:
        return self.B[-1].center

    @property
    def radius(self) -> Fraction:
        return self.B[-1].radius

    def turns(self) -> List[dict]:
        out = []
        for i, b in enumerate(self.B):
            out.append({"turn": i + 1, "actor": "bhupen", **b.as_json()})
            if i < len(self.A):
                out.append({"turn": i + 1, "actor": "ayesha", **self.A[i].as_json()})
        return out

    def as_json(self) -> dict:
        return {"variant": self.config.variant, "alpha": None if self.config.alpha is None else str(self.config.alpha),
                "beta": str(self.config.beta), "depth": self.config.depth, "turns": self.turns(),
                "outcome": float(self.outcome), "radius": float(self.radius)}


class Referee:
    def __init__(self, config: GameConfig, K: PlayingSet):
        self.config = config
        self.K = K

    def check_ayesha(self, turn: int, B: GameBall, A: GameBall) -> None:
        c = self.config
        if c.variant == "schmidt":
            if A.radius != c.alpha * B.radius:
                raise IllegalMove("ayesha", turn, "radius law rho(A) = alpha rho(B) broken")
            if not B.contains_ball(A):
                raise IllegalMove("ayesha", turn, "A is not inside B")
            if not self.K.contains(A.center):
                raise IllegalMove("ayesha", turn, "centre outside the playing set")
        elif A.radius != c.beta * B.radius:
            raise IllegalMove("ayesha", turn, "radius law rho(A) = beta rho(B) broken")

    def check_bhupen(self, turn: int, B: GameBall, A: GameBall, B1: GameBall) -> None:
        c = self.config
        if B1.radius != c.beta * A.radius:
            raise IllegalMove("bhupen", turn, "radius law broken")
        if not self.K.contains(B1.center):
            raise IllegalMove("bhupen", turn, "centre outside the playing set")
        if c.variant == "schmidt":
            if not A.contains_ball(B1):
                raise IllegalMove("bhupen", turn, "B is not inside A")
        else:
            if not B.contains_ball(B1):
                raise IllegalMove("bhupen", turn, "B_{k+1} is not inside B_k")
            if not A.disjoint(B1):
                raise IllegalMove("bhupen", turn, "B_{k+1} meets the deleted ball")

    def replay(self, tr: Transcript) -> None:
        """Re-validate a whole transcript, including the nesting chain."""
        if len(tr.B) != len(tr.A) + 1:
            raise ValueError("transcript must end with a Bhupen ball")
        for i, A in enumerate(tr.A):
            self.check_ayesha(i + 1, tr.B[i], A)
            self.check_bhupen(i + 1, tr.B[i], A, tr.B[i + 1])
            if not tr.B[i].contains_ball(tr.B[i + 1]):
                raise IllegalMove("bhupen", i + 1, "nesting broken")


def play(config: GameConfig, ayesha, bhupen, first_ball: GameBall, K: PlayingSet = Interval()) -> Transcript:
    """Run ``config.depth`` Bhupen balls; every move is validated by the referee."""
    ref = Referee(config, K)
    if not K.contains(first_ball.center):
        raise IllegalMove("bhupen", 0, "first centre outside the playing set")
    tr = Transcript(config, [first_ball], [])
    for turn in range(1, config.depth):
        B = tr.B[-1]
        A = ayesha(B)
        ref.check_ayesha(turn, B, A)
        tr.A.append(A)
        B1 = bhupen(B, A)
        ref.check_bhupen(turn, B, A, B1)
        tr.B.append(B1)
    return tr


# ---------------------------------------------------------------------------
# Bhupen strategies

def _legal_intervals(config: GameConfig, B: GameBall, A: GameBall):
    """Closed/open bounds for the next Bhupen centre as ``(lo, hi, lo_open, hi_open)``."""
    r = config.beta * A.radius
    if config.variant == "schmidt":
        return [(A.lo + r, A.hi - r, False, False)], r
    lo, hi = B.lo + r, B.hi - r
    out = []
    gap = A.radius + r
    if lo <= A.center - gap:
        out.append((lo, min(hi, A.center - gap), False, True))
    if hi >= A.center + gap:
        out.append((max(lo, A.center + gap), hi, True, False))
    return [iv for iv in out if iv[0] < iv[1] or (iv[0] == iv[1] and not (iv[2] or iv[3]))], r


def _inside(iv, t) -> bool:
    lo, hi, lo_open, hi_open = iv
    return (lo < t if lo_open else lo <= t) and (t < hi if hi_open else t <= hi)


def _snap_into(K: PlayingSet, iv, t) -> Optional[Fraction]:
    for s in (K.ceil(t), K.floor(t)):
        if s is not None and _inside(iv, s):
            return s
    return None


class RandomBhupen:
    """Uniformly placed legal balls (up to snapping to the playing set)."""

    def __init__(self, config: GameConfig, K: PlayingSet, rng: np.random.Generator, tries: int = 64):
        self.config, self.K, self.rng, self.tries = config, K, rng, tries

    def __call__(self, B: GameBall, A: GameBall) -> GameBall:
        ivs, r = _legal_intervals(self.config, B, A)
        if not ivs:
            raise NoLegalMove("no room left for Bhupen")
        lens = [float(hi - lo) for lo, hi, _, _ in ivs]
        for _ in range(self.tries):
            j = int(self.rng.choice(len(ivs), p=np.array(lens) / sum(lens))) if sum(lens) > 0 else 0
            lo, hi, _, _ = ivs[j]
            u = F(int(self.rng.integers(1, 2 ** RAND_BITS)), 2 ** RAND_BITS)
            s = _snap_into(self.K, ivs[j], lo + (hi - lo) * u)
            if s is not None:
                return GameBall(s, r)
        for iv in ivs:  # deterministic fallback: ends of the legal set
            for t in (iv[0], iv[1], (iv[0] + iv[1]) / 2):
                s = _snap_into(self.K, iv, t)
                if s is not None:
                    return GameBall(s, r)
        raise NoLegalMove("playing set too sparse for the legal region at this radius")


def simplest_in(lo: Fraction, hi: Fraction) -> Fraction:
    """Fraction with the smallest denominator in the closed interval ``[lo, hi]``."""
    lo, hi = F(lo), F(hi)
    if lo > hi:
        raise ValueError("empty interval")
    a = math.floor(lo)
    if lo == a:
        return F(a)
    if a + 1 <= hi:
        return F(a + 1)
    return a + 1 / simplest_in(1 / (hi - a), 1 / (lo - a))


class NearestTargetBhupen:
    """Adversary: recentres as close as legally possible to the simplest rational in ``B``."""

    def __init__(self, config: GameConfig, K: PlayingSet):
        self.config, self.K = config, K

    def __call__(self, B: GameBall, A: GameBall) -> GameBall:
        ivs, r = _legal_intervals(self.config, B, A)
        target = simplest_in(B.lo, B.hi)
        best = None
        for iv in ivs:
            lo, hi, lo_open, hi_open = iv
            nudge = r / 2 ** 20
            t = min(max(target, lo + (nudge if lo_open else 0)), hi - (nudge if hi_open else 0))
            s = _snap_into(self.K, iv, t)
            if s is not None and (best is None or abs(s - target) < abs(best - target)):
                best = s
        if best is None:
            raise NoLegalMove("no legal centre in the playing set")
        return GameBall(best, r)


# ---------------------------------------------------------------------------
# orbit targets: rationals with L = q^2

def farey_next(f: Fraction, Q: int) -> Fraction:
    """Successor of ``f`` among fractions with denominator ``<= Q``."""
    a, b = f.numerator, f.denominator
    d0 = (-pow(a % b, -1, b)) % b if b > 1 else 0
    d = d0 + ((Q - d0) // b) * b
    return F((1 + a * d) // b, d)


def farey_prev(f: Fraction, Q: int) -> Fraction:
    a, b = f.numerator, f.denominator
    d0 = pow(a % b, -1, b) if b > 1 else 0
    d = d0 + ((Q - d0) // b) * b
    return F((a * d - 1) // b, d)


def fractions_in(lo: Fraction, hi: Fraction, Q: int) -> List[Fraction]:
    """All fractions with denominator ``<= Q`` in ``[lo, hi]``, sorted."""
    if Q < 1 or lo > hi:
        return []
    f = simplest_in(lo, hi)
    if f.denominator > Q:
        return []
    left, right = [], []
    g = farey_prev(f, Q)
    while g >= lo:
        left.append(g)
        g = farey_prev(g, Q)
    g = farey_next(f, Q)
    while g <= hi:
        right.append(g)
        g = farey_next(g, Q)
    return left[::-1] + [f] + right


def _shell_q_range(k: Fraction, n: int) -> Tuple[int, int]:
    """Integers ``q`` with ``k^n <= q^2 < k^(n+1)``."""
    lo_L, hi_L = k ** n, k ** (n + 1)
    q_lo = math.isqrt(math.ceil(lo_L))
    while q_lo * q_lo < lo_L:
        q_lo += 1
    q_hi = math.isqrt(math.floor(hi_L))
    while q_hi * q_hi >= hi_L:
        q_hi -= 1
    return max(q_lo, 1), q_hi


class RationalTargets:
    """Modular-group orbit of infinity in the half-plane chart: ``p/q`` with ``L = q^2``."""

    c1 = F(1)

    def shell_hits(self, B: GameBall, n: int, k: Fraction, c3: Fraction) -> List[Tuple[Fraction, int]]:
        if n < 0:
            return []
        q_lo, q_hi = _shell_q_range(k, n)
        if q_hi < q_lo:
            return []
        reach = B.radius + c3 / F(q_lo * q_lo)
        out = []
        for f in fractions_in(B.center - reach, B.center + reach, q_hi):
            q = f.denominator
            if q >= q_lo and abs(f - B.center) <= B.radius + c3 / (q * q):
                out.append((f, q * q))
        return out


class OrbitTargets:
    """Shell targets from an enumerated real-chart orbit (floats; for cross-checks)."""

    def __init__(self, x: np.ndarray, L: np.ndarray, c1: float, L_max: float):
        order = np.argsort(L, kind="stable")
        self.x, self.L, self.c1, self.L_max = np.asarray(x)[order], np.asarray(L)[order], c1, L_max

    def shell_hits(self, B: GameBall, n: int, k, c3) -> list:
        if n < 0:
            return []
        lo_L, hi_L = float(k) ** n, float(k) ** (n + 1)
        if hi_L > self.L_max:
            raise ValueError(f"shell {n} needs L up to {hi_L:g}, orbit reaches {self.L_max:g}")
        i, j = np.searchsorted(self.L, [lo_L, hi_L], side="left")
        x, L = self.x[i:j], self.L[i:j]
        hit = np.abs(x - float(B.center)) <= float(B.radius) + float(c3) / L
        return [(float(a), float(b)) for a, b in zip(x[hit], L[hit])]


# ---------------------------------------------------------------------------
# Ayesha strategies

def shell_for_radius(rho: Fraction, c1: Fraction, k: Fraction) -> int:
    """``n`` with ``c1 / (2 k^(n+2)) <= 2 rho < c1 / (2 k^(n+1))``, in exact arithmetic."""
    u = F(c1) / (4 * F(rho))
    # m = ceil(log_k u): smallest integer with k^m >= u
    m = math.floor(math.log(float(u)) / math.log(float(k))) if u > 0 else 0
    while k ** m < u:
        m += 1
    while k ** (m - 1) >= u:
        m -= 1
    return m - 2


class BadStrategy:
    """Absolute-game strategy for points badly approximable by orbit targets.

    Given Bhupen's ball ``B(x, rho)`` pick the shell ``n`` from ``rho``; if a
    target ``g`` in that shell has ``B(g, c3 / L_g)`` meeting ``B(x, rho)``,
    delete ``B(g, beta rho)``; otherwise delete the concentric ball.  At most
    one target can qualify; a second one raises :class:`UniquenessViolation`.
    """

    def __init__(self, beta, targets=None, k=None, c1=None):
        self.beta = F(beta)
        self.targets = targets or RationalTargets()
        self.c1 = F(c1) if c1 is not None else F(self.targets.c1)
        self.k = F(k) if k is not None else 1 / self.beta ** 2
        self.c3 = self.c1 / (4 * self.k)
        self.hits = 0

    @property
    def threshold(self) -> Fraction:
        """Certified lower bound for ``|x_inf - g| L_g``."""
        return min(self.beta * self.c1 / (4 * self.k ** 2), self.c3)

    def deletion(self, B: GameBall, radius: Fraction) -> GameBall:
        n = shell_for_radius(B.radius, self.c1, self.k)
        found = self.targets.shell_hits(B, n, self.k, self.c3)
        if len(found) > 1:
            raise UniquenessViolation(B, (found[0], found[1]))
        if found:
            self.hits += 1
            return GameBall(F(found[0][0]), radius)
        return GameBall(B.center, radius)

    def __call__(self, B: GameBall) -> GameBall:
        return self.deletion(B, self.beta * B.radius)


class AvoidPoint:
    """Schmidt-game strategy keeping the outcome away from one point."""

    def __init__(self, alpha, z, K: PlayingSet = Interval()):
        self.alpha, self.z, self.K = F(alpha), F(z), K

    def __call__(self, B: GameBall) -> GameBall:
        r = self.alpha * B.radius
        lo, hi = B.lo + r, B.hi - r
        cands = [c for c in (self.K.ceil(lo), self.K.floor(hi)) if c is not None and lo <= c <= hi]
        return GameBall(max(cands, key=lambda c: abs(c - self.z)), r)


class Concentric:
    """The trivial always-legal Schmidt strategy (``B`` centre kept)."""

    def __init__(self, alpha):
        self.alpha = F(alpha)

    def __call__(self, B: GameBall) -> GameBall:
        return GameBall(B.center, self.alpha * B.radius)


class TransferStrategy:
    """Schmidt strategy on ``K`` obtained from an absolute strategy.

    Inside Bhupen's ball two sub-balls of radius ``alpha rho`` centred in
    ``K`` with gap ``>= 2 alpha rho`` are found; the absolute deletion has
    diameter ``2 beta_abs rho < 2 alpha rho`` so it misses one of them, which
    becomes Ayesha's move.
    """

    def __init__(self, absolute: BadStrategy, K: PlayingSet, alpha):
        self.abs, self.K, self.alpha = absolute, K, F(alpha)
        if not absolute.beta < self.alpha:
            raise ValueError("transfer needs beta_abs < alpha")
        self.failures: List[str] = []

    def sub_balls(self, B: GameBall, alpha: Fraction):
        r = alpha * B.radius
        lo, hi = B.lo + r, B.hi - r
        a1, a2 = self.K.ceil(lo), self.K.floor(hi)
        if a1 is None or a2 is None or a1 > hi or a2 < lo or a2 - a1 < 4 * r:
            return None
        return GameBall(a1, r), GameBall(a2, r)

    def __call__(self, B: GameBall) -> GameBall:
        pair = self.sub_balls(B, self.alpha)
        while pair is None:
            self.failures.append(f"no sub-ball pair at alpha={self.alpha} for {B}")
            log.warning(self.failures[-1])
            self.alpha /= 2
            if not self.abs.beta < self.alpha:
                raise NoLegalMove("sub-ball finder failed and alpha fell below beta_abs")
            pair = self.sub_balls(B, self.alpha)
        A0 = self.abs.deletion(B, self.abs.beta * B.radius)
        missed = [a for a in pair if a.disjoint(A0)]
        assert missed, "absolute deletion met both sub-balls"
        return missed[0]


# ---------------------------------------------------------------------------
# certificates

@dataclass
class Certificate:
    outcome: Fraction
    radius: Fraction
    L_budget: int
    threshold: Fraction
    min_normalized_gap: Fraction
    witness: Fraction
    passed: bool
    violation: Optional[Fraction] = None

    def as_json(self) -> dict:
        return {"outcome": float(self.outcome), "radius": float(self.radius), "L_budget": self.L_budget,
                "threshold": float(self.threshold), "min_normalized_gap": float(self.min_normalized_gap),
                "witness": str(self.witness), "pass": self.passed,
                "violation": None if self.violation is None else str(self.violation)}


def certify(outcome: Fraction, radius: Fraction, threshold: Fraction, L_budget: int = 10**4) -> Certificate:
    """Check ``|x - p/q| q^2 >= threshold - radius q^2`` for every ``p/q`` with ``q^2 <= L_budget``.

    For each ``q`` only the nearest numerator can violate the bound, and it
    is found exactly from the rational outcome.
    """
    x = F(outcome)
    best, wit, bad = None, None, None
    for q in range(1, math.isqrt(L_budget) + 1):
        p = (2 * x.numerator * q + x.denominator) // (2 * x.denominator)
        g = abs(x - F(p, q)) * q * q
        if best is None or g < best:
            best, wit = g, F(p, q)
        if bad is None and g < threshold - radius * q * q:
            bad = F(p, q)
    return Certificate(x, F(radius), L_budget, F(threshold), best, wit, bad is None, bad)


# ---------------------------------------------------------------------------
# tournaments

@dataclass
class GameRecord:
    index: int
    transcript: Transcript
    certificate: Certificate
    deletions_on_targets: int


def play_bad_game(beta, depth: int, bhupen_kind: str, seed, K: PlayingSet = Interval(),
                  first_ball: GameBall = GameBall(F(1, 2), F(1, 2)), L_budget: int = 10**4,
                  k=None) -> GameRecord:
    """One absolute game with :class:`BadStrategy` against a random or adversarial Bhupen."""
    cfg = GameConfig("absolute", F(beta), depth=depth)
    ayesha = BadStrategy(cfg.beta, k=k)
    if bhupen_kind == "random":
        bhupen = RandomBhupen(cfg, K, np.random.default_rng(seed))
    elif bhupen_kind == "adversarial":
        bhupen = NearestTargetBhupen(cfg, K)
    else:
        raise ValueError(f"unknown Bhupen {bhupen_kind!r}")
    tr = play(cfg, ayesha, bhupen, first_ball, K)
    cert = certify(tr.outcome, tr.radius, ayesha.threshold, L_budget)
    return GameRecord(0, tr, cert, ayesha.hits)


def tournament(beta, plays: int, depth: int = 30, bhupen_kind: str = "random", seed: int = 0,
               threads: Optional[int] = None, L_budget: int = 10**4) -> List[GameRecord]:
    seeds = np.random.SeedSequence(seed).spawn(plays)

    def one(i):
        rec = play_bad_game(beta, depth, bhupen_kind, seeds[i], L_budget=L_budget)
        rec.index = i
        return rec

    return pmap(one, range(plays), threads)


def play_transfer_game(alpha, beta, beta_abs, depth: int, seed, K: PlayingSet = CantorSet(),
                       first_ball: GameBall = GameBall(F(0), F(1)), L_budget: int = 10**4):
    """Schmidt game on ``K`` with Ayesha's strategy transferred from :class:`BadStrategy`.

    Bhupen's radius shrinks by ``alpha beta`` per turn, so the shell base is
    ``k = ceil(1 / (alpha beta))`` to keep the shell rule from skipping shells.
    """
    alpha, beta, beta_abs = F(alpha), F(beta), F(beta_abs)
    cfg = GameConfig("schmidt", beta, alpha=alpha, depth=depth)
    k = F(math.ceil(1 / (alpha * beta)))
    absolute = BadStrategy(beta_abs, k=k)
    ayesha = TransferStrategy(absolute, K, alpha)
    bhupen = RandomBhupen(cfg, K, np.random.default_rng(seed))
    tr = play(cfg, ayesha, bhupen, first_ball, K)
    cert = certify(tr.outcome, tr.radius, absolute.threshold, L_budget)
    return tr, cert, ayesha


# ---------------------------------------------------------------------------
# Cantor construction from a winning strategy

@dataclass
class CantorTree:
    stages: List[List[GameBall]]
    parents: List[List[int]]
    N: int
    alpha: Fraction
    beta: Fraction
    rho0: Fraction
    counts: List[int]

    @property
    def bound(self) -> float:
        return dimension_bound(self.N, self.alpha, self.beta)

    def branches(self):
        """Leaf-to-root index chains, root first."""
        last = len(self.stages) - 1
        for leaf in range(len(self.stages[last])):
            chain = [leaf]
            for s in range(last, 0, -1):
                chain.append(self.parents[s][chain[-1]])
            yield chain[::-1]


def dimension_bound(N: int, alpha, beta) -> float:
    return math.log(N) / -math.log(float(alpha) * float(beta))


def fishman_cantor(K: PlayingSet, alpha, beta, strategy: Callable[[GameBall], GameBall],
                   depth: int = 2, first_ball: GameBall = GameBall(F(1, 2), F(1, 2))) -> CantorTree:
    """Stages of Bhupen balls obtained by replaying ``strategy`` along every branch.

    Children of a stage ball are a greedy packing of Ayesha's response by balls
    of the next radius whose gaps are at least that radius, cut to the
    tree-wide minimum count ``N`` so that branching is uniform.
    """
    alpha, beta = F(alpha), F(beta)
    stages, parents, counts = [[first_ball]], [[-1]], []
    for _ in range(depth):
        kids, par, cnt = [], [], []
        for i, B in enumerate(stages[-1]):
            A = strategy(B)
            r = alpha * beta * B.radius
            cs = K.pack(A.lo, A.hi, r, r)
            cnt.append(len(cs))
            kids.append([GameBall(c, r) for c in cs])
            par.append(i)
        N_stage = min(cnt)
        counts.append(N_stage)
        if N_stage < 2:
            raise ValueError(f"packing gives {N_stage} children; alpha, beta too large for this set")
        flat, fpar = [], []
        for i, ks in enumerate(kids):
            for b in ks[:N_stage]:
                flat.append(b)
                fpar.append(i)
        stages.append(flat)
        parents.append(fpar)
    N = min(counts)
    # enforce uniform branching N across all stages
    keep = [list(range(len(stages[0])))]
    for s in range(1, len(stages)):
        seen, kept = {}, []
        allowed = set(keep[-1])
        for j, p in enumerate(parents[s]):
            if p in allowed and seen.get(p, 0) < N:
                seen[p] = seen.get(p, 0) + 1
                kept.append(j)
        keep.append(kept)
    new_stages, new_parents = [stages[0]], [[-1]]
    for s in range(1, len(stages)):
        remap = {old: new for new, old in enumerate(keep[s - 1])}
        new_stages.append([stages[s][j] for j in keep[s]])
        new_parents.append([remap[parents[s][j]] for j in keep[s]])
    return CantorTree(new_stages, new_parents, N, alpha, beta, first_ball.radius, counts)


def check_tree(tree: CantorTree, K: PlayingSet, strategy) -> None:
    """Assert separation, uniform branching and that every branch replays as a legal game."""
    for s in range(1, len(tree.stages)):
        balls = sorted(tree.stages[s], key=lambda b: b.center)
        r = balls[0].radius
        for a, b in zip(balls, balls[1:]):
            assert b.lo - a.hi >= r, "stage balls closer than their radius"
        per = np.bincount(np.asarray(tree.parents[s]), minlength=len(tree.stages[s - 1]))
        assert np.all(per == tree.N), "branching is not uniform"
    cfg = GameConfig("schmidt", tree.beta, alpha=tree.alpha, depth=len(tree.stages))
    ref = Referee(cfg, K)
    for chain in tree.branches():
        tr = Transcript(cfg, [tree.stages[0][chain[0]]], [])
        for s in range(1, len(chain)):
            tr.A.append(strategy(tr.B[-1]))
            tr.B.append(tree.stages[s][chain[s]])
        ref.replay(tr)


def interval_packing_count(alpha, beta) -> int:
    """Closed form of the greedy count on an interval: ``floor(2 (1/beta - 1) / 3) + 1``."""
    beta = F(beta)
    return math.floor(F(2) * (1 / beta - 1) / 3) + 1
