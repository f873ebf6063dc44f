"""Badly approximable numbers as a winning strategy.

Ayesha deletes the neighbourhood of the one rational that could threaten the
current ball; the outcome of every game is certified with exact arithmetic.
The same strategy, run against every reply at once, grows a Cantor set whose
dimension creeps toward 1 as beta shrinks.
"""
from fractions import Fraction as F

from horolab.games import (CantorSet, Concentric, GameBall, Interval, fishman_cantor, interval_packing_count,
                           play_transfer_game, tournament)

beta = F(1, 5)
recs = tournament(beta, 40, 30, "adversarial", seed=11)
worst = min(recs, key=lambda r: r.certificate.min_normalized_gap)
print(f"40 adversarial games at beta = {beta}: {sum(r.certificate.passed for r in recs)} certified")
print(f"  smallest q^2 |x - p/q| seen: {float(worst.certificate.min_normalized_gap):.4f}"
      f" at p/q = {worst.certificate.witness}, threshold {float(worst.certificate.threshold):.3g}")

for e in (4, 6, 8, 10):
    b = F(1, 2 ** e)
    tree = fishman_cantor(Interval(), F(1, 2), b, Concentric(F(1, 2)), 1)
    assert tree.N == interval_packing_count(F(1, 2), b)
    print(f"  beta = 2^-{e:<2} N = {tree.N:<4} dimension >= {tree.bound:.3f}")

tr, cert, ayesha = play_transfer_game(F(1, 16), F(1, 2), F(1, 17), 20, seed=0)
print(f"transfer game on the Cantor set: outcome in K = {CantorSet().contains(tr.outcome)},"
      f" certified = {cert.passed}")
