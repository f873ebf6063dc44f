"""Ford circles from the modular orbit of infinity.

Enumerates the cusp orbit, builds the invariant horoball family and reports
how tightly the balls pack: the exact Farey minimum, the measured disjointness
constant, and the first few tangent pairs.
"""
from fractions import Fraction

from horolab import build_family, disjointness_constant, enumerate_orbit, resolve_group
from horolab.horoballs import farey_min_exact

G = resolve_group("modular")
orbit = enumerate_orbit(G, 0, 2.0 ** 12)
print(f"orbit points with L <= 2^12: {len(orbit.L)}")

value, (a, b) = farey_min_exact(100)
print(f"min over distinct Farey pairs (q <= 100) of |p q' - p' q| = {value}")
print(f"  attained by {Fraction(*a)} and {Fraction(*b)}")

d = disjointness_constant(orbit)
print(f"measured c1 in the ball model: {d.c1:.4f}")

fam = build_family(orbit)
print(f"lambda = {fam.lam}, family of {len(fam)} disjoint horoballs")
