"""Three boundary points, three behaviours.

A rational is hit exactly by the orbit, so its Dirichlet profile drops to zero.
The golden ratio is the worst approximable number: its normalised errors
settle near 1/sqrt(5) and the profile stays above the threshold.  A Liouville
number is approximated absurdly well, so its bad constant collapses.
"""
import math

from horolab import cf, enumerate_orbit, resolve_group
from horolab.dioph import bad_constant, bad_constant_cf, geometric_grid, liouville_digits, singularity_profile
from horolab.dioph import real_line_point
from horolab.horoballs import disjointness_constant

G = resolve_group("modular")
N = 1e5
orbit = enumerate_orbit(G, 0, N)
c1 = disjointness_constant(enumerate_orbit(G, 0, 2.0 ** 10)).c1
grid = geometric_grid(2.0, N, 1.02)

for name, x in [("2/7", 2 / 7), ("phi - 1", (math.sqrt(5) - 1) / 2)]:
    prof = singularity_profile(orbit, real_line_point(x), grid, c1)
    print(f"{name:>8}: {prof.verdict}  (tail limsup {prof.tail_limsup:.4f}, threshold {prof.threshold:.4f})")

golden = cf.liminf_from_digits(cf.golden_digits(60), q_min=1000, q_max=10**6)
print(f"golden liminf q^2 |x - p/q| from convergents: {golden:.5f}  vs 1/sqrt5 = {1 / math.sqrt(5):.5f}")

b = bad_constant(orbit, real_line_point(math.sqrt(2) - 1))
print(f"bad constant of sqrt2 - 1 in the ball model: {b.c_hat:.4f}")
lv = bad_constant_cf(liouville_digits(4), 10**8)
print(f"Liouville bad constant over q <= 1e8: {lv.c_hat:.3e}")
