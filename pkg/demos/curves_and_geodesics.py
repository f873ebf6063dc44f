"""Orbit points near a curve, and how deep a random geodesic dives.

The real line is preserved by a subgroup of the Picard group, so a fixed
share of every shell lies exactly on it; a generic circle gets no such supply.
At depth 2^8 the raw tube ratios have not separated yet; only the on-curve
supply shows the difference.

Along a random geodesic the deepest cusp excursion up to time t grows like
log t.
"""
from horolab import enumerate_orbit, resolve_group
from horolab.counting import CurveSpec, check_generic, shell_report, tube_counts
from horolab.dioph import ApproxFunction
from horolab.geodesics import loglaw_mc

G = resolve_group("picard")
orbit = enumerate_orbit(G, 0, 2.0 ** 8)
print("Picard shell counts k=2:", shell_report(orbit, 2.0, 7).counts)

circle = CurveSpec.circle()
check_generic(G, circle)
gen = tube_counts(orbit, circle, ApproxFunction.power(1.0), 2.0, 7)
deg = tube_counts(orbit, CurveSpec.real_line(), ApproxFunction.logpower(0.0), 2.0, 7)
print(f"generic circle:  {gen.verdict}, ratios {[round(r, 2) for r in gen.ratios()]}")
print(f"real line:       ratios {[round(r, 2) for r in deg.ratios()]}")
print(f"                 on-curve supply per shell >= {deg.curve_supply():.2f} k^n")

s = loglaw_mc(400, (100, 1000, 10000), seed=0)
for h, m in zip(s.horizons, s.medians):
    print(f"median max depth / log t up to {h:>5} convergents: {m:.3f}")
bounded = loglaw_mc(400, (100, 1000, 10000), seed=0, sampler="bounded")
print(f"same for bounded digits: {bounded.medians[-1]:.3f}")
