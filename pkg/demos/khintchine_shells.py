"""Convergence versus divergence, series side and measure side.

For the modular group the exponent is w = 1.  The series verdict says whether
almost every point is psi-approximable only finitely often; the shell measures
show the same thing directly as a summable (or not) sequence of masses.
"""
from horolab import enumerate_orbit, resolve_group
from horolab.dioph import ApproxFunction, MeasureSpec, khintchine_classify, mc_shell_measure

G = resolve_group("modular")
w = G.exponent()
print(f"exponent w = {w.w} ({w.source})")

for text in ("power:1", "power:2", "logpower:0", "logpower:0.5"):
    psi = ApproxFunction.parse(text)
    res = khintchine_classify(psi, w)
    print(f"  {text:<13} {res.verdict}")

n_max, k = 12, 2.0
orbit = enumerate_orbit(G, 0, k ** (n_max + 1))
for text in ("power:2", "power:1"):
    m = mc_shell_measure(orbit, ApproxFunction.parse(text), MeasureSpec("lebesgue", 1), range(n_max + 1),
                         samples=50_000, seed=1, k=k)
    masses = " ".join(f"{mu:.1e}" for mu in m.mu[::3])
    print(f"{text:<8} shell masses n=0,3,..: {masses}   sum {sum(m.mu):.3f}")
