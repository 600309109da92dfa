"""The two drift-free power orderings that give a pure curvature potential.

For each dimension the exact pair is listed next to the roots found by
scanning beta along alpha = -2 beta on a conformally flat metric.
"""

import numpy as np

from ordlab import get_metric, solve_exponents, verify_two_solutions

rng = np.random.default_rng(2)
for n in range(2, 7):
    exact = [(str(s.alpha_tilde), str(s.beta_tilde), str(s.C)) for s in solve_exponents(n)]
    m = get_metric(f"stereo-sphere:{n}:1" if n == 2 else f"conf-gauss:{n}:0.25")
    rep = verify_two_solutions(n, m, m.sample(5, rng))
    found = [(round(r["beta"], 12), round(r["fitted_C"], 12), r["multiplicity"]) for r in rep.roots]
    print(f"n={n}  exact {exact}")
    print(f"      found (beta, C, multiplicity) {found}")
