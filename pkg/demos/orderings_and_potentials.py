"""Effective potentials of several orderings of g^ab p_a p_b.

Each ordering is compared with the Laplace-Beltrami operator on the probe
fields 1, q^1 .. q^n; the zeroth-order part is V_eff and the first-order part
is the drift. Only orderings with alpha + 2 beta = 0 are drift-free, and of
those only beta = 1/4 - 1/(2n) is a multiple of the curvature.
"""

import numpy as np

from ordlab import OperatorSpec, effective_potential_batch, fit_constant, get_metric

n = 3
metric = get_metric(f"conf-gauss:{n}:0.25")
points = metric.sample(8, np.random.default_rng(1))

specs = {
    "naive": OperatorSpec.naive(),
    "laplace-beltrami": OperatorSpec.laplace_beltrami(),
    "conformal LB": OperatorSpec.conformal_lb(),
    "power(-1/6, 1/12)": OperatorSpec.power(-1 / 6, 1 / 12),
    "power(-0.4, 0.2)": OperatorSpec.power(-0.4, 0.2),
    "power(0.3, 0.1)": OperatorSpec.power(0.3, 0.1),
}
print(f"{'ordering':<20}{'max |drift|':>14}{'C':>12}{'fit residual':>15}")
for name, spec in specs.items():
    reps = effective_potential_batch(spec, metric, points)
    drift = max(np.abs(r.drift).max() for r in reps)
    C, resid = fit_constant(reps)
    print(f"{name:<20}{drift:>14.2e}{C:>12.6f}{resid:>15.2e}")
