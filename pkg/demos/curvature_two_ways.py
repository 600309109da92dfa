"""Scalar curvature from Christoffel symbols and from the direct jet formula.

The five-term expression contracts first and second partials of g, g^-1 and
det g without building Christoffel symbols. It leaves out -g^ab_,ab, the
second partials of the inverse metric, and is only right where that term
vanishes; the last column puts it back.
"""

import numpy as np

from ordlab import get_metric, metric_jet, ricci_scalar_christoffel, ricci_scalar_direct

rng = np.random.default_rng(0)
print(f"{'metric':<24}{'christoffel':>14}{'five-term':>14}{'completed':>14}")
for label in ("stereo-sphere:2:1", "stereo-sphere:3:1", "conf-gauss:3:0.25", "poly-square:3:1:0.3", "spherical3"):
    m = get_metric(label)
    p = m.sample(1, rng)[0]
    jet = metric_jet(m, p)
    print(
        f"{label:<24}{ricci_scalar_christoffel(jet):>14.8f}"
        f"{ricci_scalar_direct(jet):>14.8f}{ricci_scalar_direct(jet, complete=True):>14.8f}"
    )

# same numbers with every metric partial taken by finite differences
m = get_metric("poly-square:3:1:0.3").numeric()
jet = metric_jet(m, [0.2, -0.1, 0.3])
print("\nnumeric jet, poly-square:", ricci_scalar_christoffel(jet), ricci_scalar_direct(jet, complete=True))
