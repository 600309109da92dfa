"""Why general metrics admit no curvature-only power ordering.

The potential of a power ordering is a combination of seven scalar
monomials in the metric jet; the curvature uses six of them. Stacking term
vectors from many points shows all seven are independent on generic metrics
while conformally flat metrics collapse them.
"""

from ordlab import get_metric, metric_family, rank_report

for label in ("poly-square:3:1-5:0.3", "poly-perturb:3:1-5:0.1", "conf-gauss:3:0.25,stereo-sphere:3:1", "euclidean:3"):
    rep = rank_report(metric_family(label), 10)
    sv = ", ".join(f"{s:.1e}" for s in rep.singular_values)
    print(f"{label:<38} rank {rep.rank}  singular values [{sv}]")

# linear perturbations have no second metric derivatives, so they lose two terms
print(get_metric("poly-perturb:3:1:0.1").label, "is linear in x; use poly-square for generic jets")
