"""A free particle turned into an oscillator by its ordering alone.

With h = exp(-w x^2 / 2) and f = 1 / h^2 the ordering -(1/(f h)) d(f d(h .))
equals -d^2 + w^2 x^2 + w, so half of it is an oscillator whose spectrum is
shifted up by w / 2.
"""

import numpy as np

from ordlab import ScalarField, apply_operator, build_operator, euclidean, oscillator_ordering

w = 1.0
op = build_operator(oscillator_ordering(w), euclidean(1))
one = ScalarField.constant(1)
ground = ScalarField.from_expression(f"exp(-{w}*x0**2/2)", 1)
for x in np.linspace(-2, 2, 5):
    pot = 0.5 * apply_operator(op, one, [x])
    energy = 0.5 * apply_operator(op, ground, [x]) / ground([x])
    print(f"x={x:+.1f}  H(1) = {pot:.6f} (w^2 x^2/2 + w/2 = {0.5 * w * w * x * x + 0.5 * w:.6f})  E0 = {energy:.6f}")
