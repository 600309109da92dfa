"""Factor orderings of the kinetic term as executable operators.

Convention: with p_a = -i d_a and hbar = m = 1, every ordering of
g^ab p_a p_b has principal part -g^ab d_a d_b; the 1/2m prefactor is left
out. An operator is stored through its coefficients,

    (op psi) = -A^ab psi_,ab - B^b psi_,b + c psi,

or evaluated by nested finite differences of its divergence form.

Potentials are reported in the positive-Laplacian form used for the target
``Delta + C R``: for an ordering ``op`` the kinetic form is ``K = -op`` and
``V_eff = (K - K_LB)(1)``. The conformal operator LB + (n-2)/(4(n-1)) R
therefore has ``V_eff = C R`` with ``C = -(n-2)/(4(n-1))``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .config import NESTED_STEP_FACTOR, TOLERANCES, parallel_map
from .geometry import MetricField, MetricJet, as_point, metric_jet, ricci_scalar_christoffel
from .numdiff import DiffConfig, gradient, hessian

__all__ = [
    "ScalarField",
    "probe_fields",
    "OperatorSpec",
    "Operator",
    "build_operator",
    "apply_operator",
    "EffectivePotentialReport",
    "effective_potential",
    "effective_potential_batch",
    "fit_constant",
    "reports_to_csv",
    "similarity_ordering",
    "oscillator_ordering",
    "conformal_coupling",
]


def conformal_coupling(n: int) -> float:
    """(n - 2) / (4 (n - 1)), the curvature coupling of the conformal operator."""
    if n < 2:
        raise ValueError("conformal coupling is undefined for n = 1")
    return (n - 2) / (4 * (n - 1))


@dataclass(frozen=True)
class ScalarField:
    """A (possibly vector-valued) function on R^n with optional exact partials."""

    dimension: int
    evaluator: Callable
    grad: Callable | None = None
    hess: Callable | None = None
    label: str = ""

    @property
    def has_partials(self) -> bool:
        return self.grad is not None and self.hess is not None

    def __call__(self, x):
        return np.asarray(self.evaluator(np.asarray(x, dtype=float)), dtype=float)

    def gradient(self, x, cfg: DiffConfig | None = None) -> np.ndarray:
        if self.grad is not None:
            return np.asarray(self.grad(np.asarray(x, dtype=float)), dtype=float)
        return gradient(self, x, cfg)

    def hessian(self, x, cfg: DiffConfig | None = None) -> np.ndarray:
        if self.hess is not None:
            return np.asarray(self.hess(np.asarray(x, dtype=float)), dtype=float)
        return hessian(self, x, cfg)

    def numeric(self) -> "ScalarField":
        return ScalarField(self.dimension, self.evaluator, label=self.label)

    def __mul__(self, other: "ScalarField") -> "ScalarField":
        if not isinstance(other, ScalarField):
            return NotImplemented
        f, h = self, other

        def val(x):
            return f(x) * h(x)

        if not (f.has_partials and h.has_partials):
            return ScalarField(f.dimension, val, label=f"({f.label})*({h.label})")

        def grad(x):
            return f(x)[..., None] * h.gradient(x) + h(x)[..., None] * f.gradient(x)

        def hess(x):
            fg, hg = f.gradient(x), h.gradient(x)
            cross = fg[..., :, None] * hg[..., None, :]
            return (
                f(x)[..., None, None] * h.hessian(x)
                + h(x)[..., None, None] * f.hessian(x)
                + cross
                + np.swapaxes(cross, -1, -2)
            )

        return ScalarField(f.dimension, val, grad, hess, label=f"({f.label})*({h.label})")

    @classmethod
    def constant(cls, n: int, value: float = 1.0) -> "ScalarField":
        return cls(
            n,
            lambda x: np.asarray(value, dtype=float),
            lambda x: np.zeros(n),
            lambda x: np.zeros((n, n)),
            label=repr(value),
        )

    @classmethod
    def from_expression(cls, expr: str, n: int) -> "ScalarField":
        """Field from a sympy-parsable expression in ``x0 .. x{n-1}``.

        Gradient and Hessian are differentiated symbolically, so the field
        always has exact partials.
        """
        import sympy as sp

        xs = sp.symbols(f"x0:{n}", real=True)
        e = sp.sympify(expr, locals={str(s): s for s in xs})
        grad_e = [sp.diff(e, s) for s in xs]
        hess_e = [[sp.diff(g, s) for s in xs] for g in grad_e]
        f = sp.lambdify(xs, e, "numpy")
        fg = sp.lambdify(xs, grad_e, "numpy")
        fh = sp.lambdify(xs, hess_e, "numpy")
        return cls(
            n,
            lambda x: np.asarray(f(*x), dtype=float),
            lambda x: np.asarray(fg(*x), dtype=float),
            lambda x: np.asarray(fh(*x), dtype=float),
            label=str(expr),
        )


def probe_fields(n: int) -> ScalarField:
    """Vector-valued field (1, q^1, ..., q^n) with exact partials."""
    grad = np.vstack([np.zeros((1, n)), np.eye(n)])
    return ScalarField(
        n,
        lambda x: np.concatenate([[1.0], x]),
        lambda x: grad.copy(),
        lambda x: np.zeros((n + 1, n, n)),
        label="probes",
    )


_KINDS = ("Naive", "LaplaceBeltrami", "ConformalLB", "PowerOrdering", "Sandwich")


@dataclass(frozen=True)
class OperatorSpec:
    """Declarative description of an ordering.

    ``Sandwich(w_pre, w_mid, w_post)`` is ``-(1/w_pre) d_a(w_mid g^ab d_b(w_post psi))``;
    ``PowerOrdering(alpha, beta)`` is the sandwich with weights
    ``g^(1/2 + alpha + beta)``, ``g^(alpha + 1/2)``, ``g^beta`` in the metric
    determinant g.
    """

    kind: str
    alpha: float = 0.0
    beta: float = 0.0
    w_pre: ScalarField | None = None
    w_mid: ScalarField | None = None
    w_post: ScalarField | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.kind == "PowerOrdering" and not (np.isfinite(self.alpha) and np.isfinite(self.beta)):
            raise ValueError("PowerOrdering exponents must be finite")
        if self.kind == "Sandwich" and None in (self.w_pre, self.w_mid, self.w_post):
            raise ValueError("Sandwich needs all three weights")

    @classmethod
    def naive(cls):
        return cls("Naive")

    @classmethod
    def laplace_beltrami(cls):
        return cls("LaplaceBeltrami")

    @classmethod
    def conformal_lb(cls):
        return cls("ConformalLB")

    @classmethod
    def power(cls, alpha: float, beta: float):
        return cls("PowerOrdering", alpha=float(alpha), beta=float(beta))

    @classmethod
    def sandwich(cls, w_pre: ScalarField, w_mid: ScalarField, w_post: ScalarField):
        return cls("Sandwich", w_pre=w_pre, w_mid=w_mid, w_post=w_post)

    def to_dict(self) -> dict:
        params: dict = {}
        if self.kind == "PowerOrdering":
            params = {"alpha": self.alpha, "beta": self.beta}
        elif self.kind == "Sandwich":
            params = {"w_pre": self.w_pre.label, "w_mid": self.w_mid.label, "w_post": self.w_post.label}
        return {"kind": self.kind, "params": params}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict, dimension: int | None = None) -> "OperatorSpec":
        """Inverse of :meth:`to_dict`; sandwich weights are re-parsed as
        expressions, which needs ``dimension``."""
        kind, params = d["kind"], d.get("params", {})
        if kind == "PowerOrdering":
            return cls.power(params["alpha"], params["beta"])
        if kind == "Sandwich":
            if dimension is None:
                raise ValueError("Sandwich deserialization needs the dimension")
            w = {k: ScalarField.from_expression(params[k], dimension) for k in ("w_pre", "w_mid", "w_post")}
            return cls.sandwich(**w)
        return cls(kind)

    @classmethod
    def from_json(cls, s: str, dimension: int | None = None) -> "OperatorSpec":
        return cls.from_dict(json.loads(s), dimension)


def _power_weight(s: float, jet: MetricJet):
    """G^s with gradient and Hessian from the determinant jet."""
    G, dG, d2G = jet.det, jet.d_det, jet.d2_det
    val = G**s
    grad = s * G ** (s - 1) * dG
    hess = s * (s - 1) * G ** (s - 2) * np.outer(dG, dG) + s * G ** (s - 1) * d2G
    return val, grad, hess


@dataclass(frozen=True)
class Operator:
    """An ordering bound to a metric. Immutable; safe to share."""

    spec: OperatorSpec
    metric: MetricField

    @property
    def n(self) -> int:
        return self.metric.dimension

    def _exponents(self):
        if self.spec.kind in ("LaplaceBeltrami", "ConformalLB"):
            return 0.0, 0.0
        return self.spec.alpha, self.spec.beta

    def _weights_at(self, jet: MetricJet, cfg):
        """(P, M, M_a, Q, Q_a, Q_ab) at the jet point for sandwich-type kinds."""
        if self.spec.kind == "Sandwich":
            x = jet.point
            w_pre, w_mid, w_post = self.spec.w_pre, self.spec.w_mid, self.spec.w_post
            P = float(w_pre(x))
            M, Mg = float(w_mid(x)), w_mid.gradient(x, cfg)
            Q, Qg, Qh = float(w_post(x)), w_post.gradient(x, cfg), w_post.hessian(x, cfg)
            if min(P, M, Q) <= 0:
                raise ValueError(f"sandwich weights must be positive, got {P}, {M}, {Q} at {x.tolist()}")
            return P, M, Mg, Q, Qg, Qh
        a, b = self._exponents()
        P = jet.det ** (0.5 + a + b)
        M, Mg, _ = _power_weight(a + 0.5, jet)
        Q, Qg, Qh = _power_weight(b, jet)
        return P, M, Mg, Q, Qg, Qh

    def coefficients(self, jet: MetricJet, cfg: DiffConfig | None = None):
        """(A, B, c) with op psi = -A^ab psi_ab - B^b psi_b + c psi at the jet point."""
        gi = jet.g_inv
        if self.spec.kind == "Naive":
            return gi.copy(), np.zeros(self.n), 0.0
        P, M, Mg, Q, Qg, Qh = self._weights_at(jet, cfg)
        K = M * gi
        k = np.einsum("a,ab->b", Mg, gi) + M * np.einsum("aba->b", jet.d_ginv)
        A = K * Q / P
        B = (k * Q + 2 * K @ Qg) / P
        c = -(k @ Qg + np.einsum("ab,ab", K, Qh)) / P
        if self.spec.kind == "ConformalLB":
            c += conformal_coupling(self.n) * ricci_scalar_christoffel(jet)
        return A, B, float(c)

    def apply_coefficients(self, psi: ScalarField, jet: MetricJet, cfg=None) -> np.ndarray:
        A, B, c = self.coefficients(jet, cfg)
        x = jet.point
        v, g, h = psi(x), psi.gradient(x, cfg), psi.hessian(x, cfg)
        return -np.einsum("ab,...ab->...", A, h) - np.einsum("b,...b->...", B, g) + c * v

    def _metric_weights(self, q):
        """(P, M, Q, g^-1) evaluated directly at a point, for nested differencing."""
        g = self.metric(q)
        gi = np.linalg.inv(g)
        if self.spec.kind == "Sandwich":
            return float(self.spec.w_pre(q)), float(self.spec.w_mid(q)), float(self.spec.w_post(q)), gi
        a, b = self._exponents()
        G = np.linalg.det(g)
        return G ** (0.5 + a + b), G ** (a + 0.5), G**b, gi

    def apply_nested(self, psi: ScalarField, p, cfg: DiffConfig | None = None) -> np.ndarray:
        """Evaluate the divergence form by differencing twice.

        The outer divergence uses a step NESTED_STEP_FACTOR times wider than
        the inner gradient.
        """
        cfg = cfg or DiffConfig()
        x = as_point(p, self.n)
        if self.spec.kind == "Naive":
            gi = np.linalg.inv(self.metric(x))
            return -np.einsum("ab,...ab->...", gi, hessian(psi, x, cfg))

        def chi(q):
            return self._metric_weights(q)[2] * psi(q)

        def flux(q):
            _, M, _, gi = self._metric_weights(q)
            return M * np.einsum("ab,...b->...a", gi, gradient(chi, q, cfg))

        div = np.einsum("...aa->...", gradient(flux, x, cfg, step_scale=NESTED_STEP_FACTOR))
        P = self._metric_weights(x)[0]
        if P <= 0:
            raise ValueError("sandwich weights must be positive")
        out = -div / P
        if self.spec.kind == "ConformalLB":
            R = ricci_scalar_christoffel(metric_jet(self.metric, x, cfg))
            out = out + conformal_coupling(self.n) * R * psi(x)
        return out


def build_operator(spec: OperatorSpec, metric: MetricField) -> Operator:
    """Bind an ordering to a metric, validating what can be checked up front."""
    if spec.kind == "ConformalLB" and metric.dimension < 2:
        raise ValueError("ConformalLB needs n >= 2; the curvature coupling is undefined at n = 1")
    if spec.kind == "Sandwich":
        for w in (spec.w_pre, spec.w_mid, spec.w_post):
            if w.dimension != metric.dimension:
                raise ValueError("sandwich weight dimension does not match the metric")
    return Operator(spec, metric)


def _pick_method(op: Operator, psi: ScalarField, method: str) -> str:
    if method not in ("auto", "coefficients", "nested"):
        raise ValueError(f"unknown method {method!r}")
    if method != "auto":
        return method
    weights_ok = op.spec.kind != "Sandwich" or all(
        w.has_partials for w in (op.spec.w_pre, op.spec.w_mid, op.spec.w_post)
    )
    return "coefficients" if psi.has_partials and weights_ok else "nested"


def apply_operator(
    op: Operator,
    psi: ScalarField,
    p,
    cfg: DiffConfig | None = None,
    method: str = "auto",
    jet: MetricJet | None = None,
):
    """(op psi)(p).

    ``method="coefficients"`` contracts the operator coefficients (built from
    the metric jet, itself analytic or differenced per the metric's mode)
    with the partials of psi. ``"nested"`` differences the divergence form
    directly. ``"auto"`` takes the coefficient route when psi (and any
    sandwich weights) carry exact partials.
    """
    x = as_point(p, op.n)
    if _pick_method(op, psi, method) == "nested":
        out = op.apply_nested(psi, x, cfg)
    else:
        jet = jet if jet is not None else metric_jet(op.metric, x, cfg)
        out = op.apply_coefficients(psi, jet, cfg)
    return float(out) if np.ndim(out) == 0 else out


@dataclass
class EffectivePotentialReport:
    point: np.ndarray
    V_eff: float
    drift: np.ndarray
    ricci: float
    fitted_C: float | None
    residual: float | None
    spec: dict = field(default_factory=dict)

    @property
    def defined(self) -> bool:
        return self.fitted_C is not None

    def to_dict(self) -> dict:
        return {
            "point": np.asarray(self.point).tolist(),
            "V_eff": self.V_eff,
            "drift": np.asarray(self.drift).tolist(),
            "ricci": self.ricci,
            "fitted_C": self.fitted_C,
            "residual": self.residual,
        }


def effective_potential(
    spec: OperatorSpec,
    metric: MetricField,
    p,
    cfg: DiffConfig | None = None,
    method: str = "auto",
    jet: MetricJet | None = None,
) -> EffectivePotentialReport:
    """Zeroth- and first-order parts of (ordering - Laplace-Beltrami) at ``p``.

    Both operators are applied to the probe fields 1, q^1 .. q^n. Signs follow
    the kinetic form K = -op (module docstring).
    """
    x = as_point(p, metric.dimension)
    probes = probe_fields(metric.dimension)
    if method == "auto":
        method = "coefficients"
    if method == "coefficients" and jet is None:
        jet = metric_jet(metric, x, cfg)
    op = build_operator(spec, metric)
    lb = build_operator(OperatorSpec.laplace_beltrami(), metric)
    diff = apply_operator(op, probes, x, cfg, method, jet) - apply_operator(lb, probes, x, cfg, method, jet)
    V = -float(diff[0])
    drift = -(diff[1:] - diff[0] * x)
    if jet is None:
        jet = metric_jet(metric, x, cfg)
    R = ricci_scalar_christoffel(jet)
    if abs(R) > TOLERANCES.ricci_floor:
        C = V / R
        resid = abs(V - C * R)
    else:
        C = resid = None
    return EffectivePotentialReport(x, V, drift, R, C, resid, spec.to_dict())


def effective_potential_batch(spec, metric, points, cfg=None, method="auto"):
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return parallel_map(lambda p: effective_potential(spec, metric, p, cfg, method), pts)


def fit_constant(reports) -> tuple[float, float]:
    """Least-squares C in V_eff ~ C R over a batch; returns (C, residual norm)."""
    V = np.array([r.V_eff for r in reports])
    R = np.array([r.ricci for r in reports])
    rr = R @ R
    if rr <= TOLERANCES.ricci_floor**2:
        raise ValueError("curvature vanishes on every sample; C is undefined")
    C = float(V @ R / rr)
    return C, float(np.linalg.norm(V - C * R))


def reports_to_csv(reports) -> str:
    n = len(reports[0].point)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(
        [f"point_{i}" for i in range(n)] + ["V_eff"] + [f"drift_{i}" for i in range(n)] + ["ricci", "fitted_C", "residual"]
    )
    for r in reports:
        w.writerow(
            [repr(float(v)) for v in r.point]
            + [repr(r.V_eff)]
            + [repr(float(v)) for v in r.drift]
            + [repr(r.ricci), "" if r.fitted_C is None else repr(r.fitted_C), "" if r.residual is None else repr(r.residual)]
        )
    return buf.getvalue()


def similarity_ordering(f: ScalarField, h: ScalarField) -> OperatorSpec:
    """-(1/(f h)) d(f d(h psi)); apply it on a flat metric."""
    if f.dimension != h.dimension:
        raise ValueError("f and h must share a dimension")
    return OperatorSpec.sandwich(f * h, f, h)


def oscillator_ordering(omega: float = 1.0, mass: float = 1.0) -> OperatorSpec:
    """Similarity ordering with h = exp(-m omega x^2 / 2), f = 1/h^2.

    Half of this operator (the 1/2m prefactor at m = 1) is the free particle
    turned into an oscillator, -d^2/2 + omega^2 x^2 / 2 + omega / 2.
    """
    k = mass * omega
    h = ScalarField.from_expression(f"exp(-{k!r}*x0**2/2)", 1)
    f = ScalarField.from_expression(f"exp({k!r}*x0**2)", 1)
    return similarity_ordering(f, h)
