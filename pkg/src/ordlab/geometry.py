"""Metrics, metric jets and scalar curvature.

Curvature is computed two ways: from a closed expression in the metric
determinant, the inverse metric and their derivatives
(:func:`ricci_scalar_direct`), and from Christoffel symbols
(:func:`ricci_scalar_christoffel`). The Christoffel route is the reference;
:func:`formula_audit` reports how the two compare and never adjusts either.

Index conventions for jets: ``dg[a, b, c] = d_c g_ab``,
``d2g[a, b, c, d] = d_c d_d g_ab``, ``d_ginv[a, b, c] = d_c g^ab``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .config import TOLERANCES, parallel_map
from .numdiff import DiffConfig, gradient, hessian

__all__ = [
    "MetricError",
    "NotPositiveDefiniteError",
    "DegenerateMetricError",
    "DimensionMismatchError",
    "MetricField",
    "MetricJet",
    "as_point",
    "metric_jet",
    "christoffel_symbols",
    "ricci_terms",
    "ricci_scalar_direct",
    "ricci_scalar_christoffel",
    "AuditReport",
    "formula_audit",
    "PRINTED_WEIGHTS",
    "COMPLETE_WEIGHTS",
]

MAX_DIMENSION = 6

# coefficients of the determinant-form curvature expression, term order as in
# ricci_terms(); the sixth term (second derivatives of the inverse metric)
# is absent from the short five-term form
PRINTED_WEIGHTS = np.array([-1.0, 0.75, -1.0, -0.5, 0.25, 0.0])
COMPLETE_WEIGHTS = np.array([-1.0, 0.75, -1.0, -0.5, 0.25, -1.0])


class MetricError(ValueError):
    pass


class NotPositiveDefiniteError(MetricError):
    pass


class DegenerateMetricError(MetricError):
    pass


class DimensionMismatchError(MetricError):
    pass


def as_point(p, n: int) -> np.ndarray:
    x = np.asarray(p, dtype=float).reshape(-1)
    if x.size != n:
        raise DimensionMismatchError(f"point has {x.size} coordinates, metric dimension is {n}")
    return x


@dataclass(frozen=True)
class MetricField:
    """A Riemannian metric on (a region of) R^n.

    ``evaluator(x)`` returns the n x n matrix g_ab(x). When both ``first``
    (``x -> dg``) and ``second`` (``x -> d2g``) are given the metric is in
    analytic mode and jets use the closed-form partials; otherwise jets are
    built by finite differences.

    ``domain`` is the sampling box ``(lo, hi)`` of regular points; ``conformal``
    marks metrics of the form phi(x)^2 * identity.
    """

    dimension: int
    evaluator: Callable
    label: str = "custom"
    first: Callable | None = None
    second: Callable | None = None
    domain: tuple | None = None
    conformal: bool = False

    def __post_init__(self):
        if not 1 <= self.dimension <= MAX_DIMENSION:
            raise ValueError(f"dimension must be in 1..{MAX_DIMENSION}, got {self.dimension}")

    @property
    def derivative_mode(self) -> str:
        return "analytic" if self.first is not None and self.second is not None else "numeric"

    def numeric(self) -> "MetricField":
        """Same metric with closed-form partials dropped."""
        return replace(self, first=None, second=None)

    def __call__(self, p) -> np.ndarray:
        x = as_point(p, self.dimension)
        g = np.asarray(self.evaluator(x), dtype=float).reshape(self.dimension, self.dimension)
        _check_positive(g, x)
        return g

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """``count`` points drawn uniformly from the regular domain."""
        lo, hi = self.domain if self.domain is not None else (-1.0, 1.0)
        lo = np.broadcast_to(np.asarray(lo, dtype=float), (self.dimension,))
        hi = np.broadcast_to(np.asarray(hi, dtype=float), (self.dimension,))
        return lo + (hi - lo) * rng.random((count, self.dimension))


def _check_positive(g: np.ndarray, x: np.ndarray) -> None:
    if not np.all(np.isfinite(g)):
        raise DegenerateMetricError(f"non-finite metric at {x.tolist()}")
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError(f"metric not positive definite at {x.tolist()}") from None


@dataclass
class MetricJet:
    """Metric, inverse, determinant and their partials up to second order."""

    point: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    det: float
    dg: np.ndarray
    d2g: np.ndarray
    d_det: np.ndarray
    d2_det: np.ndarray
    d_ginv: np.ndarray
    d2_ginv: np.ndarray
    mode: str = "analytic"

    @property
    def n(self) -> int:
        return self.g.shape[0]

    def invariant_deviations(self) -> dict:
        """Max-abs violation of each structural identity the jet must obey."""
        g, gi, dg = self.g, self.g_inv, self.dg
        eye = np.eye(self.n)
        jacobi = self.det * np.einsum("ab,bac->c", gi, dg)
        inv_deriv = -np.einsum("ab,bcx,cd->adx", gi, dg, gi)
        scale = max(1.0, np.abs(self.d_det).max())
        return {
            "symmetry": max(np.abs(g - g.T).max(), np.abs(gi - gi.T).max()),
            "inverse": np.abs(g @ gi - eye).max(),
            "jacobi": np.abs(self.d_det - jacobi).max() / scale,
            "inverse_derivative": np.abs(self.d_ginv - inv_deriv).max()
            / max(1.0, np.abs(self.d_ginv).max()),
            "second_partials": np.abs(self.d2g - np.swapaxes(self.d2g, 2, 3)).max(),
        }


def _inverse(g: np.ndarray, x: np.ndarray) -> np.ndarray:
    try:
        gi = np.linalg.inv(g)
    except np.linalg.LinAlgError:
        raise DegenerateMetricError(f"singular metric at {x.tolist()}") from None
    return 0.5 * (gi + gi.T)


def metric_jet(metric: MetricField, p, cfg: DiffConfig | None = None) -> MetricJet:
    """Value and first/second partials of g, g^-1 and det g at ``p``.

    In analytic mode the determinant and inverse derivatives follow from the
    closed-form metric partials through the Jacobi and inverse-derivative
    identities. In numeric mode every block (g, det g, g^-1) is differenced
    separately, so those identities become genuine checks.
    """
    x = as_point(p, metric.dimension)
    n = metric.dimension
    g = metric(x)
    gi = _inverse(g, x)
    det = float(np.linalg.det(g))
    if det <= 0:
        raise DegenerateMetricError(f"non-positive determinant {det} at {x.tolist()}")

    if metric.derivative_mode == "analytic":
        dg = np.asarray(metric.first(x), dtype=float).reshape(n, n, n)
        d2g = np.asarray(metric.second(x), dtype=float).reshape(n, n, n, n)
        # M_c = g^-1 d_c g
        M = np.einsum("ab,bcx->acx", gi, dg)
        tr = np.einsum("aac->c", M)
        d_det = det * tr
        d2_det = det * (
            np.outer(tr, tr)
            + np.einsum("ab,baxy->xy", gi, d2g)
            - np.einsum("abx,bay->xy", M, M)
        )
        d_ginv = -np.einsum("ab,bcx,cd->adx", gi, dg, gi)
        mode = "analytic"
    else:
        cfg = cfg or DiffConfig()

        def blocks(q):
            gq = metric(q)
            return np.concatenate([gq.ravel(), [np.linalg.det(gq)], np.linalg.inv(gq).ravel()])

        d1 = gradient(blocks, x, cfg)
        d2 = hessian(blocks, x, cfg)
        nn = n * n
        dg = d1[:nn].reshape(n, n, n)
        d2g = d2[:nn].reshape(n, n, n, n)
        d_det = d1[nn]
        d2_det = d2[nn]
        d_ginv = d1[nn + 1 :].reshape(n, n, n)
        # symmetrize the differenced blocks in their tensor indices
        dg = 0.5 * (dg + dg.transpose(1, 0, 2))
        d2g = 0.5 * (d2g + d2g.transpose(1, 0, 2, 3))
        d_ginv = 0.5 * (d_ginv + d_ginv.transpose(1, 0, 2))
        mode = "numeric"

    # d_c d_d g^-1 = g^-1 (d_c g g^-1 d_d g + d_d g g^-1 d_c g - d_c d_d g) g^-1
    d2_ginv = _second_inverse(g, gi, dg, d2g)
    return MetricJet(
        point=x,
        g=g,
        g_inv=gi,
        det=det,
        dg=dg,
        d2g=d2g,
        d_det=np.asarray(d_det, dtype=float),
        d2_det=np.asarray(d2_det, dtype=float),
        d_ginv=d_ginv,
        d2_ginv=d2_ginv,
        mode=mode,
    )


def _second_inverse(g, gi, dg, d2g) -> np.ndarray:
    # P[a,e,x,y] = (d_x g  g^-1  d_y g)_ae
    P = np.einsum("abx,bc,cey->aexy", dg, gi, dg)
    inner = P + P.transpose(0, 1, 3, 2) - d2g
    return np.einsum("ab,bcxy,cd->adxy", gi, inner, gi)


def christoffel_symbols(jet: MetricJet) -> tuple[np.ndarray, np.ndarray]:
    """Second-kind symbols ``G[c, a, b]`` and their partials ``dG[c, a, b, e]``."""
    dg, d2g = jet.dg, jet.d2g
    # S[d, a, b] = g_da,b + g_db,a - g_ab,d
    S = dg.transpose(0, 1, 2) + dg.transpose(0, 2, 1) - dg.transpose(2, 0, 1)
    dS = d2g + d2g.transpose(0, 2, 1, 3) - d2g.transpose(2, 0, 1, 3)
    gamma = 0.5 * np.einsum("cd,dab->cab", jet.g_inv, S)
    dgamma = 0.5 * (
        np.einsum("cde,dab->cabe", jet.d_ginv, S) + np.einsum("cd,dabe->cabe", jet.g_inv, dS)
    )
    return gamma, dgamma


def ricci_scalar_christoffel(jet: MetricJet) -> float:
    """Scalar curvature from Christoffel symbols; the reference value.

    R = g^ab (G^c_ab,c - G^c_ac,b + G^c_cd G^d_ab - G^c_ad G^d_cb),
    positive on spheres.
    """
    G, dG = christoffel_symbols(jet)
    ricci = (
        np.einsum("cabc->ab", dG)
        - np.einsum("cacb->ab", dG)
        + np.einsum("ccd,dab->ab", G, G)
        - np.einsum("cad,dcb->ab", G, G)
    )
    return float(np.einsum("ab,ab", jet.g_inv, ricci))


def ricci_terms(jet: MetricJet) -> np.ndarray:
    """The six scalar monomials of the determinant-form curvature expression.

    Order: g^ab g_,ab / g;  g^ab g_,a g_,b / g^2;  (g_,b / g) g^ab_,a;
    g^ab_,l g_ra,b g^lr;  g^ab_,l g_ab,r g^lr;  g^ab_,ab.
    """
    gi, G = jet.g_inv, jet.det
    return np.array(
        [
            np.einsum("ab,ab", gi, jet.d2_det) / G,
            np.einsum("ab,a,b", gi, jet.d_det, jet.d_det) / G**2,
            np.einsum("b,aba", jet.d_det, jet.d_ginv) / G,
            np.einsum("abl,rab,lr", jet.d_ginv, jet.dg, gi),
            np.einsum("abl,abr,lr", jet.d_ginv, jet.dg, gi),
            np.einsum("abab", jet.d2_ginv),
        ]
    )


def ricci_scalar_direct(jet: MetricJet, complete: bool = False) -> float:
    """Scalar curvature from the five-term determinant-form expression.

    The five addends are summed with their stated coefficients. That sum
    omits ``-g^ab_,ab`` and so differs from the curvature on almost every
    curved metric; :func:`formula_audit` reports the gap. ``complete=True``
    adds the omitted term, which restores agreement with
    :func:`ricci_scalar_christoffel`.
    """
    w = COMPLETE_WEIGHTS if complete else PRINTED_WEIGHTS
    return float(w @ ricci_terms(jet))


@dataclass
class AuditReport:
    """Per-point curvature from the five-term expression against the
    Christoffel reference.

    ``passed`` judges the five-term values only. ``completed`` holds the sum
    with the omitted ``-g^ab_,ab`` restored and ``missing_term`` that term
    alone, so ``completed = direct + missing_term``.
    """

    metric: str
    points: list
    direct: list
    christoffel: list
    abs_diff: list
    rel_diff: list
    passed: bool
    tolerance: float
    completed: list = field(default_factory=list)
    completed_rel_diff: list = field(default_factory=list)
    missing_term: list = field(default_factory=list)

    @property
    def completed_passed(self) -> bool:
        return bool(self.completed_rel_diff) and max(self.completed_rel_diff) <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "points": self.points,
            "direct": self.direct,
            "christoffel": self.christoffel,
            "abs_diff": self.abs_diff,
            "rel_diff": self.rel_diff,
            "pass": self.passed,
            "tolerance": self.tolerance,
            "completed": self.completed,
            "completed_rel_diff": self.completed_rel_diff,
            "completed_pass": self.completed_passed,
            "missing_term": self.missing_term,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _rel(values, ref):
    out = []
    for a, b in zip(values, ref):
        d = abs(a - b)
        out.append(d / abs(b) if abs(b) > TOLERANCES.ricci_floor else d)
    return out


def formula_audit(
    metric: MetricField, samples, cfg: DiffConfig | None = None, tol: float | None = None
) -> AuditReport:
    """Compare the five-term curvature expression with the Christoffel reference.

    The two are never reconciled: ``pass`` is false wherever they disagree
    beyond ``tol`` (relative, absolute where the reference vanishes). The
    completed six-term sum and the omitted term are reported alongside.
    """
    pts = np.atleast_2d(np.asarray(samples, dtype=float))
    if pts.shape[0] < 1 or pts.size == 0:
        raise ValueError("formula_audit needs at least one sample point")
    tol = TOLERANCES.curvature(metric.derivative_mode) if tol is None else tol

    def one(p):
        jet = metric_jet(metric, p, cfg)
        terms = ricci_terms(jet)
        return (
            float(PRINTED_WEIGHTS @ terms),
            float(COMPLETE_WEIGHTS @ terms),
            float(-terms[5]),
            ricci_scalar_christoffel(jet),
        )

    rows = parallel_map(one, pts)
    direct = [r[0] for r in rows]
    completed = [r[1] for r in rows]
    missing = [r[2] for r in rows]
    ref = [r[3] for r in rows]
    rel_diff = _rel(direct, ref)
    return AuditReport(
        metric=metric.label,
        points=pts.tolist(),
        direct=direct,
        christoffel=ref,
        abs_diff=[abs(a - b) for a, b in zip(direct, ref)],
        rel_diff=rel_diff,
        passed=bool(max(rel_diff) <= tol),
        tolerance=tol,
        completed=completed,
        completed_rel_diff=_rel(completed, ref),
        missing_term=missing,
    )

