"""The seven scalar terms that a determinant- and metric-power ordering can
produce in its potential: the six monomials of the curvature expression plus
the obstruction g^ab_,b g_ac g^cl_,l. Also numeric checks of the contraction
identities used to build such orderings."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .config import TOLERANCES, parallel_map
from .geometry import COMPLETE_WEIGHTS, PRINTED_WEIGHTS, MetricJet, metric_jet, ricci_terms
from .numdiff import DiffConfig

__all__ = [
    "TermVector",
    "curvature_term_vector",
    "obstruction_term",
    "term_matrix",
    "RankReport",
    "rank_report",
    "independence_rank",
    "IdentityReport",
    "verify_matrix_identities",
]


@dataclass
class TermVector:
    point: np.ndarray
    t: np.ndarray

    def ricci(self, complete: bool = False) -> float:
        """Weighted sum of the first six terms, matching
        :func:`ricci_scalar_direct` for the same ``complete`` flag."""
        w = COMPLETE_WEIGHTS if complete else PRINTED_WEIGHTS
        return float(w @ self.t[:6])


def obstruction_term(jet: MetricJet) -> float:
    return float(np.einsum("abb,ac,cll", jet.d_ginv, jet.g, jet.d_ginv))


def curvature_term_vector(jet: MetricJet) -> TermVector:
    return TermVector(jet.point, np.append(ricci_terms(jet), obstruction_term(jet)))


def term_matrix(metrics, points_per_metric: int, cfg: DiffConfig | None = None, seed: int = 0) -> np.ndarray:
    """Term vectors stacked row-wise, points drawn from each metric's domain."""
    rng = np.random.default_rng(seed)
    jobs = [(m, p) for m in metrics for p in m.sample(points_per_metric, rng)]
    rows = parallel_map(lambda job: curvature_term_vector(metric_jet(job[0], job[1], cfg)).t, jobs)
    return np.array(rows).reshape(len(jobs), 7)


@dataclass
class RankReport:
    rank: int
    singular_values: list
    condition: float
    samples: int
    metrics: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "singular_values": self.singular_values,
            "condition": self.condition,
            "samples": self.samples,
            "metrics": self.metrics,
        }


def rank_report(metrics, points_per_metric: int, cfg=None, seed: int = 0, cutoff: float | None = None) -> RankReport:
    T = term_matrix(metrics, points_per_metric, cfg, seed)
    if T.shape[0] < 7:
        raise ValueError(f"need at least 7 samples, got {T.shape[0]}")
    cutoff = TOLERANCES.rank_cutoff if cutoff is None else cutoff
    # columns differ in scale by orders of magnitude; compare directions only
    norms = np.linalg.norm(T, axis=0)
    scale = norms.max() if norms.size else 0.0
    live = norms > 1e-14 * max(scale, 1e-300)
    Tn = np.zeros_like(T)
    Tn[:, live] = T[:, live] / norms[live]
    sv = np.linalg.svd(Tn, compute_uv=False)
    if scale == 0 or sv[0] == 0:
        return RankReport(0, sv.tolist(), math.inf, T.shape[0], [m.label for m in metrics])
    rank = int(np.sum(sv > cutoff * sv[0]))
    cond = float(sv[0] / sv[rank - 1]) if rank else math.inf
    return RankReport(rank, sv.tolist(), cond, T.shape[0], [m.label for m in metrics])


def independence_rank(metric_family, points_per_metric: int, cfg=None, seed: int = 0) -> int:
    """Numerical rank of the stacked seven-term vectors."""
    if isinstance(metric_family, str):
        from .catalog import metric_family as expand

        metric_family = expand(metric_family)
    return rank_report(metric_family, points_per_metric, cfg, seed).rank


@dataclass
class IdentityReport:
    metric: str
    point: list
    chain: dict
    determinant: float
    trace_power: dict
    max_deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "point": self.point,
            "chain": self.chain,
            "determinant": self.determinant,
            "trace_power": self.trace_power,
            "max_deviation": self.max_deviation,
            "pass": self.passed,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _permutations(n: int):
    perms = np.array(list(itertools.permutations(range(n))))
    # parity from inversion count
    inv = np.array([sum(p[i] > p[j] for i in range(n) for j in range(i + 1, n)) for p in perms])
    return perms, np.where(inv % 2 == 0, 1.0, -1.0)


def verify_matrix_identities(
    jet: MetricJet,
    chain_lengths=(1, 2, 3, 4),
    trace_powers=((1, 1), (1, 2), (2, 2)),
    label: str = "",
) -> IdentityReport:
    """Deviations of three exact contraction identities at a jet.

    chain: L lowered metrics followed by L raised ones contract to the
    Kronecker delta, as do L alternating pairs (max-abs deviation).
    determinant: eps eps g...g / (n! det g) = 1, summed over all permutation
    pairs (absolute deviation from 1).
    trace_power: (g_ab g^ab)^(q1 + q2) = n^(q1 + q2) (relative deviation).
    """
    g, gi, n = jet.g, jet.g_inv, jet.n
    eye = np.eye(n)
    chain = {}
    for L in chain_lengths:
        if not 1 <= L <= 4:
            raise ValueError("chain lengths must be in 1..4")
        grouped = np.linalg.matrix_power(g, L) @ np.linalg.matrix_power(gi, L)
        alternating = np.linalg.matrix_power(g @ gi, L)
        chain[str(L)] = float(max(np.abs(grouped - eye).max(), np.abs(alternating - eye).max()))

    perms, signs = _permutations(n)
    # for each pair of permutations, prod_k g[s(k), t(k)]
    prods = np.prod(g[perms[:, None, :], perms[None, :, :]], axis=-1)
    full = signs @ prods @ signs
    det_dev = float(abs(full / (math.factorial(n) * jet.det) - 1.0))

    contraction = float(np.einsum("ab,ab", g, gi))
    tp = {}
    for q1, q2 in trace_powers:
        q = q1 + q2
        tp[f"{q1},{q2}"] = float(abs(contraction**q - n**q) / n**q)

    worst = max([*chain.values(), det_dev, *tp.values()])
    return IdentityReport(
        metric=label,
        point=np.asarray(jet.point).tolist(),
        chain=chain,
        determinant=det_dev,
        trace_power=tp,
        max_deviation=float(worst),
        tolerance=TOLERANCES.matrix_identity,
    )
