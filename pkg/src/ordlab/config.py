"""Tolerances shared by the library checks and the test-suite."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class Tolerances:
    # linear-algebra identities on a jet (g g^-1 = I and friends)
    lin_analytic: float = 1e-10
    lin_numeric: float = 1e-7
    # curvature comparisons, relative
    curvature_analytic: float = 1e-9
    curvature_numeric: float = 1e-5
    # operator-level comparisons with nested differentiation, relative
    operator_numeric: float = 1e-4
    # |R| below this is treated as zero when forming V/R
    ricci_floor: float = 1e-8
    # relative singular-value cutoff for numerical rank
    rank_cutoff: float = 1e-8
    matrix_identity: float = 1e-12

    def lin(self, mode: str) -> float:
        return self.lin_analytic if mode == "analytic" else self.lin_numeric

    def curvature(self, mode: str) -> float:
        return self.curvature_analytic if mode == "analytic" else self.curvature_numeric

    def to_dict(self) -> dict:
        return asdict(self)


TOLERANCES = Tolerances()

# outer step multiplier for nested (operator-level) differentiation
NESTED_STEP_FACTOR = 8.0


def thread_count() -> int:
    """Worker cap from ``ORDLAB_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("ORDLAB_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn, items):
    """Order-preserving map, threaded when ``ORDLAB_THREADS`` > 1."""
    items = list(items)
    workers = thread_count()
    if workers == 1 or len(items) < 2:
        return [fn(it) for it in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
