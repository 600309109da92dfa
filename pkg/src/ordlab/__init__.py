"""Numerical checks of factor orderings of the kinetic term g^ab p_a p_b."""

__version__ = "0.1.0"

from .numdiff import DiffConfig
from .geometry import (
    MetricField,
    MetricJet,
    metric_jet,
    ricci_scalar_christoffel,
    ricci_scalar_direct,
    formula_audit,
)
from .catalog import euclidean, get_metric, metric_family, spherical3
from .operators import (
    OperatorSpec,
    ScalarField,
    build_operator,
    apply_operator,
    effective_potential,
    effective_potential_batch,
    fit_constant,
    oscillator_ordering,
    similarity_ordering,
)
from .conformal import conformal_ricci, solve_exponents, verify_two_solutions
from .hydrogen import (
    QuantumNumbers,
    eigenfunction_residual,
    naive_energy,
    numeric_energy,
    spectrum_table,
    standard_energy,
)
from .basis import curvature_term_vector, independence_rank, rank_report, verify_matrix_identities

__all__ = [
    "DiffConfig",
    "MetricField",
    "MetricJet",
    "metric_jet",
    "ricci_scalar_christoffel",
    "ricci_scalar_direct",
    "formula_audit",
    "euclidean",
    "spherical3",
    "get_metric",
    "metric_family",
    "OperatorSpec",
    "ScalarField",
    "build_operator",
    "apply_operator",
    "effective_potential",
    "effective_potential_batch",
    "fit_constant",
    "oscillator_ordering",
    "similarity_ordering",
    "conformal_ricci",
    "solve_exponents",
    "verify_two_solutions",
    "QuantumNumbers",
    "eigenfunction_residual",
    "naive_energy",
    "numeric_energy",
    "spectrum_table",
    "standard_energy",
    "curvature_term_vector",
    "independence_rank",
    "rank_report",
    "verify_matrix_identities",
]
