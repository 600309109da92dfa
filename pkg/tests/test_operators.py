import json

import numpy as np
import pytest

from ordlab.catalog import euclidean, get_metric, spherical3
from ordlab.geometry import metric_jet
from ordlab.operators import (
    OperatorSpec,
    ScalarField,
    apply_operator,
    build_operator,
    conformal_coupling,
    effective_potential,
    effective_potential_batch,
    fit_constant,
    oscillator_ordering,
    reports_to_csv,
    similarity_ordering,
)

SPECS = [
    OperatorSpec.naive(),
    OperatorSpec.laplace_beltrami(),
    OperatorSpec.conformal_lb(),
    OperatorSpec.power(-1 / 6, 1 / 12),
    OperatorSpec.power(0.2, 0.3),
]


def test_flat_laplacian_sign():
    op = build_operator(OperatorSpec.laplace_beltrami(), euclidean(2))
    psi = ScalarField.from_expression("x0**2 + x1**2", 2)
    for p in ([0.0, 0.0], [1.5, -2.0]):
        assert apply_operator(op, psi, p) == pytest.approx(-4.0, abs=1e-12)
        assert apply_operator(op, psi, p, method="nested") == pytest.approx(-4.0, abs=1e-6)


def test_naive_on_spherical_coordinates():
    op = build_operator(OperatorSpec.naive(), spherical3())
    psi = ScalarField.from_expression("x0**2", 3)
    assert apply_operator(op, psi, [1.0, np.pi / 2, 0.0]) == pytest.approx(-2.0, abs=1e-12)
    assert apply_operator(op, psi, [1.0, np.pi / 2, 0.0], method="nested") == pytest.approx(-2.0, abs=1e-6)


@pytest.mark.parametrize("label", ["conf-gauss:3:0.25", "poly-square:3:2:0.3", "spherical3"])
def test_lb_annihilates_constants(label, rng):
    m = get_metric(label)
    op = build_operator(OperatorSpec.laplace_beltrami(), m)
    one = ScalarField.constant(m.dimension)
    for p in m.sample(3, rng):
        assert abs(apply_operator(op, one, p)) < 1e-12
        assert abs(apply_operator(op, one, p, method="nested")) < 1e-6


def test_conformal_operator_on_flat_space_is_lb(rng):
    m = euclidean(3)
    psi = ScalarField.from_expression("sin(x0)*exp(x1) + x2**3", 3)
    a, b = build_operator(OperatorSpec.conformal_lb(), m), build_operator(OperatorSpec.laplace_beltrami(), m)
    for p in rng.random((3, 3)):
        assert apply_operator(a, psi, p) == pytest.approx(apply_operator(b, psi, p), abs=1e-12)


def test_power_ordering_at_conformal_root():
    # R frozen from sympy for this metric and point; op(1) = R/8 in the -Laplacian convention
    m = get_metric("conf-gauss:3:0.25").numeric()
    op = build_operator(OperatorSpec.power(-1 / 6, 1 / 12), m)
    val = apply_operator(op, ScalarField.constant(3), [0.3, -0.2, 0.5], method="nested")
    assert val == pytest.approx(7.0257401623886295 / 8, rel=1e-4)


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.kind)
def test_nested_and_coefficient_routes_agree(spec, rng):
    m = get_metric("stereo-sphere:3:1")
    op = build_operator(spec, m)
    psi = ScalarField.from_expression("exp(0.3*x0) * cos(x1) + x2**2", 3)
    for p in m.sample(3, rng):
        a = apply_operator(op, psi, p, method="coefficients")
        b = apply_operator(op, psi.numeric(), p, method="nested")
        assert b == pytest.approx(a, rel=1e-6, abs=1e-6)


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.kind)
def test_linearity(spec):
    m = get_metric("poly-square:3:1:0.3")
    op = build_operator(spec, m)
    f = ScalarField.from_expression("x0*x1 + sin(x2)", 3)
    g = ScalarField.from_expression("exp(x0 - x1)", 3)
    h = ScalarField.from_expression("2.5*(x0*x1 + sin(x2)) - 0.75*exp(x0 - x1)", 3)
    p = [0.1, -0.3, 0.2]
    lhs = apply_operator(op, h, p)
    rhs = 2.5 * apply_operator(op, f, p) - 0.75 * apply_operator(op, g, p)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_zero_exponents_give_lb(rng):
    m = get_metric("poly-square:4:3:0.3")
    psi = ScalarField.from_expression("x0*x3 + cos(x1 + x2)", 4)
    a, b = build_operator(OperatorSpec.power(0, 0), m), build_operator(OperatorSpec.laplace_beltrami(), m)
    for p in m.sample(3, rng):
        assert apply_operator(a, psi, p) == pytest.approx(apply_operator(b, psi, p), abs=1e-12)


def test_lb_is_coordinate_invariant():
    cart = ScalarField.from_expression("x0**2 + x1*x2 + sin(x0)", 3)
    sph = ScalarField.from_expression(
        "(x0*sin(x1)*cos(x2))**2 + x0**2*sin(x1)*sin(x2)*cos(x1) + sin(x0*sin(x1)*cos(x2))", 3
    )
    r, th, ph = 1.3, 0.9, 0.4
    x = [r * np.sin(th) * np.cos(ph), r * np.sin(th) * np.sin(ph), r * np.cos(th)]
    lb = OperatorSpec.laplace_beltrami()
    a = apply_operator(build_operator(lb, euclidean(3)), cart, x)
    b = apply_operator(build_operator(lb, spherical3()), sph, [r, th, ph])
    assert b == pytest.approx(a, rel=1e-12)


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.kind)
def test_all_orderings_share_the_principal_symbol(spec, rng):
    m = get_metric("poly-square:3:2:0.3")
    p = np.array([0.2, -0.1, 0.3])
    jet = metric_jet(m, p)
    naive = build_operator(OperatorSpec.naive(), m)
    op = build_operator(spec, m)
    d = rng.normal(size=3)
    d /= np.linalg.norm(d)
    scales = np.array([1.0, 2.0, 4.0])
    diffs = []
    for s in scales:
        k = s * d
        psi = ScalarField(3, lambda q, k=k: np.exp(k @ q), lambda q, k=k: k * np.exp(k @ q),
                          lambda q, k=k: np.outer(k, k) * np.exp(k @ q))
        diffs.append((apply_operator(op, psi, p, jet=jet) - apply_operator(naive, psi, p, jet=jet)) / np.exp(k @ p))
    quad = np.polyfit(scales, diffs, 2)[0]
    assert abs(quad) < 1e-9


def test_effective_potential_of_lb_vanishes(rng):
    m = get_metric("poly-square:3:1:0.3")
    for p in m.sample(3, rng):
        rep = effective_potential(OperatorSpec.laplace_beltrami(), m, p)
        assert rep.V_eff == 0.0 and not np.any(rep.drift)


def test_conformal_operator_potential_sign(rng):
    # kinetic-form convention: V_eff = -(1/8) R = -0.75 on the unit 3-sphere
    m = get_metric("stereo-sphere:3:1")
    for p in m.sample(3, rng):
        rep = effective_potential(OperatorSpec.conformal_lb(), m, p)
        assert rep.V_eff == pytest.approx(-0.75, rel=1e-10)
        assert rep.fitted_C == pytest.approx(-conformal_coupling(3), rel=1e-10)
        assert np.max(np.abs(rep.drift)) < 1e-10


def test_off_line_exponents_produce_drift(rng):
    m = get_metric("conf-gauss:3:0.25")
    for p in m.sample(3, rng):
        rep = effective_potential(OperatorSpec.power(0.3, 0.1), m, p)
        assert np.max(np.abs(rep.drift)) > 1e-3


def test_batch_fit_and_csv(rng):
    m = get_metric("conf-gauss:4:0.25")
    reps = effective_potential_batch(OperatorSpec.power(-0.25, 0.125), m, m.sample(6, rng))
    C, resid = fit_constant(reps)
    assert C == pytest.approx(-1 / 6, rel=1e-10)
    assert resid < 1e-9
    lines = reports_to_csv(reps).splitlines()
    assert lines[0].split(",")[:5] == ["point_0", "point_1", "point_2", "point_3", "V_eff"]
    assert len(lines) == 7


def test_fit_on_flat_space_is_undefined():
    reps = effective_potential_batch(OperatorSpec.naive(), euclidean(2), np.zeros((3, 2)))
    assert all(not r.defined for r in reps)
    with pytest.raises(ValueError):
        fit_constant(reps)


def test_oscillator_ordering():
    op = build_operator(oscillator_ordering(1.0), euclidean(1))
    one = ScalarField.constant(1)
    h = ScalarField.from_expression("exp(-x0**2/2)", 1)
    assert 0.5 * apply_operator(op, one, [1.0]) == pytest.approx(1.0, abs=1e-12)
    assert 0.5 * apply_operator(op, h, [0.7]) == pytest.approx(h([0.7]), abs=1e-12)


def test_trivial_similarity_ordering_is_free_particle():
    one = ScalarField.constant(1)
    op = build_operator(similarity_ordering(one, one), euclidean(1))
    psi = ScalarField.from_expression("sin(2*x0)", 1)
    assert apply_operator(op, psi, [0.3]) == pytest.approx(4 * np.sin(0.6), abs=1e-12)


def test_spec_serialization_roundtrip():
    for spec in SPECS + [oscillator_ordering(2.0)]:
        back = OperatorSpec.from_json(spec.to_json(), dimension=1)
        assert back.to_dict() == spec.to_dict()
        json.loads(spec.to_json())


def test_invalid_inputs():
    with pytest.raises(ValueError):
        build_operator(OperatorSpec.conformal_lb(), euclidean(1))
    with pytest.raises(ValueError):
        OperatorSpec.from_dict({"kind": "Weyl", "params": {}})
    op = build_operator(OperatorSpec.naive(), euclidean(2))
    with pytest.raises(ValueError):
        apply_operator(op, ScalarField.constant(2), [0.0, 0.0], method="magic")
