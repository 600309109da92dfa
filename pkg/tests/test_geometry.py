import json

import numpy as np
import pytest

from ordlab.catalog import euclidean, get_metric, spherical3
from ordlab.geometry import (
    DimensionMismatchError,
    MetricField,
    NotPositiveDefiniteError,
    formula_audit,
    metric_jet,
    ricci_scalar_christoffel,
    ricci_scalar_direct,
    ricci_terms,
)


def custom_metric():
    # off-diagonal test metric; curvature frozen from a sympy Christoffel computation
    def g(q):
        x, y, z = q
        return np.array([
            [1 + x * x / 2, y / 5, 0.0],
            [y / 5, 1 + z * z / 3, x * z / 7],
            [0.0, x * z / 7, 2 + np.sin(y)],
        ])

    return MetricField(3, g, label="custom")


SYMPY_R_CUSTOM = -0.31785599729844986094
SYMPY_R_CONF_GAUSS = 7.0257401623886295  # conf-gauss:3:0.25 at (0.3, -0.2, 0.5)


def test_flat_jet():
    jet = metric_jet(euclidean(4), [0.1, 0.2, 0.3, 0.4])
    np.testing.assert_array_equal(jet.g, np.eye(4))
    assert jet.det == 1.0
    assert not jet.dg.any() and not jet.d2g.any()


def test_spherical_jet_determinant():
    jet = metric_jet(spherical3(), [2.0, np.pi / 2, 0.0])
    assert jet.det == pytest.approx(16.0, rel=1e-14)
    np.testing.assert_allclose(jet.d_det, [32.0, 0.0, 0.0], atol=1e-12)


def test_stereo_sphere_at_origin():
    jet = metric_jet(get_metric("stereo-sphere:2:1"), [0.0, 0.0])
    np.testing.assert_allclose(jet.g, 4 * np.eye(2))
    assert jet.det == pytest.approx(16.0)


@pytest.mark.parametrize("numeric", [False, True])
def test_christoffel_matches_sympy_oracle(numeric):
    m = get_metric("conf-gauss:3:0.25")
    m = m.numeric() if numeric else m
    R = ricci_scalar_christoffel(metric_jet(m, [0.3, -0.2, 0.5]))
    assert R == pytest.approx(SYMPY_R_CONF_GAUSS, rel=1e-9 if not numeric else 1e-6)
    R = ricci_scalar_christoffel(metric_jet(custom_metric(), [0.3, -0.2, 0.5]))
    assert R == pytest.approx(SYMPY_R_CUSTOM, rel=1e-6)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("a", [1.0, 0.5])
def test_sphere_curvature(n, a, rng):
    m = get_metric(f"stereo-sphere:{n}:{a}")
    for p in m.sample(5, rng):
        jet = metric_jet(m, p)
        assert ricci_scalar_christoffel(jet) == pytest.approx(n * (n - 1) / a**2, rel=1e-9)
        assert ricci_scalar_direct(jet, complete=True) == pytest.approx(n * (n - 1) / a**2, rel=1e-9)


def test_flat_spherical_coordinates_have_zero_curvature(rng):
    m = spherical3()
    for p in m.sample(10, rng):
        assert abs(ricci_scalar_christoffel(metric_jet(m, p))) < 1e-12


def test_complete_direct_form_equals_christoffel_on_generic_metrics(rng):
    for m in (custom_metric(), get_metric("poly-square:3:2:0.3"), get_metric("poly-perturb:4:1:0.1")):
        for p in m.sample(4, rng) * 0.5:
            jet = metric_jet(m, p)
            R = ricci_scalar_christoffel(jet)
            tol = 1e-9 if m.derivative_mode == "analytic" else 1e-5
            assert ricci_scalar_direct(jet, complete=True) == pytest.approx(R, rel=tol, abs=tol)


def test_printed_form_misses_exactly_the_second_inverse_term(rng):
    m = get_metric("conf-gauss:3:0.25")
    for p in m.sample(5, rng):
        jet = metric_jet(m, p)
        gap = ricci_scalar_christoffel(jet) - ricci_scalar_direct(jet, complete=False)
        assert gap == pytest.approx(-ricci_terms(jet)[5], rel=1e-10)
        assert abs(gap) > 1e-3


def test_five_term_expression_is_off_on_the_sphere():
    jet = metric_jet(get_metric("stereo-sphere:2:1"), [0.0, 0.0])
    # at the origin of the unit chart the omitted term is -g^ab_,ab = -2
    assert ricci_scalar_direct(jet) == pytest.approx(4.0, rel=1e-12)
    assert ricci_scalar_direct(jet, complete=True) == pytest.approx(2.0, rel=1e-12)


def test_audit_report_roundtrip(rng):
    m = get_metric("stereo-sphere:2:1")
    rep = formula_audit(m, m.sample(5, rng), tol=1e-6)
    d = json.loads(rep.to_json())
    assert {"metric", "points", "direct", "christoffel", "abs_diff", "rel_diff", "pass", "completed",
            "completed_rel_diff", "completed_pass", "missing_term"} <= set(d)
    np.testing.assert_allclose(d["christoffel"], 2.0, rtol=1e-9)
    # the five-term values disagree and the report says so
    assert d["pass"] is False and min(d["abs_diff"]) > 0.1
    assert d["completed_pass"] is True
    np.testing.assert_allclose(np.add(d["direct"], d["missing_term"]), d["completed"], rtol=1e-12)


def test_audit_flat_and_generic(rng):
    rep = formula_audit(euclidean(3), rng.random((10, 3)))
    assert rep.passed and rep.direct == [0.0] * 10 and rep.christoffel == [0.0] * 10
    m = get_metric("poly-perturb:3:7:0.1")
    rep = formula_audit(m, m.sample(5, rng))
    assert len(rep.direct) == len(rep.christoffel) == 5
    assert not rep.passed and rep.completed_passed


def test_errors():
    with pytest.raises(DimensionMismatchError):
        metric_jet(euclidean(3), [0.0, 1.0])
    bad = MetricField(2, lambda x: np.diag([1.0, -1.0]))
    with pytest.raises(NotPositiveDefiniteError):
        metric_jet(bad, [0.0, 0.0])
    with pytest.raises(ValueError):
        MetricField(7, lambda x: np.eye(7))
    with pytest.raises(ValueError):
        formula_audit(euclidean(2), np.zeros((0, 2)))


def test_permuting_axes_of_diagonal_metric(rng):
    def diag_metric(perm):
        def g(q):
            x = q[np.argsort(perm)]
            return np.diag([1 + x[0] ** 2, np.exp(x[1] * x[0]), 2 + np.cos(x[2])])[np.ix_(perm, perm)]

        return MetricField(3, g)

    p = rng.random(3)
    base = ricci_scalar_christoffel(metric_jet(diag_metric(np.arange(3)), p))
    for perm in ([1, 0, 2], [2, 0, 1], [2, 1, 0]):
        perm = np.array(perm)
        R = ricci_scalar_christoffel(metric_jet(diag_metric(perm), p[perm]))
        assert R == pytest.approx(base, rel=1e-7, abs=1e-9)
