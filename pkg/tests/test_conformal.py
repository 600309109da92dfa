from fractions import Fraction

import numpy as np
import pytest

from ordlab.catalog import euclidean, get_metric
from ordlab.conformal import (
    ConformalJet,
    NotConformallyFlatError,
    conformal_jet,
    conformal_ricci,
    solve_exponents,
    verify_two_solutions,
)
from ordlab.geometry import metric_jet, ricci_scalar_christoffel


def test_constant_determinant_has_no_curvature():
    jet = ConformalJet(np.zeros(3), 3, 2.0, np.zeros(3), np.zeros((3, 3)))
    assert conformal_ricci(jet) == 0.0


def test_stereo_sphere_origin():
    assert conformal_ricci(conformal_jet(get_metric("stereo-sphere:2:1"), [0.0, 0.0])) == pytest.approx(2.0, rel=1e-14)


@pytest.mark.parametrize("label", ["conf-gauss:3:0.25", "conf-gauss:5:0.1", "stereo-sphere:4:0.7", "conf-gauss:2:0.5"])
def test_matches_christoffel(label, rng):
    m = get_metric(label)
    for p in m.sample(5, rng):
        jet = metric_jet(m, p)
        assert conformal_ricci(ConformalJet.from_metric_jet(jet)) == pytest.approx(
            ricci_scalar_christoffel(jet), rel=1e-10
        )


def test_gaussian_factor_at_origin():
    # phi = exp(-|x|^2/4), i.e. g = exp(-|x|^2/2) I
    m = get_metric("conf-gauss:3:0.25")
    jet = metric_jet(m, np.zeros(3))
    assert conformal_ricci(ConformalJet.from_metric_jet(jet)) == pytest.approx(ricci_scalar_christoffel(jet), rel=1e-12)


def test_closed_form_exponents():
    sols = solve_exponents(3)
    assert [(s.alpha_tilde, s.beta_tilde, s.C) for s in sols] == [
        (0, 0, 0),
        (Fraction(-1, 6), Fraction(1, 12), Fraction(-1, 8)),
    ]
    assert solve_exponents(4)[1].as_floats() == (-0.25, 0.125, -1 / 6)
    assert solve_exponents(2)[1].as_floats() == (0.0, 0.0, 0.0)
    for n in range(2, 7):
        s = solve_exponents(n)[1]
        assert s.alpha_tilde + 2 * s.beta_tilde == 0
        # C as a function of beta on the admissible line
        assert s.C == -s.beta_tilde / (1 - Fraction(1, n))
    with pytest.raises(ValueError):
        solve_exponents(1)


def test_root_search_n3(rng):
    m = get_metric("conf-gauss:3:0.25")
    rep = verify_two_solutions(3, m, m.sample(5, rng))
    assert rep.drift_condition_checked
    assert rep.root_count == 2
    betas = sorted(r["beta"] for r in rep.roots)
    assert betas == pytest.approx([0.0, 1 / 12], abs=1e-10)
    assert rep.roots[-1]["fitted_C"] == pytest.approx(-1 / 8, abs=1e-8)


def test_root_search_n5(rng):
    m = get_metric("conf-gauss:5:0.1")
    rep = verify_two_solutions(5, m, m.sample(5, rng))
    assert sorted(r["beta"] for r in rep.roots) == pytest.approx([0.0, 0.15], abs=1e-10)
    assert rep.roots[-1]["fitted_C"] == pytest.approx(-3 / 16, abs=1e-8)


def test_root_search_n2_is_degenerate(rng):
    m = get_metric("stereo-sphere:2:1")
    rep = verify_two_solutions(2, m, m.sample(5, rng))
    assert rep.root_count == 2
    assert len(rep.roots) == 1 and rep.roots[0]["multiplicity"] == 2
    assert abs(rep.roots[0]["beta"]) < 1e-8


def test_root_search_rejects_bad_input(rng):
    m = get_metric("poly-square:3:1:0.3")
    with pytest.raises(NotConformallyFlatError):
        verify_two_solutions(3, m, m.sample(5, rng))
    with pytest.raises(ValueError):
        verify_two_solutions(3, euclidean(3), rng.random((5, 3)))
    with pytest.raises(ValueError):
        verify_two_solutions(4, get_metric("conf-gauss:3:0.25"), rng.random((5, 3)))
