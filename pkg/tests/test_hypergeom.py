import numpy as np
import pytest
import sympy
from scipy.special import hyp2f1, poch

from r2kit.hypergeom import (
    HypSeriesError, gcrr_closed_form, hyp2f1_terminating, ode_residual, pochhammer, qn_closed_form, qn_to_gcrr,
)
from r2kit.poly import ComplexPoly
from r2kit.recurrence import GCRRSpec, gcrr_params, generate

P2 = ComplexPoly([-0.25, 0, 0.75])


def test_pochhammer_examples():
    assert pochhammer(1, 2) == 2 and pochhammer(2, 2) == 6
    assert pochhammer(3.3, 0) == 1
    assert pochhammer(-3, 5) == 0


@pytest.mark.parametrize("a", [0.5, 1.7, -2.5, 4])
@pytest.mark.parametrize("n", range(6))
def test_pochhammer_vs_scipy(a, n):
    assert pochhammer(a, n) == pytest.approx(poch(a, n), rel=1e-13, abs=1e-300)


def test_hyp2f1_examples():
    assert hyp2f1_terminating(0, 2.0, 3.0, 0.4) == 1
    assert hyp2f1_terminating(1, 2.0, 3.0, 0.4) == pytest.approx(1 - 2 / 3 * 0.4)
    z = 0.3 - 0.2j
    assert hyp2f1_terminating(2, 1.5, 1.5, z) == pytest.approx((1 - z) ** 2)


@pytest.mark.parametrize("n", [1, 3, 6, 10])
@pytest.mark.parametrize("b, c", [(0.5, 1.5), (2.0, -0.5), (-3.2, 4.1)])
@pytest.mark.parametrize("z", [0.3, -1.7, 0.2 + 0.9j])
def test_hyp2f1_vs_scipy(n, b, c, z):
    assert hyp2f1_terminating(n, b, c, z) == pytest.approx(complex(hyp2f1(-n, b, c, z)), rel=1e-12, abs=1e-12)


def test_hyp2f1_complex_params_vs_sympy():
    b, c, z = 1.2 + 0.7j, 2.4, 0.3 - 0.5j
    ref = complex(sympy.hyper([-5, b], [c], z).evalf(30))
    assert hyp2f1_terminating(5, b, c, z) == pytest.approx(ref, rel=1e-13)


def test_hyp2f1_pole():
    with pytest.raises(HypSeriesError):
        hyp2f1_terminating(3, 1.0, -1.0, 0.5)


@pytest.mark.parametrize("n, expected", [(0, ComplexPoly([1])), (1, ComplexPoly([0, 1])), (2, P2)])
def test_gcrr_closed_form_examples(n, expected):
    assert gcrr_closed_form(GCRRSpec(1), n).max_abs_diff(expected) < 1e-15


@pytest.mark.parametrize("zeta", [1, 2.5])
@pytest.mark.parametrize("theta", [0, 0.7])
def test_gcrr_closed_form_vs_recurrence(zeta, theta):
    spec = GCRRSpec(zeta, theta)
    P = generate(gcrr_params(spec), 20)
    for n in range(21):
        cf = gcrr_closed_form(spec, n)
        assert cf.max_abs_diff(P[n]) < 1e-12
        assert cf.max_imag() < 1e-12


def test_closed_form_restricted_to_unit_omega():
    with pytest.raises(ValueError):
        gcrr_closed_form(GCRRSpec(1, 0, 1.5), 2)


def test_qn_examples():
    assert qn_closed_form(0, 0, 1, 0).max_abs_diff(ComplexPoly([1])) == 0
    assert qn_closed_form(0, 0, 1, 1).max_abs_diff(ComplexPoly([0, -2])) < 1e-15
    assert qn_to_gcrr(1, 0, 1, 2).max_abs_diff(P2) < 1e-15


@pytest.mark.parametrize("zeta", [1, 2.5])
@pytest.mark.parametrize("theta", [0, 0.7])
def test_qn_relation_vs_recurrence(zeta, theta):
    P = generate(gcrr_params(GCRRSpec(zeta, theta)), 20)
    for n in range(21):
        assert qn_to_gcrr(zeta, theta, 1, n).max_abs_diff(P[n]) < 1e-12


def test_float_summation_agrees_loosely():
    spec = GCRRSpec(2.5, 0.7)
    exact = gcrr_closed_form(spec, 12)
    assert gcrr_closed_form(spec, 12, exact=False).max_abs_diff(exact) < 1e-10


def test_ode_examples():
    assert ode_residual(GCRRSpec(1), 0).is_zero()
    assert ode_residual(GCRRSpec(1), 1, ComplexPoly([0, 1])).max_abs_coeff() == 0
    assert ode_residual(GCRRSpec(1), 2).max_abs_coeff() < 1e-12


@pytest.mark.parametrize("zeta", [1, 2.5])
@pytest.mark.parametrize("theta", [0, 0.7])
def test_ode_grid(zeta, theta):
    for n in range(21):
        assert ode_residual(GCRRSpec(zeta, theta), n).max_abs_coeff() < 1e-10


def test_ode_detects_wrong_polynomial():
    assert ode_residual(GCRRSpec(1), 2, P2 + ComplexPoly([0, 0.1])).max_abs_coeff() > 1e-3
