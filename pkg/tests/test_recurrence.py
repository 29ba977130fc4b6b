from fractions import Fraction
from math import prod

import numpy as np
import pytest

from r2kit.poly import ComplexPoly, as_exact
from r2kit.recurrence import (
    DegreeCollapseError, GCRRSpec, HypothesisError, RIIParams, cf_convergent, cf_terminating_index,
    cf_value, constant_params, gcrr_params, generate, leading_coeffs, leading_law_deviation,
    minimal_params, rescale_check,
)

P2 = ComplexPoly([-0.25, 0, 0.75])


def test_unscaled_p2():
    assert generate(gcrr_params(GCRRSpec(1)), 2)[2].max_abs_diff(P2) < 1e-15


def test_unscaled_p2_exact():
    P = generate(gcrr_params(GCRRSpec(1), exact=True), 2)
    ref = ComplexPoly([as_exact(Fraction(-1, 4)), 0, as_exact(Fraction(3, 4))], exact=True)
    assert (P[2] - ref).is_zero()


def test_constant_family_closed_form(const):
    P = generate(const, 12)
    x = np.linspace(-3, 3, 31)
    for n, p in enumerate(P):
        ref = 1j * (((x - 1j) / 2) ** (n + 1) - ((x + 1j) / 2) ** (n + 1))
        np.testing.assert_allclose(p(x), ref, atol=1e-13)


def test_n0():
    P = generate(gcrr_params(GCRRSpec(2.5, 0.7)), 0)
    assert len(P) == 1 and P[0].max_abs_diff(ComplexPoly([1])) == 0


def test_scaled_params():
    p = gcrr_params(GCRRSpec(1, 0.3, scaled=True), exact=True)
    assert p.rho_at(1) == as_exact(Fraction(2, 3))
    assert p.d_at(1) == as_exact(Fraction(1, 12))
    assert p.c_at(0) == as_exact(Fraction(0.3))


@pytest.mark.parametrize("k", range(1, 8))
def test_unscaled_zeta1_d_is_quarter(k):
    assert gcrr_params(GCRRSpec(1), exact=True).d_at(k) == as_exact(Fraction(1, 4))


def test_theta_zero_centers():
    p = gcrr_params(GCRRSpec(2.5, 0, 1.5))
    assert all(p.c_at(k) == 0 for k in range(10))


@pytest.mark.parametrize("zeta", [1, 2.5])
@pytest.mark.parametrize("theta", [0, 0.7])
def test_rescale(zeta, theta):
    assert rescale_check(GCRRSpec(zeta, theta), 20) < 1e-12


def test_rescale_hand_value():
    # scaled P_2 at zeta = 1 is (3x^2 - 1)/12 = (1/3) (3x^2 - 1)/4
    P = generate(gcrr_params(GCRRSpec(1, scaled=True)), 2)
    assert P[2].max_abs_diff(P2 * (1 / 3)) < 1e-16


@pytest.mark.parametrize("zeta", [0.3, 1, 2.5])
@pytest.mark.parametrize("omega", [1, 1.7])
@pytest.mark.parametrize("scaled", [False, True])
def test_degree_exactness(zeta, omega, scaled):
    P = generate(gcrr_params(GCRRSpec(zeta, 0.4, omega, scaled)), 32)
    assert [p.degree for p in P] == list(range(33))


def test_degree_collapse_reported():
    params = constant_params(d=1.0)
    with pytest.raises(DegreeCollapseError) as err:
        generate(params, 3)
    assert err.value.index == 2


def test_minimal_params_constant():
    info = minimal_params([Fraction(1, 4)] * 10)
    assert info.valid and info.l[0] == 0
    assert info.l == [Fraction(n, 2 * (n + 1)) for n in range(11)]


def test_minimal_params_invalid():
    info = minimal_params([2.0])
    assert not info.valid and info.first_invalid == 1


def test_leading_coeffs_constant(const):
    k = leading_coeffs(const, 8)
    assert k[0] == k[1] == 1
    assert k[2] / k[1] == pytest.approx(0.75, abs=1e-15)
    assert k[8] == pytest.approx(prod(1 - j / (2 * (j + 1)) for j in range(1, 8)), rel=1e-14)


def test_leading_law(const):
    assert leading_law_deviation(const, 16) < 1e-12


def test_leading_law_hypotheses(scaled1):
    with pytest.raises(HypothesisError):
        leading_law_deviation(scaled1, 5)


def test_convergent_examples(const):
    assert cf_convergent(const, 1, 0.7)[1] == pytest.approx(0.7)
    assert cf_convergent(const, 2, 1.0)[1] == pytest.approx(0.5)
    assert cf_terminating_index(const, 1j, 5) == 1
    assert cf_terminating_index(const, 0.3, 5) is None


@pytest.mark.parametrize("params", [constant_params(), gcrr_params(GCRRSpec(2.5, 0.7, 1.3, True))])
def test_convergent_denominator_is_pn(params):
    rng = np.random.default_rng(7)
    P = generate(params, 10)
    for x in rng.uniform(-4, 4, 100):
        a, b = cf_convergent(params, 10, x)
        assert abs(b - P[10](x)) <= 1e-10 * abs(P[10](x))
        # backward evaluation of the same convergent
        assert abs(cf_value(params, 10, x) - a / b) <= 1e-9 * abs(a / b)


def test_general_form_matches_special(const):
    gen = RIIParams(rho=lambda k: 1.0, c=lambda k: 0.0, d=lambda k: 0.25, a=lambda k: 1j, b=lambda k: -1j)
    for p, q in zip(generate(gen, 8), generate(const, 8)):
        assert p.max_abs_diff(q) < 1e-15


def test_spec_validation():
    with pytest.raises(ValueError):
        GCRRSpec(-1)
    with pytest.raises(ValueError):
        GCRRSpec(1, 0, 0)
