import json
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from conftest import ALPHA, BETA, IHALF, KAPPA
from r2kit.checks import random_ledger_draw
from r2kit.perturbation import (
    AdmissibilityError, CoeffLedger, PerturbRule, alpha_condition1, alpha_quadratic, alpha_theorem25,
    check_condition2, closed_form_examples, kappa, ledger_general, ledger_residual, ledger_special, perturb,
    quadratic_discriminant, reduced_recurrence, verify_ledger_identity, zeta_from_discriminant,
)
from r2kit.poly import ComplexPoly, as_exact
from r2kit.recurrence import GCRRSpec, RIIParams, constant_params, gcrr_params, generate

Q = lambda a, b=1: as_exact(Fraction(a, b))  # noqa: E731

# printed constants of the constant-family example with kappa = 1/2
PRINTED = dict(e=(1, 4), f=(-1, 2), g=(1, 2), p=(1, 4), q=(-1, 2), r=(1, 4), s=(0, 1),
               t=(-1, 16), u=(1, 8), v=(-3, 16), w=(1, 8), z=(-1, 8))


def _const_exact_L(n):
    cp = constant_params(exact=True)
    alpha = KAPPA.alphas(cp, n)
    return cp, alpha, perturb(generate(cp, n), alpha)


# -- perturb -------------------------------------------------------------------

def test_perturb_example(const):
    L = perturb(generate(const, 2), KAPPA, const)
    assert L[2].max_abs_diff(ComplexPoly([-0.25, -0.5, 0.75])) < 1e-15
    assert L[0].max_abs_diff(ComplexPoly([1])) == 0


def test_perturb_initial_condition(scaled1):
    L = perturb(generate(scaled1, 1), ALPHA, scaled1)
    a1 = ALPHA.alphas(scaled1, 1)[1]
    rho0, c0 = scaled1.rho_at(0), scaled1.c_at(0)
    assert L[1].max_abs_diff(ComplexPoly([-rho0 * (a1 / rho0 + c0), rho0])) < 1e-15


def test_perturb_rejects_zero(const):
    with pytest.raises(ValueError):
        perturb(generate(const, 3), [0, 1, 0, 1])


def test_perturb_tiny_alpha_limit(const):
    P = generate(const, 6)
    L = perturb(P, [1e-14] * 7)
    assert max(a.max_abs_diff(b) for a, b in zip(L, P)) < 1e-13


# -- ledgers -------------------------------------------------------------------

def test_constant_ledger_vs_printed():
    cp, alpha, _ = _const_exact_L(3)
    led = ledger_special(cp, alpha, 1)
    mismatched = [k for k, v in PRINTED.items() if led.as_dict()[k] != Q(*v)]
    # the printed r = 1/4 disagrees with the general formula; every other constant agrees
    assert mismatched == ["r"]
    assert led.r == Q(1, 2)


def test_constant_ledger_r_from_identity():
    """Independent oracle: solve the identity for r with sympy, all other constants as printed."""
    x, r = sympy.symbols("x r")
    P = [sympy.Integer(1)]
    P.append(x)
    for _ in range(2):
        P.append(sympy.expand(x * P[-1] - sympy.Rational(1, 4) * (x**2 + 1) * P[-2]))
    L = [P[0]] + [sympy.expand(P[k] - P[k - 1] / 2) for k in range(1, 4)]
    c = {k: sympy.Rational(*v) for k, v in PRINTED.items()}
    A = c["e"] * x**2 + c["f"] * x + c["g"]
    B = c["p"] * x**3 + c["q"] * x**2 + r * x + c["s"]
    C = c["t"] * x**4 + c["u"] * x**3 + c["v"] * x**2 + c["w"] * x + c["z"]
    res = sympy.Poly(sympy.expand(A * L[2] - B * L[1] - C * L[0]), x)
    sol = sympy.solve(res.coeffs(), r)
    assert sol == {r: sympy.Rational(1, 2)}


@pytest.mark.parametrize("n", range(1, 12))
def test_constant_ledger_exact_zero(n):
    cp, alpha, L = _const_exact_L(12)
    assert ledger_residual(L, ledger_special(cp, alpha, n)).is_zero()


def test_printed_ledger_leaves_residual():
    cp, alpha, L = _const_exact_L(3)
    printed = CoeffLedger(1, **{k: Q(*v) for k, v in PRINTED.items()})
    assert not ledger_residual(L, printed).is_zero()


def test_ledger_random_draws():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(50):
        params, alpha = random_ledger_draw(rng)
        L = perturb(generate(params, 13), alpha)
        for n in range(1, 13):
            worst = max(worst, verify_ledger_identity(L, ledger_special(params, alpha, n)))
    assert worst < 1e-10


def test_ledger_invariants(scaled1):
    alpha = ALPHA.alphas(scaled1, 6)
    for n in range(1, 6):
        led = ledger_special(scaled1, alpha, n)
        assert led.e == scaled1.d_at(n - 1)
        assert led.f == -alpha[n - 1] * scaled1.rho_at(n - 1)
        assert led.t == pytest.approx(-scaled1.d_at(n) * scaled1.d_at(n - 1))


def test_ledger_g_specialization(const):
    alpha = [0.3, 0.3, 0.7, 0.2, 0.9]
    for n in range(1, 4):
        assert ledger_special(const, alpha, n).g == pytest.approx(0.25 + alpha[n - 1] * alpha[n])


def _general(exact, a, b):
    sp = constant_params(rho=Fraction(3, 2), c=Fraction(1, 3), d=Fraction(2, 7), omega=Fraction(5, 4), exact=exact)
    gp = RIIParams(rho=sp.rho, c=sp.c, d=sp.d, a=lambda k: a(k), b=lambda k: b(k), exact=exact)
    return sp, gp


def test_general_specializes_exactly():
    w = Fraction(5, 4)
    sp, gp = _general(True, lambda k: as_exact((0, w)), lambda k: as_exact((0, -w)))
    alpha = [Q(2, 3), Q(2, 3), Q(-5, 7), Q(1, 9), Q(4, 5), Q(3, 11)]
    for n in range(1, 5):
        assert ledger_general(gp, alpha, n).as_dict() == ledger_special(sp, alpha, n).as_dict()


@pytest.mark.parametrize("exact", [True, False])
def test_general_identity_arbitrary_quadratics(exact):
    conv = (lambda v: as_exact(v)) if exact else complex
    _, gp = _general(exact, lambda k: conv(Fraction(k + 1, 3)), lambda k: conv(Fraction(-2, k + 2)))
    alpha = [conv(Fraction(v)) for v in ("1/2", "1/2", "-3/4", "2/5", "7/3", "-1/6", "5/8")]
    L = perturb(generate(gp, 6), alpha)
    for n in range(1, 6):
        res = ledger_residual(L, ledger_general(gp, alpha, n))
        assert res.is_zero() if exact else res.max_abs_coeff() < 1e-12


def test_general_f_formula():
    _, gp = _general(False, lambda k: 0.3 + k, lambda k: -1.1 * k)
    alpha = [0.4] * 5
    for n in range(1, 4):
        led = ledger_general(gp, alpha, n)
        S = gp.a_at(n - 1) + gp.b_at(n - 1)
        assert led.f == pytest.approx(-gp.d_at(n - 1) * S - alpha[n - 1] * gp.rho_at(n - 1))


def test_general_zero_roots_kill_z():
    _, gp = _general(False, lambda k: 0, lambda k: 0)
    assert not ledger_general(gp, [0.4] * 5, 2).z


# -- alpha constructions ------------------------------------------------------

def test_condition1_fixed_point(const_exact):
    assert alpha_condition1(const_exact, Fraction(1, 2), 3) == Q(1, 2)


def test_condition1_scaled_matches_quadratic():
    sp = gcrr_params(GCRRSpec(1, 0, 1, scaled=True), exact=True)
    # rho_1 = 2/3 gives alpha_2 = (2/3)(1) - (1/12)/(1/4) = 1/3
    assert alpha_condition1(sp, Q(1, 4), 2) == Q(1, 3)
    rec = PerturbRule("condition1-recursion", seed=Fraction(1, 4)).alphas(sp, 12)
    assert rec == [Q(n, 2 * (n + 1)) for n in range(1, 2)] + [Q(n, 2 * (n + 1)) for n in range(1, 13)]


def test_condition2_examples(const):
    assert check_condition2(const, [0.5] * 4, 2)[0]
    assert not check_condition2(const, [0.5, 0.5, 0.501, 0.5], 2)[0]


@pytest.mark.parametrize("beta, sign", [(False, 1), (True, -1)])
def test_unique_sequences_exact(beta, sign):
    sp = gcrr_params(GCRRSpec(1, 0, 1, scaled=True), exact=True)
    for n in range(1, 16):
        assert not quadratic_discriminant(sp, n, beta)
        for branch in "+-":
            assert alpha_quadratic(sp, n, branch, beta) == Q(sign * n, 2 * (n + 1))


@pytest.mark.parametrize("rule", [ALPHA, BETA])
def test_unique_sequences_condition2(scaled1, rule):
    a = rule.alphas(scaled1, 16)
    assert max(check_condition2(scaled1, a, n)[1] for n in range(2, 17)) < 1e-14


def test_quadratic_root_satisfies_quadratic():
    p = gcrr_params(GCRRSpec(2.5, 0.4, 1.3, scaled=True))
    for n in range(1, 6):
        for br in "+-":
            x = alpha_quadratic(p, n, br)
            val = p.rho_at(n) * x * x - p.rho_at(n) * p.rho_at(n - 1) * (1 - p.c_at(n - 1)) * x \
                + 1.3**2 * p.d_at(n) * p.rho_at(n - 1)
            assert abs(val) < 1e-13


def test_zeta_from_discriminant():
    for n in range(1, 8):
        assert zeta_from_discriminant(n, 1.0) == [1.0]
    with pytest.raises(ValueError):
        zeta_from_discriminant(2, 0.9)
    for z in zeta_from_discriminant(2, 1.2):
        assert z > 0 and abs(z * z + (4 * (1 - 1.44) - 1) * z + (1 - 1.44) * 2) < 1e-12


def test_zeta_root_zeroes_discriminant():
    n, w = 3, 1.3
    for z in zeta_from_discriminant(n, w):
        p = gcrr_params(GCRRSpec(z, 0, w, scaled=True))
        disc = quadratic_discriminant(p, n)
        assert abs(disc) < 1e-12


def test_theorem25_fixed_point(const):
    assert alpha_theorem25(const, 0.5j, 2) == pytest.approx(0.5j)
    seq = IHALF.alphas(const, 10)
    assert all(abs(a - 0.5j) < 1e-15 for a in seq)
    assert max(check_condition2(const, seq, n)[1] for n in range(2, 11)) < 1e-15


def test_kappa():
    assert kappa(1.0, "+") == kappa(1.0, "-") == 0.5
    assert kappa(Fraction(1)) == Fraction(1, 2)
    k = kappa(1.5)
    assert isinstance(k, complex) and k.imag != 0
    assert kappa(0.6) == pytest.approx(0.9)


def test_rule_json_roundtrip():
    rules = [ALPHA, BETA, KAPPA, IHALF, PerturbRule("explicit-list", values=[Fraction(1, 3), 0.25, 1 + 2j]),
             PerturbRule("condition1-recursion", seed=Fraction(1, 4), branch="-")]
    for r in rules:
        back = PerturbRule.from_json(r.to_json())
        assert back == r
        assert json.loads(r.to_json())["variant"] == r.variant


def test_rule_validation():
    with pytest.raises(ValueError):
        PerturbRule("nope")
    with pytest.raises(ValueError):
        PerturbRule("quadratic-root", branch="x")
    with pytest.raises(ValueError):
        PerturbRule("explicit-list", values=[1]).alphas(constant_params(), 3)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=20).filter(bool), min_size=5, max_size=5))
def test_ledger_identity_property_exact(vals):
    cp = constant_params(rho=Fraction(5, 4), c=Fraction(-1, 3), d=Fraction(3, 10), omega=Fraction(2, 3), exact=True)
    alpha = [as_exact(v) for v in [vals[0]] + vals]
    L = perturb(generate(cp, 5), alpha)
    for n in range(1, 5):
        assert ledger_residual(L, ledger_special(cp, alpha, n)).is_zero()


# -- reductions ---------------------------------------------------------------

@pytest.mark.parametrize("params_fn, rule, mode", [
    (constant_params, KAPPA, "thm23"),
    (lambda: gcrr_params(GCRRSpec(1, 0, 1, scaled=True)), ALPHA, "thm23"),
    (lambda: gcrr_params(GCRRSpec(1, 0, 1, scaled=True)), BETA, "remark24"),
    (constant_params, IHALF, "thm25"),
])
def test_reduced_regenerates(params_fn, rule, mode):
    params = params_fn()
    alpha = rule.alphas(params, 17)
    L = perturb(generate(params, 16), alpha)
    G = generate(reduced_recurrence(params, alpha, mode, n=16), 16)
    assert max(a.max_abs_diff(b) for a, b in zip(G, L)) < 1e-10


def test_reduced_constant_example(const):
    red = reduced_recurrence(const, KAPPA.alphas(const, 9), "thm23", n=8)
    assert red.c_at(0) == pytest.approx(0.5)
    assert all(abs(red.c_at(k)) < 1e-15 for k in range(1, 8))


def test_reduced_remark24_initial(const):
    beta = [-0.5] * 10
    T = generate(reduced_recurrence(const, beta, "remark24", n=8), 8)
    assert T[1].max_abs_diff(ComplexPoly([0.5, 1])) < 1e-15
    assert T[2].max_abs_diff(ComplexPoly([-0.25, 0.5, 0.75])) < 1e-15


def test_reduced_rejects_inadmissible(const):
    with pytest.raises(AdmissibilityError) as err:
        reduced_recurrence(const, [0.5, 0.5, 0.3, 0.5, 0.5], "thm23")
    assert err.value.index >= 1


def test_reduced_rejects_bad_mode(const):
    with pytest.raises(ValueError):
        reduced_recurrence(const, [0.5] * 4, "thm99")


# -- closed forms -------------------------------------------------------------

@pytest.mark.parametrize("omega", [1.0, 0.6])
def test_closed_form_P(const, omega):
    p = constant_params(omega=omega)
    assert max(a.max_abs_diff(b) for a, b in zip(closed_form_examples(16, "P", omega), generate(p, 16))) < 1e-12


def test_closed_form_P_series(const):
    assert max(a.max_abs_diff(b) for a, b in zip(closed_form_examples(16, "P_series"), generate(const, 16))) < 1e-12


@pytest.mark.parametrize("omega", [1.0, 0.6])
def test_closed_form_L(omega):
    p = constant_params(omega=omega)
    L = perturb(generate(p, 16), [kappa(omega)] * 17)
    assert max(a.max_abs_diff(b) for a, b in zip(closed_form_examples(16, "L", omega), L)) < 1e-12


def test_closed_form_T(const):
    T = perturb(generate(const, 16), [-0.5] * 17)
    assert max(a.max_abs_diff(b) for a, b in zip(closed_form_examples(16, "T"), T)) < 1e-12


def test_closed_form_hand_values():
    L = closed_form_examples(2, "L")
    T = closed_form_examples(2, "T")
    assert L[2].max_abs_diff(ComplexPoly([-0.25, -0.5, 0.75])) < 1e-15
    assert T[2].max_abs_diff(ComplexPoly([-0.25, 0.5, 0.75])) < 1e-15
    assert L[0].max_abs_diff(ComplexPoly([1])) == 0


def test_thm25_printed_product_differs(const):
    """The printed product form for alpha = i/2 is not P_n - (i/2) P_{n-1}."""
    L = perturb(generate(const, 4), IHALF, const)
    printed = closed_form_examples(4, "L_thm25")
    assert printed[1].max_abs_diff(L[1]) > 0.1
    # the printed form always vanishes at -i; the true L_1 = x - i/2 does not
    assert abs(printed[3](-1j)) < 1e-15
    assert abs(L[1](-1j)) > 1
