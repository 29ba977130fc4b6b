"""Invariant suite run by ``r2kit verify``.

Each check returns a :class:`CheckResult` with the worst observed value and the
tolerance it was compared against.
"""

from __future__ import annotations

import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import analysis, biortho, eigen, hypergeom, pencil, perturbation, recurrence
from .perturbation import PerturbRule, perturb
from .recurrence import GCRRSpec, RIIParams, constant_params, gcrr_params, generate

__all__ = ["CheckResult", "CHECKS", "run_checks", "random_ledger_draw"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    tol: float
    seconds: float = 0.0
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        extra = f" ({self.detail})" if self.detail else ""
        return f"{tag} {self.name}: {self.value:.3e} (tol {self.tol:.0e}){extra}"


def _scaled_unique():
    return gcrr_params(GCRRSpec(1, 0, 1, scaled=True))


ALPHA = PerturbRule("quadratic-root")
BETA = PerturbRule("quadratic-root", beta=True)
KAPPA = PerturbRule("constant-kappa")
IHALF = PerturbRule("theorem25-recursion", seed=0.5j)


def _closed_form():
    dev = 0.0
    for z in (1, 2.5):
        for t in (0, 0.7):
            spec = GCRRSpec(z, t, 1)
            P = generate(gcrr_params(spec), 20)
            for n in range(21):
                dev = max(dev, hypergeom.gcrr_closed_form(spec, n).max_abs_diff(P[n]))
                dev = max(dev, hypergeom.qn_to_gcrr(z, t, 1, n).max_abs_diff(P[n]))
    return dev, 1e-12


def _ode():
    dev = max(hypergeom.ode_residual(GCRRSpec(z, t, 1), n).max_abs_coeff()
              for z in (1, 2.5) for t in (0, 0.7) for n in range(21))
    return dev, 1e-10


def _rescale():
    return max(recurrence.rescale_check(GCRRSpec(z, t, 1), 20) for z in (1, 2.5) for t in (0, 0.7)), 1e-12


def _degree():
    for z in (0.3, 1, 2.5):
        for w in (1, 1.5):
            for sc in (False, True):
                generate(gcrr_params(GCRRSpec(z, 0.4, w, sc)), 32)
    return 0.0, 0.0


def _leading():
    return recurrence.leading_law_deviation(constant_params(), 16), 1e-12


def _convergent(seed):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for params in (constant_params(), gcrr_params(GCRRSpec(2.5, 0.7, 1))):
        P = generate(params, 12)
        for x in rng.uniform(-3, 3, 100):
            _, b = recurrence.cf_convergent(params, 12, x)
            ref = P[12](x)
            worst = max(worst, abs(b - ref) / max(abs(ref), 1e-300))
    return worst, 1e-10


def random_ledger_draw(rng: np.random.Generator):
    """Random GCRR family and random real perturbation constants."""
    spec = GCRRSpec(float(rng.uniform(0.6, 3)), float(rng.uniform(-1, 1)), float(rng.uniform(0.5, 2)),
                    bool(rng.integers(2)))
    params = gcrr_params(spec)
    alpha = [float(a) for a in rng.uniform(0.1, 1, 14) * rng.choice([-1, 1], 14)]
    return params, alpha


def _ledger_random(seed):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(50):
        params, alpha = random_ledger_draw(rng)
        L = perturb(generate(params, 13), alpha)
        for n in range(1, 13):
            worst = max(worst, perturbation.verify_ledger_identity(L, perturbation.ledger_special(params, alpha, n)))
    return worst, 1e-10


def _ledger_exact():
    cp = constant_params(exact=True)
    alpha = KAPPA.alphas(cp, 12)
    L = perturb(generate(cp, 12), alpha)
    bad = sum(not perturbation.ledger_residual(L, perturbation.ledger_special(cp, alpha, n)).is_zero()
              for n in range(1, 12))
    return float(bad), 0.0


def _ledger_specialization():
    bad = 0
    for params in (constant_params(exact=True), gcrr_params(GCRRSpec(Fraction(3, 2), Fraction(1, 3), 2), exact=True)):
        gen = RIIParams(rho=params.rho, c=params.c, d=params.d, a=lambda k, w=params.omega: (0, w),
                        b=lambda k, w=params.omega: (0, -w), exact=True)
        alpha = [Fraction(k + 2, 3 * k + 5) for k in range(12)]
        alpha = [perturbation.as_exact(a) for a in alpha]
        for n in range(1, 10):
            a, b = perturbation.ledger_special(params, alpha, n), perturbation.ledger_general(gen, alpha, n)
            bad += sum(a.as_dict()[k] != b.as_dict()[k] for k in a.NAMES)
    return float(bad), 0.0


def _reductions():
    worst = 0.0
    for params, rule in ((constant_params(), KAPPA), (_scaled_unique(), ALPHA), (_scaled_unique(), BETA),
                         (constant_params(), PerturbRule("constant-kappa", branch="-")),
                         (_scaled_unique(), PerturbRule("condition1-recursion", seed=0.25)),
                         (constant_params(), IHALF)):
        alpha = rule.alphas(params, 16)
        L = perturb(generate(params, 16), alpha)
        R = generate(perturbation.reduced_recurrence(params, alpha, eigen.rule_mode(rule)), 16)
        worst = max(worst, max(R[k].max_abs_diff(L[k]) for k in range(17)))
    return worst, 1e-10


def _closed_examples():
    cp = constant_params()
    P = generate(cp, 16)
    worst = 0.0
    for which, alpha in (("P", None), ("P_series", None), ("L", 0.5), ("T", -0.5)):
        ref = P if alpha is None else perturb(P, [alpha] * 17)
        cf = perturbation.closed_form_examples(16, which)
        worst = max(worst, max(cf[k].max_abs_diff(ref[k]) for k in range(17)))
    return worst, 1e-12


def _quadratic_conditions():
    params = _scaled_unique()
    worst = 0.0
    for rule, mode in ((ALPHA, "thm23"), (BETA, "remark24")):
        alpha = rule.alphas(params, 16)
        for n in range(2, 17):
            worst = max(worst, abs(perturbation._mode_condition(params, alpha, n, mode)[1]),
                        perturbation.check_condition2(params, alpha, n)[1])
    return worst, 1e-12


def _unique_sequences():
    params = gcrr_params(GCRRSpec(1, 0, 1, scaled=True), exact=True)
    zeta_ok = all(hypergeom_zeta == [1.0] for hypergeom_zeta in
                  (perturbation.zeta_from_discriminant(n, 1.0) for n in range(1, 17)))
    a = ALPHA.alphas(params, 16)
    b = BETA.alphas(params, 16)
    c1 = PerturbRule("condition1-recursion", seed=Fraction(1, 4)).alphas(params, 16)
    exact = perturbation.as_exact
    bad = sum(a[n] != exact(Fraction(n, 2 * (n + 1))) or b[n] != exact(-Fraction(n, 2 * (n + 1))) or c1[n] != a[n]
              for n in range(1, 17))
    return float(bad + (not zeta_ok)), 0.0


def _kappa():
    k = [perturbation.kappa(1.0, s) for s in "+-"]
    kc = perturbation.kappa(1.5)
    ok = k == [0.5, 0.5] and isinstance(kc, complex) and kc.imag != 0
    return float(not ok), 0.0


def _spectral():
    worst = 0.0
    cases = ((constant_params(), None), (constant_params(), KAPPA), (_scaled_unique(), None),
             (_scaled_unique(), ALPHA), (_scaled_unique(), BETA))
    for params, rule in cases:
        for n in (1, 2, 3, 4, 8, 16, 24, 32):
            worst = max(worst, eigen.cross_check(params, rule, n))
    return worst, 1e-9


def _spectral_anchor():
    cp = constant_params()
    ev = eigen.generalized_eigs(pencil.build_pencil(cp, 2, KAPPA.alphas(cp, 2))).real
    ev2 = eigen.generalized_eigs(pencil.build_pencil(gcrr_params(GCRRSpec(1)), 2, kind="G")).real
    return max(np.max(np.abs(ev - [-1 / 3, 1])), np.max(np.abs(ev2 - [-3**-0.5, 3**-0.5]))), 1e-12


def _real_simple():
    worst_im, min_gap = 0.0, np.inf
    for params, rule in ((constant_params(), KAPPA), (_scaled_unique(), ALPHA), (_scaled_unique(), BETA)):
        alpha = rule.alphas(params, 32)
        for n in (4, 16, 32):
            for kind in ("G", "K"):
                pen = pencil.build_pencil(params, n, alpha, kind=kind, mode=eigen.rule_mode(rule))
                zs = eigen.generalized_eigs(pen)
                min_gap = min(min_gap, zs.min_gap)
                worst_im = max(worst_im, float(np.max(np.abs(zs.values.imag))))
                if float(np.max(zs.residuals)) > 1e-9:
                    return float(np.max(zs.residuals)), 1e-9
    return worst_im if min_gap > 1e-8 else np.inf, 1e-10


def _factorizations():
    worst = 0.0
    for params in (constant_params(), _scaled_unique(), gcrr_params(GCRRSpec(2.5, 0.7, 1, scaled=True))):
        for n in (1, 2, 5, 16, 32):
            pen = pencil.build_pencil(params, n, kind="G")
            f = pencil.factor_all(pen)
            r = f.residuals(pen.J())
            worst = max(worst, r["cholesky"], r["ul"], r["ldu"], r["pivot_consistency"] * 10)
    return worst, 1e-12


def _biortho():
    worst = 0.0
    for params, rule in ((constant_params(), KAPPA), (_scaled_unique(), ALPHA), (_scaled_unique(), BETA)):
        for n in (1, 2, 4, 7, 10):
            for dec in biortho.DECOMPOSITIONS:
                rep = biortho.gram_check(params, rule, n, dec)
                worst = max(worst, rep.max_offdiag, rep.max_diag_dev, rep.unfactored_offdiag * 10,
                            rep.unfactored_diag_rel * 10)
    return worst, 1e-8


def _cd_kernel(seed):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for params, rule in ((constant_params(), KAPPA), (_scaled_unique(), ALPHA)):
        for _ in range(100):
            x, y = rng.uniform(-3, 3, 2)
            worst = max(worst, biortho.cd_kernel(params, rule, 6, x, y))
    return worst, 1e-9


def _interlace_consecutive():
    bad = 0
    for params in (constant_params(), _scaled_unique()):
        P = generate(params, 32)
        Z = [None] + [eigen.poly_roots(P[n]) for n in range(1, 33)]
        bad += sum(not analysis.check_interlace(Z[n + 1], Z[n]).passed for n in range(1, 32))
    return float(bad), 0.0


def _figures():
    params = _scaled_unique()
    P = generate(params, 16)
    a, b = ALPHA.alphas(params, 16), BETA.alphas(params, 16)
    L, T = perturb(P, a), perturb(P, b)
    z = eigen.poly_roots
    bad = 0
    bad += not analysis.triple_interlace(z(P[8]), z(P[7]), z(L[8]), a[1:9]).passed
    bad += not analysis.triple_interlace(z(P[8]), z(P[7]), z(T[8]), b[1:9]).passed
    worst = 0.0
    for n in range(2, 17):
        bad += not analysis.check_interlace(z(L[n]), z(T[n]), "cross").passed
        rep = analysis.wronskian_cross_check(L[n], T[n], a[n], b[n], P[n], P[n - 1], zeros_L=z(L[n]), zeros_T=z(T[n]))
        bad += not rep.no_common_zeros
        worst = max(worst, rep.residual)
    return (worst if not bad else np.inf), 1e-10


def _moments():
    from .poly import ComplexPoly

    anchor = abs(analysis.rational_moment(analysis.WeightSpec("cauchy"), ComplexPoly([-0.25, 0, 0.75]), 0, 2))
    worst = anchor
    for theta in (0, 0.5):
        rep = analysis.orthogonality_suite(analysis.WeightSpec("gcrr", 1, theta, 1),
                                           gcrr_params(GCRRSpec(1, theta, 1)), n_max=5)
        worst = max(worst, rep["max"])
    rep = analysis.orthogonality_suite(analysis.WeightSpec("cauchy"), constant_params(), n_max=5)
    return max(worst, rep["max"]), 1e-8


CHECKS: dict[str, Callable] = {
    "hypergeom.closed_form_vs_recurrence": _closed_form,
    "hypergeom.ode_residual": _ode,
    "recurrence.rescale": _rescale,
    "recurrence.degree_exactness": _degree,
    "recurrence.leading_coefficient_law": _leading,
    "recurrence.convergent_denominators": _convergent,
    "perturbation.ledger_random": _ledger_random,
    "perturbation.ledger_exact": _ledger_exact,
    "perturbation.ledger_specialization": _ledger_specialization,
    "perturbation.reductions": _reductions,
    "perturbation.closed_forms": _closed_examples,
    "perturbation.quadratic_conditions": _quadratic_conditions,
    "perturbation.unique_sequences": _unique_sequences,
    "perturbation.kappa": _kappa,
    "eigen.cross_check": _spectral,
    "eigen.anchors": _spectral_anchor,
    "eigen.real_simple": _real_simple,
    "pencil.factorizations": _factorizations,
    "biortho.gram": _biortho,
    "biortho.cd_kernel": _cd_kernel,
    "analysis.interlace_consecutive": _interlace_consecutive,
    "analysis.figures_and_wronskian": _figures,
    "analysis.moments": _moments,
}

_SEEDED = {_convergent, _ledger_random, _cd_kernel}


def _run_one(name: str, seed: int) -> CheckResult:
    fn = CHECKS[name]
    t0 = time.perf_counter()
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            value, tol = fn(seed) if fn in _SEEDED else fn()
        value = float(value)
        passed = value <= tol if tol == 0 else value < tol
        detail = ""
    except Exception as exc:  # reported as a failed check
        value, tol, passed, detail = float("nan"), 0.0, False, f"{type(exc).__name__}: {exc}"
    return CheckResult(name, passed, value, tol, time.perf_counter() - t0, detail)


def run_checks(names=None, seed: int = 42, threads: int | None = None) -> list[CheckResult]:
    """Run the named checks (all by default) in a deterministic order."""
    names = list(CHECKS) if names is None else list(names)
    if threads is None:
        threads = int(os.environ.get("R2KIT_THREADS", "1") or 1)
    if threads <= 1:
        return [_run_one(n, seed) for n in names]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(lambda n: _run_one(n, seed), names))
