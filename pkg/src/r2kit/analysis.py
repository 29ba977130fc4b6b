"""Zero interlacing, Wronskian cross-checks and rational moments against explicit weights."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import quad

from .eigen import ZeroSet
from .perturbation import PerturbRule, perturb
from .poly import ComplexPoly, wronskian
from .recurrence import RIIParams, generate

__all__ = [
    "InterlaceReport",
    "MARGIN_TOL",
    "WeightSpec",
    "WronskianReport",
    "check_interlace",
    "orthogonality_suite",
    "rational_moment",
    "triple_interlace",
    "wronskian_cross_check",
]

MARGIN_TOL = 1e-10


def _real_sorted(z, name: str) -> np.ndarray:
    v = np.asarray(z.values if isinstance(z, ZeroSet) else z, dtype=complex)
    if np.any(np.abs(v.imag) > 1e-10):
        raise ValueError(f"{name}: zeros are not real")
    v = np.sort(v.real)
    return v


@dataclass
class InterlaceReport:
    """``status`` is ``pass``, ``fail`` or ``inconclusive`` (all gaps positive but some below ``MARGIN_TOL``)."""

    status: str
    first_violation: int | None
    witness: list
    margin: float

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return {"status": self.status, "first_violation": self.first_violation, "margin": self.margin,
                "witness": [[float(v), t] for v, t in self.witness]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _report(chain: list[tuple[float, str]], index_of: list[int]) -> InterlaceReport:
    """Strict increase along ``chain``; ``index_of[k]`` labels the link ``chain[k] < chain[k+1]``."""
    chain = [(float(v), t) for v, t in chain]
    gaps = [chain[k + 1][0] - chain[k][0] for k in range(len(chain) - 1)]
    margin = min(gaps) if gaps else math.inf
    for k, g in enumerate(gaps):
        if not g > 0:
            return InterlaceReport("fail", index_of[k], chain, margin)
    status = "inconclusive" if margin < MARGIN_TOL else "pass"
    return InterlaceReport(status, None, chain, margin)


def check_interlace(a, b, mode: str | None = None, tags: tuple[str, str] = ("a", "b")) -> InterlaceReport:
    """Strict alternation of two real zero sets.

    ``consecutive`` (``|a| = |b| + 1``): ``a_1 < b_1 < a_2 < ... < b_m < a_{m+1}``.
    ``cross`` (``|a| = |b|``): the merged order alternates, starting with either set.
    The violation index is the 1-based position of the first offending zero of ``a``.
    """
    x, y = _real_sorted(a, tags[0]), _real_sorted(b, tags[1])
    if mode is None:
        mode = "consecutive" if len(x) == len(y) + 1 else "cross"
    if mode == "consecutive":
        if len(x) != len(y) + 1:
            raise ValueError("consecutive mode needs |a| = |b| + 1")
        chain, idx = [], []
        for i in range(len(y)):
            chain += [(x[i], tags[0]), (y[i], tags[1])]
            idx += [i + 1, i + 2]
        chain.append((x[-1], tags[0]))
        return _report(chain, idx)
    if mode != "cross":
        raise ValueError("mode must be 'consecutive' or 'cross'")
    if len(x) != len(y):
        raise ValueError("cross mode needs |a| = |b|")
    if not len(x):
        return InterlaceReport("pass", None, [], math.inf)
    first, second = ((x, tags[0]), (y, tags[1])) if x[0] <= y[0] else ((y, tags[1]), (x, tags[0]))
    chain, idx = [], []
    for i in range(len(x)):
        chain += [(first[0][i], first[1]), (second[0][i], second[1])]
        idx += [i + 1, i + 2]
    return _report(chain, idx[:-1])


def triple_interlace(P_n, P_prev, L_n, alpha_sign) -> InterlaceReport:
    """Ordering of the zeros ``x^(n)`` of ``P_n``, ``x^(n-1)`` of ``P_{n-1}`` and ``y`` of ``L_n``.

    Positive perturbation: ``x_i^(n) < y_i < x_i^(n-1)`` for ``i = 1..n-1``.
    Negative perturbation: ``x_{i-1}^(n-1) < y_i < x_i^(n)`` for ``i = 2..n``.
    ``alpha_sign`` is ``'+'``, ``'-'`` or a sequence of perturbation constants
    whose signs must agree.
    """
    if not isinstance(alpha_sign, str):
        vals = np.real_if_close(np.asarray(alpha_sign, dtype=complex))
        if np.iscomplexobj(vals):
            raise ValueError("perturbation constants must be real")
        if np.all(vals > 0):
            alpha_sign = "+"
        elif np.all(vals < 0):
            alpha_sign = "-"
        else:
            raise ValueError("perturbation constants change sign")
    x, xp, y = _real_sorted(P_n, "P_n"), _real_sorted(P_prev, "P_prev"), _real_sorted(L_n, "L_n")
    n = len(x)
    if len(xp) != n - 1 or len(y) != n:
        raise ValueError("expected n, n-1 and n zeros")
    reports = []
    if alpha_sign == "+":
        for i in range(n - 1):
            reports.append((i + 1, _report([(x[i], "P_n"), (y[i], "L_n"), (xp[i], "P_prev")], [i + 1, i + 1])))
    elif alpha_sign == "-":
        for i in range(1, n):
            reports.append((i + 1, _report([(xp[i - 1], "P_prev"), (y[i], "L_n"), (x[i], "P_n")], [i + 1, i + 1])))
    else:
        raise ValueError("alpha_sign must be '+' or '-'")
    witness = sorted([(float(v), "P_n") for v in x] + [(float(v), "P_prev") for v in xp] + [(float(v), "L_n") for v in y])
    margin = min((r.margin for _, r in reports), default=math.inf)
    for i, r in reports:
        if r.status == "fail":
            return InterlaceReport("fail", i, witness, margin)
    return InterlaceReport("inconclusive" if margin < MARGIN_TOL else "pass", None, witness, margin)


@dataclass
class WronskianReport:
    residual: float
    no_common_zeros: bool
    min_cross_value: float

    def to_dict(self) -> dict:
        return {"residual": self.residual, "no_common_zeros": self.no_common_zeros,
                "min_cross_value": self.min_cross_value}


def wronskian_cross_check(L_n: ComplexPoly, T_n: ComplexPoly, alpha_n, beta_n, P_n: ComplexPoly,
                          P_prev: ComplexPoly, grid: np.ndarray | None = None,
                          zeros_L=None, zeros_T=None) -> WronskianReport:
    """``max |W(L_n, T_n) - (beta_n - alpha_n) W(P_{n-1}, P_n)|`` over a grid (64 points on [-2, 2]).

    When zero sets are supplied, also reports ``min(|T_n(y)|, |L_n(t)|)`` over
    the zeros ``y`` of ``L_n`` and ``t`` of ``T_n``.
    """
    if alpha_n == beta_n:
        raise ValueError("alpha_n = beta_n gives a vanishing Wronskian")
    grid = np.linspace(-2.0, 2.0, 64) if grid is None else np.asarray(grid)
    diff = wronskian(L_n, T_n) - wronskian(P_prev, P_n) * (beta_n - alpha_n)
    residual = float(np.max(np.abs(diff(grid))))
    cross = math.inf
    if zeros_L is not None and zeros_T is not None:
        zl = np.asarray(zeros_L.values if isinstance(zeros_L, ZeroSet) else zeros_L)
        zt = np.asarray(zeros_T.values if isinstance(zeros_T, ZeroSet) else zeros_T)
        cross = float(min(np.min(np.abs(T_n(zl))), np.min(np.abs(L_n(zt)))))
    return WronskianReport(residual, cross > 1e-8, cross)


# ---------------------------------------------------------------------------
# moments


@dataclass(frozen=True)
class WeightSpec:
    """Weight on the real line.

    ``gcrr``: ``exp(-2 theta arccot(x/w)) / (w^2 + x^2)^zeta`` with ``arccot`` in ``(0, pi)``,
    unnormalized; ``cauchy``: ``1/(pi(1+x^2))``; ``cauchy-squared``: ``4/(pi(1+x^2)^2)``.
    """

    kind: str = "gcrr"
    zeta: float = 1.0
    theta: float = 0.0
    omega: float = 1.0

    def __post_init__(self):
        if self.kind not in ("gcrr", "cauchy", "cauchy-squared"):
            raise ValueError(f"unknown weight {self.kind!r}")
        if self.kind == "gcrr" and not self.zeta > 0.5:
            raise ValueError("gcrr weight needs zeta > 1/2")
        if self.omega <= 0:
            raise ValueError("omega must be positive")

    @property
    def decay(self) -> float:
        """Exponent ``s`` with ``weight ~ |x|^-s`` at infinity."""
        return {"gcrr": 2 * self.zeta, "cauchy": 2.0, "cauchy-squared": 4.0}[self.kind]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "cauchy":
            return 1 / (np.pi * (1 + x**2))
        if self.kind == "cauchy-squared":
            return 4 / (np.pi * (1 + x**2) ** 2)
        w = self.omega
        acot = np.pi / 2 - np.arctan(x / w)
        return np.exp(-2 * self.theta * acot) / (w**2 + x**2) ** self.zeta


def rational_moment(weight: WeightSpec, p: ComplexPoly, k: int, n: int, omega: float | None = None,
                    epsabs: float = 1e-10) -> complex:
    """``int x^k p(x) / (x^2 + w^2)^n weight(x) dx`` over the real line.

    Integrated in ``u`` with ``x = w tan(u)`` on ``(-pi/2, pi/2)``; ``w`` defaults to
    the weight's ``omega``.
    """
    w = weight.omega if omega is None else omega
    if p.degree + k - 2 * n - weight.decay >= -1:
        raise ValueError("integrand is not integrable")
    pf = p.to_float()

    def f(u, part):
        x = w * math.tan(u)
        val = x**k * pf(x) / (x * x + w * w) ** n * float(weight(x)) * w / math.cos(u) ** 2
        return val.real if part == 0 else val.imag

    opts = dict(epsabs=epsabs, epsrel=0.0, limit=2**14)
    re = quad(f, -math.pi / 2, math.pi / 2, args=(0,), **opts)[0]
    im = quad(f, -math.pi / 2, math.pi / 2, args=(1,), **opts)[0] if np.any(pf.as_array().imag) else 0.0
    return complex(re, im)


def orthogonality_suite(weight: WeightSpec, params: RIIParams, rule: PerturbRule | None = None,
                        n_max: int = 5, tol: float = 1e-8, exploratory: bool = False) -> dict:
    """Moments ``|int x^k F_n / (x^2 + w^2)^n weight|`` for ``0 <= k < n <= n_max``.

    ``F`` is ``P`` (``rule`` None) or the perturbed ``L``.  In exploratory mode the
    denominator power ``n`` or ``n - 1`` and an optional conjugation of ``F_n`` are
    swept and magnitudes are reported without a verdict.
    """
    P = generate(params, n_max)
    F = P if rule is None else perturb(P, rule.alphas(params, n_max))
    w = float(params.omega)

    def table(power_shift: int, conj: bool):
        M = np.full((n_max + 1, n_max), np.nan)
        for n in range(1, n_max + 1):
            f = F[n]
            if conj:
                f = ComplexPoly(np.conj(f.to_float().as_array()))
            for k in range(n):
                try:
                    M[n, k] = abs(rational_moment(weight, f, k, n + power_shift, omega=w))
                except ValueError:
                    pass
        return M

    if not exploratory:
        M = table(0, False)
        worst = float(np.nanmax(M)) if n_max else 0.0
        return {"moments": M, "max": worst, "passed": worst < tol}
    sweeps = {f"power=n{'-1' if s else ''},conj={c}": table(-s, c) for s in (0, 1) for c in (False, True)}
    return {"sweeps": sweeps, "min_max": {k: float(np.nanmax(v)) for k, v in sweeps.items()}}
