"""Rational eigenvector components and the biorthogonality relations on the zeros of ``L_n``.

For a zero ``x_k`` of ``L_n`` the vector ``u^R(x_k) = (u_0^R, ..., u_{n-1}^R)`` with::

    u_k^R(x) = (-1)^k L_k(x) / ((x - i w)^k prod_{j<=k} sqrt(d_j))

is a right eigenvector of ``K v = x J v``; ``u^L`` uses ``x + i w`` and is a left
eigenvector.  The bilinear form ``u^L(x_j) J u^R(x_k)`` vanishes for ``j != k``,
and the weights ``w_{n,j,k}`` normalize its diagonal to one.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .eigen import ZeroSet, generalized_eigs, rule_mode
from .pencil import FactorSet, build_pencil, factor_all
from .perturbation import PerturbRule, perturb
from .poly import ComplexPoly, to_complex
from .recurrence import RIIParams, generate

__all__ = [
    "BiorthoReport",
    "DECOMPOSITIONS",
    "cd_kernel",
    "gram_check",
    "rational_sequences",
    "u_components",
    "u_derivative",
    "weights",
]

DECOMPOSITIONS = ("cholesky", "ul", "ldu")


def _sqrt_d(d: Sequence, upto: int) -> np.ndarray:
    """``[sqrt(d_1), ..., sqrt(d_upto)]`` from ``d = [d_0, d_1, ...]``."""
    return np.sqrt(np.array([to_complex(d[j]) for j in range(1, upto + 1)], dtype=complex))


def _shift(x: complex, omega: float, side: str) -> complex:
    if side == "R":
        return x - 1j * omega
    if side == "L":
        return x + 1j * omega
    raise ValueError("side must be 'R' or 'L'")


def u_components(L: Sequence[ComplexPoly], d: Sequence, omega: float, x: complex, side: str = "R",
                 upto: int | None = None) -> np.ndarray:
    """``[u_0(x), ..., u_upto(x)]`` for the chosen side."""
    upto = len(L) - 1 if upto is None else upto
    s = _shift(x, omega, side)
    if s == 0:
        raise ZeroDivisionError(f"pole at x = {x}")
    sq = _sqrt_d(d, upto)
    out = np.empty(upto + 1, dtype=complex)
    denom = 1.0 + 0j
    for k in range(upto + 1):
        if k:
            denom *= -s * sq[k - 1]
        out[k] = L[k](x) / denom
    return out


def u_derivative(L: Sequence[ComplexPoly], d: Sequence, omega: float, x: complex, k: int,
                 side: str = "R") -> complex:
    """``[u_k]'(x)`` by the quotient rule on ``L_k / (x -+ i w)^k``."""
    s = _shift(x, omega, side)
    pref = (-1) ** k / np.prod(_sqrt_d(d, k)) if k else 1.0
    Lk, dLk = L[k](x), L[k].derivative()(x)
    return pref * (dLk / s**k - k * Lk / s ** (k + 1))


def weights(L: Sequence[ComplexPoly], d: Sequence, omega: float, zeros, n: int | None = None) -> np.ndarray:
    """Table ``W[j, k] = w_{n,j,k}`` with
    ``1/w_{n,j,k} = -sqrt(d_n) (x_k - i w) [u_n^R]'(x_k) u_{n-1}^L(x_j)``."""
    x = np.asarray(zeros.values if isinstance(zeros, ZeroSet) else zeros, dtype=complex)
    n = len(x) if n is None else n
    sdn = np.sqrt(to_complex(d[n]))
    right = np.array([-sdn * (xk - 1j * omega) * u_derivative(L, d, omega, xk, n, "R") for xk in x])
    left = np.array([u_components(L, d, omega, xj, "L", n - 1)[n - 1] for xj in x])
    inv = left[:, None] * right[None, :]
    if np.any(np.abs(inv) < 1e-300):
        raise ZeroDivisionError("vanishing weight inverse")
    return 1.0 / inv


def rational_sequences(factors: FactorSet, which: str) -> Callable[[np.ndarray], np.ndarray]:
    """Map a component vector ``u = (u_0..u_{n-1})`` to ``chi``, ``Y`` or ``Z``.

    ``chi_i = m_i u_i + l_{i+1} u_{i+1}`` (Cholesky, ``chi = C^T u``);
    ``Y_0 = m_0 u_0``, ``Y_i = l_i u_{i-1} + m_i u_i`` (UL factor, ``Y = C u``);
    ``Z_i = sqrt(e_i) u_i + sqrt(d_{i+1}/e_i) u_{i+1}`` (``Z = (S D^{1/2})^T u``).
    """
    if which == "chi":
        m, l = factors.chol_m, factors.chol_l

        def f(u):
            out = m * u
            out[:-1] += l * u[1:]
            return out
    elif which == "Y":
        m, l = factors.ul_m, factors.ul_l

        def f(u):
            out = m * u
            out[1:] += l * u[:-1]
            return out
    elif which == "Z":
        se = np.sqrt(factors.ldu_e)
        off = factors.ldu_l * se[:-1]  # sqrt(d_{i+1}) / sqrt(e_i)

        def f(u):
            out = se * u
            out[:-1] += off * u[1:]
            return out
    else:
        raise ValueError("which must be 'chi', 'Y' or 'Z'")
    return lambda u: f(np.asarray(u, dtype=complex).copy())


_WHICH = {"cholesky": "chi", "ul": "Y", "ldu": "Z"}


@dataclass
class BiorthoReport:
    n: int
    decomposition: str
    gram: np.ndarray
    max_offdiag: float
    max_diag_dev: float
    weights: np.ndarray
    unfactored_offdiag: float = 0.0
    unfactored_diag_rel: float = 0.0
    zeros: np.ndarray = field(default_factory=lambda: np.empty(0))

    def passed(self, tol: float = 1e-8, tol_unfactored: float = 1e-9) -> bool:
        return (self.max_offdiag < tol and self.max_diag_dev < tol
                and self.unfactored_offdiag < tol_unfactored and self.unfactored_diag_rel < tol_unfactored)

    def to_dict(self, full: bool = False) -> dict:
        d = {
            "n": self.n,
            "decomposition": self.decomposition,
            "max_offdiag": self.max_offdiag,
            "max_diag_dev": self.max_diag_dev,
            "unfactored_offdiag": self.unfactored_offdiag,
            "unfactored_diag_rel": self.unfactored_diag_rel,
        }
        if full:
            d["gram"] = [[[float(z.real), float(z.imag)] for z in row] for row in self.gram]
        return d

    def to_json(self, full: bool = False) -> str:
        return json.dumps(self.to_dict(full), sort_keys=True)


def _setup(params: RIIParams, rule: PerturbRule | None, n: int):
    P = generate(params, n)
    if rule is None:
        pen = build_pencil(params, n, kind="G")
        L = P
    else:
        alpha = rule.alphas(params, n)
        L = perturb(P, alpha)
        pen = build_pencil(params, n, alpha, kind="K", mode=rule_mode(rule))
    d = [params.d_at(k) for k in range(n + 1)]
    return L, d, pen


def gram_check(params: RIIParams, rule: PerturbRule | None, n: int, decomposition: str = "cholesky") -> BiorthoReport:
    """Weighted gram matrix of the factored sequences on the pencil zeros."""
    if decomposition not in DECOMPOSITIONS:
        raise ValueError(f"decomposition must be one of {DECOMPOSITIONS}")
    L, d, pen = _setup(params, rule, n)
    w = float(params.omega)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        zs = generalized_eigs(pen)
    if not zs.is_real() or not zs.min_gap > 1e-8:
        raise ValueError("zeros are not real and simple")
    x = zs.values.real
    W = weights(L, d, w, x, n)
    J = pen.J()
    seq = rational_sequences(factor_all(J), _WHICH[decomposition])
    uR = [u_components(L, d, w, xk, "R", n - 1) for xk in x]
    uL = [u_components(L, d, w, xj, "L", n - 1) for xj in x]
    sR = np.array([seq(u) for u in uR])
    sL = np.array([seq(u) for u in uL])
    gram = (sL @ sR.T) * W
    raw = np.array(uL) @ J @ np.array(uR).T
    eye = np.eye(n)
    off = ~eye.astype(bool)
    inv_diag = 1.0 / np.diag(W)
    return BiorthoReport(
        n=n,
        decomposition=decomposition,
        gram=gram,
        max_offdiag=float(np.max(np.abs(gram[off]))) if n > 1 else 0.0,
        max_diag_dev=float(np.max(np.abs(np.diag(gram) - 1))),
        weights=W,
        unfactored_offdiag=float(np.max(np.abs(raw[off]))) if n > 1 else 0.0,
        unfactored_diag_rel=float(np.max(np.abs(np.diag(raw) - inv_diag) / np.abs(inv_diag))),
        zeros=x,
    )


def cd_kernel(params: RIIParams, rule: PerturbRule | None, n: int, x: complex, y: complex,
              relative: bool = False) -> float:
    """``|u^L(x) J u^R(y) - sqrt(d_n)[(y - iw) u_n^R(y) u_{n-1}^L(x) - (x + iw) u_{n-1}^R(y) u_n^L(x)]/(x - y)|``."""
    if x == y:
        raise ValueError("x and y must differ")
    L, d, pen = _setup(params, rule, n)
    w = float(params.omega)
    uR = u_components(L, d, w, y, "R", n)
    uL = u_components(L, d, w, x, "L", n)
    lhs = uL[:n] @ pen.J() @ uR[:n]
    sdn = np.sqrt(to_complex(d[n]))
    rhs = sdn * ((y - 1j * w) * uR[n] * uL[n - 1] - (x + 1j * w) * uR[n - 1] * uL[n]) / (x - y)
    res = abs(lhs - rhs)
    return res / max(1.0, abs(lhs)) if relative else res
