"""Zeros of ``P_n``, ``L_n``, ``T_n`` by two independent routes.

The pencil route reduces ``K v = x J v`` to the Hermitian problem
``C^{-1} K C^{-T}`` (``J = C C^T``) and diagonalizes it with cyclic complex Jacobi
rotations.  The oracle route runs Aberth-Ehrlich iteration on the coefficients
followed by Newton polishing.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .pencil import HermTridiagPencil, build_pencil, cholesky_lu
from .perturbation import PerturbRule, perturb
from .poly import ComplexPoly
from .recurrence import RIIParams, generate

__all__ = [
    "ConvergenceError",
    "ZeroSet",
    "cross_check",
    "generalized_eigs",
    "hermitian_jacobi",
    "match_zeros",
    "pencil_charpoly",
    "poly_roots",
    "rule_mode",
]

REAL_TOL = 1e-10


class ConvergenceError(ArithmeticError):
    pass


def _sort(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return z[np.lexsort((z.imag, z.real))]


def _min_gap(z: np.ndarray) -> float:
    if len(z) < 2:
        return math.inf
    diff = np.abs(z[:, None] - z[None, :])
    diff[np.diag_indices(len(z))] = np.inf
    return float(diff.min())


@dataclass
class ZeroSet:
    """Zeros sorted by real part (ties by imaginary part) with per-zero residuals."""

    values: np.ndarray
    residuals: np.ndarray
    method: str
    min_gap: float = field(init=False)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        order = np.lexsort((np.imag(self.values), np.real(self.values)))
        self.values = np.asarray(self.values, dtype=complex)[order]
        self.residuals = np.asarray(self.residuals, dtype=float)[order]
        self.min_gap = _min_gap(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def is_real(self, tol: float = REAL_TOL) -> bool:
        return bool(np.all(np.abs(self.values.imag) < tol))

    @property
    def real(self) -> np.ndarray:
        return self.values.real.copy()

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["re", "im", "residual"])
        for z, r in zip(self.values, self.residuals):
            w.writerow([f"{z.real:.17g}", f"{z.imag:.17g}", f"{r:.17g}"])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "n": len(self),
            "values": [[float(z.real), float(z.imag)] for z in self.values],
            "residuals": [float(r) for r in self.residuals],
            "min_gap": self.min_gap if math.isfinite(self.min_gap) else None,
            **self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


# ---------------------------------------------------------------------------
# pencil route


def hermitian_jacobi(A: np.ndarray, tol: float = 1e-15, max_sweeps: int = 60):
    """Eigenpairs of a Hermitian matrix by cyclic complex Jacobi rotations."""
    A = np.array(A, dtype=complex)
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    scale = max(np.max(np.abs(A)), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = math.sqrt(np.sum(np.abs(A - np.diag(np.diag(A))) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = A[p, q]
                ab = abs(b)
                if ab <= 1e-300:
                    continue
                phase = b / ab
                a, d = A[p, p].real, A[q, q].real
                theta = (d - a) / (2 * ab)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1))
                c = 1 / math.sqrt(t * t + 1)
                s = t * c
                U = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ U
                A[idx, :] = U.conj().T @ A[idx, :]
                A[p, q] = A[q, p] = 0
                A[p, p], A[q, q] = A[p, p].real, A[q, q].real
                V[:, idx] = V[:, idx] @ U
    else:
        raise ConvergenceError("Jacobi sweeps did not converge")
    return np.diag(A).real.copy(), V


def pencil_charpoly(pencil: HermTridiagPencil) -> ComplexPoly:
    """``det(x J - K)`` as a polynomial."""
    x = ComplexPoly.x()
    prev, cur = ComplexPoly.const(1), x * pencil.j_diag[0] - pencil.k_diag[0]
    for k in range(1, pencil.n):
        a = x * pencil.j_off[k - 1] - pencil.k_super[k - 1]
        b = x * pencil.j_off[k - 1] - pencil.k_sub[k - 1]
        prev, cur = cur, (x * pencil.j_diag[k] - pencil.k_diag[k]) * cur - a * b * prev
    return cur


def generalized_eigs(pencil: HermTridiagPencil) -> ZeroSet:
    """Eigenvalues of ``K v = x J v`` with residuals ``||K v - x J v||_inf / ||v||_inf``.

    A non-Hermitian ``K`` is routed to :func:`poly_roots` of the pencil
    determinant with a warning; a ``J`` that is not positive definite raises.
    """
    if not pencil.hermitian:
        warnings.warn("K is not Hermitian; using polynomial roots of det(xJ - K)", RuntimeWarning, stacklevel=2)
        zs = poly_roots(pencil_charpoly(pencil))
        zs.method = "aberth(det)"
        return zs
    m, l = cholesky_lu(pencil)
    C = np.diag(m) + np.diag(l, -1)
    Ci = np.linalg.inv(C)  # bidiagonal, well conditioned for positive definite J
    K, J = pencil.K(), pencil.J()
    A = Ci @ K @ Ci.T
    A = (A + A.conj().T) / 2
    vals, Y = hermitian_jacobi(A)
    Vs = Ci.T @ Y
    res = []
    for k in range(len(vals)):
        v = Vs[:, k]
        res.append(np.max(np.abs(K @ v - vals[k] * (J @ v))) / np.max(np.abs(v)))
    return ZeroSet(vals.astype(complex), np.array(res), "pencil", meta={"kind": pencil.kind})


# ---------------------------------------------------------------------------
# oracle route


def poly_roots(p: ComplexPoly, max_iter: int = 200, tol: float = 4e-16, polish: int = 3) -> ZeroSet:
    """All roots by Aberth-Ehrlich iteration plus Newton polishing.

    Residuals are ``|p(z)| / sum_i |c_i| |z|^i`` (backward error).  Roots that do
    not settle within ``max_iter`` iterations are listed in ``meta["unconverged"]``.
    """
    p = p.to_float()
    n = p.degree
    if n < 1:
        raise ValueError("degree >= 1 required")
    c = p.as_array()
    dp = p.derivative()
    lead = c[-1]
    # start on a circle of radius given by the geometric mean of the roots, slightly rotated
    radius = max(abs(c[0] / lead) ** (1.0 / n), 1e-3) if c[0] != 0 else 1.0
    radius = max(radius, max(abs(c[k] / lead) ** (1.0 / (n - k)) for k in range(n)) / 2)
    centre = -c[n - 1] / (n * lead)
    ang = 2 * np.pi * np.arange(n) / n + 0.4
    z = centre + radius * np.exp(1j * ang)
    done = np.zeros(n, dtype=bool)
    for _ in range(max_iter):
        for k in range(n):
            if done[k]:
                continue
            pv, dv = p(z[k]), dp(z[k])
            if pv == 0:
                done[k] = True
                continue
            ratio = pv / dv if dv != 0 else pv
            diff = z[k] - np.delete(z, k)
            corr = ratio / (1 - ratio * np.sum(1 / diff))
            z[k] -= corr
            if abs(corr) <= tol * max(abs(z[k]), 1.0):
                done[k] = True
        if done.all():
            break
    for _ in range(polish):
        for k in range(n):
            dv = dp(z[k])
            if dv != 0:
                step = p(z[k]) / dv
                if abs(step) < 1e-6 * max(1.0, abs(z[k])):
                    z[k] -= step
    absc = np.abs(c)
    res = np.array([abs(p(zk)) / max(np.sum(absc * np.abs(zk) ** np.arange(n + 1)), 1e-300) for zk in z])
    meta = {}
    if not done.all():
        meta["unconverged"] = [int(k) for k in np.flatnonzero(~done)]
    return ZeroSet(z, res, "aberth", meta=meta)


def match_zeros(a, b) -> float:
    """Max deviation under sorted matching (all real) or optimal assignment."""
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if len(a) != len(b):
        raise ValueError("zero sets differ in size")
    if not len(a):
        return 0.0
    if np.all(np.abs(a.imag) < REAL_TOL) and np.all(np.abs(b.imag) < REAL_TOL):
        return float(np.max(np.abs(np.sort(a.real) - np.sort(b.real))))
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max())


def rule_mode(rule: PerturbRule | None) -> str:
    if rule is None:
        return "thm23"
    if rule.variant == "theorem25-recursion":
        return "thm25"
    return "remark24" if rule.beta else "thm23"


def cross_check(params: RIIParams, rule: PerturbRule | None, n: int) -> float:
    """Pencil zeros vs oracle roots: ``(G, J)`` against ``P_n`` when ``rule`` is None, else ``(K, J)`` against ``L_n``."""
    P = generate(params, n)
    if rule is None:
        pen = build_pencil(params, n, kind="G")
        target = P[n]
    else:
        alpha = rule.alphas(params, n)
        target = perturb(P, alpha)[n]
        pen = build_pencil(params, n, alpha, kind="K", mode=rule_mode(rule))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        ev = generalized_eigs(pen)
    return match_zeros(ev.values, poly_roots(target).values)
