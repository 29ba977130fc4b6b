"""Tridiagonal linear pencils ``x J - K`` and the three factorizations of ``J``.

``J`` has diagonal ``rho_k`` and off-diagonal ``sqrt(d_k)``.  ``K`` (or ``G``) has
diagonal ``rho_k c_k`` for the relevant centers, super-diagonal ``i w sqrt(d_k)``
and sub-diagonal ``-i w sqrt(d_k)``, so ``det(x J - K)`` obeys the special R_II
recurrence with those centers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .perturbation import reduced_recurrence
from .recurrence import RIIParams
from .poly import to_complex

__all__ = [
    "FactorSet",
    "HermTridiagPencil",
    "NotPositiveDefiniteError",
    "build_pencil",
    "cholesky_lu",
    "factor_all",
    "factor_ldu",
    "factor_ul",
    "is_positive_definite",
]


class NotPositiveDefiniteError(ValueError):
    def __init__(self, index: int, pivot: float, what: str = "Cholesky"):
        super().__init__(f"{what} pivot {pivot:.3e} at index {index}: matrix not positive definite")
        self.index = index
        self.pivot = pivot


def _pairs(a) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(a, dtype=complex)]


@dataclass(frozen=True)
class HermTridiagPencil:
    """The pair ``(K, J)`` stored as diagonals."""

    j_diag: np.ndarray
    j_off: np.ndarray
    k_diag: np.ndarray
    k_super: np.ndarray
    k_sub: np.ndarray
    kind: str = "K"

    def __post_init__(self):
        n = len(self.j_diag)
        if not (len(self.k_diag) == n and len(self.j_off) == len(self.k_super) == len(self.k_sub) == max(n - 1, 0)):
            raise ValueError("inconsistent pencil dimensions")

    @property
    def n(self) -> int:
        return len(self.j_diag)

    @property
    def hermitian(self) -> bool:
        """``K`` Hermitian: real diagonal and ``super = conj(sub)``."""
        return bool(np.all(self.k_diag.imag == 0) and np.allclose(self.k_super, np.conj(self.k_sub), rtol=0, atol=0))

    def J(self) -> np.ndarray:
        return np.diag(self.j_diag) + np.diag(self.j_off, 1) + np.diag(self.j_off, -1)

    def K(self) -> np.ndarray:
        return np.diag(self.k_diag) + np.diag(self.k_super, 1) + np.diag(self.k_sub, -1)

    def charpoly_at(self, x: complex) -> complex:
        """``det(x J - K)`` by the tridiagonal determinant recursion."""
        prev, cur = 1.0 + 0j, x * self.j_diag[0] - self.k_diag[0] if self.n else 1.0 + 0j
        for k in range(1, self.n):
            off = (x * self.j_off[k - 1] - self.k_super[k - 1]) * (x * self.j_off[k - 1] - self.k_sub[k - 1])
            prev, cur = cur, (x * self.j_diag[k] - self.k_diag[k]) * cur - off * prev
        return cur

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "j_diag": [float(v) for v in self.j_diag],
            "j_off": [float(v) for v in self.j_off],
            "k_diag": _pairs(self.k_diag),
            "k_super": _pairs(self.k_super),
            "k_sub": _pairs(self.k_sub),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "HermTridiagPencil":
        def cx(v):
            return np.array([complex(a, b) for a, b in v], dtype=complex)

        return cls(np.array(d["j_diag"], float), np.array(d["j_off"], float), cx(d["k_diag"]),
                   cx(d["k_super"]), cx(d["k_sub"]), d.get("kind", "K"))


def build_pencil(params: RIIParams, n: int, alpha: Sequence | None = None, kind: str = "K",
                 mode: str = "thm23", centers: Sequence | None = None) -> HermTridiagPencil:
    """Pencil of dimension ``n``.

    ``kind="G"`` uses the family centers ``c_k`` (eigenvalues: zeros of ``P_n``).
    ``kind="K"`` uses the shifted centers of the reduced recurrence of ``L`` for
    the given ``alpha`` and ``mode`` (eigenvalues: zeros of ``L_n``), unless
    explicit ``centers`` are passed.
    """
    if n < 1:
        raise ValueError("n >= 1 required")
    if not params.special:
        raise ValueError("pencils are built for the special form")
    if kind not in ("K", "G"):
        raise ValueError("kind must be 'K' or 'G'")
    if centers is None:
        if kind == "G":
            src = params
        else:
            if alpha is None:
                raise ValueError("kind K needs alpha")
            src = reduced_recurrence(params, alpha, mode, n=n)
        centers = [src.c_at(k) for k in range(n)]
    w = float(params.omega)
    rho = np.array([to_complex(params.rho_at(k)) for k in range(n)])
    d = np.array([to_complex(params.d_at(k)) for k in range(1, n)])
    if np.any(np.abs(rho.imag) > 0) or np.any(np.abs(d.imag) > 0):
        raise ValueError("rho and d must be real")
    rho, d = rho.real, d.real
    if np.any(d <= 0):
        k = int(np.argmax(d <= 0)) + 1
        raise ValueError(f"d_{k} <= 0: off-diagonal square root not real")
    sq = np.sqrt(d)
    kd = rho * np.array([to_complex(c) for c in centers[:n]])
    return HermTridiagPencil(rho, sq, kd, 1j * w * sq, -1j * w * sq, kind)


# ---------------------------------------------------------------------------
# factorizations of J


@dataclass(frozen=True)
class FactorSet:
    """Cholesky ``J = C C^T``, UL ``J = C^T C`` and LDU ``J = S D S^T`` factors.

    Lower-bidiagonal factors store the diagonal ``m`` and the subdiagonal ``l``
    with ``l[i-1]`` the entry at row ``i``, column ``i-1``.
    """

    chol_m: np.ndarray
    chol_l: np.ndarray
    ul_m: np.ndarray
    ul_l: np.ndarray
    s0: float
    ldu_e: np.ndarray
    ldu_l: np.ndarray

    @staticmethod
    def lower(m, l) -> np.ndarray:
        return np.diag(m) + np.diag(l, -1)

    def C_chol(self) -> np.ndarray:
        return self.lower(self.chol_m, self.chol_l)

    def C_ul(self) -> np.ndarray:
        return self.lower(self.ul_m, self.ul_l)

    def S(self) -> np.ndarray:
        return self.lower(np.ones(len(self.ldu_e)), self.ldu_l)

    def SC(self) -> np.ndarray:
        """``S D^{1/2}``."""
        return self.S() @ np.diag(np.sqrt(self.ldu_e))

    def residuals(self, J: np.ndarray) -> dict:
        C, U, S = self.C_chol(), self.C_ul(), self.S()
        return {
            "cholesky": float(np.max(np.abs(C @ C.T - J))),
            "ul": float(np.max(np.abs(U.T @ U - J))),
            "ldu": float(np.max(np.abs(S @ np.diag(self.ldu_e) @ S.T - J))),
            "pivot_consistency": float(np.max(np.abs(self.ldu_e - self.chol_m**2))),
        }

    def to_dict(self) -> dict:
        f = lambda a: [float(v) for v in a]  # noqa: E731
        return {"chol_m": f(self.chol_m), "chol_l": f(self.chol_l), "ul_m": f(self.ul_m),
                "ul_l": f(self.ul_l), "s0": float(self.s0), "ldu_e": f(self.ldu_e), "ldu_l": f(self.ldu_l)}


def _jdata(J):
    if isinstance(J, HermTridiagPencil):
        return np.asarray(J.j_diag, float), np.asarray(J.j_off, float) ** 2
    J = np.asarray(J, float)
    return np.diag(J).copy(), np.diag(J, -1) ** 2


def cholesky_lu(J) -> tuple[np.ndarray, np.ndarray]:
    """``m_i = sqrt(rho_i - l_i^2)``, ``l_i = sqrt(d_i)/m_{i-1}``; returns ``(m, l)``."""
    rho, d = _jdata(J)
    n = len(rho)
    m, l = np.empty(n), np.empty(max(n - 1, 0))
    for i in range(n):
        li2 = 0.0
        if i:
            l[i - 1] = math.sqrt(d[i - 1]) / m[i - 1]
            li2 = l[i - 1] ** 2
        piv = rho[i] - li2
        if not piv > 0:
            raise NotPositiveDefiniteError(i, piv)
        m[i] = math.sqrt(piv)
    return m, l


def factor_ul(J) -> tuple[np.ndarray, np.ndarray, float]:
    """Lower bidiagonal ``C`` with ``C^T C = J`` by backward recursion; returns ``(m, l, s0 = m_0)``."""
    rho, d = _jdata(J)
    n = len(rho)
    m, l = np.empty(n), np.empty(max(n - 1, 0))
    for i in range(n - 1, -1, -1):
        piv = rho[i]
        if i < n - 1:
            l[i] = math.sqrt(d[i]) / m[i + 1]
            piv -= l[i] ** 2
        if not piv > 0:
            raise NotPositiveDefiniteError(i, piv, "UL")
        m[i] = math.sqrt(piv)
    return m, l, float(m[0])


def factor_ldu(J) -> tuple[np.ndarray, np.ndarray]:
    """Pivots ``e_0 = rho_0``, ``e_i = rho_i - d_i/e_{i-1}`` and unit-lower entries ``sqrt(d_{i+1})/e_i``."""
    rho, d = _jdata(J)
    n = len(rho)
    e, l = np.empty(n), np.empty(max(n - 1, 0))
    for i in range(n):
        e[i] = rho[i] - (d[i - 1] / e[i - 1] if i else 0.0)
        if not e[i] > 0:
            raise NotPositiveDefiniteError(i, e[i], "LDU")
        if i:
            l[i - 1] = math.sqrt(d[i - 1]) / e[i - 1]
    return e, l


def is_positive_definite(J) -> bool:
    try:
        cholesky_lu(J)
    except NotPositiveDefiniteError:
        return False
    return True


def factor_all(J) -> FactorSet:
    m, l = cholesky_lu(J)
    um, ul, s0 = factor_ul(J)
    e, sl = factor_ldu(J)
    return FactorSet(m, l, um, ul, s0, e, sl)
