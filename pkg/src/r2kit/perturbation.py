"""Self perturbation ``L_n = P_n - alpha_n P_{n-1}`` of R_II families.

Covers the admissible alpha/beta constructions, the twelve-constant ledger of
the recurrence with polynomial coefficients::

    (e x^2 + f x + g) L_{n+1} = (p x^3 + q x^2 + r x + s) L_n
                              + (t x^4 + u x^3 + v x^2 + w x + z) L_{n-1}

and the reductions back to a special R_II recurrence with shifted centers.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .hypergeom import pochhammer
from .poly import ComplexPoly, as_exact, is_exact_scalar, to_complex
from .recurrence import RIIParams

__all__ = [
    "AdmissibilityError",
    "CoeffLedger",
    "MODES",
    "PerturbRule",
    "alpha_condition1",
    "alpha_quadratic",
    "alpha_theorem25",
    "check_condition2",
    "closed_form_examples",
    "kappa",
    "ledger_general",
    "ledger_residual",
    "ledger_special",
    "perturb",
    "quadratic_discriminant",
    "reduced_recurrence",
    "verify_ledger_identity",
    "zeta_from_discriminant",
]

ADMISSIBILITY_TOL = 1e-12
MODES = ("thm23", "remark24", "thm25")


class AdmissibilityError(ValueError):
    def __init__(self, condition: str, index: int, residual: float):
        super().__init__(f"{condition} violated at n={index} (residual {residual:.3e})")
        self.condition = condition
        self.index = index
        self.residual = residual


def _w2(params: RIIParams):
    w = params.omega
    return as_exact(Fraction(w)) ** 2 if params.exact else float(w) ** 2


def _abs(v) -> float:
    return abs(to_complex(v))


# ---------------------------------------------------------------------------
# alpha constructions


def alpha_condition1(params: RIIParams, alpha_prev, n: int):
    """``rho_{n-1}(1 - c_{n-1}) - w^2 d_{n-1} / alpha_{n-1}`` (equivalent to ``f_n = -g_n``)."""
    if alpha_prev == 0:
        raise ZeroDivisionError("alpha_{n-1} vanishes")
    return params.rho_at(n - 1) * (1 - params.c_at(n - 1)) - _w2(params) * params.d_at(n - 1) / alpha_prev


def alpha_theorem25(params: RIIParams, alpha_prev, n: int):
    """``-(w^2 d_{n-1} / alpha_{n-1} + rho_{n-1} c_{n-1})`` (equivalent to ``g_n = 0``)."""
    if alpha_prev == 0:
        raise ZeroDivisionError("alpha_{n-1} vanishes")
    return -(_w2(params) * params.d_at(n - 1) / alpha_prev + params.rho_at(n - 1) * params.c_at(n - 1))


def check_condition2(params: RIIParams, alpha: Sequence, n: int, tol: float = ADMISSIBILITY_TOL):
    """``d_n alpha_{n-1} rho_{n-1} = d_{n-1} alpha_n rho_n``; returns ``(ok, residual)``."""
    lhs = params.d_at(n) * alpha[n - 1] * params.rho_at(n - 1)
    rhs = params.d_at(n - 1) * alpha[n] * params.rho_at(n)
    res = _abs(lhs - rhs)
    return res <= tol, res


def _quadratic_coeffs(params: RIIParams, n: int, beta: bool):
    rho_n, rho_m = params.rho_at(n), params.rho_at(n - 1)
    c_m = params.c_at(n - 1)
    lin = rho_n * rho_m * (1 + c_m) if beta else -rho_n * rho_m * (1 - c_m)
    return rho_n, lin, _w2(params) * params.d_at(n) * rho_m


def quadratic_discriminant(params: RIIParams, n: int, beta: bool = False):
    a, b, c = _quadratic_coeffs(params, n, beta)
    return b * b - 4 * a * c


def alpha_quadratic(params: RIIParams, n: int, branch: str = "+", beta: bool = False,
                    snap: float = 1e-13):
    """Root of ``rho_n X^2 -+ rho_n rho_{n-1}(1 -+ c_{n-1}) X + w^2 d_n rho_{n-1} = 0``.

    ``beta=False`` gives the alpha quadratic (``1 - c``, minus sign); ``beta=True``
    the beta one (``1 + c``, plus sign).  A discriminant within ``snap`` (relative)
    of zero is treated as zero; in exact mode a zero discriminant yields an exact
    root.  Negative discriminants give complex roots.
    """
    if branch not in "+-" or len(branch) != 1:
        raise ValueError("branch must be '+' or '-'")
    a, b, c = _quadratic_coeffs(params, n, beta)
    if not a:
        raise ZeroDivisionError("rho_n vanishes")
    disc = b * b - 4 * a * c
    if params.exact and not disc:
        return -b / (2 * a)
    a, b, disc = to_complex(a), to_complex(b), to_complex(disc)
    if abs(disc) <= snap * abs(b * b):
        disc = 0j
    if disc.imag == 0 and disc.real >= 0:
        root = math.sqrt(disc.real)
    else:
        root = cmath.sqrt(disc)
    sgn = 1 if branch == "+" else -1
    val = (-b + sgn * root) / (2 * a)
    if isinstance(val, complex) and val.imag == 0:
        return val.real
    return val


def zeta_from_discriminant(n: int, omega: float) -> list[float]:
    """Positive roots of ``z^2 + [2n(1-w^2) - 1] z + (1-w^2)(n^2-n) = 0``.

    These are the zeta values making the alpha discriminant of the scaled GCRR
    family vanish at index ``n`` when theta = 0.
    """
    if omega < 1:
        raise ValueError("omega must be >= 1 for a positive root")
    b = 2 * n * (1 - omega**2) - 1
    c = (1 - omega**2) * (n * n - n)
    disc = b * b - 4 * c
    if disc < 0:
        raise ValueError("no real root")
    s = math.sqrt(disc)
    roots = sorted({(-b - s) / 2, (-b + s) / 2})
    pos = [r for r in roots if r > 0]
    if not pos:
        raise ValueError(f"no positive root for n={n}, omega={omega}")
    return pos


def kappa(omega, branch: str = "+"):
    """Constant perturbation ``1/2 +- sqrt(1 - w^2)/2`` of the constant family (complex for w > 1)."""
    if isinstance(omega, Fraction) and omega == 1:
        return Fraction(1, 2)
    disc = 1 - float(omega) ** 2
    root = math.sqrt(disc) if disc >= 0 else cmath.sqrt(disc)
    sgn = 1 if branch == "+" else -1
    return 0.5 + sgn * root / 2


# ---------------------------------------------------------------------------
# rules


def _encode(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (list, tuple)):
        return [_encode(u) for u in v]
    return v


def _decode(v):
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(u, (int, float)) for u in v):
        return complex(v[0], v[1])
    if isinstance(v, list):
        return [_decode(u) for u in v]
    return v


@dataclass
class PerturbRule:
    """How the perturbation constants ``alpha_1, alpha_2, ...`` are produced.

    variant
        ``explicit-list`` (``values`` = alpha_1..), ``condition1-recursion`` and
        ``theorem25-recursion`` (seeded with ``seed`` = alpha_1), ``quadratic-root``
        (alpha quadratic, or the beta quadratic when ``beta``), ``constant-kappa``.
    The redundant ``alpha_0`` is set equal to ``alpha_1``.
    """

    variant: str
    branch: str = "+"
    seed: Any = None
    values: Any = None
    beta: bool = False
    omega: Any = None
    zeta: Any = None
    theta: Any = None

    VARIANTS = ("explicit-list", "condition1-recursion", "quadratic-root", "constant-kappa",
                "theorem25-recursion")

    def __post_init__(self):
        if self.variant not in self.VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.branch not in ("+", "-"):
            raise ValueError("branch must be '+' or '-'")

    def alphas(self, params: RIIParams, n: int) -> list:
        """``[alpha_0, ..., alpha_n]``."""
        v = self.variant
        if v == "explicit-list":
            vals = list(self.values)
            if len(vals) < n:
                raise ValueError(f"explicit rule has {len(vals)} values, {n} needed")
            out = [vals[0]] + vals[:n]
        elif v == "constant-kappa":
            w = params.omega if self.omega is None else self.omega
            k = kappa(w, self.branch)
            out = [k] * (n + 1)
        elif v == "quadratic-root":
            out = [None] + [alpha_quadratic(params, m, self.branch, self.beta) for m in range(1, n + 1)]
            out[0] = out[1] if n else 0
        else:
            step = alpha_condition1 if v == "condition1-recursion" else alpha_theorem25
            out = [self.seed, self.seed]
            for m in range(2, n + 1):
                out.append(step(params, out[-1], m))
            out = out[: n + 1]
        if params.exact:
            return [as_exact(a) if is_exact_scalar(a) else a for a in out]
        return [to_complex(a) for a in out]

    def to_dict(self) -> dict:
        return {k: _encode(v) for k, v in asdict(self).items() if v is not None}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "PerturbRule":
        return cls(**{k: _decode(v) if k in ("seed", "values") else v for k, v in d.items()})

    @classmethod
    def from_json(cls, s: str) -> "PerturbRule":
        return cls.from_dict(json.loads(s))


def perturb(P: Sequence[ComplexPoly], alphas, params: RIIParams | None = None) -> list[ComplexPoly]:
    """``L_0 = P_0`` and ``L_n = P_n - alpha_n P_{n-1}``.

    ``alphas`` is ``[alpha_0, alpha_1, ...]`` (``alpha_0`` ignored) or a
    :class:`PerturbRule`, which then needs ``params``.
    """
    if isinstance(alphas, PerturbRule):
        if params is None and alphas.variant != "explicit-list":
            raise ValueError("rule needs params")
        alphas = alphas.alphas(params, len(P) - 1) if params is not None else [None] + list(alphas.values)
    out = [P[0]]
    for n in range(1, len(P)):
        a = alphas[n]
        if a == 0:
            raise ValueError(f"alpha_{n} = 0 is not a perturbation")
        out.append(P[n] - P[n - 1] * a)
    return out


# ---------------------------------------------------------------------------
# ledgers


@dataclass
class CoeffLedger:
    n: int
    e: Any
    f: Any
    g: Any
    p: Any
    q: Any
    r: Any
    s: Any
    t: Any
    u: Any
    v: Any
    w: Any
    z: Any

    NAMES = ("e", "f", "g", "p", "q", "r", "s", "t", "u", "v", "w", "z")

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.NAMES}

    def polys(self, exact: bool = False):
        """Coefficient polynomials ``(A, B, C)`` of ``L_{n+1}``, ``L_n`` and ``L_{n-1}``."""
        return (
            ComplexPoly([self.g, self.f, self.e], exact=exact),
            ComplexPoly([self.s, self.r, self.q, self.p], exact=exact),
            ComplexPoly([self.z, self.w, self.v, self.u, self.t], exact=exact),
        )


def ledger_special(params: RIIParams, alpha: Sequence, n: int) -> CoeffLedger:
    """Ledger for the special form (quadratic factor ``x^2 + w^2``), valid for ``n >= 1``."""
    if not params.special:
        raise ValueError("special-form ledger needs omega")
    if n < 1:
        raise ValueError("n >= 1 required")
    rho, c, d = params.rho_at, params.c_at, params.d_at
    w2 = _w2(params)
    am, a0, ap = alpha[n - 1], alpha[n], alpha[n + 1]

    def f_at(k, a_prev):
        return -a_prev * rho(k - 1)

    def g_at(k, a_prev, a_k):
        return d(k - 1) * w2 + a_prev * (a_k + rho(k - 1) * c(k - 1))

    e = d(n - 1)
    f = f_at(n, am)
    g = g_at(n, am, a0)
    p = rho(n) * e
    q = am * (d(n) - rho(n) * rho(n - 1)) - d(n - 1) * (rho(n) * c(n) + ap)
    r = am * rho(n - 1) * (ap + rho(n) * (c(n) + c(n - 1))) + rho(n) * d(n - 1) * w2
    s = -(am * rho(n - 1) * c(n - 1) + d(n - 1) * w2) * (rho(n) * c(n) + ap) + am * d(n) * w2
    e_next = d(n)
    f_next = f_at(n + 1, a0)
    g_next = g_at(n + 1, a0, ap)
    t = -e_next * d(n - 1)
    u = -d(n - 1) * f_next
    w = u * w2
    v = -d(n - 1) * (g_next + w2 * e_next)
    z = -d(n - 1) * w2 * g_next
    return CoeffLedger(n, e, f, g, p, q, r, s, t, u, v, w, z)


def ledger_general(params: RIIParams, alpha: Sequence, n: int) -> CoeffLedger:
    """Ledger for the general form with quadratic factors ``(x - a_k)(x - b_k)``.

    The ``alpha_{n-1} d_n (a_n + b_n)`` contribution to ``r`` enters with a minus
    sign; that is the sign for which the three-term identity holds.
    """
    if n < 1:
        raise ValueError("n >= 1 required")
    rho, c, d = params.rho_at, params.c_at, params.d_at

    def S(k):
        return params.a_at(k) + params.b_at(k)

    def Pi(k):
        return params.a_at(k) * params.b_at(k)

    am, a0, ap = alpha[n - 1], alpha[n], alpha[n + 1]
    K = rho(n) * c(n) + ap
    e = d(n - 1)
    f = -d(n - 1) * S(n - 1) - am * rho(n - 1)
    g = d(n - 1) * Pi(n - 1) + am * (a0 + rho(n - 1) * c(n - 1))
    p = rho(n) * d(n - 1)
    q = am * (d(n) - rho(n) * rho(n - 1)) - d(n - 1) * (rho(n) * (S(n - 1) + c(n)) + ap)
    r = (am * rho(n - 1) * (ap + rho(n) * (c(n) + c(n - 1))) + d(n - 1) * S(n - 1) * K
         - am * d(n) * S(n) + rho(n) * d(n - 1) * Pi(n - 1))
    s = -(am * rho(n - 1) * c(n - 1) + d(n - 1) * Pi(n - 1)) * K + am * d(n) * Pi(n)
    t = -d(n) * d(n - 1)
    u = d(n - 1) * (d(n) * (S(n) + S(n - 1)) + a0 * rho(n))
    v = -d(n - 1) * (a0 * K + d(n) * (Pi(n) + Pi(n - 1)) + S(n - 1) * (d(n) * S(n) + a0 * rho(n)))
    w = -d(n - 1) * (Pi(n - 1) * (-d(n) * S(n) - a0 * rho(n)) - S(n - 1) * (a0 * K + d(n) * Pi(n)))
    z = -d(n - 1) * Pi(n - 1) * (a0 * K + d(n) * Pi(n))
    return CoeffLedger(n, e, f, g, p, q, r, s, t, u, v, w, z)


def ledger_residual(L: Sequence[ComplexPoly], ledger: CoeffLedger, n: int | None = None) -> ComplexPoly:
    """``A L_{n+1} - B L_n - C L_{n-1}`` for the ledger's polynomial coefficients."""
    n = ledger.n if n is None else n
    exact = all(p.exact for p in L[n - 1 : n + 2])
    A, B, C = ledger.polys(exact=exact)
    return A * L[n + 1] - B * L[n] - C * L[n - 1]


def verify_ledger_identity(L: Sequence[ComplexPoly], ledger: CoeffLedger, n: int | None = None) -> float:
    """Max absolute coefficient of :func:`ledger_residual`."""
    return ledger_residual(L, ledger, n).max_abs_coeff()


# ---------------------------------------------------------------------------
# reductions


def _mode_condition(params: RIIParams, alpha: Sequence, k: int, mode: str):
    f = -alpha[k - 1] * params.rho_at(k - 1)
    g = params.d_at(k - 1) * _w2(params) + alpha[k - 1] * (alpha[k] + params.rho_at(k - 1) * params.c_at(k - 1))
    if mode == "thm23":
        return "f_n = -g_n", f + g
    if mode == "remark24":
        return "f_n = g_n", f - g
    return "g_n = 0", g


def reduced_recurrence(params: RIIParams, alpha: Sequence, mode: str = "thm23", n: int | None = None,
                       check: bool = True, tol: float = ADMISSIBILITY_TOL) -> RIIParams:
    """Special R_II parameters regenerating ``L_0..L_n`` with shifted centers.

    ``c'_0 = c_0 + alpha_1/rho_0`` and ``c'_1 = c_0``; for ``k >= 2`` the center is
    ``-s_k / (f_k rho_k)`` (``thm23``), ``s_k / (f_k rho_k)`` (``remark24``) or
    ``-r_k / (f_k rho_k)`` (``thm25``).  The first step is admissible iff
    ``c_0 + alpha_1/rho_0 = c_1 + alpha_2/rho_1``; later steps need the mode
    condition and the ``d``-balance condition at ``k = 2..n``.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    n = len(alpha) - 1 if n is None else n
    if not params.special:
        raise ValueError("reductions apply to the special form")
    rho, c = params.rho_at, params.c_at
    centers = [c(0) + alpha[1] / rho(0)] if n >= 1 else [c(0)]
    if n >= 2:
        centers.append(c(0))
        if check:
            res = _abs(centers[0] - c(1) - alpha[2] / rho(1))
            if res > tol:
                raise AdmissibilityError("first-step center matching", 1, res)
    for k in range(2, n):
        led = ledger_special(params, alpha, k)
        if mode == "thm25":
            centers.append(-led.r / (led.f * rho(k)))
        else:
            sgn = -1 if mode == "thm23" else 1
            centers.append(sgn * led.s / (led.f * rho(k)))
    if check:
        for k in range(2, n + 1):
            name, val = _mode_condition(params, alpha, k, mode)
            if _abs(val) > tol:
                raise AdmissibilityError(name, k, _abs(val))
            ok, res = check_condition2(params, alpha, k, tol)
            if not ok:
                raise AdmissibilityError("d_n alpha_{n-1} rho_{n-1} = d_{n-1} alpha_n rho_n", k, res)
    return params.with_centers(list(centers) + [centers[-1]], label=f"{params.label} reduced[{mode}]")


# ---------------------------------------------------------------------------
# closed forms for the constant family (rho = 1, c = 0, d = 1/4)


def closed_form_examples(n: int, which: str = "P", omega: float = 1.0, kappa_value=None) -> list[ComplexPoly]:
    """Closed forms ``[F_0, ..., F_n]`` for the constant family.

    which
        ``P``  ``(i/w)[((x-iw)/2)^{m+1} - ((x+iw)/2)^{m+1}]``;
        ``L``  ``P_m - kappa P_{m-1}`` written through the same powers (default kappa from ``omega``);
        ``T``  ``(i/2^{m+1})[(x-i)^m (x-i+1) - (x+i)^m (x+i+1)]`` (omega = 1);
        ``P_series`` ``(-i)^m sum_k (-m-1)_k z^k / k!`` with ``z = (1 - ix)/2`` (omega = 1);
        ``L_thm25`` ``(x+i)/(2 i^{m+1}) sum_{k<m} (-m)_k z^k / k!`` (omega = 1).  This
        product form is not equal to ``P_m - (i/2) P_{m-1}``; compare with
        :func:`perturb` before relying on it.
    """
    w = float(omega)
    xm = ComplexPoly([-1j * w, 1]) * 0.5  # (x - iw)/2
    xp = ComplexPoly([1j * w, 1]) * 0.5
    z = ComplexPoly([0.5, -0.5j])
    out = []
    for m in range(n + 1):
        if which == "P":
            out.append((xm ** (m + 1) - xp ** (m + 1)) * (1j / w))
        elif which == "L":
            k = kappa(w) if kappa_value is None else kappa_value
            if m == 0:
                out.append(ComplexPoly([1]))
            else:
                out.append((xm ** (m + 1) - xp ** (m + 1)) * (1j / w) - (xm ** m - xp ** m) * (1j * k / w))
        elif which == "T":
            if m == 0:
                out.append(ComplexPoly([1]))
            else:
                a = ComplexPoly([-1j, 1]) ** m * ComplexPoly([1 - 1j, 1])
                b = ComplexPoly([1j, 1]) ** m * ComplexPoly([1 + 1j, 1])
                out.append((a - b) * (1j / 2 ** (m + 1)))
        elif which == "P_series":
            acc = ComplexPoly([])
            for k in range(m + 1):
                acc = acc + z**k * (pochhammer(-m - 1, k) / math.factorial(k))
            out.append(acc * (-1j) ** m)
        elif which == "L_thm25":
            if m == 0:
                out.append(ComplexPoly([1]))
                continue
            acc = ComplexPoly([])
            for k in range(m):
                acc = acc + z**k * (pochhammer(-m, k) / math.factorial(k))
            out.append(ComplexPoly([1j, 1]) * acc * (1 / (2 * 1j ** (m + 1))))
        else:
            raise ValueError(f"unknown closed form {which!r}")
    return out
