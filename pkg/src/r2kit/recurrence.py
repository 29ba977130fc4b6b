"""R_II three-term recurrences.

General form::

    P_{n+1} = rho_n (x - c_n) P_n - d_n (x - a_n)(x - b_n) P_{n-1},   P_{-1} = 0, P_0 = 1

and the special form with ``a_n = i w``, ``b_n = -i w`` (quadratic factor
``x^2 + w^2``).  In both cases ``P_1 = rho_0 (x - c_0)``.

Parameters are supplied as providers: callables ``k -> value`` or plain
sequences indexed from 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

import numpy as np

from .hypergeom import pochhammer
from .poly import ComplexPoly, as_exact, to_complex

__all__ = [
    "ChainSeqInfo",
    "ConvergentError",
    "DegreeCollapseError",
    "GCRRSpec",
    "HypothesisError",
    "RIIParams",
    "cf_convergent",
    "cf_terminating_index",
    "cf_value",
    "constant_params",
    "gcrr_params",
    "generate",
    "leading_coeffs",
    "leading_law_deviation",
    "minimal_params",
    "rescale_check",
]


class DegreeCollapseError(ArithmeticError):
    def __init__(self, index: int, degree: int):
        super().__init__(f"P_{index} has degree {degree}, expected {index}")
        self.index = index
        self.degree = degree


class ConvergentError(ZeroDivisionError):
    pass


class HypothesisError(ValueError):
    """Raised when a theorem's hypotheses do not hold for the supplied family."""


Provider = Callable[[int], Any]


def _provider(v) -> Provider:
    if v is None or callable(v):
        return v
    seq = list(v)

    def get(k: int):
        return seq[k]

    return get


@dataclass(frozen=True)
class RIIParams:
    """Recurrence coefficients of an R_II family.

    Give either ``omega`` (special form) or both ``a`` and ``b`` (general form).
    With ``exact=True`` every provider must return ints, Fractions or Gaussian
    rationals, and ``omega`` must be rational.
    """

    rho: Provider
    c: Provider
    d: Provider
    omega: Any = None
    a: Provider | None = None
    b: Provider | None = None
    exact: bool = False
    label: str = ""

    def __post_init__(self):
        for name in ("rho", "c", "d", "a", "b"):
            object.__setattr__(self, name, _provider(getattr(self, name)))
        if self.omega is None and (self.a is None or self.b is None):
            raise ValueError("give omega (special form) or both a and b (general form)")
        if self.omega is not None and (self.a is not None or self.b is not None):
            raise ValueError("omega and explicit a/b are mutually exclusive")

    @property
    def special(self) -> bool:
        return self.omega is not None

    def _num(self, v):
        return as_exact(v) if self.exact else to_complex(v)

    def rho_at(self, k):
        return self._num(self.rho(k))

    def c_at(self, k):
        return self._num(self.c(k))

    def d_at(self, k):
        return self._num(self.d(k))

    def a_at(self, k):
        if self.special:
            return self._num((0, self.omega)) if self.exact else 1j * float(self.omega)
        return self._num(self.a(k))

    def b_at(self, k):
        if self.special:
            return self._num((0, -self.omega)) if self.exact else -1j * float(self.omega)
        return self._num(self.b(k))

    def quad(self, k) -> ComplexPoly:
        """``(x - a_k)(x - b_k)``; equal to ``x^2 + w^2`` in the special form."""
        a, b = self.a_at(k), self.b_at(k)
        return ComplexPoly([a * b, -(a + b), 1], exact=self.exact)

    def with_centers(self, centers: Provider, label: str = "") -> "RIIParams":
        """Same ``rho``, ``d`` and quadratic factors, new centers ``c_k``."""
        return RIIParams(
            rho=self.rho, c=centers, d=self.d, omega=self.omega, a=self.a, b=self.b,
            exact=self.exact, label=label or self.label,
        )


@dataclass(frozen=True)
class GCRRSpec:
    zeta: Any
    theta: Any = 0
    omega: Any = 1
    scaled: bool = False

    def __post_init__(self):
        if not self.zeta > 0:
            raise ValueError(f"zeta must be positive, got {self.zeta}")
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")


def gcrr_params(spec: GCRRSpec, exact: bool = False) -> RIIParams:
    """Recurrence coefficients of the (scaled or unscaled) GCRR family.

    Unscaled: ``rho_n = 1``, ``c_n = t/(z+n)``, ``d_n = n(2z+n-1) / (4(z+n)(z+n-1))``.
    Scaled:   ``rho_n = (z+n)/(2z+n)``, ``c_n = t/(z+n)``, ``d_n = n / (4(2z+n))``.
    """
    num = Fraction if exact else float
    z, t = num(spec.zeta), num(spec.theta)
    w = Fraction(spec.omega) if exact else float(spec.omega)

    def c(n):
        if z + n == 0:
            raise ValueError(f"zeta + {n} vanishes")
        return t / (z + n)

    if spec.scaled:
        def rho(n):
            return (z + n) / (2 * z + n)

        def d(n):
            return n / (4 * (2 * z + n))
    else:
        def rho(n):
            return num(1)

        def d(n):
            if n == 0:
                return num(0)
            den = 4 * (z + n) * (z + n - 1)
            if den == 0:
                raise ValueError(f"(zeta)_{n} vanishes")
            return n * (2 * z + n - 1) / den

    label = f"gcrr{'-scaled' if spec.scaled else ''}(zeta={spec.zeta}, theta={spec.theta}, omega={spec.omega})"
    return RIIParams(rho=rho, c=c, d=d, omega=w, exact=exact, label=label)


def constant_params(rho=1, c=0, d=Fraction(1, 4), omega=1, exact: bool = False) -> RIIParams:
    """Constant-coefficient special family; the default is ``P_{n+1} = x P_n - (x^2+1) P_{n-1} / 4``."""
    cast = Fraction if exact else float
    rho, c, d, omega = cast(rho), cast(c), cast(d), cast(omega)
    return RIIParams(
        rho=lambda k: rho, c=lambda k: c, d=lambda k: d, omega=omega, exact=exact,
        label=f"constant(rho={rho}, c={c}, d={d}, omega={omega})",
    )


def generate(params: RIIParams, n: int, check_degree: bool = True) -> list[ComplexPoly]:
    """``[P_0, ..., P_n]`` built by polynomial convolution."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    ex = params.exact
    one = ComplexPoly.const(1, exact=ex)
    out = [one]
    if n == 0:
        return out
    x = ComplexPoly.x(exact=ex)
    rho0 = params.rho_at(0)
    if not rho0:
        raise ValueError("rho_0 vanishes")
    out.append((x - params.c_at(0)) * rho0)
    for k in range(1, n):
        rho_k, d_k = params.rho_at(k), params.d_at(k)
        if not rho_k or not d_k:
            raise ValueError(f"degenerate recurrence at n={k}: rho={rho_k}, d={d_k}")
        nxt = (x - params.c_at(k)) * out[k] * rho_k - params.quad(k) * out[k - 1] * d_k
        if check_degree and nxt.degree != k + 1:
            raise DegreeCollapseError(k + 1, nxt.degree)
        out.append(nxt)
    return out


def rescale_check(spec: GCRRSpec, n: int) -> float:
    """Max coefficient deviation between the scaled family and ``(z)_k/(2z)_k`` times the unscaled one."""
    base = GCRRSpec(spec.zeta, spec.theta, spec.omega, scaled=False)
    sc = GCRRSpec(spec.zeta, spec.theta, spec.omega, scaled=True)
    p = generate(gcrr_params(base), n)
    q = generate(gcrr_params(sc), n)
    z = float(spec.zeta)
    dev = 0.0
    for k in range(n + 1):
        ratio = pochhammer(z, k) / pochhammer(2 * z, k)
        dev = max(dev, q[k].max_abs_diff(p[k] * ratio))
    return dev


@dataclass
class ChainSeqInfo:
    l: list = field(default_factory=list)
    valid: bool = True
    first_invalid: int | None = None


def minimal_params(d: Sequence) -> ChainSeqInfo:
    """Minimal parameter sequence of ``d_1, d_2, ...`` (``d[0]`` is ``d_1``).

    ``l_0 = 0`` and ``l_n = d_n / (1 - l_{n-1})``; the sequence is a valid
    parameter sequence when every ``l_n`` with ``n >= 1`` lies in (0, 1).
    """
    ls = [0 * d[0] if len(d) else 0]
    for n, dn in enumerate(d, start=1):
        if not dn > 0:
            raise ValueError(f"d_{n} = {dn} is not positive")
        if ls[-1] == 1:
            return ChainSeqInfo(ls, False, n)
        ln = dn / (1 - ls[-1])
        ls.append(ln)
        if not 0 < ln < 1:
            return ChainSeqInfo(ls, False, n)
    return ChainSeqInfo(ls, True, None)


def leading_coeffs(params: RIIParams, n: int) -> np.ndarray:
    """Leading coefficients of ``P_0..P_n`` (real part)."""
    polys = generate(params, n)
    return np.array([to_complex(p.lead).real for p in polys])


def leading_law_deviation(params: RIIParams, n: int) -> float:
    """Max of ``|k_m / k_{m-1} - (1 - l_{m-1})|`` over ``2 <= m <= n``.

    Requires the special form with ``rho_m = 1`` and ``d_m`` (m >= 1) a positive
    chain sequence; otherwise :class:`HypothesisError` is raised and nothing is
    asserted.
    """
    if not params.special:
        raise HypothesisError("law stated for the special form only")
    for m in range(n):
        if to_complex(params.rho_at(m)) != 1:
            raise HypothesisError(f"rho_{m} != 1")
    d = [to_complex(params.d_at(m)).real for m in range(1, max(n, 2))]
    info = minimal_params(d)
    if not info.valid:
        raise HypothesisError(f"d is not a chain sequence (fails at index {info.first_invalid})")
    k = leading_coeffs(params, n)
    dev = 0.0
    for m in range(2, n + 1):
        ratio = k[m] / k[m - 1]
        if not 0 < ratio < 1:
            raise HypothesisError(f"leading-coefficient ratio {ratio} at n={m} outside (0, 1)")
        dev = max(dev, abs(ratio - (1 - info.l[m - 1])))
    return dev


def _partial(params: RIIParams, k: int, x):
    """Partial numerator and denominator of level ``k`` of the continued fraction."""
    num = 1 if k == 0 else -params.d_at(k) * (x - params.a_at(k)) * (x - params.b_at(k))
    den = params.rho_at(k) * (x - params.c_at(k))
    return num, den


def cf_convergent(params: RIIParams, n: int, x):
    """``(A_n, B_n)`` of the n-th convergent of

    ``1/(rho_0(x-c_0) - d_1(x-a_1)(x-b_1)/(rho_1(x-c_1) - ...))``.

    ``B_n`` coincides with ``P_n(x)``.
    """
    if not params.exact:
        x = complex(x)
    a_prev, a_cur = 1, 0  # A_{-2}, A_{-1}
    b_prev, b_cur = 0, 1  # B_{-2}, B_{-1}
    for k in range(n):
        num, den = _partial(params, k, x)
        a_prev, a_cur = a_cur, den * a_cur + num * a_prev
        b_prev, b_cur = b_cur, den * b_cur + num * b_prev
    return a_cur, b_cur


def cf_value(params: RIIParams, n: int, x, tiny: float = 1e-300):
    """Backward (tail-first) evaluation of the n-th convergent value ``A_n / B_n``."""
    x = complex(x)
    tail = 0j
    for k in range(n - 1, -1, -1):
        num, den = _partial(params, k, x)
        denom = den + tail
        if abs(denom) <= tiny:
            raise ConvergentError(f"vanishing partial denominator at level {k}")
        tail = num / denom
    return tail


def cf_terminating_index(params: RIIParams, x, n_max: int, tol: float = 0.0) -> int | None:
    """First level ``k >= 1`` whose partial numerator vanishes at ``x``, if any."""
    for k in range(1, n_max + 1):
        num, _ = _partial(params, k, x)
        if abs(to_complex(num)) <= tol:
            return k
    return None
