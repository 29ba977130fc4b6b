"""Terminating Gauss hypergeometric series and the closed forms built on them.

The generalized complementary Romanovski-Routh (GCRR) polynomials have the
representation::

    P_n(x) = (x - i w)^n / 2^n * (2z)_n / (z)_n * 2F1(-n, e; e + conj(e); -2i / (x - i w))

with ``e = z + i t`` (``z`` = zeta, ``t`` = theta).  The argument ``-2i/(x-iw)``
only reproduces the three-term recurrence at ``w = 1``; :func:`gcrr_closed_form`
therefore refuses other values of omega.
"""

from __future__ import annotations


import numpy as np

from fractions import Fraction

from .poly import ComplexPoly, as_exact, is_exact_scalar, to_complex

__all__ = [
    "HypSeriesError",
    "gcrr_closed_form",
    "hyp2f1_terminating",
    "hypergeometric_terms",
    "ode_residual",
    "pochhammer",
    "qn_closed_form",
    "qn_to_gcrr",
]


class HypSeriesError(ValueError):
    """A terminating series hits a pole, or a prefactor vanishes."""


def pochhammer(a, n: int):
    """Rising factorial ``(a)_n = a (a+1) ... (a+n-1)``, with ``(a)_0 = 1``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = 1
    for k in range(n):
        out = out * (a + k)
    return out


def hypergeometric_terms(n: int, b, c) -> list:
    """Coefficients ``(-n)_k (b)_k / ((c)_k k!)`` of ``z**k`` for ``k = 0..n``.

    Exact (Gaussian-rational) parameters give exact terms, otherwise complex.
    """
    exact = is_exact_scalar(b) and is_exact_scalar(c)
    t = as_exact(1) if exact else 1 + 0j
    terms = [t]
    for k in range(n):
        denom = (c + k) * (k + 1)
        if not denom:
            raise HypSeriesError(f"pole in the lower parameter: c + {k} = 0")
        t = t * (-n + k) * (b + k) / denom
        terms.append(t if exact else complex(t))
    return terms


def hyp2f1_terminating(n: int, b, c, z):
    """``2F1(-n, b; c; z)`` summed in ascending powers of ``z``.

    Only ``c + k`` for ``k < n`` may not vanish; ``z`` can be a scalar or an array.
    """
    acc = 0j
    zk = np.ones_like(np.asarray(z, dtype=complex))
    for t in hypergeometric_terms(n, b, c):
        acc = acc + t * zk
        zk = zk * z
    return acc


def _exact_param(v, exact: bool):
    """Float parameters are converted to the Gaussian rational with the same binary value."""
    if is_exact_scalar(v):
        return as_exact(v) if exact else to_complex(v)
    if not exact:
        return complex(v)
    if isinstance(v, complex):
        return as_exact((Fraction(v.real), Fraction(v.imag)))
    return as_exact(Fraction(v))


def _linear(shift, exact: bool) -> ComplexPoly:
    """``x - shift``."""
    return ComplexPoly([-shift, 1], exact=exact)


def gcrr_closed_form(spec, n: int, exact: bool = True) -> ComplexPoly:
    """Unscaled GCRR polynomial ``P_n`` from its hypergeometric representation::

        (x - i)^n / 2^n (2z)_n / (z)_n 2F1(-n, z + it; 2z; -2i / (x - i))

    Parameters
    ----------
    spec : GCRRSpec
        Only ``zeta``, ``theta`` and ``omega`` are read; ``omega`` must be 1.
    n : int
        Degree.
    exact : bool
        Sum in Gaussian-rational arithmetic (inputs taken at their binary
        values) and round once at the end.  Float summation loses about
        ``1e-11`` at ``n = 20`` to cancellation in the binomial expansions.
    """
    if float(spec.omega) != 1.0:
        raise ValueError("the hypergeometric representation is only consistent at omega = 1")
    if not spec.zeta > 0:
        raise ValueError("zeta must be positive")
    zeta = _exact_param(spec.zeta, exact)
    theta = _exact_param(spec.theta, exact)
    I = _exact_param(1j, exact)
    e = zeta + I * theta
    terms = hypergeometric_terms(n, e, 2 * zeta)
    # (x - i)^n * (-2i/(x - i))^k = (-2i)^k (x - i)^(n-k)
    lin = _linear(I, exact)
    acc = ComplexPoly([], exact=exact)
    power = ComplexPoly.const(1, exact=exact)
    for k in range(n, -1, -1):
        acc = acc + power * (terms[k] * (-2 * I) ** k)
        power = power * lin
    pref = pochhammer(2 * zeta, n) / pochhammer(zeta, n) / 2**n
    out = acc * pref
    return out.to_float() if exact else out


def qn_closed_form(alpha, beta, omega, n: int, exact: bool = True) -> ComplexPoly:
    """Complementary Romanovski-Routh polynomial ``Q_n^{(alpha, beta)}``::

        (-2iw)^n (beta - n + i alpha/2)_n 2F1(-n, 2 beta - n - 1; beta - n + i alpha/2; (w - ix)/(2w))
    """
    out = _qn(alpha, beta, omega, n, exact)
    return out.to_float() if exact else out


def _qn(alpha, beta, omega, n: int, exact: bool) -> ComplexPoly:
    alpha, beta, omega = (_exact_param(v, exact) for v in (alpha, beta, omega))
    I = _exact_param(1j, exact)
    c = beta - n + I * alpha / 2
    pref = (-2 * I * omega) ** n * pochhammer(c, n)
    if not pref:
        raise HypSeriesError("vanishing Pochhammer prefactor")
    terms = hypergeometric_terms(n, 2 * beta - n - 1, c)
    half = _exact_param(0.5, exact)
    z = ComplexPoly([half, -half * I / omega], exact=exact)  # (w - ix) / (2w)
    acc = ComplexPoly([], exact=exact)
    zk = ComplexPoly.const(1, exact=exact)
    for t in terms:
        acc = acc + zk * t
        zk = zk * z
    return acc * pref


def qn_to_gcrr(zeta, theta, omega, n: int, exact: bool = True) -> ComplexPoly:
    """``(-1)^n / (2^n (zeta)_n) * Q_n^{(2 theta, 1 - zeta)}``, the unscaled GCRR ``P_n`` (at ``omega = 1``)."""
    z, t, w = (_exact_param(v, exact) for v in (zeta, theta, omega))
    q = _qn(2 * t, 1 - z, w, n, exact)
    out = q * ((-1) ** n / (2**n * pochhammer(z, n)))
    return out.to_float() if exact else out


def ode_residual(spec, n: int, p: ComplexPoly | None = None) -> ComplexPoly:
    """Residual of the second-order equation satisfied by ``P_n``.

    ``(x^2 + w^2) y'' + (2 b x + a w) y' - n (n + 2b - 1) y`` with
    ``a = 2 theta`` and ``b = 1 - zeta - n``.  ``p`` defaults to the recurrence
    output for the unscaled family.  The equation and the recurrence agree only
    at ``omega = 1``.
    """
    zeta, theta, omega = float(spec.zeta), float(spec.theta), float(spec.omega)
    if p is None:
        from .recurrence import GCRRSpec, gcrr_params, generate

        p = generate(gcrr_params(GCRRSpec(zeta, theta, omega, scaled=False)), n)[n]
    a = 2 * theta
    b = 1 - zeta - n
    d1 = p.derivative()
    d2 = d1.derivative()
    return (
        ComplexPoly([omega**2, 0, 1]) * d2
        + ComplexPoly([a * omega, 2 * b]) * d1
        - p * (n * (n + 2 * b - 1))
    )


