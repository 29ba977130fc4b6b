"""Dense univariate polynomials with complex (or exact Gaussian-rational) coefficients.

Coefficients are stored in ascending degree order.  Two coefficient modes exist:

* floating mode (default): ``complex128`` numpy array, trailing coefficients
  below ``TRIM_RTOL * max|c|`` are dropped;
* exact mode: a tuple of :data:`sympy.polys.domains.QQ_I` elements (Gaussian
  rationals), trailing exact zeros are dropped.

Mixing the two modes promotes to floating mode.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Number

import numpy as np
from sympy.polys.domains import QQ_I

__all__ = [
    "ComplexPoly",
    "TRIM_RTOL",
    "as_exact",
    "is_exact_scalar",
    "to_complex",
    "wronskian",
]

TRIM_RTOL = 1e-14

_GaussianRational = type(QQ_I(0, 0))


def is_exact_scalar(v) -> bool:
    return isinstance(v, (int, Fraction, _GaussianRational)) and not isinstance(v, bool)


def as_exact(v):
    """Convert an int, Fraction, Gaussian rational or ``(re, im)`` pair to QQ_I."""
    if isinstance(v, _GaussianRational):
        return v
    if isinstance(v, tuple):
        re, im = v
        return QQ_I.convert(Fraction(re)) + QQ_I.convert(Fraction(im)) * QQ_I(0, 1)
    if isinstance(v, (int, Fraction)):
        return QQ_I.convert(Fraction(v))
    raise TypeError(f"cannot represent {v!r} exactly")


def to_complex(v) -> complex:
    if isinstance(v, _GaussianRational):
        return complex(float(v.x), float(v.y))
    return complex(v)


class ComplexPoly:
    """Immutable dense polynomial ``sum_k coeffs[k] * x**k`` in canonical form."""

    __slots__ = ("_c", "_exact")

    def __init__(self, coeffs=(), exact: bool = False):
        if exact:
            c = [as_exact(v) for v in coeffs]
            while c and not c[-1]:
                c.pop()
            self._c = tuple(c)
        else:
            arr = np.array([to_complex(v) for v in coeffs], dtype=complex)
            if arr.size:
                scale = np.max(np.abs(arr))
                nz = np.nonzero(np.abs(arr) > TRIM_RTOL * scale)[0]
                arr = arr[: nz[-1] + 1] if nz.size else arr[:0]
            arr.setflags(write=False)
            self._c = arr
        self._exact = exact

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, v, exact: bool = False) -> "ComplexPoly":
        return cls([v], exact=exact)

    @classmethod
    def x(cls, exact: bool = False) -> "ComplexPoly":
        return cls([0, 1], exact=exact)

    @classmethod
    def linear(cls, root, lead=1, exact: bool = False) -> "ComplexPoly":
        """``lead * (x - root)``."""
        if exact:
            root, lead = as_exact(root), as_exact(lead)
        return cls([-lead * root, lead], exact=exact)

    # -- basic properties ---------------------------------------------------
    @property
    def coeffs(self):
        return self._c

    @property
    def exact(self) -> bool:
        return self._exact

    @property
    def degree(self) -> int:
        return len(self._c) - 1

    @property
    def lead(self):
        return self._c[-1] if len(self._c) else 0

    def is_zero(self) -> bool:
        return len(self._c) == 0

    def to_float(self) -> "ComplexPoly":
        if not self._exact:
            return self
        return ComplexPoly([to_complex(v) for v in self._c])

    def as_array(self) -> np.ndarray:
        """Complex coefficient array (a copy in exact mode)."""
        if self._exact:
            return np.array([to_complex(v) for v in self._c], dtype=complex)
        return self._c

    def max_imag(self) -> float:
        a = self.as_array()
        return float(np.max(np.abs(a.imag))) if a.size else 0.0

    def __repr__(self):
        tag = ", exact=True" if self._exact else ""
        coeffs = list(self._c) if self._exact else [complex(c) for c in self._c]
        return f"ComplexPoly({coeffs!r}{tag})"

    # -- evaluation ---------------------------------------------------------
    def __call__(self, x):
        """Horner evaluation; ``x`` may be a scalar or a numpy array."""
        if self._exact and is_exact_scalar(x):
            acc = QQ_I(0, 0)
            xv = as_exact(x)
            for c in reversed(self._c):
                acc = acc * xv + c
            return acc
        coeffs = self.as_array()
        acc = np.zeros_like(np.asarray(x, dtype=complex))
        for c in coeffs[::-1]:
            acc = acc * x + c
        return acc[()] if acc.ndim == 0 else acc

    # -- ring operations ----------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, ComplexPoly):
            if self._exact and other._exact:
                return self, other, True
            return self.to_float(), other.to_float(), False
        if self._exact and is_exact_scalar(other):
            return self, ComplexPoly([other], exact=True), True
        if isinstance(other, Number) or isinstance(other, _GaussianRational):
            return self.to_float(), ComplexPoly([to_complex(other)]), False
        return NotImplemented

    def __add__(self, other):
        co = self._coerce(other)
        if co is NotImplemented:
            return co
        a, b, exact = co
        if exact:
            m = max(len(a._c), len(b._c))
            z = QQ_I(0, 0)
            return ComplexPoly(
                [(a._c[k] if k < len(a._c) else z) + (b._c[k] if k < len(b._c) else z) for k in range(m)],
                exact=True,
            )
        m = max(a._c.size, b._c.size)
        out = np.zeros(m, dtype=complex)
        out[: a._c.size] += a._c
        out[: b._c.size] += b._c
        return ComplexPoly(out)

    __radd__ = __add__

    def __neg__(self):
        if self._exact:
            return ComplexPoly([-v for v in self._c], exact=True)
        return ComplexPoly(-self._c)

    def __sub__(self, other):
        co = self._coerce(other)
        if co is NotImplemented:
            return co
        return co[0] + (-co[1])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        co = self._coerce(other)
        if co is NotImplemented:
            return co
        a, b, exact = co
        if a.is_zero() or b.is_zero():
            return ComplexPoly((), exact=exact)
        if exact:
            out = [QQ_I(0, 0)] * (len(a._c) + len(b._c) - 1)
            for i, ai in enumerate(a._c):
                if not ai:
                    continue
                for j, bj in enumerate(b._c):
                    out[i + j] = out[i + j] + ai * bj
            return ComplexPoly(out, exact=True)
        return ComplexPoly(np.convolve(a._c, b._c))

    __rmul__ = __mul__

    def scale(self, s) -> "ComplexPoly":
        return self * s

    def __truediv__(self, s):
        if isinstance(s, ComplexPoly):
            return NotImplemented
        if self._exact and is_exact_scalar(s):
            inv = QQ_I(1, 0) / as_exact(s)
            return ComplexPoly([v * inv for v in self._c], exact=True)
        return ComplexPoly(self.as_array() / to_complex(s))

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = ComplexPoly.const(1, exact=self._exact)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, ComplexPoly):
            return NotImplemented
        if self._exact and other._exact:
            return self._c == other._c
        a, b = self.as_array(), other.as_array()
        return a.shape == b.shape and bool(np.all(a == b))

    __hash__ = None

    def derivative(self) -> "ComplexPoly":
        if self._exact:
            return ComplexPoly([k * self._c[k] for k in range(1, len(self._c))], exact=True)
        k = np.arange(1, self._c.size)
        return ComplexPoly(self._c[1:] * k)

    def max_abs_coeff(self) -> float:
        a = self.as_array()
        return float(np.max(np.abs(a))) if a.size else 0.0

    def max_abs_diff(self, other: "ComplexPoly") -> float:
        """Largest coefficient-wise deviation |self - other|, in floating arithmetic."""
        a, b = self.as_array(), other.as_array()
        m = max(a.size, b.size)
        da = np.zeros(m, dtype=complex)
        db = np.zeros(m, dtype=complex)
        da[: a.size] = a
        db[: b.size] = b
        return float(np.max(np.abs(da - db))) if m else 0.0


def wronskian(p: ComplexPoly, q: ComplexPoly) -> ComplexPoly:
    """``p q' - q p'``."""
    return p * q.derivative() - q * p.derivative()
