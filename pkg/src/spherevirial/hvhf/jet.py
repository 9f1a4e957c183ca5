"""Truncated Taylor series in a single seed parameter.

A :class:`Jet` of order J holds ``c0..cJ`` with ``f(p0 + d) = sum c_k d**k``.
Coefficients may be ``float``, ``fractions.Fraction`` or ``mpmath.mpf``; the
arithmetic only uses ``+ - * /`` on them, plus a square root for
:meth:`Jet.sqrt`.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath

from ..errors import TruncationError

__all__ = ["Jet", "as_jet"]


def _scalar_sqrt(x):
    if isinstance(x, mpmath.mpf):
        return mpmath.sqrt(x)
    if isinstance(x, Fraction):
        num, den = math.isqrt(x.numerator), math.isqrt(x.denominator)
        if num * num == x.numerator and den * den == x.denominator:
            return Fraction(num, den)
    return math.sqrt(x)


class Jet:
    """Truncated Taylor expansion with exact truncated-series arithmetic.

    Binary operations between jets of different order truncate to the lower
    order. Plain numbers combine as constants.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = tuple(coeffs)
        if not coeffs:
            raise ValueError("a jet needs at least one coefficient")
        self.coeffs = coeffs

    @classmethod
    def variable(cls, value, order):
        """The seed parameter itself: ``value + 1*d``."""
        zero = value * 0
        if order == 0:
            return cls((value,))
        return cls((value, zero + 1) + (zero,) * (order - 1))

    @classmethod
    def constant(cls, value, order):
        zero = value * 0
        return cls((value,) + (zero,) * order)

    @property
    def order(self):
        return len(self.coeffs) - 1

    @property
    def value(self):
        return self.coeffs[0]

    def truncate(self, order):
        if order > self.order:
            raise TruncationError(f"cannot raise jet order {self.order} to {order}")
        return Jet(self.coeffs[: order + 1])

    def derivative(self):
        """Jet of the first derivative; consumes one order."""
        if self.order < 1:
            raise TruncationError("jet of order 0 carries no derivative information")
        return Jet(k * c for k, c in enumerate(self.coeffs) if k > 0)

    def taylor_derivative(self, n):
        """n-th derivative at the expansion point (``n! * c_n``)."""
        if n > self.order:
            raise TruncationError(f"derivative {n} exceeds jet order {self.order}")
        return math.factorial(n) * self.coeffs[n]

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    # arithmetic -----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            return other
        return Jet.constant(other, self.order)

    def __add__(self, other):
        other = self._coerce(other)
        n = min(self.order, other.order) + 1
        return Jet(a + b for a, b in zip(self.coeffs[:n], other.coeffs[:n]))

    __radd__ = __add__

    def __neg__(self):
        return Jet(-c for c in self.coeffs)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(c * other for c in self.coeffs)
        n = min(self.order, other.order) + 1
        a, b = self.coeffs, other.coeffs
        return Jet(sum(a[i] * b[k - i] for i in range(1, k + 1)) + a[0] * b[k] for k in range(n))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(c / other for c in self.coeffs)
        n = min(self.order, other.order) + 1
        a, b = self.coeffs, other.coeffs
        if b[0] == 0:
            raise ZeroDivisionError("jet division needs a nonzero constant term")
        q = []
        for k in range(n):
            acc = a[k]
            for i in range(1, k + 1):
                acc = acc - b[i] * q[k - i]
            q.append(acc / b[0])
        return Jet(q)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = Jet.constant(self.coeffs[0] * 0 + 1, self.order)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def sqrt(self):
        c = self.coeffs
        if not c[0] > 0:
            raise ValueError("jet square root needs a positive constant term")
        s = [_scalar_sqrt(c[0])]
        for k in range(1, len(c)):
            acc = c[k]
            for i in range(1, k):
                acc = acc - s[i] * s[k - i]
            s.append(acc / (2 * s[0]))
        return Jet(s)

    def map(self, fn):
        """Apply `fn` to every coefficient (e.g. ``float`` for reporting)."""
        return Jet(fn(c) for c in self.coeffs)

    def __eq__(self, other):
        if isinstance(other, Jet):
            return self.coeffs == other.coeffs
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        return f"Jet({list(self.coeffs)!r})"


def as_jet(x, order):
    return x if isinstance(x, Jet) else Jet.constant(x, order)
