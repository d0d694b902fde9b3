"""First-order dual numbers for forward-mode differentiation.

All closed-form parametrizations and the projective reflection chain are
rational (plus sine/cosine for angle-parametrized conics), so seeding one
parameter with `Dual(x, 1)` and reading the derivative slot at the end
gives exact forward-mode derivatives with no step-size tuning.
"""

from __future__ import annotations

import cmath
import math


def _sin(x):
    return cmath.sin(x) if isinstance(x, complex) else math.sin(x)


def _cos(x):
    return cmath.cos(x) if isinstance(x, complex) else math.cos(x)


class Dual:
    """a + b*eps with eps**2 = 0; b carries d(a)/d(seed parameter)."""

    __slots__ = ("a", "b")

    def __init__(self, a, b=0.0):
        self.a = a
        self.b = b

    def __repr__(self):
        return f"Dual({self.a!r}, {self.b!r})"

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.a + other.a, self.b + other.b)
        return Dual(self.a + other, self.b)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.a, -self.b)

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.a - other.a, self.b - other.b)
        return Dual(self.a - other, self.b)

    def __rsub__(self, other):
        return Dual(other - self.a, -self.b)

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.a * other.a, self.a * other.b + self.b * other.a)
        return Dual(self.a * other, self.b * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            inv = 1 / other.a
            return Dual(self.a * inv, (self.b - self.a * other.b * inv) * inv)
        return Dual(self.a / other, self.b / other)

    def __rtruediv__(self, other):
        inv = 1 / self.a
        return Dual(other * inv, -other * self.b * inv * inv)

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise TypeError("Dual supports nonnegative integer powers only")
        out = Dual(1, 0)
        for _ in range(n):
            out = out * self
        return out

    def __abs__(self):
        # Magnitude of the primal part; used only for pivoting and scales.
        return abs(self.a)

    def __eq__(self, other):
        if isinstance(other, Dual):
            return self.a == other.a and self.b == other.b
        return self.a == other and self.b == 0

    def __hash__(self):
        return hash((self.a, self.b))

    def sin(self):
        return Dual(_sin(self.a), self.b * _cos(self.a))

    def cos(self):
        return Dual(_cos(self.a), -self.b * _sin(self.a))


def value(x):
    """Primal part of a scalar, Dual or not."""
    return x.a if isinstance(x, Dual) else x


def deriv(x):
    """Derivative part of a scalar, Dual or not."""
    return x.b if isinstance(x, Dual) else 0.0


def dsin(x):
    return x.sin() if isinstance(x, Dual) else _sin(x)


def dcos(x):
    return x.cos() if isinstance(x, Dual) else _cos(x)
