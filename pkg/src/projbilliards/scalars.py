"""Scalar fields: exact rationals and floating real/complex numbers.

Geometry code is written against plain Python arithmetic so that the same
formulas run over floats, complex numbers, exact `Fraction`s and the dual
numbers used for differentiation.  This module holds the mode tags, the
parsing rules and the zero/equality predicates that differ between the
exact and the floating worlds.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

REAL = "f64"
COMPLEX = "complex"
RATIONAL = "rational"
FIELD_MODES = (REAL, COMPLEX, RATIONAL)

# Scale-invariant tolerance for incidence predicates in floating modes.
INCIDENCE_RTOL = 1e-10


def is_exact(x) -> bool:
    """True when the scalar supports exact zero tests."""
    return isinstance(x, (int, Fraction))


def all_exact(values) -> bool:
    return all(is_exact(v) for v in values)


def mag(x) -> float:
    """Magnitude of a scalar, usable for pivoting and tolerance scales."""
    return abs(x)


def near_zero(x, scale, rtol: float = INCIDENCE_RTOL) -> bool:
    """Zero test: exact for rationals, relative to `scale` for floats."""
    if is_exact(x):
        return x == 0
    return abs(x) <= rtol * scale


def parse_scalar(value, mode: str):
    """Parse a config number for the given field mode.

    Rational mode requires ints or strings like "3/5" so that exact inputs
    survive parsing bit-exactly; floating modes also accept decimal
    literals.
    """
    if mode == RATIONAL:
        if isinstance(value, bool):
            raise ValueError("booleans are not scalars")
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, str):
            return Fraction(value)
        raise ValueError(
            f"rational mode needs an int or a 'p/q' string, got {value!r}"
        )
    if isinstance(value, bool):
        raise ValueError("booleans are not scalars")
    if isinstance(value, (int, float)):
        num = float(value)
    elif isinstance(value, str):
        num = float(Fraction(value))
    else:
        raise ValueError(f"cannot parse scalar {value!r}")
    return complex(num) if mode == COMPLEX else num


def format_scalar(x) -> str:
    """Deterministic 17-significant-digit rendering for CSV/JSON output."""
    if isinstance(x, Fraction):
        x = float(x)
    if isinstance(x, complex):
        return "%.17g%+.17gj" % (x.real, x.imag)
    return "%.17g" % x


def clear_denominators(coords):
    """Scale an exact tuple by the common denominator, returning ints.

    The scaling factor is shared across all entries, so affine relations
    between the entries survive; integer tuples keep the exact geometry
    fast because integer products need no gcd reduction.
    """
    fracs = [Fraction(c) for c in coords]
    denom_lcm = 1
    for f in fracs:
        denom_lcm = denom_lcm * f.denominator // gcd(denom_lcm, f.denominator)
    return tuple(int(f * denom_lcm) for f in fracs)


def normalize_homogeneous(coords):
    """Canonical representative of a homogeneous tuple.

    Exact tuples are scaled to coprime integers with the first nonzero
    entry positive; floating tuples are divided by the entry of largest
    magnitude.
    """
    if all(c == 0 for c in coords):
        raise ValueError("homogeneous tuple must be nonzero")
    if all_exact(coords):
        ints = list(clear_denominators(coords))
        g = 0
        for n in ints:
            g = gcd(g, n)
        ints = [n // g for n in ints]
        for n in ints:
            if n != 0:
                if n < 0:
                    ints = [-m for m in ints]
                break
        return tuple(ints)
    pivot = max(coords, key=mag)
    return tuple(c / pivot for c in coords)
