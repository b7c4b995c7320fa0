"""Exact scalars with certified error enclosures.

An ExactScalar is a rational midpoint plus a rational radius.  Radius zero
means the value is known exactly; a positive radius certifies that the true
(possibly irrational) value lies in [value - radius, value + radius].
Comparisons refuse to guess: when the enclosures overlap in a way that makes
the answer depend on the unknown part, they raise UndecidableComparison so
the caller can refine the enclosure and retry.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

Rational = Union[int, Fraction, str]


class UndecidableComparison(Exception):
    """Enclosure too coarse to decide the requested comparison."""


def as_fraction(x: Rational) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


@dataclass(frozen=True)
class ExactScalar:
    value: Fraction
    radius: Fraction = Fraction(0)

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("enclosure radius must be nonnegative")

    @staticmethod
    def exact(x: Rational) -> "ExactScalar":
        return ExactScalar(as_fraction(x))

    @staticmethod
    def enclosure(value: Rational, radius: Rational) -> "ExactScalar":
        return ExactScalar(as_fraction(value), as_fraction(radius))

    @property
    def lo(self) -> Fraction:
        return self.value - self.radius

    @property
    def hi(self) -> Fraction:
        return self.value + self.radius

    @property
    def is_exact(self) -> bool:
        return self.radius == 0

    def __add__(self, other: "ExactScalar") -> "ExactScalar":
        return ExactScalar(self.value + other.value, self.radius + other.radius)

    def __sub__(self, other: "ExactScalar") -> "ExactScalar":
        return ExactScalar(self.value - other.value, self.radius + other.radius)

    def __neg__(self) -> "ExactScalar":
        return ExactScalar(-self.value, self.radius)

    def __mul__(self, other: "ExactScalar") -> "ExactScalar":
        r = (abs(self.value) * other.radius
             + abs(other.value) * self.radius
             + self.radius * other.radius)
        return ExactScalar(self.value * other.value, r)

    def abs_enclosure(self) -> "ExactScalar":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return ExactScalar(-self.value, self.radius)
        # straddles zero: |x| lies in [0, max(|lo|, hi)]
        top = max(-self.lo, self.hi)
        return ExactScalar(top / 2, top / 2)

    def certainly_lt(self, other: "ExactScalar") -> bool:
        """Decide self < other, raising if the enclosures cannot tell."""
        if self.hi < other.lo:
            return True
        if self.lo >= other.hi:
            return False
        if self.is_exact and other.is_exact:
            return self.value < other.value
        raise UndecidableComparison(
            f"cannot decide {self} < {other} at current precision")

    def certainly_le(self, other: "ExactScalar") -> bool:
        if self.hi <= other.lo:
            return True
        if self.lo > other.hi:
            return False
        if self.is_exact and other.is_exact:
            return self.value <= other.value
        raise UndecidableComparison(
            f"cannot decide {self} <= {other} at current precision")


# An oracle produces tighter and tighter enclosures of a constant: calling it
# with precision k must return an enclosure of radius at most 10**-k.
ScalarOracle = Callable[[int], ExactScalar]


def sqrt_enclosure(q: Rational, digits: int = 30) -> ExactScalar:
    """Enclosure of sqrt(q) with radius at most 10**-digits (q >= 0)."""
    q = as_fraction(q)
    if q < 0:
        raise ValueError("square root of negative rational")
    scale = 10 ** digits
    # n = isqrt(floor(q * scale^2)) gives n/scale <= sqrt(q) < (n+1)/scale
    import math
    n = math.isqrt((q.numerator * scale * scale) // q.denominator)
    lo = Fraction(n, scale)
    hi = Fraction(n + 1, scale)
    return ExactScalar((lo + hi) / 2, (hi - lo) / 2)


def cbrt_enclosure(q: Rational, digits: int = 30) -> ExactScalar:
    """Enclosure of the real cube root of q with radius at most 10**-digits."""
    q = as_fraction(q)
    neg = q < 0
    if neg:
        q = -q
    scale = 10 ** digits
    target = (q.numerator * scale ** 3) // q.denominator
    # integer cube root by binary search: n^3 <= target < (n+1)^3
    if target == 0:
        n = 0
    else:
        n = 1 << ((target.bit_length() + 2) // 3)
        lo_i, hi_i = 0, n
        while hi_i - lo_i > 1:
            mid = (lo_i + hi_i) // 2
            if mid ** 3 <= target:
                lo_i = mid
            else:
                hi_i = mid
        n = lo_i
    lo = Fraction(n, scale)
    hi = Fraction(n + 1, scale)
    enc = ExactScalar((lo + hi) / 2, (hi - lo) / 2)
    return -enc if neg else enc


def sqrt_oracle(q: Rational) -> ScalarOracle:
    q = as_fraction(q)
    return lambda digits: sqrt_enclosure(q, digits)


def cbrt_oracle(q: Rational) -> ScalarOracle:
    q = as_fraction(q)
    return lambda digits: cbrt_enclosure(q, digits)


_FACT = [1]
for _i in range(1, 40):
    _FACT.append(_FACT[-1] * _i)


def sin_enclosure(x: ExactScalar, digits: int = 30) -> ExactScalar:
    """Enclosure of sin at an enclosed argument.

    Uses the Taylor series at the rational midpoint with the standard
    remainder bound |R_N| <= |x|^(N+1)/(N+1)!, then widens by the argument
    radius (sin is 1-Lipschitz).  Intended for moderate |x| (say <= 16).
    """
    v = x.value
    if abs(v) > 64:
        raise ValueError("sin enclosure supported only for moderate arguments")
    tol = Fraction(1, 10 ** digits)
    total = Fraction(0)
    term_pow = v
    k = 0
    while True:
        n = 2 * k + 1
        total += (-1) ** k * term_pow / _FACT[n]
        k += 1
        n = 2 * k + 1
        if n >= len(_FACT):
            raise ValueError("sin enclosure did not converge within table")
        term_pow = term_pow * v * v
        rem = abs(term_pow) / _FACT[n]
        if rem < tol:
            break
    return ExactScalar(total, rem + x.radius)
