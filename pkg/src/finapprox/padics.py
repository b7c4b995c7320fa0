"""Finite p-adic expansions and the p-adic absolute value.

Values are finite digit vectors sum_{i} d_i p^(v+i) with d_0 != 0, stored
little-endian from the leading exponent v.  Every value the toolkit builds
(residue rings, scaled residue systems, differences for closeness checks)
is such a finite expansion, so arithmetic can stay exact by round-tripping
through Fraction; nothing here ever stores an infinite tail.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple


def _check_prime(p: int) -> None:
    if p < 2:
        raise ValueError(f"p must be a prime >= 2, got {p}")
    d = 2
    while d * d <= p:
        if p % d == 0:
            raise ValueError(f"p must be prime, got {p}")
        d += 1


def fraction_valuation(q: Fraction, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    if q == 0:
        raise ValueError("valuation of zero is undefined")
    num, den = q.numerator, q.denominator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def fraction_norm(q: Fraction, p: int) -> Fraction:
    """p-adic absolute value |q|_p = p**-v(q); |0|_p = 0."""
    if q == 0:
        return Fraction(0)
    v = fraction_valuation(q, p)
    return Fraction(1, p ** v) if v >= 0 else Fraction(p ** (-v))


@dataclass(frozen=True)
class PadicDigits:
    """Finite expansion sum d_i p^(valuation+i); zero has empty digits."""

    p: int
    valuation: int
    digits: Tuple[int, ...]

    def __post_init__(self):
        _check_prime(self.p)
        if self.digits:
            if not all(0 <= d < self.p for d in self.digits):
                raise ValueError("digits out of range")
            if self.digits[0] == 0 or self.digits[-1] == 0:
                raise ValueError("leading and trailing digits must be nonzero")
        elif self.valuation != 0:
            raise ValueError("zero is stored with valuation 0")

    @property
    def is_zero(self) -> bool:
        return not self.digits

    @staticmethod
    def zero(p: int) -> "PadicDigits":
        return PadicDigits(p, 0, ())

    @staticmethod
    def from_fraction(q: Fraction, p: int) -> "PadicDigits":
        """Exact conversion; q must be nonnegative with denominator a power of p."""
        q = Fraction(q)
        if q == 0:
            return PadicDigits.zero(p)
        if q < 0:
            raise ValueError("finite expansions represent nonnegative values only")
        v = fraction_valuation(q, p)
        u = q / Fraction(p) ** v
        if u.denominator != 1:
            raise ValueError(f"{q} has no finite base-{p} expansion")
        n = u.numerator
        digits = []
        while n:
            n, d = divmod(n, p)
            digits.append(d)
        return PadicDigits(p, v, tuple(digits))

    @staticmethod
    def from_int(n: int, p: int) -> "PadicDigits":
        return PadicDigits.from_fraction(Fraction(n), p)

    def to_fraction(self) -> Fraction:
        mant = 0
        for d in reversed(self.digits):
            mant = mant * self.p + d
        if self.valuation >= 0:
            return Fraction(mant * self.p ** self.valuation)
        return Fraction(mant, self.p ** (-self.valuation))

    def norm(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        v = self.valuation
        return Fraction(1, self.p ** v) if v >= 0 else Fraction(self.p ** (-v))

    def __add__(self, other: "PadicDigits") -> "PadicDigits":
        self._check_same_p(other)
        return PadicDigits.from_fraction(self.to_fraction() + other.to_fraction(), self.p)

    def __mul__(self, other: "PadicDigits") -> "PadicDigits":
        self._check_same_p(other)
        return PadicDigits.from_fraction(self.to_fraction() * other.to_fraction(), self.p)

    def _check_same_p(self, other: "PadicDigits") -> None:
        if self.p != other.p:
            raise ValueError(f"mixed primes {self.p} and {other.p}")

    def to_text(self) -> str:
        """Canonical text form 'p^v * (d0 d1 ...)', little-endian; zero is '0'."""
        if self.is_zero:
            return "0"
        body = " ".join(str(d) for d in self.digits)
        return f"{self.p}^{self.valuation} * ({body})"

    @staticmethod
    def from_text(text: str, p: int | None = None) -> "PadicDigits":
        text = text.strip()
        if text == "0":
            if p is None:
                raise ValueError("zero literal needs an explicit prime")
            return PadicDigits.zero(p)
        head, _, tail = text.partition("*")
        base_s, _, exp_s = head.strip().partition("^")
        if not exp_s:
            raise ValueError(f"malformed p-adic literal: {text!r}")
        base = int(base_s)
        if p is not None and base != p:
            raise ValueError(f"expected prime {p}, literal uses {base}")
        tail = tail.strip()
        if not (tail.startswith("(") and tail.endswith(")")):
            raise ValueError(f"malformed digit vector in {text!r}")
        digits = tuple(int(d) for d in tail[1:-1].split())
        return PadicDigits(base, int(exp_s), digits)


def padic_norm(x: "PadicDigits | Fraction", p: int | None = None) -> Fraction:
    """|x|_p for a digit vector or (with explicit p) a rational."""
    if isinstance(x, PadicDigits):
        return x.norm()
    if p is None:
        raise ValueError("rational input requires the prime")
    return fraction_norm(Fraction(x), p)


def padic_distance(x: PadicDigits, y: PadicDigits) -> Fraction:
    """|x - y|_p, computed exactly through Fractions."""
    x._check_same_p(y)
    return fraction_norm(x.to_fraction() - y.to_fraction(), x.p)


def entourage_exponent(eps: Fraction, p: int) -> int:
    """Write eps = p**-n and return n; rejects non-power thresholds."""
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("threshold must be positive")
    if eps.numerator == 1:
        n = 0
        den = eps.denominator
        while den % p == 0:
            den //= p
            n += 1
        if den == 1:
            return n
    elif eps.denominator == 1:
        n = 0
        num = eps.numerator
        while num % p == 0:
            num //= p
            n += 1
        if num == 1:
            return -n
    raise ValueError(f"p-adic threshold must be a power of {p}, got {eps}")
