"""Truncating decimal floating point with bounded exponent.

Values are +-10^e * 0.d1...dQ with |e| <= P, d1 != 0 (zero is its own
canonical value).  Operations compute the exact rational result, renormalize,
truncate the mantissa to Q digits, saturate to the largest magnitude when
the exponent overflows, and flush to zero when it underflows.  Truncation
(not round-to-nearest) is deliberate: it is what makes additive cancellation
fail with mantissas differing in the last digit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

from .algebra import FiniteAlgebra, MATERIALIZE_LIMIT, OpTable, RING_SIGNATURE
from .exact import ExactScalar, as_fraction


class UndecidableRounding(Exception):
    """Enclosure spans a truncation boundary; refine and retry."""


@dataclass(frozen=True)
class FPParams:
    P: int
    Q: int
    carrier_limit: int = 10 ** 6

    def __post_init__(self):
        if self.P < 0 or self.Q < 1:
            raise ValueError("need P >= 0 and Q >= 1")

    @property
    def block(self) -> int:
        """Values per sign and exponent: mantissas 10^(Q-1) .. 10^Q - 1."""
        return 9 * 10 ** (self.Q - 1)

    @property
    def carrier_size(self) -> int:
        return 2 * (2 * self.P + 1) * self.block + 1

    @property
    def max_value(self) -> Fraction:
        return Fraction(10 ** self.P) * (1 - Fraction(1, 10 ** self.Q))

    @property
    def min_positive(self) -> Fraction:
        return Fraction(1, 10 ** (self.P + 1))


@dataclass(frozen=True)
class DecimalFP:
    sign: int
    exp: int
    digits: Tuple[int, ...]

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0, or 1")
        if self.sign == 0:
            if self.digits or self.exp != 0:
                raise ValueError("zero is sign 0, exponent 0, no digits")
            return
        if not self.digits or self.digits[0] == 0:
            raise ValueError("mantissa must start with a nonzero digit")
        if not all(0 <= d <= 9 for d in self.digits):
            raise ValueError("digits out of range")

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    @staticmethod
    def zero() -> "DecimalFP":
        return DecimalFP(0, 0, ())

    def value(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        mant = 0
        for d in self.digits:
            mant = mant * 10 + d
        return self.sign * Fraction(mant, 10 ** len(self.digits)) * Fraction(10) ** self.exp

    def to_text(self) -> str:
        if self.is_zero:
            return "0"
        body = "".join(str(d) for d in self.digits)
        neg = "-" if self.sign < 0 else ""
        return f"{neg}0.{body}e{self.exp}"

    @staticmethod
    def from_text(text: str) -> "DecimalFP":
        s = text.strip()
        if s == "0":
            return DecimalFP.zero()
        sign = 1
        if s.startswith("-"):
            sign, s = -1, s[1:]
        mant, sep, exp_s = s.partition("e")
        if not sep or not mant.startswith("0."):
            raise ValueError(f"malformed decimal literal {text!r}")
        body = mant[2:]
        if not body or not body.isdigit():
            raise ValueError(f"malformed mantissa in {text!r}")
        if exp_s.startswith("+"):
            exp_s = exp_s[1:]
        try:
            exp = int(exp_s)
        except ValueError:
            raise ValueError(f"malformed exponent in {text!r}") from None
        return DecimalFP(sign, exp, tuple(int(c) for c in body))


def _decimal_exponent(ax: Fraction) -> int:
    """The r with 10^(r-1) <= ax < 10^r for positive ax."""
    n, d = ax.numerator, ax.denominator
    r = len(str(n)) - len(str(d)) + 1
    while Fraction(10) ** r <= ax:
        r += 1
    while Fraction(10) ** (r - 1) > ax:
        r -= 1
    return r


def fp_round(x: Union[Fraction, int, ExactScalar], params: FPParams) -> DecimalFP:
    """Renormalize, truncate to Q digits, saturate/flush on exponent overflow.

    Saturation keeps the sign of the exact result; an exact zero never
    saturates.  Enclosed inputs round only when both enclosure endpoints
    agree; otherwise UndecidableRounding asks the caller to refine.
    """
    if isinstance(x, ExactScalar):
        if x.is_exact:
            return fp_round(x.value, params)
        lo = fp_round(x.lo, params)
        hi = fp_round(x.hi, params)
        if lo == hi:
            return lo
        raise UndecidableRounding(
            f"enclosure [{x.lo}, {x.hi}] spans a truncation boundary")
    x = as_fraction(x)
    if x == 0:
        return DecimalFP.zero()
    sign = 1 if x > 0 else -1
    ax = abs(x)
    r = _decimal_exponent(ax)
    if r > params.P:
        return DecimalFP(sign, params.P, (9,) * params.Q)
    if r < -params.P:
        return DecimalFP.zero()
    scaled = ax * Fraction(10) ** (params.Q - r)
    mant = scaled.numerator // scaled.denominator
    digits = tuple(int(c) for c in str(mant))
    return DecimalFP(sign, r, digits)


def fp_add(a: DecimalFP, b: DecimalFP, params: FPParams) -> DecimalFP:
    return fp_round(a.value() + b.value(), params)


def fp_mul(a: DecimalFP, b: DecimalFP, params: FPParams) -> DecimalFP:
    return fp_round(a.value() * b.value(), params)


def fp_div(a: DecimalFP, b: DecimalFP, params: FPParams) -> DecimalFP:
    if b.is_zero:
        raise ZeroDivisionError("division by floating-point zero")
    return fp_round(a.value() / b.value(), params)


def fp_neg(a: DecimalFP) -> DecimalFP:
    """Exact: the carrier is symmetric about zero."""
    if a.is_zero:
        return a
    return DecimalFP(-a.sign, a.exp, a.digits)


# ---------------------------------------------------------------------------
# the finite algebra

def _carrier(params: FPParams) -> Tuple[DecimalFP, ...]:
    """Ascending numeric order: negatives (exponent and mantissa falling in
    magnitude), zero, positives rising."""
    P, Q = params.P, params.Q
    lo_m, hi_m = 10 ** (Q - 1), 10 ** Q - 1
    out = []
    for e in range(P, -P - 1, -1):
        for m in range(hi_m, lo_m - 1, -1):
            out.append(DecimalFP(-1, e, tuple(int(c) for c in str(m))))
    out.append(DecimalFP.zero())
    for e in range(-P, P + 1):
        for m in range(lo_m, hi_m + 1):
            out.append(DecimalFP(1, e, tuple(int(c) for c in str(m))))
    return tuple(out)


def fp_index(x: DecimalFP, params: FPParams) -> int:
    """Carrier id of a normal-form value under the ascending enumeration."""
    P, Q = params.P, params.Q
    block = params.block
    half = (2 * P + 1) * block
    if x.is_zero:
        return half
    mant = 0
    for d in x.digits:
        mant = mant * 10 + d
    if x.sign < 0:
        return (P - x.exp) * block + (10 ** Q - 1 - mant)
    return half + 1 + (x.exp + P) * block + (mant - 10 ** (Q - 1))


def build_apq(params: FPParams) -> FiniteAlgebra:
    """Truncating decimal fp as a finite algebra over add/mul.

    Tables are function-backed above the materialization threshold so large
    carriers stay cheap to construct; exports materialize on demand.
    """
    size = params.carrier_size
    if size > params.carrier_limit:
        raise ValueError(f"carrier size {size} exceeds limit {params.carrier_limit}")
    carrier = _carrier(params)
    values = tuple(x.value() for x in carrier)

    def f_add(i: int, j: int) -> int:
        return fp_index(fp_round(values[i] + values[j], params), params)

    def f_mul(i: int, j: int) -> int:
        return fp_index(fp_round(values[i] * values[j], params), params)

    ops = {"add": OpTable(2, size, func=f_add),
           "mul": OpTable(2, size, func=f_mul)}
    if size <= MATERIALIZE_LIMIT:
        ops = {k: v.materialized() for k, v in ops.items()}
    return FiniteAlgebra(RING_SIGNATURE, size, ops, values,
                         labels=tuple(x.to_text() for x in carrier),
                         ambient_kind="real",
                         name=f"apq(P={params.P}, Q={params.Q})")


def apq_params_for(a, eps, carrier_limit: int = 10 ** 6) -> FPParams:
    """Smallest (P, Q) making the fp system an ([-a,a], eps)-approximation.

    Three sufficient conditions: the largest value reaches a, the coarsest
    grid gap 10^(P-Q) is at most eps, and the flush-to-zero threshold
    10^(-P-1) is at most eps.
    """
    a, eps = as_fraction(a), as_fraction(eps)
    if a <= 0 or eps <= 0:
        raise ValueError("need a > 0 and eps > 0")
    P = 0
    while Fraction(10 ** P) * Fraction(9, 10) < a or Fraction(1, 10 ** (P + 1)) > eps:
        P += 1
    Q = 1
    while Fraction(10) ** (P - Q) > eps:
        Q += 1
    params = FPParams(P, Q, carrier_limit)
    if params.carrier_size > carrier_limit:
        raise ValueError(
            f"(a={a}, eps={eps}) needs carrier {params.carrier_size} > limit")
    return params


# ---------------------------------------------------------------------------
# the additive cancellation witness

@dataclass(frozen=True)
class CancellationWitness:
    alpha: DecimalFP
    beta: DecimalFP
    gamma: DecimalFP
    sum_ab: DecimalFP
    sum_ag: DecimalFP


def cancellation_witness(params: FPParams) -> CancellationWitness:
    """Mantissas 0.60...06 and 0.60...05 collide under truncating addition:
    alpha + beta and alpha + gamma agree after the carry shifts the last
    digit out, so cancellation fails although beta != gamma."""
    Q = params.Q
    if Q >= 2:
        alpha = DecimalFP(1, 0, (6,) + (0,) * (Q - 2) + (6,))
        gamma = DecimalFP(1, 0, (6,) + (0,) * (Q - 2) + (5,))
    else:
        alpha = DecimalFP(1, 0, (6,))
        gamma = DecimalFP(1, 0, (5,))
    beta = alpha
    sum_ab = fp_add(alpha, beta, params)
    sum_ag = fp_add(alpha, gamma, params)
    if sum_ab != sum_ag or beta == gamma:
        raise AssertionError("cancellation witness failed to verify")
    return CancellationWitness(alpha, beta, gamma, sum_ab, sum_ag)


# ---------------------------------------------------------------------------
# sufficient window for the inverse formula

def sufficient_params_inverse(b, delta) -> Tuple[Fraction, Fraction]:
    """Threshold pair (a0, eps0) beyond which every finer approximation
    satisfies the inverse-existence formula on the (1/c, c) annulus.

    eps0 solves eps*(2b + 1 + eps) = delta, written via the square root of
    ((2b+1)/2)^2 + delta; a0 = max(b + eps0, (2b + eps0)*eps0 + 1).  Both
    are returned as rational upper bounds (outward rounding), so using
    a > a0, eps < eps0 stays on the guaranteed side.
    """
    from .exact import sqrt_enclosure
    b, delta = as_fraction(b), as_fraction(delta)
    if b <= 1 or delta <= 0:
        raise ValueError("need b > 1 and delta > 0")
    half = (2 * b + 1) / 2
    root = sqrt_enclosure(half * half + delta, 30)
    eps0 = root.hi - half          # upper bound of the enclosure
    if eps0 <= 0:
        raise AssertionError("inverse-window threshold must be positive")
    a0 = max(b + eps0, (2 * b + eps0) * eps0 + 1)
    return a0, eps0
