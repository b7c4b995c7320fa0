"""Reference formula families over the real line with exact truth oracles.

Three families exercise the evaluator and the sweeps: multiplicative
inverses on an annulus, the additive order encoding, and the strict-order
threshold family.  Each comes with an analytic truth predicate computed in
exact rational arithmetic, so finite evaluation can be compared against
ground truth without quantifying over a continuum.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Tuple

from .exact import as_fraction
from .formulas import (Close, Eq, EXISTS, FORALL, Formula, Quant, t_add,
                       t_const, t_mul, t_var)
from .regions import Interval, Region, annulus


# ---------------------------------------------------------------------------
# inverses on an annulus:  forall x (1/d < |x| < d)  exists y (1/d <= |y| <= d)
# with x*y = 1 exactly; the strong form replaces equality by closeness and
# uses an inner open annulus for x and an outer closed annulus for y.

def inverse_family(d) -> Formula:
    d = as_fraction(d)
    if d <= 1:
        raise ValueError("need d > 1")
    x, y = t_var("x"), t_var("y")
    prefix = (Quant(FORALL, "x", annulus(1 / d, d, closed=False)),
              Quant(EXISTS, "y", annulus(1 / d, d, closed=True)))
    return Formula(prefix, ((Eq(t_mul(x, y), t_const(1)),),))


def inverse_bounds(c, b) -> Tuple[Region, Region]:
    """Refined bound tuple (open c-annulus for x, closed b-annulus for y);
    refines the d-annulus bounds whenever 1 < c < d < b."""
    c, b = as_fraction(c), as_fraction(b)
    if not 1 < c or not 1 < b:
        raise ValueError("need c > 1 and b > 1")
    return (annulus(1 / c, c, closed=False), annulus(1 / b, b, closed=True))


def inverse_truth(c, b, delta) -> bool:
    """Exact real truth of: forall x in the open c-annulus there is y in the
    closed b-annulus with |x*y - 1| < delta.

    The best y is 1/x clamped to [1/b, b] (matching sign), so the supremum
    of the error over the open annulus is c/b - 1 on the outer edge and
    1 - b/c on the inner edge; both suprema are unattained, which makes the
    condition c <= b*(1+delta).
    """
    c, b, delta = as_fraction(c), as_fraction(b), as_fraction(delta)
    if delta <= 0:
        raise ValueError("need delta > 0")
    if c <= 1:
        return True          # empty annulus, vacuous
    return c <= b * (1 + delta)


# ---------------------------------------------------------------------------
# order encoding:  x <= y <= x + b^2  via  exists z (|z| <= b) x + z^2 = y

def order_family(b) -> Formula:
    b = as_fraction(b)
    if b <= 0:
        raise ValueError("need b > 0")
    x, y, z = t_var("x"), t_var("y"), t_var("z")
    prefix = (Quant(EXISTS, "z", Interval(-b, b, closed=True)),)
    return Formula(prefix, ((Eq(t_add(x, t_mul(z, z)), y),),))


def order_truth(x0, y0, b) -> bool:
    x0, y0, b = as_fraction(x0), as_fraction(y0), as_fraction(b)
    return x0 <= y0 <= x0 + b * b


# ---------------------------------------------------------------------------
# strict order threshold:  exists z (|z| <= c) with |(y - x)*z^2 - 1| < alpha,
# written without subtraction as y*z^2 close to x*z^2 + 1

def threshold_family(c, alpha) -> Formula:
    c, alpha = as_fraction(c), as_fraction(alpha)
    if c <= 0 or alpha <= 0:
        raise ValueError("need c > 0 and alpha > 0")
    x, y, z = t_var("x"), t_var("y"), t_var("z")
    zz = t_mul(z, z)
    prefix = (Quant(EXISTS, "z", Interval(-c, c, closed=True)),)
    atom = Close(t_mul(y, zz), t_add(t_mul(x, zz), t_const(1)), alpha)
    return Formula(prefix, ((atom,),))


def threshold_truth(xi, eta, c, alpha) -> bool:
    """Exact real truth: (eta - xi)*z^2 sweeps [0, (eta - xi)*c^2], so a
    witness exists iff eta > xi + (1 - alpha)/c^2 (strict, since closeness
    is strict)."""
    xi, eta, c, alpha = map(as_fraction, (xi, eta, c, alpha))
    return eta > xi + (1 - alpha) / (c * c)
