"""Regions of the ambient structure and closeness thresholds.

Real regions are intervals (fully open or fully closed) and finite unions
of intervals; p-adic regions are the clopen balls p^-m Z_p.  Membership is
decided exactly on rational or finite p-adic values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple, Union

from .exact import ExactScalar, as_fraction
from .padics import PadicDigits


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction
    closed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "lo", as_fraction(self.lo))
        object.__setattr__(self, "hi", as_fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    def contains(self, x: Fraction) -> bool:
        if self.closed:
            return self.lo <= x <= self.hi
        return self.lo < x < self.hi

    def __str__(self):
        l, r = ("[", "]") if self.closed else ("(", ")")
        return f"{l}{self.lo}, {self.hi}{r}"


@dataclass(frozen=True)
class PadicBall:
    """The clopen additive ball p^-m Z_p = {x : |x|_p <= p^m}."""

    p: int
    m: int

    def contains(self, x: PadicDigits) -> bool:
        if x.p != self.p:
            raise ValueError("value prime does not match ball prime")
        return x.is_zero or x.valuation >= -self.m

    def __str__(self):
        return f"pball({self.p}, {self.m})"


@dataclass(frozen=True)
class RegionUnion:
    parts: Tuple[Interval, ...]

    def __post_init__(self):
        if not self.parts:
            raise ValueError("empty union")

    def contains(self, x: Fraction) -> bool:
        return any(part.contains(x) for part in self.parts)

    def __str__(self):
        return "|".join(str(p) for p in self.parts)


Region = Union[Interval, PadicBall, RegionUnion]


@dataclass(frozen=True)
class Entourage:
    """Uniform closeness threshold: real |x-y| < eps, p-adic |x-y|_p <= eps."""

    eps: Fraction

    def __post_init__(self):
        object.__setattr__(self, "eps", as_fraction(self.eps))
        if self.eps <= 0:
            raise ValueError("closeness threshold must be positive")

    def finer_than(self, other: "Entourage") -> bool:
        return self.eps <= other.eps


def interval(lo, hi, closed: bool = True) -> Interval:
    return Interval(as_fraction(lo), as_fraction(hi), closed)


def annulus(inner, outer, closed: bool = False) -> RegionUnion:
    """The symmetric two-sided region {x : inner < |x| < outer} (or closed)."""
    inner, outer = as_fraction(inner), as_fraction(outer)
    return RegionUnion((
        Interval(-outer, -inner, closed),
        Interval(inner, outer, closed),
    ))


def region_contains(region: Region, x) -> bool:
    if isinstance(x, ExactScalar):
        if not x.is_exact:
            # conservative exact decision on the midpoint is wrong; demand
            # that the whole enclosure sits on one side
            if isinstance(region, (Interval, RegionUnion)):
                lo_in = region.contains(x.lo)
                hi_in = region.contains(x.hi)
                if lo_in and hi_in and isinstance(region, Interval):
                    return True
                if not lo_in and not hi_in and isinstance(region, Interval) \
                        and (x.hi < region.lo or x.lo > region.hi):
                    return False
                raise ValueError("enclosure too coarse for region membership")
            raise ValueError("enclosed values have no p-adic membership")
        x = x.value
    return region.contains(x)


def is_open_region(region: Region) -> bool:
    if isinstance(region, Interval):
        return not region.closed
    if isinstance(region, PadicBall):
        return True
    return all(is_open_region(p) for p in region.parts)


def is_compact_region(region: Region) -> bool:
    """Compactness for our shapes: closed+bounded intervals, p-adic balls."""
    if isinstance(region, Interval):
        return region.closed
    if isinstance(region, PadicBall):
        return True
    return all(is_compact_region(p) for p in region.parts)


def is_relatively_compact_open(region: Region) -> bool:
    """Bounded open sets; every interval here is bounded by construction."""
    return is_open_region(region)


def _components(region: Region) -> Tuple[Interval, ...]:
    if isinstance(region, Interval):
        return (region,)
    if isinstance(region, RegionUnion):
        return region.parts
    raise TypeError("p-adic balls have no interval components")


def closure_subset(inner: Region, outer: Region) -> bool:
    """closure(inner) is a subset of outer (real shapes, componentwise)."""
    if isinstance(inner, PadicBall) or isinstance(outer, PadicBall):
        if isinstance(inner, PadicBall) and isinstance(outer, PadicBall):
            return inner.p == outer.p and inner.m <= outer.m
        return False
    outs = _components(outer)
    for part in _components(inner):
        ok = False
        for o in outs:
            if o.closed:
                if o.lo <= part.lo and part.hi <= o.hi:
                    ok = True
                    break
            else:
                if o.lo < part.lo and part.hi < o.hi:
                    ok = True
                    break
        if not ok:
            return False
    return True


def subset_of_interior(inner: Region, outer: Region) -> bool:
    """inner is a subset of the interior of outer (componentwise check)."""
    if isinstance(inner, PadicBall) or isinstance(outer, PadicBall):
        if isinstance(inner, PadicBall) and isinstance(outer, PadicBall):
            return inner.p == outer.p and inner.m <= outer.m
        return False
    outs = _components(outer)
    for part in _components(inner):
        ok = False
        for o in outs:
            lo_ok = (o.lo < part.lo) or (not part.closed and o.lo <= part.lo)
            hi_ok = (part.hi < o.hi) or (not part.closed and part.hi <= o.hi)
            if lo_ok and hi_ok:
                ok = True
                break
        if not ok:
            return False
    return True


def format_region(region: Region) -> str:
    """Concrete syntax accepted by the formula parser."""
    if isinstance(region, Interval):
        l, r = ("[", "]") if region.closed else ("(", ")")
        return f"{l}{_fmt_q(region.lo)}, {_fmt_q(region.hi)}{r}"
    if isinstance(region, PadicBall):
        return f"pball({region.p}, {region.m})"
    return " | ".join(format_region(p) for p in region.parts)


def _fmt_q(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
