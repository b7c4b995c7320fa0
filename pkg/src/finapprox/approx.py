"""Grid and homomorphism checks for finite approximations.

A finite algebra with embedding j approximates the ambient structure on a
region C at threshold eps when (1) every point of C is close to an embedded
carrier element, and (2) for every symbol g and carrier tuple whose embedded
arguments lie in C and whose exact ambient result lies in C, the table
result embeds close to the exact result.  Closeness is strict |x-y| < eps
on the real line and |x-y|_p <= eps in Q_p.

The real grid decision is exact: sort the embedded images, then lo and hi
coverage plus a gap condition at midpoints decide coverage of the whole
continuum, no sampling involved.
"""

from __future__ import annotations

import itertools
import random
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .algebra import FiniteAlgebra, OpTable, RING_SIGNATURE, Signature
from .ambient import Ambient, PadicAmbient, RealAmbient
from .exact import ExactScalar, UndecidableComparison, as_fraction
from .padics import PadicDigits, entourage_exponent, fraction_norm
from .regions import (Entourage, Interval, PadicBall, Region, RegionUnion,
                      region_contains)


class MonotonePremiseError(ValueError):
    """Restriction query does not satisfy C' subset of C, eps' >= eps."""


@dataclass
class HomViolation:
    symbol: str
    ids: Tuple[int, ...]
    labels: Tuple[str, ...]
    exact: str
    got: str
    error: str

    def to_json_dict(self) -> dict:
        return {"symbol": self.symbol, "ids": list(self.ids),
                "labels": list(self.labels), "exact": self.exact,
                "got": self.got, "error": self.error}


@dataclass
class ApproximationReport:
    grid_ok: bool
    hom_ok: bool
    grid_witness: Optional[str] = None
    hom_violations: List[HomViolation] = field(default_factory=list)
    hom_violation_count: int = 0
    checked_tuples: int = 0
    region: str = ""
    eps: str = ""
    algebra: str = ""

    @property
    def ok(self) -> bool:
        return self.grid_ok and self.hom_ok

    def to_json_dict(self) -> dict:
        return {
            "algebra": self.algebra,
            "region": self.region,
            "eps": self.eps,
            "ok": self.ok,
            "grid_ok": self.grid_ok,
            "grid_witness": self.grid_witness,
            "hom_ok": self.hom_ok,
            "hom_violation_count": self.hom_violation_count,
            "hom_violations": [v.to_json_dict() for v in self.hom_violations],
            "checked_tuples": self.checked_tuples,
        }


# ---------------------------------------------------------------------------
# grid checks

def _real_images(alg: FiniteAlgebra) -> List[Fraction]:
    vals = sorted(set(alg.embedding))
    return vals


def _dist_to_images(t: Fraction, xs: Sequence[Fraction]) -> Fraction:
    i = bisect_left(xs, t)
    best = None
    for j in (i - 1, i):
        if 0 <= j < len(xs):
            d = abs(t - xs[j])
            best = d if best is None or d < best else best
    return best


def _check_interval_grid(xs: List[Fraction], iv: Interval,
                         eps: Fraction) -> Optional[Fraction]:
    """Return an uncovered point of the interval, or None if covered."""
    lo, hi = iv.lo, iv.hi
    if not xs:
        return (lo + hi) / 2
    if iv.closed:
        for endpoint in (lo, hi):
            if _dist_to_images(endpoint, xs) >= eps:
                return endpoint
        for a, b in zip(xs, xs[1:]):
            mid = (a + b) / 2
            if lo <= mid <= hi and b - a >= 2 * eps:
                return mid
        return None
    # open interval: only interior points need covering
    if lo == hi:
        return None
    i = bisect_left(xs, lo)
    ok_left = any(lo - eps < xs[j] <= lo + eps
                  for j in range(max(0, i - 1), min(len(xs), i + 2)))
    if not ok_left:
        above = next((x for x in xs[i:] if x > lo), None)
        if above is None:
            return (lo + hi) / 2
        return (lo + min(above - eps, hi)) / 2
    i = bisect_left(xs, hi)
    ok_right = any(hi - eps <= xs[j] < hi + eps
                   for j in range(max(0, i - 1), min(len(xs), i + 2)))
    if not ok_right:
        below = next((x for x in reversed(xs[:i]) if x < hi), None)
        if below is None:
            return (lo + hi) / 2
        return (max(below + eps, lo) + hi) / 2
    for a, b in zip(xs, xs[1:]):
        mid = (a + b) / 2
        if lo < mid < hi and b - a >= 2 * eps:
            return mid
    return None


def check_grid(alg: FiniteAlgebra, region: Region,
               ent: Entourage) -> Tuple[bool, Optional[str]]:
    """Exact decision of the covering condition; witness is an uncovered point."""
    if alg.ambient_kind == "real":
        if isinstance(region, PadicBall):
            raise ValueError("real algebra checked against a p-adic region")
        xs = _real_images(alg)
        parts = region.parts if isinstance(region, RegionUnion) else (region,)
        for iv in parts:
            w = _check_interval_grid(xs, iv, ent.eps)
            if w is not None:
                return False, str(w)
        return True, None
    # p-adic: coverage of the ball p^-m Z_p at eps = p^-n means every residue
    # class mod p^n inside the ball contains an embedded image
    if not isinstance(region, PadicBall):
        raise ValueError("p-adic algebra checked against a real region")
    p = alg.p
    if region.p != p:
        raise ValueError("ball prime does not match the algebra")
    n_e = entourage_exponent(ent.eps, p)
    if n_e < -region.m:
        n_e = -region.m          # coarser than the ball: a single class
    n_classes = p ** (region.m + n_e)
    seen = set()
    scale = Fraction(p) ** region.m
    for v in alg.embedding:
        if not region.contains(v):
            continue
        u = v.to_fraction() * scale
        seen.add(int(u) % n_classes)
        if len(seen) == n_classes:
            return True, None
    for c in range(n_classes):
        if c not in seen:
            missing = PadicDigits.from_fraction(Fraction(c) / scale, p)
            return False, missing.to_text()
    return True, None


# ---------------------------------------------------------------------------
# homomorphism check

_REFINE_DIGITS = (30, 60, 120, 240)


def _exact_result(ambient: Ambient, symbol: str, args_vals):
    if isinstance(ambient, PadicAmbient):
        return ambient.apply(symbol, args_vals)
    if symbol == "add":
        return args_vals[0] + args_vals[1]
    if symbol == "mul":
        return args_vals[0] * args_vals[1]
    return None  # oracle-backed: handled separately with refinement


def _oracle_case(ambient: RealAmbient, symbol: str, args_vals, region, eps,
                 table_val: Fraction):
    """Membership and closeness for oracle-backed symbols, with refinement."""
    for digits in _REFINE_DIGITS:
        enc = ambient.apply(symbol, tuple(ExactScalar.exact(v) for v in args_vals),
                            prec=digits)
        try:
            in_region = region_contains(region, enc)
        except ValueError:
            continue
        if not in_region:
            return None
        d = (enc - ExactScalar.exact(table_val)).abs_enclosure()
        try:
            ok = d.certainly_lt(ExactScalar.exact(eps))
        except UndecidableComparison:
            continue
        return ok, enc
    raise ValueError(f"oracle precision exhausted for symbol {symbol!r}")


def check_homomorphism(alg: FiniteAlgebra, region: Region, ent: Entourage,
                       ambient: Optional[Ambient] = None,
                       max_violations: int = 20
                       ) -> Tuple[bool, List[HomViolation], int, int]:
    """Exhaustive check over carrier tuples with embedded arguments in the
    region and exact result in the region.  Returns (ok, violations capped,
    total violation count, tuples checked)."""
    if ambient is None:
        ambient = default_ambient(alg)
    if ambient.kind != alg.ambient_kind:
        raise ValueError("ambient kind does not match the algebra")
    emb = alg.embedding
    in_c = [i for i in range(alg.size) if region_contains(region, emb[i])]
    eps = ent.eps
    is_padic = isinstance(ambient, PadicAmbient)
    if is_padic:
        entourage_exponent(eps, ambient.p)
    violations: List[HomViolation] = []
    total = 0
    checked = 0
    for symbol, arity in alg.signature.symbols:
        op = alg.op(symbol)
        for ids in itertools.product(in_c, repeat=arity):
            vals = tuple(emb[i] for i in ids)
            exact = _exact_result(ambient, symbol, vals)
            checked += 1
            if exact is None:
                got_id = op(*ids)
                res = _oracle_case(ambient, symbol, vals, region, eps, emb[got_id])
                if res is None:
                    continue
                ok, enc = res
                if not ok:
                    total += 1
                    if len(violations) < max_violations:
                        violations.append(HomViolation(
                            symbol, ids, tuple(alg.label(i) for i in ids),
                            f"~{enc.value}", alg.label(got_id),
                            f">= {eps}"))
                continue
            if not region_contains(region, exact):
                continue
            got_id = op(*ids)
            got = emb[got_id]
            if is_padic:
                err = fraction_norm(exact.to_fraction() - got.to_fraction(), ambient.p)
                bad = err > eps
            else:
                err = abs(exact - got)
                bad = err >= eps
            if bad:
                total += 1
                if len(violations) < max_violations:
                    exact_s = exact.to_text() if is_padic else str(exact)
                    violations.append(HomViolation(
                        symbol, ids, tuple(alg.label(i) for i in ids),
                        exact_s, alg.label(got_id), str(err)))
    return total == 0, violations, total, checked


def default_ambient(alg: FiniteAlgebra) -> Ambient:
    if alg.ambient_kind == "padic":
        return PadicAmbient(alg.p, alg.signature)
    if alg.signature == RING_SIGNATURE:
        return RealAmbient()
    raise ValueError("non-ring signature needs an explicit ambient")


def check_approximation(alg: FiniteAlgebra, region: Region, ent: Entourage,
                        ambient: Optional[Ambient] = None,
                        max_violations: int = 20) -> ApproximationReport:
    grid_ok, witness = check_grid(alg, region, ent)
    hom_ok, viols, total, checked = check_homomorphism(
        alg, region, ent, ambient, max_violations)
    return ApproximationReport(
        grid_ok=grid_ok, hom_ok=hom_ok, grid_witness=witness,
        hom_violations=viols, hom_violation_count=total,
        checked_tuples=checked, region=str(region), eps=str(ent.eps),
        algebra=alg.name)


# ---------------------------------------------------------------------------
# restriction monotonicity

def region_subset(inner: Region, outer: Region) -> bool:
    if isinstance(inner, PadicBall) or isinstance(outer, PadicBall):
        if isinstance(inner, PadicBall) and isinstance(outer, PadicBall):
            return inner.p == outer.p and inner.m <= outer.m
        return False
    inner_parts = inner.parts if isinstance(inner, RegionUnion) else (inner,)
    outer_parts = outer.parts if isinstance(outer, RegionUnion) else (outer,)
    for part in inner_parts:
        if part.lo == part.hi and not part.closed:
            continue  # empty
        ok = False
        for o in outer_parts:
            lo_ok = o.lo < part.lo or (o.lo == part.lo and (o.closed or not part.closed))
            hi_ok = part.hi < o.hi or (part.hi == o.hi and (o.closed or not part.closed))
            if lo_ok and hi_ok:
                ok = True
                break
        if not ok:
            return False
    return True


def check_restriction_monotone(alg: FiniteAlgebra,
                               region: Region, ent: Entourage,
                               sub_region: Region, coarser: Entourage,
                               ambient: Optional[Ambient] = None
                               ) -> ApproximationReport:
    """Verify the restriction premise, then check at the restricted pair.

    A (C, W)-approximation is automatically a (C', W')-approximation when
    C' is a subset of C and W' is coarser; the premise violation is reported
    distinctly from an ordinary check failure.
    """
    if not region_subset(sub_region, region):
        raise MonotonePremiseError(
            f"{sub_region} is not a subset of {region}")
    if coarser.eps < ent.eps:
        raise MonotonePremiseError(
            f"threshold {coarser.eps} is finer than {ent.eps}")
    return check_approximation(alg, sub_region, coarser, ambient)


# ---------------------------------------------------------------------------
# canonical grid construction

def nearest_step_index(v: Fraction, step: Fraction) -> int:
    """Index k minimizing |k*step - v|, ties resolved toward zero."""
    q = v / step
    n, d = q.numerator, q.denominator
    f = n // d
    r = n - f * d
    if 2 * r < d:
        return f
    if 2 * r > d:
        return f + 1
    return f if f >= 0 else f + 1


def _nearest_index_enclosed(enc: ExactScalar, step: Fraction,
                            refine=None) -> int:
    digits_iter = iter(_REFINE_DIGITS[1:])
    while True:
        if enc.is_exact:
            return nearest_step_index(enc.value, step)
        k = nearest_step_index(enc.value, step)
        lo_bound = (Fraction(2 * k - 1) / 2) * step
        hi_bound = (Fraction(2 * k + 1) / 2) * step
        if lo_bound < enc.lo and enc.hi < hi_bound:
            return k
        if refine is None:
            raise ValueError("enclosure straddles a rounding boundary")
        try:
            enc = refine(next(digits_iter))
        except StopIteration:
            raise ValueError("oracle precision exhausted during rounding")


def _hull(region: Region) -> Tuple[Fraction, Fraction]:
    parts = region.parts if isinstance(region, RegionUnion) else (region,)
    return min(p.lo for p in parts), max(p.hi for p in parts)


def canonical_approximation(ambient: RealAmbient, region: Region,
                            ent: Entourage, step,
                            materialize: Optional[bool] = None,
                            name: str = "") -> FiniteAlgebra:
    """Step-spaced grid over a one-step enlargement of the region, tables
    rounding the exact result to the nearest grid point (ties toward zero)
    and clamping on overflow.  Requires step < eps, which makes the result
    a (region, eps)-approximation by construction.

    p-adic ambients are not built here; use the residue-system builders.
    """
    if isinstance(ambient, PadicAmbient):
        raise ValueError("canonical grids are real; use build_kn/build_hmn for Q_p")
    if isinstance(region, PadicBall):
        raise ValueError("canonical grids need a real region")
    step = as_fraction(step)
    if step <= 0:
        raise ValueError("step must be positive")
    if step >= ent.eps:
        raise ValueError(f"step {step} must be finer than eps {ent.eps}")
    lo, hi = _hull(region)
    kmin = _floor_div(lo, step) - 1
    kmax = _ceil_div(hi, step) + 1
    size = kmax - kmin + 1
    emb = tuple(Fraction(k) * step for k in range(kmin, kmax + 1))

    def clamp(k: int) -> int:
        return max(kmin, min(kmax, k))

    ops = {}
    for symbol, arity in ambient.signature.symbols:
        if symbol == "add":
            def f_add(i, j, _k0=kmin):
                return clamp((i + _k0) + (j + _k0)) - _k0
            ops["add"] = OpTable(2, size, func=f_add)
        elif symbol == "mul":
            num, den = step.numerator, step.denominator

            def f_mul(i, j, _k0=kmin, _n=num, _d=den):
                prod = (i + _k0) * (j + _k0) * _n
                f, r = divmod(prod, _d)
                if 2 * r < _d:
                    k = f
                elif 2 * r > _d:
                    k = f + 1
                else:
                    k = f if f >= 0 else f + 1
                return clamp(k) - _k0
            ops["mul"] = OpTable(2, size, func=f_mul)
        else:
            op_fn = ambient.ops[symbol]

            def f_gen(*ids, _sym=symbol, _fn=op_fn, _k0=kmin):
                args = tuple(ExactScalar.exact(emb[i]) for i in ids)
                enc = _fn(*args, prec=_REFINE_DIGITS[0])
                k = _nearest_index_enclosed(
                    enc, step, refine=lambda dg: _fn(*args, prec=dg))
                return clamp(k) - _k0
            ops[symbol] = OpTable(arity, size, func=f_gen)

    alg = FiniteAlgebra(ambient.signature, size, ops, emb,
                        ambient_kind="real",
                        name=name or f"grid(step={step}, span=[{emb[0]},{emb[-1]}])")
    if materialize is None:
        materialize = size <= 256
    if materialize:
        alg = FiniteAlgebra(alg.signature, size,
                            {s: alg.ops[s].materialized() for s in alg.signature.names()},
                            emb, ambient_kind="real", name=alg.name)
    return alg


def _floor_div(v: Fraction, step: Fraction) -> int:
    q = v / step
    return q.numerator // q.denominator


def _ceil_div(v: Fraction, step: Fraction) -> int:
    q = v / step
    return -((-q.numerator) // q.denominator)


def perturbed_canonical(ambient: RealAmbient, region: Region, ent: Entourage,
                        step, seed: int = 0) -> FiniteAlgebra:
    """Canonical grid with table entries randomly nudged one grid step
    wherever the nudge keeps the in-window error strictly below eps.  The
    result is still a (region, eps)-approximation, but not the canonical one;
    useful as an adversarial builder in sweeps."""
    base = canonical_approximation(ambient, region, ent, step, materialize=True,
                                   name=f"perturbed(step={step}, seed={seed})")
    rng = random.Random(seed)
    emb = base.embedding
    eps = ent.eps
    size = base.size
    ops = {}
    for symbol, arity in base.signature.symbols:
        if arity != 2 or symbol not in ("add", "mul"):
            ops[symbol] = base.ops[symbol]
            continue
        flat = list(base.ops[symbol].table)
        for i in range(size):
            vi = emb[i]
            in_i = region_contains(region, vi)
            for j in range(size):
                idx = i * size + j
                cur = flat[idx]
                cands = [c for c in (cur - 1, cur, cur + 1) if 0 <= c < size]
                if in_i and region_contains(region, emb[j]):
                    exact = vi + emb[j] if symbol == "add" else vi * emb[j]
                    if region_contains(region, exact):
                        cands = [c for c in cands if abs(emb[c] - exact) < eps]
                flat[idx] = rng.choice(cands)
        ops[symbol] = OpTable(2, size, table=flat)
    return FiniteAlgebra(base.signature, size, ops, emb, ambient_kind="real",
                         name=base.name)
