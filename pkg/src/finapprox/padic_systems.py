"""Finite approximations of Z_p and its fractional extensions.

Two families: the residue ring Z/p^n Z embedded as the integers 0..p^n - 1
(which approximates the p-adic integers to within p^-n), and the scaled
system over {u/p^m : 0 <= u < p^(m+n)} whose elements carry m fractional
base-p digits.  The scaled operations work on the integer coordinate
u = p^m * x: addition is mod p^(m+n); multiplication drops the low m digits
of the product (floor division by p^m) before reducing.  Addition is always
within p^-n of the exact sum; the product bound holds exactly when the true
product lies in p^-m Z_p, i.e. when the low m digits it would need are zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .algebra import FiniteAlgebra, MATERIALIZE_LIMIT, OpTable, RING_SIGNATURE
from .padics import PadicDigits, _check_prime, fraction_norm

DESK_LIMIT = 10 ** 5


@dataclass(frozen=True)
class HmnParams:
    """Scaled residue system with m fractional and n integer digit places.

    m = 0 degenerates to the plain residue ring; m >= n is rejected rather
    than guessed at.
    """

    p: int
    m: int
    n: int

    def __post_init__(self):
        _check_prime(self.p)
        if not (0 <= self.m < self.n):
            raise ValueError(f"need 0 <= m < n, got m={self.m}, n={self.n}")

    @property
    def modulus(self) -> int:
        return self.p ** (self.m + self.n)

    @property
    def scale(self) -> int:
        return self.p ** self.m


def _int_carrier_algebra(p: int, m: int, n: int, name: str) -> FiniteAlgebra:
    N = p ** (m + n)
    if N > DESK_LIMIT:
        raise ValueError(f"carrier {N} exceeds desk limit {DESK_LIMIT}")
    scale = p ** m
    emb = tuple(PadicDigits.from_fraction(Fraction(u, scale), p) for u in range(N))

    def f_add(i: int, j: int) -> int:
        return (i + j) % N

    def f_mul(i: int, j: int) -> int:
        return (i * j // scale) % N

    ops = {"add": OpTable(2, N, func=f_add), "mul": OpTable(2, N, func=f_mul)}
    if N <= MATERIALIZE_LIMIT:
        ops = {k: v.materialized() for k, v in ops.items()}
    labels = tuple(str(Fraction(u, scale)) for u in range(N))
    return FiniteAlgebra(RING_SIGNATURE, N, ops, emb, labels=labels,
                         ambient_kind="padic", p=p, name=name)


def build_kn(p: int, n: int) -> FiniteAlgebra:
    """The residue ring mod p^n embedded as integers into Z_p."""
    _check_prime(p)
    if n < 1:
        raise ValueError("need n >= 1")
    return _int_carrier_algebra(p, 0, n, f"kn(p={p}, n={n})")


def build_hmn(params: HmnParams) -> FiniteAlgebra:
    return _int_carrier_algebra(params.p, params.m, params.n,
                                f"hmn(p={params.p}, m={params.m}, n={params.n})")


# ---------------------------------------------------------------------------
# value-level operations (used for witnesses and bound scans)

def _coord(x: PadicDigits, params: HmnParams) -> int:
    u = x.to_fraction() * params.scale
    if u.denominator != 1 or not (0 <= u.numerator < params.modulus):
        raise ValueError(f"{x.to_text()} is not a carrier value")
    return u.numerator


def _from_coord(u: int, params: HmnParams) -> PadicDigits:
    return PadicDigits.from_fraction(Fraction(u, params.scale), params.p)


def hat_add(x: PadicDigits, y: PadicDigits, params: HmnParams) -> PadicDigits:
    u = (_coord(x, params) + _coord(y, params)) % params.modulus
    return _from_coord(u, params)


def hat_mul(x: PadicDigits, y: PadicDigits, params: HmnParams) -> PadicDigits:
    u = (_coord(x, params) * _coord(y, params) // params.scale) % params.modulus
    return _from_coord(u, params)


@dataclass
class BoundViolation:
    op: str
    x: str
    y: str
    exact: str
    got: str
    error: Fraction


def hmn_bound_violations(params: HmnParams) -> List[BoundViolation]:
    """Exhaustive scan of the error bounds.

    Addition must satisfy |x+y - add_hat(x,y)|_p <= p^-n for every pair;
    multiplication the same, but only when the exact product lies in
    p^-m Z_p (low fractional digits zero).  Returns the violations, which
    an implementation faithful to the construction leaves empty.
    """
    p, m, n = params.p, params.m, params.n
    N, scale = params.modulus, params.scale
    bound = Fraction(1, p ** n)
    out: List[BoundViolation] = []
    for ua in range(N):
        a = Fraction(ua, scale)
        for ub in range(N):
            b = Fraction(ub, scale)
            got_add = Fraction((ua + ub) % N, scale)
            err = fraction_norm(a + b - got_add, p)
            if err > bound:
                out.append(BoundViolation("add", str(a), str(b),
                                          str(a + b), str(got_add), err))
            w = ua * ub
            if w % scale == 0:    # exact product in p^-m Z_p
                got_mul = Fraction((w // scale) % N, scale)
                err = fraction_norm(a * b - got_mul, p)
                if err > bound:
                    out.append(BoundViolation("mul", str(a), str(b),
                                              str(a * b), str(got_mul), err))
    return out


# ---------------------------------------------------------------------------
# structured witnesses

@dataclass(frozen=True)
class TripleWitness:
    law: str
    triple: Tuple[PadicDigits, PadicDigits, PadicDigits]
    lhs: PadicDigits
    rhs: PadicDigits

    def labels(self) -> Tuple[str, str, str]:
        return tuple(str(x.to_fraction()) for x in self.triple)


def hmn_assoc_witness(params: HmnParams) -> TripleWitness:
    """(p^-m * p^-1) scaled-product collapses to zero while the other
    association keeps the factor: (1/p^m x 1/p) x p = 0 != 1/p^m x (1/p x p)."""
    p, m, n = params.p, params.m, params.n
    if m < 1 or n < 2:
        raise ValueError("witness needs m >= 1 and n >= 2")
    a = _from_coord(1, params)                       # 1/p^m
    b = _from_coord(p ** (m - 1), params)            # 1/p
    c = _from_coord(p ** (m + 1), params)            # p
    lhs = hat_mul(hat_mul(a, b, params), c, params)
    rhs = hat_mul(a, hat_mul(b, c, params), params)
    if lhs == rhs:
        raise AssertionError("associativity witness failed to verify")
    return TripleWitness("assoc(mul)", (a, b, c), lhs, rhs)


def hmn_distrib_witness(params: HmnParams) -> TripleWitness:
    """Every c/p^m with 0 <= c < p multiplies with 1/p to zero, so summing
    before multiplying keeps a unit the distributed side has already lost:
    (1/p^m + (p-1)/p^m) x 1/p = 1/p^m != 0."""
    p, m = params.p, params.m
    if m < 1:
        raise ValueError("witness needs m >= 1")
    one_over_p = _from_coord(p ** (m - 1), params)
    for c in range(p):      # the identity the witness rests on
        prod = hat_mul(_from_coord(c, params), one_over_p, params)
        if not prod.is_zero:
            raise AssertionError(f"expected {c}/p^m x 1/p = 0, got {prod.to_text()}")
    a = _from_coord(1, params)
    b = _from_coord(p - 1, params)
    lhs = hat_mul(hat_add(a, b, params), one_over_p, params)
    rhs = hat_add(hat_mul(a, one_over_p, params),
                  hat_mul(b, one_over_p, params), params)
    if lhs == rhs:
        raise AssertionError("distributivity witness failed to verify")
    return TripleWitness("distrib(mul,add)", (a, b, one_over_p), lhs, rhs)


# ---------------------------------------------------------------------------
# additive group isomorphism with the plain residue ring

@dataclass
class IsoReport:
    ok: bool
    size: int
    add_tables_equal: bool
    embedding_scaled: bool
    value_pairs_checked: int
    detail: str = ""


def hmn_iso_report(params: HmnParams, value_pair_budget: int = 2_000) -> IsoReport:
    """x -> p^m * x maps the scaled system onto the residue ring mod
    p^(m+n); on integer coordinates it is the identity on ids.  Three
    checks: the two builders' add tables agree cell for cell, the
    embeddings differ exactly by the p^m scaling, and the value-level sum
    (computed through exact rational arithmetic, not the tables) maps onto
    the residue ring's table entry.  The value-level pass is exhaustive up
    to the pair budget and deterministically strided beyond it."""
    p, m, n = params.p, params.m, params.n
    N, scale = params.modulus, params.scale
    if N > DESK_LIMIT:
        raise ValueError(f"carrier {N} exceeds desk limit {DESK_LIMIT}")
    h_alg = build_hmn(params)
    k_alg = build_kn(p, m + n)
    h_op, k_op = h_alg.ops["add"], k_alg.ops["add"]

    def row_fn(op):
        if op.func is not None:
            return lambda u: [op.func(u, v) for v in range(N)]
        return lambda u: list(op.table[u * N:(u + 1) * N])

    h_row, k_row = row_fn(h_op), row_fn(k_op)
    tables_equal = True
    detail = ""
    for u in range(N):
        kr = k_row(u)
        if h_row(u) != kr:
            v = next(v for v in range(N) if h_op(u, v) != k_op(u, v))
            tables_equal = False
            detail = f"add tables differ at cell ({u}, {v})"
            break
    scaled = all(k_alg.embedding[u].to_fraction()
                 == scale * h_alg.embedding[u].to_fraction()
                 for u in range(N))
    stride = max(1, (N * N) // value_pair_budget)
    checked = 0
    value_ok = True
    for t in range(0, N * N, stride):
        u, v = divmod(t, N)
        s = hat_add(h_alg.embedding[u], h_alg.embedding[v], params)
        image = s.to_fraction() * scale
        if image != k_alg.embedding[k_op(u, v)].to_fraction():
            value_ok = False
            detail = f"value-level sum at pair ({u}, {v}) does not map onto the ring"
            break
        checked += 1
    if tables_equal and scaled and not detail:
        pass
    elif not scaled and not detail:
        detail = "embedding does not scale by p^m"
    return IsoReport(tables_equal and scaled and value_ok, N,
                     tables_equal, scaled, checked, detail)
