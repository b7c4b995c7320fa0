"""Balanced modular fixed-point arithmetic on the grid {k*eps : |k| <= M}.

Addition adds the integer coefficients and reduces to the balanced residue
system [-M, M] mod N, N = 2M+1.  Multiplication takes the integer part
(floor) of k*m*eps before the balanced reduction, so the product lands back
on the grid.  Inside the window [-M*eps, M*eps] no reduction wraps and both
operations stay within eps of the exact result; the wraparound outside the
window is what breaks associativity and distributivity globally.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import FiniteAlgebra, MATERIALIZE_LIMIT, OpTable, RING_SIGNATURE
from .exact import as_fraction


@dataclass(frozen=True)
class ModularParams:
    M: int
    eps: Fraction

    def __post_init__(self):
        object.__setattr__(self, "eps", as_fraction(self.eps))
        if self.M < 1:
            raise ValueError("need M >= 1")
        if self.eps <= 0:
            raise ValueError("need eps > 0")

    @property
    def N(self) -> int:
        return 2 * self.M + 1

    @property
    def reach(self) -> Fraction:
        return self.M * self.eps


def balanced(x: int, N: int) -> int:
    """Residue of x in [-(N-1)/2, (N-1)/2]."""
    M = (N - 1) // 2
    return (x + M) % N - M


def mod_add(k: int, m: int, params: ModularParams) -> int:
    return balanced(k + m, params.N)


def mod_mul(k: int, m: int, params: ModularParams) -> int:
    t = k * m * params.eps
    floor_t = t.numerator // t.denominator
    return balanced(floor_t, params.N)


def build_modular(params: ModularParams) -> FiniteAlgebra:
    M, N, eps = params.M, params.N, params.eps
    emb = tuple(Fraction(k) * eps for k in range(-M, M + 1))

    def f_add(i: int, j: int) -> int:
        return mod_add(i - M, j - M, params) + M

    num, den = eps.numerator, eps.denominator

    def f_mul(i: int, j: int) -> int:
        t = (i - M) * (j - M) * num
        return balanced(t // den, N) + M

    ops = {"add": OpTable(2, N, func=f_add), "mul": OpTable(2, N, func=f_mul)}
    if N <= MATERIALIZE_LIMIT:
        ops = {k: v.materialized() for k, v in ops.items()}
    return FiniteAlgebra(RING_SIGNATURE, N, ops, emb, ambient_kind="real",
                         name=f"modular(M={M}, eps={eps})")


def modular_params_for(a, eps) -> ModularParams:
    """Parameters whose grid reaches a with a strict margin: the internal
    spacing is eps/2, so in-window errors sit at half the allowed threshold."""
    a, eps = as_fraction(a), as_fraction(eps)
    if a <= 0 or eps <= 0:
        raise ValueError("need a > 0 and eps > 0")
    spacing = eps / 2
    q = a / spacing
    M = -((-q.numerator) // q.denominator)
    return ModularParams(M, spacing)
