"""Ambient structures: the real line and Q_p with exact operations.

Real closeness is strict (|x-y| < eps); p-adic closeness is |x-y|_p <= eps,
matching the error bounds the residue constructions actually achieve.
Operations on enclosed values propagate enclosures; symbols backed by an
oracle (e.g. sin) accept a decimal precision for refinement.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, Optional

from .algebra import RING_SIGNATURE, Signature
from .exact import ExactScalar, sin_enclosure
from .padics import PadicDigits, entourage_exponent, fraction_norm
from .regions import Entourage

AmbientOp = Callable[..., ExactScalar]


class RealAmbient:
    kind = "real"

    def __init__(self, signature: Signature = RING_SIGNATURE,
                 extra_ops: Optional[Dict[str, AmbientOp]] = None):
        self.signature = signature
        self.ops: Dict[str, AmbientOp] = {
            "add": lambda x, y, prec=0: x + y,
            "mul": lambda x, y, prec=0: x * y,
        }
        if extra_ops:
            self.ops.update(extra_ops)
        for name in signature.names():
            if name not in self.ops:
                raise ValueError(f"no ambient interpretation for symbol {name!r}")

    def apply(self, symbol: str, args, prec: int = 30) -> ExactScalar:
        return self.ops[symbol](*args, prec=prec)

    @staticmethod
    def close(x: Fraction, y: Fraction, ent: Entourage) -> bool:
        return abs(x - y) < ent.eps

    @staticmethod
    def close_enclosed(x: ExactScalar, y: ExactScalar, ent: Entourage) -> bool:
        d = (x - y).abs_enclosure()
        return d.certainly_lt(ExactScalar.exact(ent.eps))


class PadicAmbient:
    kind = "padic"

    def __init__(self, p: int, signature: Signature = RING_SIGNATURE):
        self.p = p
        self.signature = signature
        for name in signature.names():
            if name not in ("add", "mul"):
                raise ValueError(f"p-adic ambient has no symbol {name!r}")

    def apply(self, symbol: str, args, prec: int = 0) -> PadicDigits:
        x, y = args
        return x + y if symbol == "add" else x * y

    def close(self, x: PadicDigits, y: PadicDigits, ent: Entourage) -> bool:
        entourage_exponent(ent.eps, self.p)   # validate the threshold shape
        return fraction_norm(x.to_fraction() - y.to_fraction(), self.p) <= ent.eps


Ambient = RealAmbient | PadicAmbient


def real_with_unary(name: str, op: AmbientOp) -> RealAmbient:
    sig = Signature(RING_SIGNATURE.symbols + ((name, 1),))
    return RealAmbient(sig, {name: op})


def sin_ambient_op(x: ExactScalar, prec: int = 30) -> ExactScalar:
    return sin_enclosure(x, prec)


def square_ambient_op(x: ExactScalar, prec: int = 30) -> ExactScalar:
    return x * x


def recip_shifted_ambient_op(shift: Fraction) -> AmbientOp:
    """g(x) = 1/(x + shift); caller must keep x + shift away from zero."""
    shift = Fraction(shift)

    def op(x: ExactScalar, prec: int = 30) -> ExactScalar:
        den_lo = x.lo + shift
        den_hi = x.hi + shift
        if den_lo <= 0 <= den_hi:
            raise ValueError("reciprocal argument enclosure touches zero")
        inv_lo, inv_hi = sorted((1 / den_lo, 1 / den_hi))
        return ExactScalar((inv_lo + inv_hi) / 2, (inv_hi - inv_lo) / 2)

    return op
