"""Counterexample search for equational laws on finite algebras.

law_search scans carrier tuples in ascending id order (restricted to a
region when given) and returns the lexicographically first violating tuple,
or None when the law holds exhaustively.  Scans exit early at the first
violation, so searches on large carriers are cheap exactly when the law
fails early; exhaustive "holds" verdicts are only feasible at small sizes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

from .algebra import FiniteAlgebra
from .regions import Region, region_contains


@dataclass(frozen=True)
class Assoc:
    symbol: str
    name_prefix = "assoc"


@dataclass(frozen=True)
class Comm:
    symbol: str
    name_prefix = "comm"


@dataclass(frozen=True)
class Distrib:
    mul_symbol: str = "mul"
    add_symbol: str = "add"
    name_prefix = "distrib"


@dataclass(frozen=True)
class Cancel:
    """Cancellation for a binary symbol: f(a,b) = f(a,c) implies b = c."""

    symbol: str
    name_prefix = "cancel"


@dataclass(frozen=True)
class Identity:
    symbol: str
    elem: int
    name_prefix = "identity"


@dataclass(frozen=True)
class Inverse:
    """f(a, neg[a]) = identity for every a."""

    symbol: str
    neg: Tuple[int, ...]
    identity: int
    name_prefix = "inverse"


Law = Union[Assoc, Comm, Distrib, Cancel, Identity, Inverse]


@dataclass
class LawViolation:
    law: str
    ids: Tuple[int, ...]
    labels: Tuple[str, ...]
    lhs: str
    rhs: str
    detail: str = ""

    def to_json_dict(self) -> dict:
        return {"law": self.law, "ids": list(self.ids),
                "labels": list(self.labels), "lhs": self.lhs,
                "rhs": self.rhs, "detail": self.detail}


def law_name(law: Law) -> str:
    if isinstance(law, Distrib):
        return f"distrib({law.mul_symbol},{law.add_symbol})"
    if isinstance(law, (Identity, Inverse)):
        return f"{law.name_prefix}({law.symbol})"
    return f"{law.name_prefix}({law.symbol})"


def _allowed_ids(alg: FiniteAlgebra, restrict: Optional[Region]) -> List[int]:
    if restrict is None:
        return list(range(alg.size))
    return [i for i in range(alg.size)
            if region_contains(restrict, alg.embedding[i])]


def law_search(alg: FiniteAlgebra, law: Law,
               restrict: Optional[Region] = None) -> Optional[LawViolation]:
    ids = _allowed_ids(alg, restrict)
    if isinstance(law, Assoc):
        return _search_assoc(alg, law.symbol, ids)
    if isinstance(law, Comm):
        return _search_comm(alg, law.symbol, ids)
    if isinstance(law, Distrib):
        return _search_distrib(alg, law.mul_symbol, law.add_symbol, ids)
    if isinstance(law, Cancel):
        return _search_cancel(alg, law.symbol, ids)
    if isinstance(law, Identity):
        return _search_identity(alg, law.symbol, law.elem, ids)
    if isinstance(law, Inverse):
        return _search_inverse(alg, law.symbol, law.neg, law.identity, ids)
    raise TypeError(f"unknown law {law!r}")


def _search_assoc(alg, symbol, ids):
    f = alg.op(symbol)
    for a in ids:
        for b in ids:
            ab = f(a, b)
            for c in ids:
                lhs = f(ab, c)
                rhs = f(a, f(b, c))
                if lhs != rhs:
                    return LawViolation(
                        f"assoc({symbol})", (a, b, c),
                        tuple(alg.label(i) for i in (a, b, c)),
                        alg.label(lhs), alg.label(rhs),
                        "f(f(a,b),c) != f(a,f(b,c))")
    return None


def _search_comm(alg, symbol, ids):
    f = alg.op(symbol)
    for a in ids:
        for b in ids:
            lhs, rhs = f(a, b), f(b, a)
            if lhs != rhs:
                return LawViolation(
                    f"comm({symbol})", (a, b),
                    (alg.label(a), alg.label(b)),
                    alg.label(lhs), alg.label(rhs),
                    "f(a,b) != f(b,a)")
    return None


def _search_distrib(alg, mul_symbol, add_symbol, ids):
    # both expansion directions are checked per tuple; for commutative
    # products they fail together, but the search does not assume that
    mul, add = alg.op(mul_symbol), alg.op(add_symbol)
    for a in ids:
        for b in ids:
            for c in ids:
                lhs = mul(a, add(b, c))
                rhs = add(mul(a, b), mul(a, c))
                if lhs != rhs:
                    return LawViolation(
                        f"distrib({mul_symbol},{add_symbol})", (a, b, c),
                        tuple(alg.label(i) for i in (a, b, c)),
                        alg.label(lhs), alg.label(rhs),
                        "a*(b+c) != a*b + a*c")
                lhs = mul(add(a, b), c)
                rhs = add(mul(a, c), mul(b, c))
                if lhs != rhs:
                    return LawViolation(
                        f"distrib({mul_symbol},{add_symbol})", (a, b, c),
                        tuple(alg.label(i) for i in (a, b, c)),
                        alg.label(lhs), alg.label(rhs),
                        "(a+b)*c != a*c + b*c")
    return None


def _search_cancel(alg, symbol, ids):
    # row at a time: the first row with a collision contains the overall
    # lexicographically first triple (a, b, c), b = first element of the
    # earliest multi-preimage class, c = its second element
    f = alg.op(symbol)
    for a in ids:
        seen: dict = {}
        best: Optional[Tuple[int, int]] = None
        for b in ids:
            r = f(a, b)
            if r in seen:
                first = seen[r]
                if best is None or first < best[0]:
                    best = (first, b)
            else:
                seen[r] = b
        if best is not None:
            b, c = best
            r = f(a, b)
            return LawViolation(
                f"cancel({symbol})", (a, b, c),
                tuple(alg.label(i) for i in (a, b, c)),
                alg.label(r), alg.label(r),
                "f(a,b) = f(a,c) with b != c")
    return None


def _search_identity(alg, symbol, elem, ids):
    f = alg.op(symbol)
    for a in ids:
        left, right = f(elem, a), f(a, elem)
        if left != a or right != a:
            bad = left if left != a else right
            return LawViolation(
                f"identity({symbol})", (a,), (alg.label(a),),
                alg.label(bad), alg.label(a),
                f"element {alg.label(elem)} is not an identity at a")
    return None


def _search_inverse(alg, symbol, neg, identity, ids):
    f = alg.op(symbol)
    if len(neg) != alg.size:
        raise ValueError("negation map must cover the carrier")
    for a in ids:
        r = f(a, neg[a])
        if r != identity:
            return LawViolation(
                f"inverse({symbol})", (a,), (alg.label(a),),
                alg.label(r), alg.label(identity),
                "f(a, neg(a)) != identity")
    return None


# ---------------------------------------------------------------------------
# group axioms in one exhaustive pass

@dataclass
class GroupReport:
    ok: bool
    identity: Optional[int]
    failures: List[LawViolation]

    def to_json_dict(self) -> dict:
        return {"ok": self.ok, "identity": self.identity,
                "failures": [f.to_json_dict() for f in self.failures]}


def find_identity(alg: FiniteAlgebra, symbol: str) -> Optional[int]:
    f = alg.op(symbol)
    for e in range(alg.size):
        if all(f(e, a) == a and f(a, e) == a for a in range(alg.size)):
            return e
    return None


def abelian_group_report(alg: FiniteAlgebra, symbol: str = "add") -> GroupReport:
    """Exhaustive associativity, commutativity, identity, and inverses."""
    failures: List[LawViolation] = []
    e = find_identity(alg, symbol)
    if e is None:
        failures.append(LawViolation(f"identity({symbol})", (), (), "", "",
                                     "no two-sided identity element"))
        return GroupReport(False, None, failures)
    for law in (Comm(symbol), Assoc(symbol)):
        v = law_search(alg, law)
        if v is not None:
            failures.append(v)
    f = alg.op(symbol)
    neg: List[int] = []
    for a in range(alg.size):
        b = next((b for b in range(alg.size) if f(a, b) == e), None)
        if b is None:
            failures.append(LawViolation(
                f"inverse({symbol})", (a,), (alg.label(a),), "", alg.label(e),
                "no right inverse"))
            break
        neg.append(b)
    else:
        v = law_search(alg, Inverse(symbol, tuple(neg), e))
        if v is not None:
            failures.append(v)
    return GroupReport(not failures, e, failures)


# ---------------------------------------------------------------------------
# CLI names

_LAW_KINDS = {"assoc": Assoc, "comm": Comm, "cancel": Cancel}


def parse_law_name(text: str) -> Law:
    """Parse names like assoc-mul, comm-add, cancel-add, distrib."""
    parts = text.strip().split("-")
    if parts[0] == "distrib":
        if len(parts) == 1:
            return Distrib()
        if len(parts) == 3:
            return Distrib(parts[1], parts[2])
        raise ValueError(f"bad law name {text!r}: expected distrib or distrib-MUL-ADD")
    if len(parts) == 2 and parts[0] in _LAW_KINDS:
        return _LAW_KINDS[parts[0]](parts[1])
    raise ValueError(
        f"bad law name {text!r}: expected KIND-SYMBOL with KIND in "
        f"{sorted(_LAW_KINDS)} or distrib[-MUL-ADD]")
