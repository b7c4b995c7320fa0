"""Signatures, terms, and finite algebras with ambient embeddings.

A FiniteAlgebra is an indexed carrier 0..size-1, one operation table per
signature symbol, and an embedding of carrier ids into ambient values
(exact rationals for the real line, finite digit vectors for Q_p).  Tables
may be materialized tuples or backing functions; function-backed tables are
used for carriers too large to tabulate and are materialized on export.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

from .padics import PadicDigits

EmbeddedValue = Union[Fraction, PadicDigits]

MATERIALIZE_LIMIT = 512          # binary tables are tabulated up to this carrier size
EXPORT_CELL_LIMIT = 4_000_000    # refuse to serialize beyond this many table cells


@dataclass(frozen=True)
class Signature:
    symbols: Tuple[Tuple[str, int], ...]

    def __post_init__(self):
        names = [s for s, _ in self.symbols]
        if len(set(names)) != len(names):
            raise ValueError("duplicate symbol names in signature")
        for name, arity in self.symbols:
            if arity < 0:
                raise ValueError(f"negative arity for {name}")

    def arity(self, name: str) -> int:
        for s, a in self.symbols:
            if s == name:
                return a
        raise KeyError(f"unknown symbol {name!r}")

    def names(self) -> Tuple[str, ...]:
        return tuple(s for s, _ in self.symbols)

    def __contains__(self, name: str) -> bool:
        return any(s == name for s, _ in self.symbols)


RING_SIGNATURE = Signature((("add", 2), ("mul", 2)))


# ---------------------------------------------------------------------------
# terms

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class App:
    symbol: str
    args: Tuple["Term", ...]


Term = Union[Var, Const, App]


def term_free_vars(t: Term) -> Tuple[str, ...]:
    out: list[str] = []

    def walk(node: Term) -> None:
        if isinstance(node, Var):
            if node.name not in out:
                out.append(node.name)
        elif isinstance(node, App):
            for a in node.args:
                walk(a)

    walk(t)
    return tuple(out)


def validate_term(t: Term, signature: Signature) -> None:
    if isinstance(t, App):
        if t.symbol not in signature:
            raise ValueError(f"symbol {t.symbol!r} not in signature")
        if len(t.args) != signature.arity(t.symbol):
            raise ValueError(f"arity mismatch for {t.symbol!r}")
        for a in t.args:
            validate_term(a, signature)


# ---------------------------------------------------------------------------
# operation tables

class OpTable:
    """Operation on carrier ids; either tabulated or function-backed."""

    def __init__(self, arity: int, size: int,
                 table: Optional[Sequence[int]] = None,
                 func: Optional[Callable[..., int]] = None):
        if (table is None) == (func is None):
            raise ValueError("exactly one of table/func required")
        self.arity = arity
        self.size = size
        self.func = func
        self.table = tuple(table) if table is not None else None
        if self.table is not None:
            if len(self.table) != size ** arity:
                raise ValueError("table length does not match carrier size")
            bad = [v for v in self.table if not (0 <= v < size)]
            if bad:
                raise ValueError(f"table entry {bad[0]} out of carrier range")

    def __call__(self, *ids: int) -> int:
        if self.table is not None:
            if self.arity == 2:
                i, j = ids
                return self.table[i * self.size + j]
            idx = 0
            for i in ids:
                idx = idx * self.size + i
            return self.table[idx]
        out = self.func(*ids)
        if not (0 <= out < self.size):
            raise ValueError(f"operation escaped the carrier: got {out}")
        return out

    def materialized(self) -> "OpTable":
        if self.table is not None:
            return self
        cells = self.size ** self.arity
        if cells > EXPORT_CELL_LIMIT:
            raise ValueError(f"refusing to materialize {cells} table cells")
        if self.arity == 0:
            flat = [self.func()]
        elif self.arity == 1:
            flat = [self.func(i) for i in range(self.size)]
        elif self.arity == 2:
            flat = [self.func(i, j) for i in range(self.size) for j in range(self.size)]
        else:
            import itertools
            flat = [self.func(*t) for t in itertools.product(range(self.size), repeat=self.arity)]
        return OpTable(self.arity, self.size, table=flat)


class FiniteAlgebra:
    """Immutable after construction; methods never mutate shared state."""

    def __init__(self, signature: Signature, size: int,
                 ops: Dict[str, OpTable],
                 embedding: Sequence[EmbeddedValue],
                 labels: Optional[Sequence[str]] = None,
                 ambient_kind: str = "real",
                 p: Optional[int] = None,
                 name: str = ""):
        if size <= 0:
            raise ValueError("carrier must be nonempty")
        if set(ops) != set(signature.names()):
            raise ValueError("operation tables do not match the signature")
        if len(embedding) != size:
            raise ValueError("embedding must cover the whole carrier")
        if ambient_kind not in ("real", "padic"):
            raise ValueError(f"unknown ambient kind {ambient_kind!r}")
        if ambient_kind == "padic" and p is None:
            raise ValueError("p-adic algebras need the prime")
        self.signature = signature
        self.size = size
        self.ops = ops
        self.embedding = tuple(embedding)
        self.labels = tuple(labels) if labels is not None else tuple(
            str(v) for v in self.embedding)
        self.ambient_kind = ambient_kind
        self.p = p
        self.name = name
        self._domain_cache: dict = {}

    def op(self, name: str) -> OpTable:
        return self.ops[name]

    def embed(self, i: int) -> EmbeddedValue:
        return self.embedding[i]

    def label(self, i: int) -> str:
        return self.labels[i]

    # -- serialization ------------------------------------------------------

    def to_json_dict(self) -> dict:
        tables = {}
        for name in self.signature.names():
            tables[name] = list(self.ops[name].materialized().table)
        if self.ambient_kind == "real":
            emb = [f"{v.numerator}/{v.denominator}" for v in self.embedding]
        else:
            emb = [{"p": v.p, "valuation": v.valuation, "digits": list(v.digits)}
                   for v in self.embedding]
        return {
            "signature": [{"name": n, "arity": a} for n, a in self.signature.symbols],
            "carrier_size": self.size,
            "tables": tables,
            "embedding": emb,
        }

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write(dumps_algebra(self))

    @staticmethod
    def from_json_dict(doc: dict) -> "FiniteAlgebra":
        try:
            sig = Signature(tuple((s["name"], int(s["arity"])) for s in doc["signature"]))
            size = int(doc["carrier_size"])
            ops = {}
            for name, arity in sig.symbols:
                ops[name] = OpTable(arity, size, table=[int(v) for v in doc["tables"][name]])
            raw_emb = doc["embedding"]
            if raw_emb and isinstance(raw_emb[0], dict):
                embedding = [PadicDigits(int(e["p"]), int(e["valuation"]),
                                         tuple(int(d) for d in e["digits"]))
                             for e in raw_emb]
                p = embedding[0].p if embedding else None
                return FiniteAlgebra(sig, size, ops, embedding,
                                     ambient_kind="padic", p=p)
            embedding = [Fraction(e) for e in raw_emb]
            return FiniteAlgebra(sig, size, ops, embedding, ambient_kind="real")
        except (KeyError, TypeError, ValueError) as exc:
            raise AlgebraFormatError(str(exc)) from exc

    @staticmethod
    def load(path: str) -> "FiniteAlgebra":
        with open(path) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise AlgebraFormatError(f"invalid JSON: {exc}") from exc
        return FiniteAlgebra.from_json_dict(doc)


class AlgebraFormatError(Exception):
    """Malformed algebra file (structural, not semantic)."""


def corrupt_entry(alg: FiniteAlgebra, symbol: str, ids: Tuple[int, ...],
                  new_id: int) -> FiniteAlgebra:
    """Copy of the algebra with one table cell overwritten; for negative
    tests of the verification machinery."""
    op = alg.ops[symbol].materialized()
    if len(ids) != op.arity:
        raise ValueError("cell index arity mismatch")
    if not (0 <= new_id < alg.size):
        raise ValueError("replacement id out of carrier range")
    idx = 0
    for i in ids:
        if not (0 <= i < alg.size):
            raise ValueError("cell index out of carrier range")
        idx = idx * alg.size + i
    flat = list(op.table)
    flat[idx] = new_id
    ops = dict(alg.ops)
    ops[symbol] = OpTable(op.arity, alg.size, table=flat)
    return FiniteAlgebra(alg.signature, alg.size, ops, alg.embedding,
                         labels=alg.labels, ambient_kind=alg.ambient_kind,
                         p=alg.p, name=alg.name + " (corrupted)")


def dumps_algebra(alg: FiniteAlgebra) -> str:
    return json.dumps(alg.to_json_dict(), sort_keys=True, separators=(",", ":")) + "\n"
