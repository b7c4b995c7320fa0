"""Prenex positive bounded formulas: grammar, transforms, regularity.

Concrete syntax (EBNF):

    formula := quant* ":" matrix
    quant   := ("forall" | "exists") IDENT "in" region
    region  := part ("|" part)*
    part    := "(" num "," num ")" | "[" num "," num "]"
             | "pball(" int "," int ")"
    matrix  := conj ("or" conj)*
    conj    := factor ("and" factor)*
    factor  := atom | "(" matrix ")"
    atom    := term "=" term | "close(" term "," term "," num ")"
    term    := IDENT | num | "(" term ")" | term ("+" | "*") term

"*" binds tighter than "+", both left-associative.  Numerals are integers,
decimals, or fractions a/b; the printer always emits the fraction form.
Parenthesized sub-matrices are a convenience: when they force a product of
disjunctions the parser either distributes to DNF (normalize=True) or
reports the position.  There is no negation and no subtraction; order
relations enter through their positive encodings (desugar_order).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .algebra import App, Const, Signature, Term, Var
from .exact import as_fraction
from .regions import (Entourage, Interval, PadicBall, Region, RegionUnion,
                      closure_subset, format_region, is_compact_region,
                      is_relatively_compact_open, subset_of_interior)

FORALL = "forall"
EXISTS = "exists"


@dataclass(frozen=True)
class Eq:
    t1: Term
    t2: Term


@dataclass(frozen=True)
class Close:
    t1: Term
    t2: Term
    eps: Fraction

    def __post_init__(self):
        object.__setattr__(self, "eps", as_fraction(self.eps))
        if self.eps <= 0:
            raise ValueError("closeness threshold must be positive")


Atom = Union[Eq, Close]
Conjunction = Tuple[Atom, ...]
Matrix = Tuple[Conjunction, ...]


@dataclass(frozen=True)
class Quant:
    kind: str
    var: str
    region: Region

    def __post_init__(self):
        if self.kind not in (FORALL, EXISTS):
            raise ValueError(f"quantifier must be forall/exists, got {self.kind!r}")


@dataclass(frozen=True)
class Formula:
    prefix: Tuple[Quant, ...]
    matrix: Matrix

    def __post_init__(self):
        names = [q.var for q in self.prefix]
        if len(set(names)) != len(names):
            raise ValueError("duplicate quantifier variables in prefix")
        if not self.matrix or any(not c for c in self.matrix):
            raise ValueError("matrix needs at least one atom per conjunction")

    def bound_vars(self) -> Tuple[str, ...]:
        return tuple(q.var for q in self.prefix)

    def free_vars(self) -> Tuple[str, ...]:
        bound = set(self.bound_vars())
        out: List[str] = []

        def walk(t: Term) -> None:
            if isinstance(t, Var):
                if t.name not in bound and t.name not in out:
                    out.append(t.name)
            elif isinstance(t, App):
                for a in t.args:
                    walk(a)

        for conj in self.matrix:
            for atom in conj:
                walk(atom.t1)
                walk(atom.t2)
        return tuple(out)

    def bounds(self) -> Tuple[Region, ...]:
        return tuple(q.region for q in self.prefix)

    def with_bounds(self, regions: Sequence[Region]) -> "Formula":
        if len(regions) != len(self.prefix):
            raise ValueError("bound tuple length does not match the prefix")
        prefix = tuple(Quant(q.kind, q.var, r)
                       for q, r in zip(self.prefix, regions))
        return Formula(prefix, self.matrix)


# ---------------------------------------------------------------------------
# term helpers

def t_add(a: Term, b: Term) -> Term:
    return App("add", (a, b))


def t_mul(a: Term, b: Term) -> Term:
    return App("mul", (a, b))


def t_const(q) -> Term:
    return Const(as_fraction(q))


def t_var(name: str) -> Term:
    return Var(name)


def atom_signature_ok(f: Formula, signature: Signature) -> bool:
    def ok(t: Term) -> bool:
        if isinstance(t, App):
            if t.symbol not in signature:
                return False
            if len(t.args) != signature.arity(t.symbol):
                return False
            return all(ok(a) for a in t.args)
        return True

    return all(ok(a.t1) and ok(a.t2) for c in f.matrix for a in c)


# ---------------------------------------------------------------------------
# parsing

class ParseError(Exception):
    def __init__(self, message: str, text: str, pos: int):
        self.message = message
        self.pos = pos
        line_start = text.rfind("\n", 0, pos) + 1
        line_end = text.find("\n", pos)
        line = text[line_start:] if line_end < 0 else text[line_start:line_end]
        col = pos - line_start
        caret = " " * col + "^"
        super().__init__(f"at column {col + 1}: {message}\n  {line}\n  {caret}")


_KEYWORDS = {"forall", "exists", "in", "and", "or", "close", "pball"}

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>-?\d+(?:\.\d+)?(?:/\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[()\[\],:=+*|])
""", re.VERBOSE)


@dataclass(frozen=True)
class _Token:
    kind: str       # num | ident | keyword | punct | end
    text: str
    pos: int


def _tokenize(text: str) -> List[_Token]:
    out: List[_Token] = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            ch = text[i]
            hint = "subtraction is not part of the term language" if ch == "-" \
                else f"unexpected character {ch!r}"
            raise ParseError(hint, text, i)
        i = m.end()
        if m.lastgroup == "ws":
            continue
        kind = m.lastgroup
        tok_text = m.group()
        if kind == "ident" and tok_text in _KEYWORDS:
            kind = "keyword"
        out.append(_Token(kind, tok_text, m.start()))
    out.append(_Token("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, normalize: bool):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.normalize = normalize

    # -- token plumbing ------------------------------------------------------

    def peek(self) -> _Token:
        return self.toks[self.i]

    def next(self) -> _Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, message: str, tok: Optional[_Token] = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, self.text, tok.pos)

    def expect(self, text: str) -> _Token:
        t = self.peek()
        if t.text != text:
            shown = t.text or "end of input"
            raise self.error(f"expected {text!r}, found {shown!r}")
        return self.next()

    def accept(self, text: str) -> bool:
        if self.peek().text == text:
            self.next()
            return True
        return False

    # -- grammar -------------------------------------------------------------

    def parse(self) -> Formula:
        prefix: List[Quant] = []
        while self.peek().text in (FORALL, EXISTS):
            kind = self.next().text
            name_tok = self.peek()
            if name_tok.kind != "ident":
                raise self.error("expected a variable name")
            self.next()
            self.expect("in")
            region = self.parse_region()
            prefix.append(Quant(kind, name_tok.text, region))
        self.expect(":")
        matrix = self.parse_matrix()
        end = self.peek()
        if end.kind != "end":
            if end.text in (FORALL, EXISTS):
                raise self.error("quantifiers must precede ':'", end)
            raise self.error(f"unexpected trailing input {end.text!r}", end)
        try:
            return Formula(tuple(prefix), matrix)
        except ValueError as exc:
            raise ParseError(str(exc), self.text, 0) from exc

    def parse_number(self) -> Fraction:
        t = self.peek()
        if t.kind != "num":
            raise self.error("expected a number")
        self.next()
        return Fraction(t.text)

    def parse_region(self) -> Region:
        parts: List[Union[Interval, PadicBall]] = [self.parse_region_part()]
        while self.accept("|"):
            parts.append(self.parse_region_part())
        if len(parts) == 1:
            return parts[0]
        if any(isinstance(p, PadicBall) for p in parts):
            raise self.error("p-adic balls cannot be combined in a union")
        return RegionUnion(tuple(parts))

    def parse_region_part(self) -> Union[Interval, PadicBall]:
        t = self.peek()
        if t.text == "pball":
            self.next()
            self.expect("(")
            p = self.parse_number()
            self.expect(",")
            m = self.parse_number()
            self.expect(")")
            if p.denominator != 1 or m.denominator != 1:
                raise self.error("pball takes integers", t)
            return PadicBall(int(p), int(m))
        if t.text in ("(", "["):
            closed = t.text == "["
            self.next()
            lo = self.parse_number()
            self.expect(",")
            hi = self.parse_number()
            self.expect("]" if closed else ")")
            try:
                return Interval(lo, hi, closed)
            except ValueError as exc:
                raise ParseError(str(exc), self.text, t.pos) from exc
        raise self.error("expected a region")

    def parse_matrix(self) -> Matrix:
        disjuncts = list(self.parse_conj())
        while self.accept("or"):
            disjuncts.extend(self.parse_conj())
        return tuple(disjuncts)

    def parse_conj(self) -> Matrix:
        start = self.peek()
        factors = [self.parse_factor()]
        while self.accept("and"):
            factors.append(self.parse_factor())
        acc = factors[0]
        needs_distribution = len(factors) > 1 and any(len(f) > 1 for f in factors)
        if needs_distribution and not self.normalize:
            raise self.error(
                "matrix is not in disjunctive normal form "
                "(re-parse with normalize=True to distribute)", start)
        for f in factors[1:]:
            acc = tuple(c1 + c2 for c1 in acc for c2 in f)
        return acc

    def parse_factor(self) -> Matrix:
        if self.peek().text == "(":
            # could be a parenthesized matrix or a parenthesized term; try
            # the atom route first and fall back on the deeper failure
            save = self.i
            try:
                return (self.parse_atom(),)
            except ParseError as atom_err:
                atom_pos = atom_err.pos
                self.i = save
                try:
                    self.expect("(")
                    m = self.parse_matrix()
                    self.expect(")")
                    return m
                except ParseError as matrix_err:
                    raise atom_err if atom_pos >= matrix_err.pos else matrix_err
        return (self.parse_atom(),)

    def parse_atom(self) -> Conjunction:
        t = self.peek()
        if t.text == "close":
            self.next()
            self.expect("(")
            t1 = self.parse_term()
            self.expect(",")
            t2 = self.parse_term()
            self.expect(",")
            eps = self.parse_number()
            self.expect(")")
            if eps <= 0:
                raise ParseError("closeness threshold must be positive",
                                 self.text, t.pos)
            return (Close(t1, t2, eps),)
        t1 = self.parse_term()
        self.expect("=")
        t2 = self.parse_term()
        return (Eq(t1, t2),)

    def parse_term(self) -> Term:
        t = self.parse_mul()
        while self.accept("+"):
            t = t_add(t, self.parse_mul())
        return t

    def parse_mul(self) -> Term:
        t = self.parse_primary()
        while self.accept("*"):
            t = t_mul(t, self.parse_primary())
        return t

    def parse_primary(self) -> Term:
        t = self.peek()
        if t.text == "(":
            self.next()
            inner = self.parse_term()
            self.expect(")")
            return inner
        if t.kind == "num":
            self.next()
            return Const(Fraction(t.text))
        if t.kind == "ident":
            self.next()
            return Var(t.text)
        shown = t.text or "end of input"
        raise self.error(f"expected a term, found {shown!r}")


def parse_formula(text: str, normalize: bool = False) -> Formula:
    return _Parser(text, normalize).parse()


def parse_region(text: str) -> Region:
    """Standalone region, same grammar as quantifier bounds."""
    p = _Parser(text, normalize=False)
    region = p.parse_region()
    end = p.peek()
    if end.kind != "end":
        raise p.error(f"unexpected trailing input {end.text!r}", end)
    return region


# ---------------------------------------------------------------------------
# printing (canonical form; parse(format(f)) == f)

def _fmt_q(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_term(t: Term) -> str:
    # levels: 0 = sum, 1 = product, 2 = primary; parenthesize a child whose
    # level is below the context, or equal on the right (both ops associate
    # to the left in the grammar)
    def go(node: Term, level: int, right: bool) -> str:
        if isinstance(node, Var):
            return node.name
        if isinstance(node, Const):
            return _fmt_q(node.value)
        if isinstance(node, App) and node.symbol == "add" and len(node.args) == 2:
            own = 0
            s = f"{go(node.args[0], own, False)} + {go(node.args[1], own, True)}"
        elif isinstance(node, App) and node.symbol == "mul" and len(node.args) == 2:
            own = 1
            s = f"{go(node.args[0], own, False)}*{go(node.args[1], own, True)}"
        else:
            args = ", ".join(go(a, 0, False) for a in node.args)
            return f"{node.symbol}({args})"
        if own < level or (own == level and right):
            return f"({s})"
        return s

    return go(t, 0, False)


def format_atom(a: Atom) -> str:
    if isinstance(a, Eq):
        return f"{format_term(a.t1)} = {format_term(a.t2)}"
    return f"close({format_term(a.t1)}, {format_term(a.t2)}, {_fmt_q(a.eps)})"


def format_formula(f: Formula) -> str:
    matrix = " or ".join(" and ".join(format_atom(a) for a in conj)
                         for conj in f.matrix)
    quants = " ".join(f"{q.kind} {q.var} in {format_region(q.region)}"
                      for q in f.prefix)
    return f"{quants} : {matrix}" if quants else f": {matrix}"


# ---------------------------------------------------------------------------
# order-relation encodings

def desugar_order(relation: str, b) -> Formula:
    """Positive bounded encodings of x <= y and x < y on the real line.

    "le": exists z in [-b, b] with x + z^2 = y, capturing x <= y <= x + b^2.
    "lt": exists z in [-b, b] with y*z^2 = x*z^2 + 1, capturing y > x + 1/b^2
    (the subtraction-free arrangement of (y - x)*z^2 = 1).
    """
    b = as_fraction(b)
    if b <= 0:
        raise ValueError("need b > 0")
    bound = Interval(-b, b, closed=True)
    x, y, z = Var("x"), Var("y"), Var("z")
    zz = t_mul(z, z)
    if relation == "le":
        atom = Eq(t_add(x, zz), y)
    elif relation == "lt":
        atom = Eq(t_mul(y, zz), t_add(t_mul(x, zz), t_const(1)))
    else:
        raise ValueError(f"relation must be 'le' or 'lt', got {relation!r}")
    return Formula((Quant(EXISTS, "z", bound),), ((atom,),))


# ---------------------------------------------------------------------------
# regularity, refinement order, widening

def check_regular(f: Formula, c: Optional[Sequence[Region]] = None) -> bool:
    """forall bounds must be relatively compact open, exists bounds compact."""
    regions = tuple(c) if c is not None else f.bounds()
    if len(regions) != len(f.prefix):
        raise ValueError("bound tuple length does not match the prefix")
    for q, r in zip(f.prefix, regions):
        if q.kind == FORALL and not is_relatively_compact_open(r):
            return False
        if q.kind == EXISTS and not is_compact_region(r):
            return False
    return True


def check_ll(f: Formula, c: Sequence[Region], c2: Sequence[Region]) -> bool:
    """The refinement order on bound tuples: at forall positions the closure
    of the new bound sits inside the old one, at exists positions the old
    bound sits in the interior of the new one."""
    if len(c) != len(f.prefix) or len(c2) != len(f.prefix):
        raise ValueError("bound tuple length does not match the prefix")
    for q, old, new in zip(f.prefix, c, c2):
        if q.kind == FORALL:
            if not closure_subset(new, old):
                return False
        else:
            if not subset_of_interior(old, new):
                return False
    return True


def _shift_interval(iv: Interval, delta: Fraction) -> Interval:
    # delta < 0 shrinks symmetrically, delta > 0 grows
    lo, hi = iv.lo - delta, iv.hi + delta
    if lo > hi:
        raise ValueError(f"margin collapses interval {iv}")
    return Interval(lo, hi, iv.closed)


def _adjust(region: Region, delta: Fraction) -> Region:
    if isinstance(region, PadicBall):
        return region          # clopen: already its own closure and interior
    if isinstance(region, RegionUnion):
        return RegionUnion(tuple(_shift_interval(p, delta) for p in region.parts))
    return _shift_interval(region, delta)


def widen(f: Formula, margin, c: Optional[Sequence[Region]] = None
          ) -> Tuple[Region, ...]:
    """A bound tuple c' with c << c': forall bounds shrink inward by the
    margin, exists bounds grow outward.  Errors when a forall bound
    collapses to emptiness."""
    margin = as_fraction(margin)
    if margin <= 0:
        raise ValueError("need a positive margin")
    regions = tuple(c) if c is not None else f.bounds()
    if len(regions) != len(f.prefix):
        raise ValueError("bound tuple length does not match the prefix")
    out: List[Region] = []
    for q, r in zip(f.prefix, regions):
        out.append(_adjust(r, -margin if q.kind == FORALL else margin))
    result = tuple(out)
    if not check_ll(f, regions, result):
        raise ValueError("widening failed to refine the bounds")
    return result


# ---------------------------------------------------------------------------
# approximation transform

def approximate(f: Formula, ent: Union[Entourage, Fraction, int]) -> Formula:
    """Replace every equality atom by a closeness atom at the threshold;
    existing closeness atoms and everything else stay untouched."""
    eps = ent.eps if isinstance(ent, Entourage) else as_fraction(ent)
    matrix = tuple(
        tuple(Close(a.t1, a.t2, eps) if isinstance(a, Eq) else a
              for a in conj)
        for conj in f.matrix)
    return Formula(f.prefix, matrix)


# ---------------------------------------------------------------------------
# exact term evaluation over the rationals

def eval_term_exact(t: Term, env: Dict[str, Fraction]) -> Fraction:
    if isinstance(t, Var):
        if t.name not in env:
            raise KeyError(f"variable {t.name!r} not in scope")
        return env[t.name]
    if isinstance(t, Const):
        return t.value
    if t.symbol == "add":
        return eval_term_exact(t.args[0], env) + eval_term_exact(t.args[1], env)
    if t.symbol == "mul":
        return eval_term_exact(t.args[0], env) * eval_term_exact(t.args[1], env)
    raise ValueError(f"no exact rational interpretation for symbol {t.symbol!r}")
