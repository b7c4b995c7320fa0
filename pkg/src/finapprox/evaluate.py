"""Exhaustive evaluation of positive bounded formulas over finite algebras.

Quantifiers range over the exact preimage of their bound region under the
embedding.  Terms evaluate through the operation tables; numeric literals
map to the nearest carrier element (ties toward zero).  Closeness atoms
compare embedded values exactly: strict |x-y| < eps on the real line,
|x-y|_p <= eps p-adically.  Equality atoms compare carrier ids and are
flagged in the result, since exact equality is brittle under approximation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from .algebra import App, Const, FiniteAlgebra, Term, Var
from .exact import as_fraction
from .formulas import Close, Eq, EXISTS, FORALL, Formula, format_formula
from .padics import entourage_exponent, fraction_norm
from .regions import Region, region_contains

TRACE_DEPTH_DEFAULT = 8


@dataclass(frozen=True)
class WitnessNode:
    kind: str                 # "forall" | "exists" | "matrix"
    var: Optional[str]
    element: Optional[int]
    label: Optional[str]
    note: str
    child: Optional["WitnessNode"] = None

    def to_json_dict(self) -> dict:
        d = {"kind": self.kind, "note": self.note}
        if self.var is not None:
            d["var"] = self.var
        if self.element is not None:
            d["element"] = self.element
            d["label"] = self.label
        if self.child is not None:
            d["child"] = self.child.to_json_dict()
        return d

    def lines(self, indent: int = 0) -> List[str]:
        pad = "  " * indent
        head = f"{pad}{self.kind}"
        if self.var is not None:
            head += f" {self.var}"
        if self.element is not None:
            head += f" = {self.label} (id {self.element})"
        head += f": {self.note}"
        out = [head]
        if self.child is not None:
            out.extend(self.child.lines(indent + 1))
        return out


@dataclass(frozen=True)
class EvalResult:
    value: bool
    trace: Optional[WitnessNode]
    exact_equality_used: bool
    instances_checked: int
    formula_text: str

    def to_json_dict(self) -> dict:
        return {
            "value": self.value,
            "exact_equality_used": self.exact_equality_used,
            "instances_checked": self.instances_checked,
            "formula": self.formula_text,
            "trace": None if self.trace is None else self.trace.to_json_dict(),
        }


def embedded_fractions(alg: FiniteAlgebra) -> List[Fraction]:
    """Embedded values as exact rationals, cached on the algebra."""
    key = ("fractions",)
    cached = alg._domain_cache.get(key)
    if cached is None:
        if alg.ambient_kind == "padic":
            cached = [alg.embed(i).to_fraction() for i in range(alg.size)]
        else:
            cached = [as_fraction(alg.embed(i)) for i in range(alg.size)]
        alg._domain_cache[key] = cached
    return cached


def quantifier_domain(alg: FiniteAlgebra, region: Region) -> Tuple[int, ...]:
    """Ids whose embedded value lies in the region, cached per region."""
    key = ("domain", region)
    cached = alg._domain_cache.get(key)
    if cached is None:
        cached = tuple(i for i in range(alg.size)
                       if region_contains(region, alg.embed(i)))
        alg._domain_cache[key] = cached
    return cached


def nearest_carrier_id(alg: FiniteAlgebra, value) -> int:
    """Carrier id whose embedded value is closest to the target; ties go to
    the element nearer zero, then to the smaller id."""
    q = as_fraction(value)
    key = ("const", q)
    cached = alg._domain_cache.get(key)
    if cached is not None:
        return cached
    vals = embedded_fractions(alg)
    if alg.ambient_kind == "padic":
        best = min(range(alg.size),
                   key=lambda i: (fraction_norm(vals[i] - q, alg.p),
                                  fraction_norm(vals[i], alg.p), i))
    else:
        best = min(range(alg.size),
                   key=lambda i: (abs(vals[i] - q), abs(vals[i]), i))
    alg._domain_cache[key] = best
    return best


def _compile_term(t: Term, alg: FiniteAlgebra) -> Callable[[Dict[str, int]], int]:
    if isinstance(t, Var):
        name = t.name
        def ev_var(env, _n=name):
            if _n not in env:
                raise ValueError(f"variable {_n!r} not in scope")
            return env[_n]
        return ev_var
    if isinstance(t, Const):
        cid = nearest_carrier_id(alg, t.value)
        return lambda env: cid
    op = alg.op(t.symbol)
    args = [_compile_term(a, alg) for a in t.args]
    if len(args) == 2:
        f0, f1 = args
        return lambda env: op(f0(env), f1(env))
    return lambda env: op(*(f(env) for f in args))


def _compile_atom(atom, alg: FiniteAlgebra) -> Callable[[Dict[str, int]], bool]:
    f1 = _compile_term(atom.t1, alg)
    f2 = _compile_term(atom.t2, alg)
    if isinstance(atom, Eq):
        return lambda env: f1(env) == f2(env)
    eps = atom.eps
    vals = embedded_fractions(alg)
    if alg.ambient_kind == "padic":
        entourage_exponent(eps, alg.p)    # validates eps is a power of p
        p = alg.p
        return lambda env: fraction_norm(vals[f1(env)] - vals[f2(env)], p) <= eps
    return lambda env: abs(vals[f1(env)] - vals[f2(env)]) < eps


def eval_finite(formula: Formula, alg: FiniteAlgebra,
                assignment: Optional[Dict[str, int]] = None,
                trace_depth: int = TRACE_DEPTH_DEFAULT) -> EvalResult:
    """Evaluate a positive bounded formula over a finite algebra.

    `assignment` maps each free variable to a carrier id.  The result
    carries a trace explaining the verdict: the witness chain for a true
    existential, the first failing instance for a false universal.
    """
    assignment = dict(assignment or {})
    free = formula.free_vars()
    missing = [v for v in free if v not in assignment]
    if missing:
        raise ValueError(f"free variables without assignment: {missing}")
    for v, i in assignment.items():
        if not (0 <= i < alg.size):
            raise ValueError(f"assignment for {v!r} is not a carrier id: {i}")
    for q in formula.prefix:
        if q.region is None:
            raise ValueError(f"unbounded quantifier over {q.var!r}")

    conj_fns = [[_compile_atom(a, alg) for a in conj] for conj in formula.matrix]
    domains = [quantifier_domain(alg, q.region) for q in formula.prefix]
    counter = [0]

    def eval_matrix(env: Dict[str, int]) -> Tuple[bool, str]:
        counter[0] += 1
        for k, conj in enumerate(conj_fns):
            if all(f(env) for f in conj):
                return True, f"disjunct {k + 1} of {len(conj_fns)} holds"
        return False, f"none of {len(conj_fns)} disjuncts holds"

    def rec(level: int, env: Dict[str, int]) -> Tuple[bool, Optional[WitnessNode]]:
        if level == len(formula.prefix):
            ok, note = eval_matrix(env)
            return ok, WitnessNode("matrix", None, None, None, note)
        q = formula.prefix[level]
        dom = domains[level]
        capped = level >= trace_depth
        if q.kind == EXISTS:
            for i in dom:
                env[q.var] = i
                ok, child = rec(level + 1, env)
                del env[q.var]
                if ok:
                    node = WitnessNode(EXISTS, q.var, i, alg.label(i), "witness",
                                       None if capped else child)
                    return True, node
            note = ("empty bound preimage" if not dom
                    else f"no witness among {len(dom)} candidates")
            return False, WitnessNode(EXISTS, q.var, None, None, note)
        for i in dom:
            env[q.var] = i
            ok, child = rec(level + 1, env)
            del env[q.var]
            if not ok:
                node = WitnessNode(FORALL, q.var, i, alg.label(i),
                                   "counterexample", None if capped else child)
                return False, node
        note = ("empty bound preimage" if not dom
                else f"all {len(dom)} instances hold")
        return True, WitnessNode(FORALL, q.var, None, None, note)

    value, trace = rec(0, dict(assignment))
    has_eq = any(isinstance(a, Eq) for conj in formula.matrix for a in conj)
    return EvalResult(value, trace, has_eq, counter[0], format_formula(formula))


def brute_force_eval(formula: Formula, alg: FiniteAlgebra,
                     assignment: Optional[Dict[str, int]] = None) -> bool:
    """Reference evaluator: expands every quantifier into an explicit
    any/all over its domain with no caching, early exit tricks, or
    compilation.  Used as an independent oracle in tests."""
    assignment = dict(assignment or {})

    def eval_term(t: Term, env: Dict[str, int]) -> int:
        if isinstance(t, Var):
            return env[t.name]
        if isinstance(t, Const):
            return nearest_carrier_id(alg, t.value)
        return alg.op(t.symbol)(*(eval_term(a, env) for a in t.args))

    def eval_atom(a, env: Dict[str, int]) -> bool:
        i, j = eval_term(a.t1, env), eval_term(a.t2, env)
        if isinstance(a, Eq):
            return i == j
        vi = embedded_fractions(alg)[i]
        vj = embedded_fractions(alg)[j]
        if alg.ambient_kind == "padic":
            return fraction_norm(vi - vj, alg.p) <= a.eps
        return abs(vi - vj) < a.eps

    def expand(prefix, env) -> bool:
        if not prefix:
            return any(all(eval_atom(a, env) for a in conj)
                       for conj in formula.matrix)
        q, rest = prefix[0], prefix[1:]
        ids = [i for i in range(alg.size)
               if region_contains(q.region, alg.embed(i))]
        branches = [expand(rest, {**env, q.var: i}) for i in ids]
        return any(branches) if q.kind == EXISTS else all(branches)

    return expand(formula.prefix, assignment)
