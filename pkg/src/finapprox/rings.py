"""Finite rings and the embedding probe.

Builds small associative rings (cyclic, products, small Galois fields,
upper-triangular 2x2 matrices), verifies the ring axioms exhaustively, and
searches for real-line embeddings minimizing the homomorphism error at a
given (a, eps) resolution.  The search space is restricted to surjective
assignments onto the eps-grid covering [-a, a]: the grid condition forces
images to be eps-dense there, so at the tested resolution nothing is lost;
the restriction is a documented heuristic, and every probe report says so.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .algebra import FiniteAlgebra, OpTable, RING_SIGNATURE
from .exact import as_fraction
from .reporting import render_table

PROBE_ORDER_LIMIT = 4096


class RingAxiomError(Exception):
    pass


class InfeasibleGridError(ValueError):
    """Ring order below the grid-point count: coverage impossible."""


# ---------------------------------------------------------------------------
# ring construction

@dataclass(frozen=True)
class RingSpec:
    kind: str                      # "zn" | "product" | "gf" | "ut2"
    params: tuple
    name: str


def zn(n: int) -> RingSpec:
    if n < 1:
        raise ValueError("need n >= 1")
    return RingSpec("zn", (n,), f"Z/{n}")


def product_ring(*specs: RingSpec) -> RingSpec:
    if not specs:
        raise ValueError("product of no rings")
    name = " x ".join(s.name for s in specs)
    return RingSpec("product", tuple(specs), name)


def gf(p: int, k: int) -> RingSpec:
    return RingSpec("gf", (p, k), f"GF({p}^{k})")


def ut2(p: int) -> RingSpec:
    return RingSpec("ut2", (p,), f"UT2(Z/{p})")


def _poly_mul_mod(a: Tuple[int, ...], b: Tuple[int, ...],
                  modpoly: Tuple[int, ...], p: int) -> Tuple[int, ...]:
    k = len(modpoly) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            prod[i + j] = (prod[i + j] + ai * bj) % p
    # reduce x^m = -(lower terms of modpoly), monic assumed
    for deg in range(len(prod) - 1, k - 1, -1):
        c = prod[deg]
        if c:
            prod[deg] = 0
            for j in range(k):
                prod[deg - k + j] = (prod[deg - k + j] - c * modpoly[j]) % p
    out = prod[:k] + [0] * (k - len(prod))
    return tuple(out[:k])


def _find_irreducible(p: int, k: int) -> Tuple[int, ...]:
    """Monic irreducible polynomial of degree k over Z/p, little-endian
    coefficients without the leading 1, found by trial division."""
    def all_polys(deg, monic):
        rng = [range(p)] * deg
        for coeffs in itertools.product(*rng):
            yield tuple(coeffs) + ((1,) if monic else ())

    def divides(d: Tuple[int, ...], f: Tuple[int, ...]) -> bool:
        # polynomial remainder f mod d == 0, both monic-coded little-endian
        f = list(f)
        dd = len(d) - 1
        inv_lead = pow(d[-1], -1, p)
        for deg in range(len(f) - 1, dd - 1, -1):
            c = (f[deg] * inv_lead) % p
            if c:
                for j in range(dd + 1):
                    f[deg - dd + j] = (f[deg - dd + j] - c * d[j]) % p
        return all(x == 0 for x in f)

    for tail in itertools.product(*([range(p)] * k)):
        f = tuple(tail) + (1,)
        if f[0] == 0:
            continue               # divisible by x
        ok = True
        for d_deg in range(1, k // 2 + 1):
            for d in all_polys(d_deg, monic=True):
                if divides(d, f):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return tail            # leading 1 implicit
    raise ValueError(f"no irreducible polynomial of degree {k} over Z/{p}")


def build_ring(spec: RingSpec) -> FiniteAlgebra:
    """Operation tables for the spec; the embedding is a placeholder
    (carrier index as a rational) until the probe attaches a searched one."""
    if spec.kind == "zn":
        (n,) = spec.params
        elems = list(range(n))
        add = lambda i, j: (i + j) % n
        mul = lambda i, j: (i * j) % n
        labels = [str(e) for e in elems]
    elif spec.kind == "product":
        parts = [build_ring(s) for s in spec.params]
        sizes = [a.size for a in parts]
        elems = list(itertools.product(*[range(s) for s in sizes]))
        index = {e: i for i, e in enumerate(elems)}
        def add(i, j, _parts=parts, _elems=elems, _index=index):
            return _index[tuple(p.op("add")(x, y) for p, x, y in
                                zip(_parts, _elems[i], _elems[j]))]
        def mul(i, j, _parts=parts, _elems=elems, _index=index):
            return _index[tuple(p.op("mul")(x, y) for p, x, y in
                                zip(_parts, _elems[i], _elems[j]))]
        labels = ["(" + ",".join(p.label(x) for p, x in zip(parts, e)) + ")"
                  for e in elems]
    elif spec.kind == "gf":
        p, k = spec.params
        _check_prime_probe(p)
        modpoly = _find_irreducible(p, k) + (1,)
        elems = list(itertools.product(*([range(p)] * k)))
        index = {e: i for i, e in enumerate(elems)}
        def add(i, j, _e=elems, _ix=index, _p=p):
            return _ix[tuple((x + y) % _p for x, y in zip(_e[i], _e[j]))]
        def mul(i, j, _e=elems, _ix=index, _p=p, _m=modpoly):
            return _ix[_poly_mul_mod(_e[i], _e[j], _m, _p)]
        labels = ["+".join(f"{c}x^{d}" if d else str(c)
                           for d, c in enumerate(e) if c) or "0"
                  for e in elems]
    elif spec.kind == "ut2":
        (p,) = spec.params
        _check_prime_probe(p)
        elems = list(itertools.product(range(p), range(p), range(p)))
        index = {e: i for i, e in enumerate(elems)}
        def add(i, j, _e=elems, _ix=index, _p=p):
            a, b, d = _e[i]; a2, b2, d2 = _e[j]
            return _ix[((a + a2) % _p, (b + b2) % _p, (d + d2) % _p)]
        def mul(i, j, _e=elems, _ix=index, _p=p):
            a, b, d = _e[i]; a2, b2, d2 = _e[j]
            return _ix[((a * a2) % _p, (a * b2 + b * d2) % _p, (d * d2) % _p)]
        labels = [f"[{a} {b}; 0 {d}]" for a, b, d in elems]
    else:
        raise ValueError(f"unknown ring family {spec.kind!r}")

    n = len(elems)
    add_op = OpTable(2, n, table=[add(i, j) for i in range(n)
                                  for j in range(n)])
    mul_op = OpTable(2, n, table=[mul(i, j) for i in range(n)
                                  for j in range(n)])
    alg = FiniteAlgebra(RING_SIGNATURE, n,
                        {"add": add_op, "mul": mul_op},
                        [Fraction(i) for i in range(n)],
                        labels=labels, name=spec.name)
    verify_ring(alg)
    return alg


def _check_prime_probe(p: int) -> None:
    if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
        raise ValueError(f"{p} is not prime")


def verify_ring(alg: FiniteAlgebra) -> None:
    """Exhaustive ring-axiom gate: abelian group under add, associative mul,
    two-sided distributivity.  Raises RingAxiomError with the offending law
    and tuple."""
    n = alg.size
    add = alg.op("add")
    mul = alg.op("mul")
    rng = range(n)
    zero = next((z for z in rng if all(add(z, k) == k for k in rng)), None)
    if zero is None:
        raise RingAxiomError("no additive identity")
    for i in rng:
        if not any(add(i, j) == zero for j in rng):
            raise RingAxiomError(f"no additive inverse for element {i}")
        for j in rng:
            if add(i, j) != add(j, i):
                raise RingAxiomError(f"add not commutative at ({i},{j})")
            for k in rng:
                if add(add(i, j), k) != add(i, add(j, k)):
                    raise RingAxiomError(f"add not associative at ({i},{j},{k})")
                if mul(mul(i, j), k) != mul(i, mul(j, k)):
                    raise RingAxiomError(f"mul not associative at ({i},{j},{k})")
                if mul(i, add(j, k)) != add(mul(i, j), mul(i, k)):
                    raise RingAxiomError(f"left distributivity at ({i},{j},{k})")
                if mul(add(i, j), k) != add(mul(i, k), mul(j, k)):
                    raise RingAxiomError(f"right distributivity at ({i},{j},{k})")


def enumerate_rings(specs: Sequence[RingSpec], max_order: int
                    ) -> List[FiniteAlgebra]:
    if max_order > PROBE_ORDER_LIMIT:
        raise ValueError(f"max_order {max_order} exceeds the desk limit "
                         f"{PROBE_ORDER_LIMIT}")
    out = []
    for spec in specs:
        alg = build_ring(spec)
        if alg.size > max_order:
            raise ValueError(f"{spec.name} has order {alg.size} > {max_order}")
        out.append(alg)
    return out


def is_isomorphic_by(mapping: Sequence[int], a: FiniteAlgebra,
                     b: FiniteAlgebra) -> bool:
    """Does the carrier bijection map a's tables onto b's, symbol by symbol?"""
    if a.size != b.size or sorted(mapping) != list(range(a.size)):
        return False
    for symbol in a.signature.names():
        fa, fb = a.op(symbol), b.op(symbol)
        for i in range(a.size):
            for j in range(a.size):
                if mapping[fa(i, j)] != fb(mapping[i], mapping[j]):
                    return False
    return True


# ---------------------------------------------------------------------------
# embedding search

@dataclass(frozen=True)
class EmbeddingSearchConfig:
    a: Fraction
    eps: Fraction
    scale_resolution: int = 3
    iteration_cap: int = 4000
    restarts: int = 12
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "a", as_fraction(self.a))
        object.__setattr__(self, "eps", as_fraction(self.eps))
        if self.a <= 0 or self.eps <= 0:
            raise ValueError("need positive a and eps")
        if self.scale_resolution < 1 or self.iteration_cap < 1 \
                or self.restarts < 1:
            raise ValueError("search knobs must be positive")


def _grid_geometry(a: Fraction, eps: Fraction) -> Tuple[int, int]:
    """(half-count M_g, inverse threshold in grid units).  Grid points are
    k*eps for |k| <= M_g; inv scales values into integer units of eps."""
    M_g = -((-a.numerator * eps.denominator) // (a.denominator * eps.numerator))
    inv_num, inv_den = eps.denominator, eps.numerator
    if inv_den != 1:
        raise ValueError("eps must be 1/m for integer-unit scoring")
    return M_g, inv_num


def _score(add_rows: List[List[int]], mul_rows: List[List[int]],
           units: List[int], M_g: int, inv: int) -> Tuple[int, int]:
    """Worst in-window violations in integer units: (add error * inv,
    mul error), both at the eps^2 scale; the overall score is their max."""
    n = len(units)
    a_max = 0
    m_max = 0
    prod_win = M_g * inv
    for i in range(n):
        ui = units[i]
        arow = add_rows[i]
        mrow = mul_rows[i]
        for j in range(n):
            uj = units[j]
            s = ui + uj
            if -M_g <= s <= M_g:
                e = s - units[arow[j]]
                if e < 0:
                    e = -e
                if e > a_max:
                    a_max = e
            pr = ui * uj
            if -prod_win <= pr <= prod_win:
                e = pr - units[mrow[j]] * inv
                if e < 0:
                    e = -e
                if e > m_max:
                    m_max = e
    return a_max * inv, m_max


def score_embedding(ring: FiniteAlgebra, units: Sequence[int],
                    a, eps) -> Dict[str, Fraction]:
    """Normalized (error/eps) worst-case homomorphism violations of the
    grid embedding j(i) = units[i]*eps."""
    a, eps = as_fraction(a), as_fraction(eps)
    M_g, inv = _grid_geometry(a, eps)
    add_rows = [[ring.op("add")(i, j) for j in range(ring.size)]
                for i in range(ring.size)]
    mul_rows = [[ring.op("mul")(i, j) for j in range(ring.size)]
                for i in range(ring.size)]
    a_scaled, m_scaled = _score(add_rows, mul_rows, list(units), M_g, inv)
    return {"add": Fraction(a_scaled, inv), "mul": Fraction(m_scaled, inv)}


def _grid_cover_ok(units: Sequence[int], M_g: int) -> bool:
    have = set(units)
    return all(k in have for k in range(-M_g, M_g + 1))


def _repair_surjective(units: List[int], M_g: int) -> List[int]:
    counts: Dict[int, int] = {}
    for u in units:
        counts[u] = counts.get(u, 0) + 1
    missing = [k for k in range(-M_g, M_g + 1) if k not in counts]
    for k in missing:
        i = max(range(len(units)), key=lambda idx: counts[units[idx]])
        if counts[units[i]] <= 1:
            raise InfeasibleGridError("cannot repair coverage")
        counts[units[i]] -= 1
        units[i] = k
        counts[k] = 1
    return units


def _balanced(k: int, n: int) -> int:
    m = (n - 1) // 2
    return (k + m) % n - m


def best_embedding_error(ring: FiniteAlgebra, a, eps,
                         config: Optional[EmbeddingSearchConfig] = None
                         ) -> Tuple[Fraction, Tuple[Fraction, ...]]:
    """Search grid-valued embeddings covering [-a, a] for the smallest
    worst-case homomorphism violation.

    Returns (achieved_error, embedding values).  The achieved error is the
    absolute worst violation over in-window pairs; divide by eps to
    normalize.  Deterministic given the config seed.  Raises
    InfeasibleGridError when the ring is smaller than the grid.
    """
    a, eps = as_fraction(a), as_fraction(eps)
    if config is None:
        config = EmbeddingSearchConfig(a, eps)
    if (config.a, config.eps) != (a, eps):
        raise ValueError("config (a, eps) disagrees with the arguments")
    M_g, inv = _grid_geometry(a, eps)
    G = 2 * M_g + 1
    n = ring.size
    if n < G:
        raise InfeasibleGridError(
            f"order {n} < {G} grid points: coverage impossible "
            f"(pigeonhole at a={a}, eps={eps})")

    add_rows = [[ring.op("add")(i, j) for j in range(n)] for i in range(n)]
    mul_rows = [[ring.op("mul")(i, j) for j in range(n)] for i in range(n)]

    def full_score(units: List[int]) -> int:
        a_s, m_s = _score(add_rows, mul_rows, units, M_g, inv)
        return max(a_s, m_s)

    rng = random.Random(config.seed)
    starts: List[List[int]] = []
    for s in range(1, config.scale_resolution + 1):
        for sign in (1, -1):
            base = [max(-M_g, min(M_g, sign * s * _balanced(k, n)))
                    for k in range(n)]
            try:
                starts.append(_repair_surjective(base, M_g))
            except InfeasibleGridError:
                pass
    while len(starts) < config.restarts:
        perm = list(range(-M_g, M_g + 1))
        rng.shuffle(perm)
        extra = [rng.randint(-M_g, M_g) for _ in range(n - G)]
        units = perm + extra
        rng.shuffle(units)
        starts.append(units)

    best_units: Optional[List[int]] = None
    best = None
    moves_left = config.iteration_cap
    for start in starts[:max(config.restarts, len(starts))]:
        units = list(start)
        counts: Dict[int, int] = {}
        for u in units:
            counts[u] = counts.get(u, 0) + 1
        cur = full_score(units)
        improved = True
        while improved and moves_left > 0:
            improved = False
            for i in range(n):
                u0 = units[i]
                if counts[u0] < 2 and n == G:
                    continue     # unique holder in a bijection: cannot move
                for v in range(-M_g, M_g + 1):
                    if v == u0 or counts[u0] < 2:
                        continue
                    units[i] = v
                    counts[u0] -= 1
                    counts[v] = counts.get(v, 0) + 1
                    sc = full_score(units)
                    if sc < cur:
                        cur = sc
                        improved = True
                        moves_left -= 1
                        break
                    units[i] = u0
                    counts[u0] += 1
                    counts[v] -= 1
                    if counts[v] == 0:
                        del counts[v]
                if improved:
                    break
            if n == G and moves_left > 0:
                # bijective case: single reassignments are blocked, so also
                # try swapping pairs of images
                for i in range(n):
                    for j in range(i + 1, n):
                        if units[i] == units[j]:
                            continue
                        units[i], units[j] = units[j], units[i]
                        sc = full_score(units)
                        if sc < cur:
                            cur = sc
                            improved = True
                            moves_left -= 1
                            break
                        units[i], units[j] = units[j], units[i]
                    if improved:
                        break
        if best is None or cur < best:
            best = cur
            best_units = list(units)
    assert best_units is not None
    err = Fraction(best, inv * inv)    # scores live at the eps^2 scale
    embedding = tuple(Fraction(u, inv) for u in best_units)
    return err, embedding


def brute_force_embedding_error(ring: FiniteAlgebra, a, eps,
                                state_limit: int = 2_000_000
                                ) -> Tuple[Fraction, Tuple[Fraction, ...]]:
    """Exhaustive optimum over ALL surjective grid assignments; only viable
    at tiny sizes.  Independent of the local search except for the scoring
    definition, which is the quantity being optimized."""
    a, eps = as_fraction(a), as_fraction(eps)
    M_g, inv = _grid_geometry(a, eps)
    G = 2 * M_g + 1
    n = ring.size
    if n < G:
        raise InfeasibleGridError(f"order {n} < {G} grid points")
    if G ** n > state_limit:
        raise ValueError(f"{G}^{n} assignments exceed the state limit")
    add_rows = [[ring.op("add")(i, j) for j in range(n)] for i in range(n)]
    mul_rows = [[ring.op("mul")(i, j) for j in range(n)] for i in range(n)]
    best = None
    best_units = None
    for units in itertools.product(range(-M_g, M_g + 1), repeat=n):
        if not _grid_cover_ok(units, M_g):
            continue
        a_s, m_s = _score(add_rows, mul_rows, list(units), M_g, inv)
        sc = max(a_s, m_s)
        if best is None or sc < best:
            best, best_units = sc, units
    assert best_units is not None
    return Fraction(best, inv * inv), tuple(Fraction(u, inv)
                                            for u in best_units)


# ---------------------------------------------------------------------------
# the grid control (a non-ring approximation scored the same way)

def grid_control_units(a, eps) -> Tuple[FiniteAlgebra, List[int]]:
    """The rounded-arithmetic grid algebra on exactly the probe grid, with
    its identity embedding in grid units.  Not a ring (rounding breaks
    associativity), but an approximation by construction: its normalized
    errors are 0 for add and at most 1 for mul."""
    a, eps = as_fraction(a), as_fraction(eps)
    M_g, inv = _grid_geometry(a, eps)
    n = 2 * M_g + 1

    def clamp(u: int) -> int:
        return max(-M_g, min(M_g, u))

    def f_add(i, j):
        return clamp((i - M_g) + (j - M_g)) + M_g

    def f_mul(i, j):
        num = (i - M_g) * (j - M_g)
        q, r = divmod(num, inv)
        if 2 * r > inv or (2 * r == inv and q < 0):
            q += 1
        return clamp(q) + M_g

    table_add = [f_add(i, j) for i in range(n) for j in range(n)]
    table_mul = [f_mul(i, j) for i in range(n) for j in range(n)]
    alg = FiniteAlgebra(RING_SIGNATURE, n,
                        {"add": OpTable(2, n, table=table_add),
                         "mul": OpTable(2, n, table=table_mul)},
                        [Fraction(k, inv) for k in range(-M_g, M_g + 1)],
                        name=f"grid-control(a={a}, eps={eps})")
    return alg, list(range(-M_g, M_g + 1))


# ---------------------------------------------------------------------------
# the probe report

PROBE_HEADER = (
    "Embedding probe: heuristic search over grid-valued embeddings only; "
    "the negative claim it probes quantifies over ALL embeddings and ALL "
    "finite rings, so these numbers are evidence, not a proof.")


@dataclass(frozen=True)
class ProbeRow:
    family: str
    order: int
    a: Fraction
    eps: Fraction
    status: str                     # "scored" | "infeasible"
    add_error: Optional[Fraction]   # normalized by eps
    mul_error: Optional[Fraction]
    detail: str = ""

    def to_json_dict(self) -> dict:
        return {
            "family": self.family, "order": self.order,
            "a": str(self.a), "eps": str(self.eps), "status": self.status,
            "add_error": None if self.add_error is None else str(self.add_error),
            "mul_error": None if self.mul_error is None else str(self.mul_error),
            "detail": self.detail,
        }


@dataclass(frozen=True)
class ProbeReport:
    header: str
    rows: Tuple[ProbeRow, ...]

    def to_json_dict(self) -> dict:
        return {"header": self.header,
                "rows": [r.to_json_dict() for r in self.rows]}

    def render_text(self) -> str:
        def q(x):
            return "-" if x is None else \
                (str(x.numerator) if x.denominator == 1 else
                 f"{x.numerator}/{x.denominator}")
        rows = [[r.family, str(r.order), q(r.a), q(r.eps), r.status,
                 q(r.add_error), q(r.mul_error)] for r in self.rows]
        table = render_table(
            ["family", "order", "a", "eps", "status",
             "add_err/eps", "mul_err/eps"], rows)
        return self.header + "\n" + table


def probe_report(families: Sequence[RingSpec],
                 ladder: Sequence[Tuple[Fraction, Fraction]],
                 config_seed: int = 0,
                 include_control: bool = True) -> ProbeReport:
    rows: List[ProbeRow] = []
    for spec in families:
        ring = build_ring(spec)
        for a, eps in ladder:
            a, eps = as_fraction(a), as_fraction(eps)
            try:
                cfg = EmbeddingSearchConfig(a, eps, seed=config_seed)
                err, units_vals = best_embedding_error(ring, a, eps, cfg)
                inv = eps.denominator
                units = [int(v * inv) for v in units_vals]
                norm = score_embedding(ring, units, a, eps)
                rows.append(ProbeRow(spec.name, ring.size, a, eps, "scored",
                                     norm["add"], norm["mul"]))
            except InfeasibleGridError as exc:
                rows.append(ProbeRow(spec.name, ring.size, a, eps,
                                     "infeasible", None, None, str(exc)))
    if include_control:
        for a, eps in ladder:
            a, eps = as_fraction(a), as_fraction(eps)
            alg, units = grid_control_units(a, eps)
            norm = score_embedding(alg, units, a, eps)
            rows.append(ProbeRow("grid-control (non-ring)", alg.size, a, eps,
                                 "scored", norm["add"], norm["mul"]))
    return ProbeReport(PROBE_HEADER, tuple(rows))
