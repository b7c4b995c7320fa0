"""Desk-scale numerical experiments.

Two reproductions: the near-singular 2x2 linear system whose truncated
solutions land far apart on the solution line of x + 2^(1/3)*y = 4^(1/3),
and the polynomial-approximation property (a continuous function close to a
polynomial stays close when both are pushed through a fine enough finite
approximation, with perturbed coefficients).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .ambient import (RealAmbient, real_with_unary, recip_shifted_ambient_op,
                      sin_ambient_op, square_ambient_op)
from .approx import canonical_approximation
from .decimalfp import DecimalFP, FPParams, fp_add, fp_div, fp_mul, fp_neg, fp_round
from .evaluate import embedded_fractions
from .exact import ExactScalar, as_fraction, cbrt_enclosure
from .regions import Entourage, interval
from .reporting import render_table

# ---------------------------------------------------------------------------
# linear system:  x + a*y = b,  a*x + b*y = 2   with a,b truncations of
# 2^(1/3), 4^(1/3); exact inputs make it uniquely solvable since a^2 != b
# for rationals, but the determinant b - a^2 is tiny, so the solution
# swings wildly with the truncation level.


def _truncate_digits(x: ExactScalar, digits: int) -> DecimalFP:
    """First `digits` significant decimal digits of x (truncation toward
    zero), via fp_round of the exact enclosure at a mantissa that long."""
    params = FPParams(P=3, Q=digits)
    return fp_round(x, params)


@dataclass(frozen=True)
class LinsysLevel:
    q: int
    a_text: str
    b_text: str
    status: str                    # "solved" | "singular"
    x: Optional[Fraction]
    y: Optional[Fraction]
    x_text: str
    y_text: str
    residual_bound: Optional[Fraction]   # certified upper bound on |x + 2^(1/3) y - 4^(1/3)|

    def to_json_dict(self) -> dict:
        return {
            "Q": self.q, "a": self.a_text, "b": self.b_text,
            "status": self.status,
            "x": None if self.x is None else str(self.x),
            "y": None if self.y is None else str(self.y),
            "x_text": self.x_text, "y_text": self.y_text,
            "residual_bound": None if self.residual_bound is None
            else str(self.residual_bound),
        }


@dataclass(frozen=True)
class LinsysReport:
    levels: Tuple[LinsysLevel, ...]
    max_norm_distance: Optional[Fraction]   # between the first two solved levels

    def to_json_dict(self) -> dict:
        return {
            "levels": [l.to_json_dict() for l in self.levels],
            "max_norm_distance": None if self.max_norm_distance is None
            else str(self.max_norm_distance),
        }

    def render_text(self) -> str:
        rows = []
        for l in self.levels:
            res = "-" if l.residual_bound is None \
                else f"{float(l.residual_bound):.3e}"
            rows.append([str(l.q), l.a_text, l.b_text, l.status,
                         l.x_text, l.y_text, res])
        table = render_table(
            ["Q", "a", "b", "status", "x", "y", "residual<="], rows)
        dist = "-" if self.max_norm_distance is None \
            else f"{float(self.max_norm_distance):.4f}"
        return table + f"\nmax-norm distance between solutions: {dist}"


def linsys_experiment(q_values: Sequence[int]) -> LinsysReport:
    """Solve the system at each truncation level Q with decimal floating
    point carrying 2Q+10 mantissa digits (so arithmetic rounding stays far
    below the input truncation error), then bound each residual in
    certified exact arithmetic."""
    if any(q < 5 for q in q_values):
        raise ValueError("need Q >= 5 at every level")
    levels: List[LinsysLevel] = []
    for q in q_values:
        guard = q + 5
        cbrt2 = cbrt_enclosure(Fraction(2), guard)
        cbrt4 = cbrt_enclosure(Fraction(4), guard)
        a_fp = _truncate_digits(cbrt2, q)
        b_fp = _truncate_digits(cbrt4, q)
        work = FPParams(P=q + 2, Q=2 * q + 10)
        a, b = fp_round(a_fp.value(), work), fp_round(b_fp.value(), work)
        two = fp_round(Fraction(2), work)
        det = fp_add(b, fp_neg(fp_mul(a, a, work)), work)
        if det.sign == 0:
            levels.append(LinsysLevel(q, a_fp.to_text(), b_fp.to_text(),
                                      "singular", None, None, "-", "-", None))
            continue
        det_x = fp_add(fp_mul(b, b, work), fp_neg(fp_mul(two, a, work)), work)
        det_y = fp_add(two, fp_neg(fp_mul(a, b, work)), work)
        x = fp_div(det_x, det, work)
        y = fp_div(det_y, det, work)
        xv, yv = x.value(), y.value()
        # certified residual of (x, y) against  x + 2^(1/3)*y = 4^(1/3)
        prec = max(30, 2 * q)
        c2 = cbrt_enclosure(Fraction(2), prec)
        c4 = cbrt_enclosure(Fraction(4), prec)
        res = ExactScalar(xv) + c2 * ExactScalar(yv) + (-c4)
        bound = res.abs_enclosure().hi
        levels.append(LinsysLevel(q, a_fp.to_text(), b_fp.to_text(), "solved",
                                  xv, yv, x.to_text(), y.to_text(), bound))
    solved = [l for l in levels if l.status == "solved"]
    dist = None
    if len(solved) >= 2:
        l1, l2 = solved[0], solved[1]
        dist = max(abs(l1.x - l2.x), abs(l1.y - l2.y))
    return LinsysReport(tuple(levels), dist)


def linsys_exact(a, b) -> Tuple[Fraction, Fraction]:
    """Exact rational solution of the same system; raises on a^2 == b."""
    a, b = as_fraction(a), as_fraction(b)
    det = b - a * a
    if det == 0:
        raise ZeroDivisionError("singular system: a^2 == b")
    return (b * b - 2 * a) / det, (2 - a * b) / det


# ---------------------------------------------------------------------------
# polynomial approximation property

BUILTIN_FUNCTIONS: Dict[str, dict] = {
    "sin": {
        "op": sin_ambient_op,
        "coefficients": (Fraction(0), Fraction(1), Fraction(0),
                         Fraction(-1, 6), Fraction(0), Fraction(1, 120)),
        "d": Fraction(1),
        "delta": Fraction(1, 5040),     # degree-7 Taylor remainder on [-1,1]
    },
    "square": {
        "op": square_ambient_op,
        "coefficients": (Fraction(0), Fraction(0), Fraction(1)),
        "d": Fraction(1),
        "delta": Fraction(1, 100),      # the polynomial is exact; any delta
    },
    "recip-shifted": {
        "op": recip_shifted_ambient_op(Fraction(3)),
        "coefficients": (Fraction(1, 3), Fraction(-1, 9), Fraction(1, 27),
                         Fraction(-1, 81), Fraction(1, 243)),
        "d": Fraction(1),
        "delta": Fraction(1, 486),      # geometric tail: (1/3)(1/3)^5/(1-1/3)
    },
}

DEFAULT_POLY_LADDERS: Dict[str, Tuple[Tuple[Fraction, Fraction], ...]] = {
    "sin": ((Fraction(3, 2), Fraction(1, 512)),
            (Fraction(3, 2), Fraction(1, 8192)),
            (Fraction(3, 2), Fraction(1, 65536))),
    "square": ((Fraction(2), Fraction(1, 64)),
               (Fraction(2), Fraction(1, 256)),
               (Fraction(2), Fraction(1, 2048))),
    "recip-shifted": ((Fraction(3, 2), Fraction(1, 128)),
                      (Fraction(3, 2), Fraction(1, 2048)),
                      (Fraction(3, 2), Fraction(1, 16384))),
}


@dataclass(frozen=True)
class PolyCellResult:
    a: Fraction
    eps: Fraction
    status: str                    # "pass" | "fail" | "skipped"
    samples_checked: int
    worst_error: Optional[Fraction]
    detail: str

    def to_json_dict(self) -> dict:
        return {"a": str(self.a), "eps": str(self.eps), "status": self.status,
                "samples_checked": self.samples_checked,
                "worst_error": None if self.worst_error is None
                else str(self.worst_error),
                "detail": self.detail}


@dataclass(frozen=True)
class PolyReport:
    g_name: str
    coefficients: Tuple[Fraction, ...]
    d: Fraction
    d_prime: Fraction
    delta: Fraction
    delta_prime: Fraction
    cells: Tuple[PolyCellResult, ...]
    threshold: Optional[Tuple[Fraction, Fraction]]   # empirical (a0, eps0)
    confirm: Tuple[PolyCellResult, ...]   # finer cells re-run at radius eps0

    def to_json_dict(self) -> dict:
        return {
            "g": self.g_name,
            "coefficients": [str(c) for c in self.coefficients],
            "d": str(self.d), "d_prime": str(self.d_prime),
            "delta": str(self.delta), "delta_prime": str(self.delta_prime),
            "cells": [c.to_json_dict() for c in self.cells],
            "threshold": None if self.threshold is None
            else {"a0": str(self.threshold[0]), "eps0": str(self.threshold[1])},
            "confirm": [c.to_json_dict() for c in self.confirm],
            "note": "empirical over sampled points and the tested ladder",
        }

    def render_text(self) -> str:
        def row(c: PolyCellResult) -> List[str]:
            w = "-" if c.worst_error is None else f"{float(c.worst_error):.3e}"
            return [f"a={c.a} eps={c.eps}", c.status,
                    str(c.samples_checked), w, c.detail]
        head = ["cell", "status", "samples", "worst_error", "detail"]
        parts = [f"g={self.g_name} degree={len(self.coefficients) - 1} "
                 f"delta={self.delta} delta'={self.delta_prime} "
                 f"d={self.d} d'={self.d_prime}",
                 render_table(head, [row(c) for c in self.cells])]
        if self.threshold is None:
            parts.append("no passing tail found on this ladder")
        else:
            a0, e0 = self.threshold
            parts.append(f"empirical threshold: a0={a0} eps0={e0}")
            if self.confirm:
                parts.append("finer cells re-checked at perturbation "
                             f"radius eps0={e0}:")
                parts.append(render_table(head, [row(c) for c in self.confirm]))
        return "\n".join(parts)


def _poly_cell(ambient: RealAmbient, coeffs: Sequence[Fraction],
               a: Fraction, eps: Fraction, d_prime: Fraction,
               delta_prime: Fraction, radius: Fraction,
               samples: int, rng: random.Random) -> PolyCellResult:
    alg = canonical_approximation(
        ambient, interval(-a, a, closed=True), Entourage(eps), step=eps / 2)
    vals = embedded_fractions(alg)
    step = vals[1] - vals[0]
    lo = vals[0]

    def nearest_id(q: Fraction) -> int:
        k = int((q - lo) / step + Fraction(1, 2))
        return max(0, min(alg.size - 1, k))

    def ids_within(q: Fraction, r: Fraction) -> Tuple[int, int]:
        # index range with |value - q| < r; may come back empty (lo > hi)
        lo_id = nearest_id(q - r)
        hi_id = nearest_id(q + r)
        while lo_id < alg.size and vals[lo_id] <= q - r:
            lo_id += 1
        while hi_id >= 0 and vals[hi_id] >= q + r:
            hi_id -= 1
        return lo_id, hi_id

    add_op, mul_op, g_op = alg.op("add"), alg.op("mul"), alg.op("g")

    def horner(beta_ids: Sequence[int], xi: int) -> int:
        acc = beta_ids[-1]
        for b in reversed(beta_ids[:-1]):
            acc = add_op(mul_op(acc, xi), b)
        return acc

    # sampled xi across [-d', d'], endpoints and zero always included
    points = [-d_prime, Fraction(0), d_prime]
    for _ in range(samples):
        num = rng.randint(-1000, 1000)
        points.append(d_prime * num / 1000)
    xi_ids = sorted({nearest_id(q) for q in points})

    # coefficient tuples: all-nearest plus seeded draws within the radius
    tuples: List[List[int]] = [[nearest_id(c) for c in coeffs]]
    for _ in range(samples):
        tup = []
        for c in coeffs:
            lo_id, hi_id = ids_within(c, radius)
            if lo_id > hi_id:
                return PolyCellResult(a, eps, "skipped", 0, None,
                                      f"no carrier element within {radius} "
                                      f"of coefficient {c}")
            tup.append(rng.randint(lo_id, hi_id))
        tuples.append(tup)

    worst = Fraction(0)
    checked = 0
    for xi in xi_ids:
        g_val = vals[g_op(xi)]
        for tup in tuples:
            checked += 1
            p_val = vals[horner(tup, xi)]
            err = abs(g_val - p_val)
            if err > worst:
                worst = err
            if err >= delta_prime:
                detail = (f"xi={alg.label(xi)} err={float(err):.3e} "
                          f">= delta'={float(delta_prime):.3e}")
                return PolyCellResult(a, eps, "fail", checked, err, detail)
    return PolyCellResult(a, eps, "pass", checked, worst, "")


def poly_experiment(g_name: str,
                    coefficients: Optional[Sequence[Fraction]] = None,
                    d=None, d_prime=None, delta=None, delta_prime=None,
                    ladder: Optional[Sequence[Tuple[Fraction, Fraction]]] = None,
                    samples: int = 12, seed: int = 0) -> PolyReport:
    """Descending sweep for the polynomial-approximation property.

    For each ladder cell, builds the canonical approximation extended with
    the oracle for g, perturbs the coefficient tuple within the cell
    threshold, and checks |g_f(xi) - horner_f(beta, xi)| < delta' on
    sampled xi with |j(xi)| <= d'.  After the coarsest uniformly-passing
    cell (a0, eps0) is found, finer cells are re-checked with the
    perturbation radius held at eps0.
    """
    if g_name not in BUILTIN_FUNCTIONS:
        raise ValueError(f"unknown function {g_name!r}; "
                         f"built-ins: {sorted(BUILTIN_FUNCTIONS)}")
    spec = BUILTIN_FUNCTIONS[g_name]
    coeffs = tuple(as_fraction(c) for c in (coefficients
                                            or spec["coefficients"]))
    d = as_fraction(d if d is not None else spec["d"])
    delta = as_fraction(delta if delta is not None else spec["delta"])
    d_prime = as_fraction(d_prime if d_prime is not None
                          else Fraction(9, 10) * d)
    delta_prime = as_fraction(delta_prime if delta_prime is not None
                              else 2 * delta)
    if not 0 < d_prime < d:
        raise ValueError("need 0 < d' < d")
    if not delta_prime > delta:
        raise ValueError("need delta' > delta")
    cells = [(as_fraction(a), as_fraction(e))
             for a, e in (ladder or DEFAULT_POLY_LADDERS[g_name])]
    for (a, e) in cells:
        if a <= d:
            raise ValueError(f"cell bound a={a} must exceed d={d}")

    ambient = real_with_unary("g", spec["op"])

    results: List[PolyCellResult] = []
    for a, e in cells:
        rng = random.Random(f"{seed}|{a}|{e}")
        results.append(_poly_cell(ambient, coeffs, a, e, d_prime,
                                  delta_prime, radius=e, samples=samples,
                                  rng=rng))
    threshold = None
    t_index = None
    for k in range(len(results)):
        if all(r.status == "pass" for r in results[k:]):
            threshold = cells[k]
            t_index = k
            break
    confirm: List[PolyCellResult] = []
    if threshold is not None:
        eps0 = threshold[1]
        for a, e in cells[t_index + 1:]:
            rng = random.Random(f"{seed}|confirm|{a}|{e}")
            confirm.append(_poly_cell(ambient, coeffs, a, e, d_prime,
                                      delta_prime, radius=eps0,
                                      samples=samples, rng=rng))
    return PolyReport(g_name, coeffs, d, d_prime, delta, delta_prime,
                      tuple(results), threshold, tuple(confirm))
