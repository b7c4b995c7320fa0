"""Resolution sweeps: evaluate a strong approximation of a formula across a
ladder of (bound, threshold) cells and a family of approximation builders.

For each cell an approximation of the real line is built, each free-variable
point is mapped to every carrier element within the cell threshold of it,
and the strong formula is evaluated at all resulting tuples.  The report
marks the coarsest cell from which all finer cells are uniformly true; the
verdicts are evidence about the tested family only, not a proof over all
approximations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .algebra import FiniteAlgebra
from .ambient import RealAmbient
from .approx import canonical_approximation, perturbed_canonical
from .decimalfp import apq_params_for, build_apq
from .evaluate import embedded_fractions, eval_finite
from .exact import as_fraction
from .formulas import Formula, approximate, check_ll, check_regular, format_formula
from .modular import build_modular, modular_params_for
from .regions import Entourage, Region, format_region, interval
from .reporting import render_table


@dataclass(frozen=True)
class LadderCell:
    """One resolution cell: carrier bound a and closeness threshold eps."""
    a: Fraction
    eps: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", as_fraction(self.a))
        object.__setattr__(self, "eps", as_fraction(self.eps))
        if self.a <= 0 or self.eps <= 0:
            raise ValueError("cell parameters must be positive")

    @property
    def region(self) -> Region:
        return interval(-self.a, self.a, closed=True)

    @property
    def entourage(self) -> Entourage:
        return Entourage(self.eps)

    def describe(self) -> str:
        from .regions import _fmt_q
        return f"a={_fmt_q(self.a)} eps={_fmt_q(self.eps)}"


@dataclass(frozen=True)
class BuilderSpec:
    name: str
    build: Callable[[LadderCell], FiniteAlgebra]


def _build_canonical(cell: LadderCell) -> FiniteAlgebra:
    return canonical_approximation(RealAmbient(), cell.region, cell.entourage,
                                   step=cell.eps / 2)


def _build_apq(cell: LadderCell) -> FiniteAlgebra:
    return build_apq(apq_params_for(cell.a, cell.eps))


def _build_modular(cell: LadderCell) -> FiniteAlgebra:
    return build_modular(modular_params_for(cell.a, cell.eps))


def _build_perturbed(seed: int) -> Callable[[LadderCell], FiniteAlgebra]:
    def build(cell: LadderCell) -> FiniteAlgebra:
        return perturbed_canonical(RealAmbient(), cell.region, cell.entourage,
                                   step=cell.eps / 2, seed=seed)
    return build


def standard_builders(names: Optional[Sequence[str]] = None,
                      seed: int = 0) -> Tuple[BuilderSpec, ...]:
    registry = {
        "canonical": _build_canonical,
        "apq": _build_apq,
        "modular": _build_modular,
        "perturbed": _build_perturbed(seed),
    }
    if names is None:
        names = ("canonical", "apq", "modular")
    out = []
    for n in names:
        if n not in registry:
            raise ValueError(f"unknown builder {n!r}; "
                             f"choose from {sorted(registry)}")
        out.append(BuilderSpec(n, registry[n]))
    return tuple(out)


@dataclass(frozen=True)
class CellOutcome:
    cell: LadderCell
    builder: str
    status: str              # "true" | "false" | "skipped"
    tuples_checked: int
    detail: str

    def to_json_dict(self) -> dict:
        return {
            "a": str(self.cell.a), "eps": str(self.cell.eps),
            "builder": self.builder, "status": self.status,
            "tuples_checked": self.tuples_checked, "detail": self.detail,
        }


@dataclass(frozen=True)
class SweepReport:
    formula_text: str
    strong_text: str
    points: Tuple[Tuple[str, Fraction], ...]
    cells: Tuple[LadderCell, ...]
    builders: Tuple[str, ...]
    outcomes: Tuple[CellOutcome, ...]
    threshold_index: Optional[int]

    @property
    def threshold(self) -> Optional[LadderCell]:
        return None if self.threshold_index is None \
            else self.cells[self.threshold_index]

    def outcome(self, cell_index: int, builder: str) -> CellOutcome:
        for o in self.outcomes:
            if o.cell == self.cells[cell_index] and o.builder == builder:
                return o
        raise KeyError((cell_index, builder))

    def to_json_dict(self) -> dict:
        return {
            "formula": self.formula_text,
            "strong": self.strong_text,
            "points": {v: str(q) for v, q in self.points},
            "builders": list(self.builders),
            "cells": [o.to_json_dict() for o in self.outcomes],
            "threshold": None if self.threshold is None
            else {"a": str(self.threshold.a), "eps": str(self.threshold.eps)},
            "note": "verdicts cover the tested builder family only",
        }

    def render_text(self) -> str:
        headers = ["cell"] + list(self.builders)
        rows = []
        for c in self.cells:
            row = [c.describe()]
            for b in self.builders:
                o = next(o for o in self.outcomes
                         if o.cell == c and o.builder == b)
                row.append(o.status if o.status != "false"
                           else f"false ({o.detail})")
            rows.append(row)
        foot = ("no uniformly-true tail cell found" if self.threshold is None
                else f"uniformly true from {self.threshold.describe()} "
                     "(empirical for the tested family)")
        return "\n".join([f"formula: {self.formula_text}",
                          f"strong:  {self.strong_text}",
                          render_table(headers, rows), foot])


def _nearby_ids(alg: FiniteAlgebra, value: Fraction, eps: Fraction) -> List[int]:
    vals = embedded_fractions(alg)
    return [i for i in range(alg.size) if abs(vals[i] - value) < eps]


def sweep(formula: Formula, c2: Sequence[Region], w2,
          points: Dict[str, Fraction], ladder: Sequence[LadderCell],
          builders: Sequence[BuilderSpec]) -> SweepReport:
    """Evaluate the strong approximation phi[c2][w2] across the ladder.

    `points` assigns an ambient rational to every free variable; in each
    cell a point stands for all carrier elements within the cell threshold.
    """
    if not ladder:
        raise ValueError("ladder must not be empty")
    for prev, nxt in zip(ladder, ladder[1:]):
        if nxt.a < prev.a or nxt.eps > prev.eps:
            raise ValueError("ladder must be ordered by refinement "
                             "(a non-decreasing, eps non-increasing)")
    if not check_regular(formula):
        raise ValueError("formula bounds are not regular")
    if not check_regular(formula, c2):
        raise ValueError("refined bounds are not regular")
    if not check_ll(formula, formula.bounds(), c2):
        raise ValueError("bounds do not refine the formula's own bounds")
    free = sorted(formula.free_vars())
    if sorted(points) != free:
        raise ValueError(f"points must cover exactly the free variables {free}")

    strong = approximate(formula.with_bounds(tuple(c2)), w2)
    outcomes: List[CellOutcome] = []
    for cell in ladder:
        for spec in builders:
            try:
                alg = spec.build(cell)
            except (ValueError, OverflowError) as exc:
                outcomes.append(CellOutcome(cell, spec.name, "skipped", 0,
                                            f"builder failed: {exc}"))
                continue
            bad_point = next((v for v in free
                              if abs(points[v]) + cell.eps > cell.a), None)
            if bad_point is not None:
                outcomes.append(CellOutcome(
                    cell, spec.name, "skipped", 0,
                    f"threshold ball around {bad_point} leaves the cell region"))
                continue
            nearby = [_nearby_ids(alg, points[v], cell.eps) for v in free]
            empty = next((v for v, ids in zip(free, nearby) if not ids), None)
            if empty is not None:
                outcomes.append(CellOutcome(
                    cell, spec.name, "skipped", 0,
                    f"no carrier element within eps of {empty}"))
                continue
            status, detail, count = "true", "", 0
            for combo in itertools.product(*nearby):
                count += 1
                res = eval_finite(strong, alg, dict(zip(free, combo)))
                if not res.value:
                    status = "false"
                    at = ", ".join(f"{v}={alg.label(i)}"
                                   for v, i in zip(free, combo))
                    detail = f"at {at}" if at else "closed formula false"
                    break
            outcomes.append(CellOutcome(cell, spec.name, status, count, detail))

    by_cell: List[List[CellOutcome]] = []
    for cell in ladder:
        by_cell.append([o for o in outcomes if o.cell == cell])
    def uniform(os: List[CellOutcome]) -> bool:
        return all(o.status != "false" for o in os) \
            and any(o.status == "true" for o in os)
    threshold_index = None
    for k in range(len(ladder)):
        if all(uniform(os) for os in by_cell[k:]):
            threshold_index = k
            break
    return SweepReport(format_formula(formula), format_formula(strong),
                       tuple(sorted(points.items())), tuple(ladder),
                       tuple(s.name for s in builders), tuple(outcomes),
                       threshold_index)
