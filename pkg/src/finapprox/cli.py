"""Command-line front end.

Subcommands: check, laws, eval, sweep, probe, repro linsys, repro poly,
export.  Every command is deterministic given its flags and --seed, and
identical invocations produce byte-identical output.  Exit codes: 0 when
the checked property holds, 1 when it is refuted (a witness is printed),
2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import itertools
import re
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .algebra import AlgebraFormatError, FiniteAlgebra
from .ambient import RealAmbient
from .approx import (canonical_approximation, check_approximation,
                     perturbed_canonical)
from .decimalfp import FPParams, build_apq, cancellation_witness
from .evaluate import eval_finite, nearest_carrier_id
from .experiments import (BUILTIN_FUNCTIONS, linsys_experiment,
                          poly_experiment)
from .formulas import (ParseError, format_formula, parse_formula,
                       parse_region)
from .laws import law_search, parse_law_name
from .modular import ModularParams, build_modular
from .padic_systems import (HmnParams, build_hmn, build_kn,
                            hmn_assoc_witness, hmn_distrib_witness)
from .regions import Entourage, PadicBall, interval
from .reporting import json_text, render_table
from .rings import (EmbeddingSearchConfig, RingSpec, gf, probe_report,
                    product_ring, ut2, zn)
from .sweeps import LadderCell, standard_builders, sweep


class UsageError(Exception):
    """Bad flag combination; reported on stderr with exit code 2."""


# argparse treats any dash-prefixed token as an option unless it looks
# like a negative number; widen that test so values like "-2,2" or
# "-1/8" pass through to flags such as --interval.
class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._negative_number_matcher = re.compile(r"^-\d[\d,./]*$")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad rational {text!r}: {exc}") from None


def _fraction_list(text: str) -> List[Fraction]:
    return [_fraction(part) for part in text.split(",") if part.strip()]


def _assignment(text: str) -> Dict[str, Fraction]:
    out: Dict[str, Fraction] = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise UsageError(f"bad assignment item {item!r}; expected VAR=VALUE")
        out[name.strip()] = _fraction(value)
    if not out:
        raise UsageError("empty assignment")
    return out


def _ladder_cells(text: str) -> List[LadderCell]:
    cells = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        pieces = part.split(",")
        if len(pieces) != 2:
            raise UsageError(f"bad ladder cell {part!r}; expected A,EPS")
        cells.append(LadderCell(_fraction(pieces[0]), _fraction(pieces[1])))
    if not cells:
        raise UsageError("empty ladder")
    return cells


def _pairs_ladder(text: str) -> List[tuple]:
    return [(c.a, c.eps) for c in _ladder_cells(text)]


# ---------------------------------------------------------------------------
# builders

BUILDER_NAMES = ("kn", "hmn", "apq", "modular", "canonical", "perturbed")


def _require(args, names: Sequence[str], builder: str):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        flags = ", ".join("--" + n for n in missing)
        raise UsageError(f"builder {builder!r} needs {flags}")


def make_algebra(args) -> FiniteAlgebra:
    if getattr(args, "file", None):
        return FiniteAlgebra.load(args.file)
    b = getattr(args, "builder", None)
    if b is None:
        raise UsageError("need --builder or --file")
    if b == "kn":
        _require(args, ("p", "n"), b)
        return build_kn(args.p, args.n)
    if b == "hmn":
        _require(args, ("p", "m", "n"), b)
        return build_hmn(HmnParams(args.p, args.m, args.n))
    if b == "apq":
        _require(args, ("P", "Q"), b)
        return build_apq(FPParams(args.P, args.Q))
    if b == "modular":
        _require(args, ("M", "eps"), b)
        return build_modular(ModularParams(args.M, _fraction(args.eps)))
    if b in ("canonical", "perturbed"):
        _require(args, ("a", "eps"), b)
        a = _fraction(args.a)
        eps = _fraction(args.eps)
        step = _fraction(args.step) if args.step else eps / 2
        region = interval(-a, a, closed=True)
        if b == "canonical":
            return canonical_approximation(RealAmbient(), region,
                                           Entourage(eps), step)
        return perturbed_canonical(RealAmbient(), region, Entourage(eps),
                                   step, seed=args.seed)
    raise UsageError(f"unknown builder {b!r}; choose from {BUILDER_NAMES}")


def _region_from_flags(args, alg: FiniteAlgebra):
    given = [f for f in ("region", "interval", "ball")
             if getattr(args, f, None) is not None]
    if len(given) != 1:
        raise UsageError("need exactly one of --region, --interval, --ball")
    if args.region is not None:
        return parse_region(args.region)
    if args.interval is not None:
        ends = _fraction_list(args.interval)
        if len(ends) != 2:
            raise UsageError("--interval expects LO,HI")
        return interval(ends[0], ends[1], closed=not args.open)
    if alg.ambient_kind != "padic":
        raise UsageError("--ball applies to p-adic algebras only")
    return PadicBall(alg.p, args.ball)


def _add_builder_flags(sp):
    sp.add_argument("--builder", choices=BUILDER_NAMES)
    sp.add_argument("--file", help="algebra JSON file")
    sp.add_argument("--p", type=int, help="prime (kn, hmn)")
    sp.add_argument("--n", type=int, help="precision exponent (kn, hmn)")
    sp.add_argument("--m", type=int, help="range exponent (hmn)")
    sp.add_argument("--P", type=int, help="exponent range (apq)")
    sp.add_argument("--Q", type=int, help="mantissa digits (apq)")
    sp.add_argument("--M", type=int, help="grid radius in steps (modular)")
    sp.add_argument("--eps", help="grid step / threshold (modular, canonical)")
    sp.add_argument("--a", help="carrier bound (canonical, perturbed)")
    sp.add_argument("--step", help="grid step override (canonical, perturbed)")


# ---------------------------------------------------------------------------
# subcommands

def cmd_check(args) -> int:
    alg = make_algebra(args)
    if args.eps is None:
        raise UsageError("check needs --eps")
    region = _region_from_flags(args, alg)
    rep = check_approximation(alg, region, Entourage(_fraction(args.eps)),
                              max_violations=args.max_violations)
    if args.format == "json":
        sys.stdout.write(json_text(rep.to_json_dict()))
    else:
        lines = [f"algebra: {alg.name or '(unnamed)'} (size {alg.size})",
                 f"region: {rep.region}   eps: {rep.eps}"]
        if rep.grid_ok:
            lines.append("grid: ok")
        else:
            lines.append(f"grid: FAILED at {rep.grid_witness}")
        if rep.hom_ok:
            lines.append(f"homomorphism: ok ({rep.checked_tuples} tuples)")
        else:
            lines.append(f"homomorphism: {rep.hom_violation_count} violations "
                         f"({rep.checked_tuples} tuples)")
            rows = [[v.symbol, ", ".join(v.labels), v.exact, v.got, v.error]
                    for v in rep.hom_violations]
            lines.append(render_table(
                ["symbol", "arguments", "exact", "table", "error"], rows))
        lines.append(f"result: {'verified' if rep.ok else 'refuted'}")
        sys.stdout.write("\n".join(lines) + "\n")
    return 0 if rep.ok else 1


_KNOWN_WITNESSES = {
    ("apq", "cancel-add"): "cancellation",
    ("hmn", "assoc-mul"): "associativity",
    ("hmn", "distrib"): "distributivity",
}


def _reference_witness(args) -> Optional[dict]:
    kind = _KNOWN_WITNESSES.get((args.builder, args.law))
    if kind == "cancellation":
        w = cancellation_witness(FPParams(args.P, args.Q))
        a, bt, g = w.alpha.to_text(), w.beta.to_text(), w.gamma.to_text()
        return {"law": "cancel(add)",
                "text": f"{a} + {bt} and {a} + {g} both evaluate to "
                        f"{w.sum_ab.to_text()}, yet {bt} != {g}",
                "values": {"alpha": a, "beta": bt, "gamma": g,
                           "sum": w.sum_ab.to_text()}}
    if kind in ("associativity", "distributivity"):
        params = HmnParams(args.p, args.m, args.n)
        w = (hmn_assoc_witness(params) if kind == "associativity"
             else hmn_distrib_witness(params))
        trip = ", ".join(str(d.to_fraction()) for d in w.triple)
        return {"law": w.law,
                "text": f"({trip}) gives {w.lhs.to_fraction()} one way and "
                        f"{w.rhs.to_fraction()} the other",
                "values": {"triple": [str(d.to_fraction()) for d in w.triple],
                           "lhs": str(w.lhs.to_fraction()),
                           "rhs": str(w.rhs.to_fraction())}}
    return None


def cmd_laws(args) -> int:
    alg = make_algebra(args)
    law = parse_law_name(args.law)
    restrict = parse_region(args.restrict) if args.restrict else None
    violation = law_search(alg, law, restrict)
    reference = _reference_witness(args) if violation is not None else None
    if args.format == "json":
        doc = {"algebra": alg.name or "(unnamed)", "law": args.law,
               "holds": violation is None,
               "violation": None if violation is None
               else violation.to_json_dict(),
               "reference_witness": reference}
        sys.stdout.write(json_text(doc))
    else:
        lines = [f"algebra: {alg.name or '(unnamed)'} (size {alg.size})"]
        if violation is None:
            scope = "restricted carrier" if restrict else f"{alg.size} elements"
            lines.append(f"law {args.law}: holds (exhaustive over {scope})")
        else:
            lines.append(f"law {args.law}: fails")
            outcome = (f"both sides give {violation.lhs}"
                       if violation.lhs == violation.rhs
                       else f"{violation.lhs} != {violation.rhs}")
            lines.append(f"  at ({', '.join(violation.labels)}): {outcome}"
                         + (f" ({violation.detail})" if violation.detail else ""))
            if reference:
                lines.append(f"  reference witness: {reference['text']}")
        sys.stdout.write("\n".join(lines) + "\n")
    return 0 if violation is None else 1


def _load_formula(args):
    sources = [s for s in (args.formula, args.formula_file) if s]
    if len(sources) != 1:
        raise UsageError("need exactly one of --formula, --formula-file")
    if args.formula_file:
        with open(args.formula_file) as fh:
            text = fh.read().strip()
    else:
        text = args.formula
    return parse_formula(text, normalize=args.normalize)


def _grid_values(spec: str) -> Dict[str, List[Fraction]]:
    """Parse --table specs like x=-2:2:1/4,y=0:1:1/2 into value lists."""
    out: Dict[str, List[Fraction]] = {}
    for item in spec.split(","):
        item = item.strip()
        if not item:
            continue
        name, sep, rng = item.partition("=")
        pieces = rng.split(":")
        if not sep or len(pieces) != 3:
            raise UsageError(f"bad table item {item!r}; "
                             "expected VAR=LO:HI:STEP")
        lo, hi, step = (_fraction(p) for p in pieces)
        if step <= 0 or hi < lo:
            raise UsageError(f"bad table range in {item!r}")
        vals = []
        v = lo
        while v <= hi:
            vals.append(v)
            v += step
        out[name.strip()] = vals
    if not out:
        raise UsageError("empty table spec")
    return out


def cmd_eval(args) -> int:
    formula = _load_formula(args)
    alg = make_algebra(args)
    free = formula.free_vars()
    if args.table:
        grids = _grid_values(args.table)
        if set(grids) != set(free):
            raise UsageError(f"table variables {sorted(grids)} must match "
                             f"free variables {sorted(free)}")
        names = list(grids)
        rows = []
        all_true = True
        for combo in itertools.product(*(grids[n] for n in names)):
            assignment = {n: nearest_carrier_id(alg, v)
                          for n, v in zip(names, combo)}
            res = eval_finite(formula, alg, assignment, trace_depth=0)
            all_true = all_true and res.value
            rows.append([*(str(v) for v in combo),
                         *(alg.label(assignment[n]) for n in names),
                         "true" if res.value else "false"])
        headers = [*names, *(f"{n} (carrier)" for n in names), "verdict"]
        if args.format == "json":
            doc = {"formula": format_formula(formula),
                   "algebra": alg.name or "(unnamed)",
                   "columns": headers,
                   "rows": rows, "all_true": all_true}
            sys.stdout.write(json_text(doc))
        else:
            sys.stdout.write(f"formula: {format_formula(formula)}\n"
                             + render_table(headers, rows) + "\n")
        return 0 if all_true else 1
    assignment = {}
    if args.assign:
        values = _assignment(args.assign)
        extra = sorted(set(values) - set(free))
        if extra:
            raise UsageError(f"assigned variables {extra} are not free "
                             f"in the formula")
        assignment = {n: nearest_carrier_id(alg, v)
                      for n, v in values.items()}
    res = eval_finite(formula, alg, assignment,
                      trace_depth=args.trace_depth)
    if args.format == "json":
        sys.stdout.write(json_text(res.to_json_dict()))
    else:
        lines = [f"formula: {res.formula_text}",
                 f"algebra: {alg.name or '(unnamed)'} (size {alg.size})"]
        for name in free:
            lines.append(f"  {name} := {alg.label(assignment[name])}")
        lines.append(f"value: {'true' if res.value else 'false'}")
        lines.append(f"instances checked: {res.instances_checked}")
        if res.exact_equality_used:
            lines.append("note: atom-level exact equality on carrier ids")
        if res.trace is not None:
            lines.append("trace:")
            lines.extend(res.trace.lines(indent=2))
        sys.stdout.write("\n".join(lines) + "\n")
    return 0 if res.value else 1


def cmd_sweep(args) -> int:
    formula = _load_formula(args)
    refine = [parse_region(part) for part in args.refine.split(";") if part.strip()]
    points = _assignment(args.points) if args.points else {}
    ladder = _ladder_cells(args.ladder)
    names = [n.strip() for n in args.builders.split(",") if n.strip()]
    builders = standard_builders(names, seed=args.seed)
    report = sweep(formula, refine, _fraction(args.wprime), points, ladder,
                   builders)
    if args.format == "json":
        sys.stdout.write(json_text(report.to_json_dict()))
    else:
        sys.stdout.write(report.render_text() + "\n")
    return 0 if report.threshold_index is not None else 1


_RING_SPEC_RE = re.compile(r"^(zn|gf|ut2|product)((?::\d+)+)$")


def _ring_specs(text: str) -> List[RingSpec]:
    specs = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        m = _RING_SPEC_RE.match(item)
        if not m:
            raise UsageError(f"bad ring spec {item!r}; examples: zn:9, "
                             "gf:2:2, ut2:3, product:2:3")
        kind = m.group(1)
        nums = [int(x) for x in m.group(2)[1:].split(":")]
        if kind == "zn" and len(nums) == 1:
            specs.append(zn(nums[0]))
        elif kind == "gf" and len(nums) == 2:
            specs.append(gf(nums[0], nums[1]))
        elif kind == "ut2" and len(nums) == 1:
            specs.append(ut2(nums[0]))
        elif kind == "product" and len(nums) >= 2:
            specs.append(product_ring(*(zn(n) for n in nums)))
        else:
            raise UsageError(f"bad parameters in ring spec {item!r}")
    if not specs:
        raise UsageError("empty ring list")
    return specs


def cmd_probe(args) -> int:
    specs = _ring_specs(args.families)
    ladder = _pairs_ladder(args.ladder)
    report = probe_report(specs, ladder, config_seed=args.seed,
                          include_control=not args.no_control)
    if args.format == "json":
        sys.stdout.write(json_text(report.to_json_dict()))
    else:
        sys.stdout.write(report.render_text() + "\n")
    return 0


def cmd_repro_linsys(args) -> int:
    q_values = [int(q) for q in args.q.split(",") if q.strip()]
    report = linsys_experiment(q_values)
    failures = []
    for level in report.levels:
        if level.status != "solved":
            failures.append(f"Q={level.q}: {level.status}")
        elif level.residual_bound > Fraction(10) ** (1 - level.q):
            failures.append(f"Q={level.q}: residual bound "
                            f"{float(level.residual_bound):.3e} exceeds "
                            f"10^{1 - level.q}")
    if len(q_values) >= 2:
        if report.max_norm_distance is None or report.max_norm_distance <= 1:
            failures.append("solutions do not differ by more than 1 in max-norm")
    if args.format == "json":
        doc = report.to_json_dict()
        doc["property_holds"] = not failures
        doc["failures"] = failures
        sys.stdout.write(json_text(doc))
    else:
        sys.stdout.write(report.render_text() + "\n")
        if failures:
            for f in failures:
                sys.stdout.write(f"FAIL {f}\n")
        else:
            sys.stdout.write("property: residuals within 10^(1-Q) and "
                             "solutions far apart\n")
    return 0 if not failures else 1


def cmd_repro_poly(args) -> int:
    coeffs = _fraction_list(args.coeffs) if args.coeffs else None
    ladder = _pairs_ladder(args.ladder) if args.ladder else None
    report = poly_experiment(
        args.g, coefficients=coeffs,
        d=_fraction(args.d) if args.d else None,
        d_prime=_fraction(args.dprime) if args.dprime else None,
        delta=_fraction(args.delta) if args.delta else None,
        delta_prime=_fraction(args.deltaprime) if args.deltaprime else None,
        ladder=ladder, samples=args.samples, seed=args.seed)
    if args.format == "json":
        sys.stdout.write(json_text(report.to_json_dict()))
    else:
        sys.stdout.write(report.render_text() + "\n")
    ok = (report.threshold is not None
          and all(c.status == "pass" for c in report.confirm))
    return 0 if ok else 1


def cmd_export(args) -> int:
    if args.formula is not None:
        if getattr(args, "builder", None) or getattr(args, "file", None):
            raise UsageError("export takes either a formula or an algebra, "
                             "not both")
        canonical = format_formula(parse_formula(args.formula,
                                                 normalize=args.normalize))
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(canonical + "\n")
        else:
            sys.stdout.write(canonical + "\n")
        return 0
    alg = make_algebra(args)
    if not args.out:
        raise UsageError("algebra export needs --out PATH")
    alg.save(args.out)
    sys.stdout.write(f"wrote {args.out} "
                     f"(size {alg.size}, {len(alg.signature.names())} ops)\n")
    return 0


# ---------------------------------------------------------------------------
# parser assembly

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "table"),
                        default="table")
    common.add_argument("--seed", type=int, default=0)

    parser = _Parser(prog="finapprox", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p_check = sub.add_parser("check", parents=[common],
                             help="verify the grid and homomorphism "
                                  "properties of a finite approximation")
    _add_builder_flags(p_check)
    p_check.add_argument("--region", help="region text, e.g. '[-2,2]' or "
                                          "'pball(2,0)'")
    p_check.add_argument("--interval", help="LO,HI closed interval")
    p_check.add_argument("--open", action="store_true",
                         help="make --interval open")
    p_check.add_argument("--ball", type=int,
                         help="p-adic ball exponent (uses the algebra's p)")
    p_check.add_argument("--max-violations", type=int, default=20)
    p_check.set_defaults(func=cmd_check)

    p_laws = sub.add_parser("laws", parents=[common],
                            help="exhaustive law search on a finite algebra")
    _add_builder_flags(p_laws)
    p_laws.add_argument("--law", required=True,
                        help="assoc-SYM, comm-SYM, cancel-SYM, distrib")
    p_laws.add_argument("--restrict", help="limit the search to a region")
    p_laws.set_defaults(func=cmd_laws)

    p_eval = sub.add_parser("eval", parents=[common],
                            help="evaluate a positive bounded formula")
    _add_builder_flags(p_eval)
    p_eval.add_argument("--formula")
    p_eval.add_argument("--formula-file")
    p_eval.add_argument("--normalize", action="store_true",
                        help="distribute nested conjunctions into "
                             "disjunctive normal form")
    p_eval.add_argument("--assign", help="free-variable values, VAR=Q,...")
    p_eval.add_argument("--table",
                        help="evaluate on a grid: VAR=LO:HI:STEP,...")
    p_eval.add_argument("--trace-depth", type=int, default=8)
    p_eval.set_defaults(func=cmd_eval)

    p_sweep = sub.add_parser("sweep", parents=[common],
                             help="strong-approximation verdicts across "
                                  "a refinement ladder")
    p_sweep.add_argument("--formula")
    p_sweep.add_argument("--formula-file")
    p_sweep.add_argument("--normalize", action="store_true")
    p_sweep.add_argument("--refine", required=True,
                         help="replacement bound regions, ';' separated, "
                              "one per quantifier")
    p_sweep.add_argument("--wprime", required=True,
                         help="closeness threshold of the strong form")
    p_sweep.add_argument("--points", help="free-variable values, VAR=Q,...")
    p_sweep.add_argument("--ladder", required=True,
                         help="cells A,EPS;A,EPS;... coarse to fine")
    p_sweep.add_argument("--builders", default="canonical,apq,modular")
    p_sweep.set_defaults(func=cmd_sweep)

    p_probe = sub.add_parser("probe", parents=[common],
                             help="score grid-valued embeddings of small "
                                  "rings against the approximation bound")
    p_probe.add_argument("--families", default="zn:9,zn:17,zn:33")
    p_probe.add_argument("--ladder", default="2,1/2;2,1/4;2,1/8")
    p_probe.add_argument("--no-control", action="store_true")
    p_probe.set_defaults(func=cmd_probe)

    p_repro = sub.add_parser("repro", help="reproduce the desk experiments")
    sub_repro = p_repro.add_subparsers(dest="experiment", required=True,
                                       parser_class=_Parser)
    p_lin = sub_repro.add_parser("linsys", parents=[common])
    p_lin.add_argument("--q", default="5,10",
                       help="truncation levels, comma separated")
    p_lin.set_defaults(func=cmd_repro_linsys)
    p_poly = sub_repro.add_parser("poly", parents=[common])
    p_poly.add_argument("--g", default="sin",
                        choices=sorted(BUILTIN_FUNCTIONS))
    p_poly.add_argument("--coeffs", help="polynomial coefficients, low "
                                         "degree first, comma separated")
    p_poly.add_argument("--d", help="approximation interval bound")
    p_poly.add_argument("--dprime", help="evaluation bound, 0 < d' < d")
    p_poly.add_argument("--delta", help="approximation accuracy")
    p_poly.add_argument("--deltaprime", help="target accuracy, > delta")
    p_poly.add_argument("--ladder", help="cells A,EPS;... coarse to fine")
    p_poly.add_argument("--samples", type=int, default=12)
    p_poly.set_defaults(func=cmd_repro_poly)

    p_export = sub.add_parser("export", parents=[common],
                              help="write an algebra JSON file or a "
                                   "canonicalized formula")
    _add_builder_flags(p_export)
    p_export.add_argument("--formula")
    p_export.add_argument("--normalize", action="store_true")
    p_export.add_argument("--out")
    p_export.set_defaults(func=cmd_export)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (UsageError, AlgebraFormatError, OSError, ValueError,
            ZeroDivisionError, OverflowError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
