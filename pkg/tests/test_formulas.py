"""Positive bounded formulas: grammar, regularity, refinement, widening.

random_formula below is the reference AST generator for round-trip checks;
it builds trees straight from the node constructors, never from text, so a
formatter/parser disagreement cannot hide.
"""

import random
from fractions import Fraction

import pytest

from finapprox.algebra import RING_SIGNATURE, Signature
from finapprox.formulas import (Close, Eq, Formula, ParseError, Quant,
                                approximate, atom_signature_ok, check_ll,
                                check_regular, desugar_order,
                                eval_term_exact, format_formula,
                                format_region, parse_formula, parse_region,
                                t_add, t_const, t_mul, t_var, widen,
                                EXISTS, FORALL)
from finapprox.regions import Entourage, Interval, PadicBall, RegionUnion


VAR_POOL = ("x", "y", "z", "u", "v", "w")


def random_term(rng: random.Random, names, depth: int):
    if depth <= 0 or rng.random() < 0.35:
        if names and rng.random() < 0.6:
            return t_var(rng.choice(names))
        return t_const(Fraction(rng.randint(-8, 8), rng.randint(1, 8)))
    op = t_add if rng.random() < 0.5 else t_mul
    return op(random_term(rng, names, depth - 1),
              random_term(rng, names, depth - 1))


def random_interval(rng: random.Random) -> Interval:
    lo = Fraction(rng.randint(-16, 15), rng.choice((1, 2, 4)))
    width = Fraction(rng.randint(1, 16), rng.choice((1, 2, 4)))
    return Interval(lo, lo + width, closed=rng.random() < 0.5)


def random_region(rng: random.Random):
    if rng.random() < 0.25:
        a, b = random_interval(rng), random_interval(rng)
        return RegionUnion((a, b))
    return random_interval(rng)


def random_formula(rng: random.Random) -> Formula:
    n_q = rng.randint(0, 3)
    names = list(rng.sample(VAR_POOL, n_q))
    padic = rng.random() < 0.2
    prefix = []
    for name in names:
        kind = FORALL if rng.random() < 0.5 else EXISTS
        region = PadicBall(rng.choice((2, 3)), rng.randint(-2, 2)) \
            if padic else random_region(rng)
        prefix.append(Quant(kind, name, region))
    pool = names + (["t"] if rng.random() < 0.3 else [])
    matrix = []
    for _ in range(rng.randint(1, 3)):
        conj = []
        for _ in range(rng.randint(1, 3)):
            t1 = random_term(rng, pool, 2)
            t2 = random_term(rng, pool, 2)
            if rng.random() < 0.4:
                eps = Fraction(1, rng.choice((2, 3, 4, 8, 16)))
                conj.append(Close(t1, t2, eps))
            else:
                conj.append(Eq(t1, t2))
        matrix.append(tuple(conj))
    return Formula(tuple(prefix), tuple(matrix))


class TestRoundTrip:
    def test_300_random_formulas(self):
        rng = random.Random("formula-round-trip")
        for _ in range(300):
            f = random_formula(rng)
            text = format_formula(f)
            back = parse_formula(text)
            assert back == f, text
            assert format_formula(back) == text

    def test_known_forms(self):
        for text in (
            "forall x in (-7/4, -4/7) | (4/7, 7/4) exists y in [-7/4, -4/7] | [4/7, 7/4] : x*y = 1",
            "forall x in pball(2, 0) : close(x*x, x, 1/4)",
            ": x = x",
            "exists z in [-2, 2] : x + z*z = y",
        ):
            assert format_formula(parse_formula(text)) == text

    def test_region_round_trip(self):
        rng = random.Random("region-round-trip")
        for _ in range(200):
            r = random_region(rng)
            assert parse_region(format_region(r)) == r


GRAMMAR_ERRORS = [
    ("forall x in (2, 1): x = x", 12, "empty interval"),
    ("E z : z = z", 0, "expected ':'"),
    ("forall x in [-1, 1]: x + ", 25, "expected a term"),
    ("forall x in [-1, 1] x = x", 20, "expected ':'"),
    ("forall x in [-1, 1]: forall y in [0,1]: x = y", 21, "expected a term"),
    ("forall x in [-1, 1]: close(x, x)", 31, "expected ','"),
    ("forall x in (pball(2, 0) | (0, 1)): x = x", 13, "expected a number"),
    ("forall x in pball(2, 0) | (0, 1): x = x", 32,
     "p-adic balls cannot be combined"),
    ("forall x in [-1, 1]: close(x, x, 0)", 21,
     "closeness threshold must be positive"),
    ("forall x in [-1,1]: x - 1 = x", 22,
     "subtraction is not part of the term language"),
    ("forall x in [0, 1]: x = x and (x = 1 or x*x = x)", 20,
     "disjunctive normal form"),
]


class TestGrammarErrors:
    @pytest.mark.parametrize("text,pos,fragment", GRAMMAR_ERRORS)
    def test_position_and_message(self, text, pos, fragment):
        with pytest.raises(ParseError) as exc:
            parse_formula(text)
        assert exc.value.pos == pos
        assert fragment in str(exc.value)

    def test_caret_points_at_column(self):
        with pytest.raises(ParseError) as exc:
            parse_formula("forall x in (2, 1): x = x")
        lines = str(exc.value).splitlines()
        # the quoted source line is indented by two spaces
        assert lines[-2] == "  forall x in (2, 1): x = x"
        assert lines[-1].index("^") == exc.value.pos + 2


class TestNormalize:
    def test_distributes_and_over_or(self):
        text = "forall x in [0, 1]: x = x and (x = 1 or x*x = x)"
        f = parse_formula(text, normalize=True)
        assert format_formula(f) == \
            "forall x in [0, 1] : x = x and x = 1 or x = x and x*x = x"
        assert [len(c) for c in f.matrix] == [2, 2]

    def test_product_of_disjunctions(self):
        text = "forall x in [0, 1]: (x = 1 or x*x = x) and (x = 0 or x = x)"
        f = parse_formula(text, normalize=True)
        assert len(f.matrix) == 4

    def test_dnf_input_unchanged_by_normalize(self):
        text = "forall x in [0, 1] : x = x and x = 1 or x*x = x"
        assert parse_formula(text, normalize=True) == parse_formula(text)


class TestRegularity:
    def test_forall_needs_rel_compact_open(self):
        good = parse_formula("forall x in (-1, 1): x = x")
        bad = parse_formula("forall x in [-1, 1]: x = x")
        assert check_regular(good)
        assert not check_regular(bad)

    def test_exists_needs_compact(self):
        good = parse_formula("exists x in [-1, 1]: x = x")
        bad = parse_formula("exists x in (-1, 1): x = x")
        assert check_regular(good)
        assert not check_regular(bad)

    def test_padic_balls_work_for_both(self):
        f = parse_formula(
            "forall x in pball(2, 0) exists y in pball(2, 1): x*y = y")
        assert check_regular(f)

    def test_explicit_bound_tuple(self):
        f = parse_formula("forall x in (-1, 1): x = x")
        assert not check_regular(f, (Interval(Fraction(-1), Fraction(1), True),))
        with pytest.raises(ValueError):
            check_regular(f, ())


class TestRefinement:
    def test_widen_directions(self):
        f = parse_formula("forall x in (-1, 1) exists y in [0, 1] : x*y = y")
        got = [format_region(r) for r in widen(f, Fraction(1, 2))]
        assert got == ["(-1/2, 1/2)", "[-1/2, 3/2]"]

    def test_widen_output_refines(self):
        f = parse_formula("forall x in (-1, 1) exists y in [0, 1] : x*y = y")
        ws = widen(f, Fraction(1, 2))
        assert check_ll(f, f.bounds(), ws)
        assert not check_ll(f, ws, f.bounds())

    def test_widen_collapse_rejected(self):
        f = parse_formula("forall x in (-1, 1) exists y in [0, 1] : x*y = y")
        with pytest.raises(ValueError):
            widen(f, Fraction(3, 2))
        with pytest.raises(ValueError):
            widen(f, Fraction(-1))


class TestDesugarOrder:
    def test_shapes(self):
        assert format_formula(desugar_order("le", 2)) == \
            "exists z in [-2, 2] : x + z*z = y"
        assert format_formula(desugar_order("lt", 2)) == \
            "exists z in [-2, 2] : y*(z*z) = x*(z*z) + 1"

    def test_le_witnessed_on_perfect_squares(self):
        f = desugar_order("le", 3)
        atom = f.matrix[0][0]
        # x = 1, y = 5: z = 2 inside [-3, 3] witnesses 1 + 4 = 5
        env = {"x": Fraction(1), "y": Fraction(5), "z": Fraction(2)}
        assert eval_term_exact(atom.t1, env) == eval_term_exact(atom.t2, env)

    def test_lt_witness_scales_inverse_gap(self):
        f = desugar_order("lt", 2)
        atom = f.matrix[0][0]
        # y - x = 1/4 needs z*z = 4: z = 2 on the boundary
        env = {"x": Fraction(0), "y": Fraction(1, 4), "z": Fraction(2)}
        assert eval_term_exact(atom.t1, env) == eval_term_exact(atom.t2, env)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            desugar_order("ge", 2)
        with pytest.raises(ValueError):
            desugar_order("le", 0)


class TestFormulaHelpers:
    def test_free_and_bound_vars(self):
        f = parse_formula("forall x in (0, 1): x*y + t = y")
        assert f.bound_vars() == ("x",)
        assert f.free_vars() == ("y", "t")

    def test_with_bounds_length_checked(self):
        f = parse_formula("forall x in (0, 1): x = x")
        with pytest.raises(ValueError):
            f.with_bounds(())

    def test_approximate_rewrites_equalities_only(self):
        f = parse_formula(
            "forall x in [0, 1]: x = x and close(x, x, 1/8)")
        g = approximate(f, Entourage(Fraction(1, 4)))
        a1, a2 = g.matrix[0]
        assert isinstance(a1, Close) and a1.eps == Fraction(1, 4)
        assert isinstance(a2, Close) and a2.eps == Fraction(1, 8)

    def test_atom_signature_check(self):
        f = parse_formula("forall x in (0, 1): x*x = x + 1")
        assert atom_signature_ok(f, RING_SIGNATURE)
        assert not atom_signature_ok(f, Signature((("add", 2),)))

    def test_duplicate_quantifier_names_rejected(self):
        q = Quant(FORALL, "x", Interval(Fraction(0), Fraction(1), True))
        with pytest.raises(ValueError):
            Formula((q, q), ((Eq(t_var("x"), t_var("x")),),))

    def test_eval_term_exact_polynomial(self):
        t = t_add(t_mul(t_var("x"), t_var("x")), t_const(Fraction(1, 2)))
        assert eval_term_exact(t, {"x": Fraction(3, 2)}) == Fraction(11, 4)
