"""Truncating decimal floating point.

The oracle comes from the stdlib decimal module: divide at high precision
and quantize with ROUND_DOWN, an implementation path independent of
fp_round's integer arithmetic.
"""

from decimal import Decimal, ROUND_DOWN, localcontext
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from finapprox.decimalfp import (DecimalFP, FPParams, UndecidableRounding,
                                 apq_params_for, build_apq,
                                 cancellation_witness, fp_add, fp_div,
                                 fp_index, fp_mul, fp_neg, fp_round,
                                 sufficient_params_inverse)
from finapprox.exact import ExactScalar


def oracle_truncate(q: Fraction, Q: int) -> Fraction:
    """Truncate q toward zero to Q significant decimal digits."""
    if q == 0:
        return Fraction(0)
    with localcontext() as ctx:
        ctx.prec = 60
        d = Decimal(q.numerator) / Decimal(q.denominator)
        exponent = d.adjusted() - Q + 1
        t = d.quantize(Decimal(1).scaleb(exponent), rounding=ROUND_DOWN)
    return Fraction(t)


in_band = st.fractions(min_value=Fraction(1, 50), max_value=Fraction(9),
                       max_denominator=1000)


class TestRound:
    def test_frozen_examples(self):
        assert fp_round(Fraction(2, 3), FPParams(2, 4)).to_text() == "0.6666e0"
        assert fp_round(Fraction(-2, 3), FPParams(2, 4)).to_text() == "-0.6666e0"
        assert fp_round(Fraction(1, 3), FPParams(1, 4)).to_text() == "0.3333e0"
        assert fp_round(Fraction(12012, 10**4), FPParams(1, 4)).to_text() == "0.1201e1"
        assert fp_round(Fraction(0), FPParams(1, 4)).to_text() == "0"

    @settings(max_examples=200, deadline=None)
    @given(in_band, st.booleans(), st.integers(min_value=1, max_value=5))
    def test_matches_decimal_oracle(self, q, negate, Q):
        if negate:
            q = -q
        got = fp_round(q, FPParams(1, Q))
        assert got.value() == oracle_truncate(q, Q)

    @settings(max_examples=100, deadline=None)
    @given(in_band, st.booleans())
    def test_idempotent(self, q, negate):
        params = FPParams(1, 3)
        if negate:
            q = -q
        once = fp_round(q, params)
        assert fp_round(once.value(), params) == once

    def test_saturation_keeps_sign(self):
        params = FPParams(2, 3)
        assert fp_round(Fraction(10**5), params).to_text() == "0.999e2"
        assert fp_round(Fraction(-10**5), params).to_text() == "-0.999e2"
        assert fp_round(Fraction(10**5), params).value() == params.max_value

    def test_flush_to_zero(self):
        params = FPParams(2, 3)
        assert fp_round(Fraction(1, 10**6), params).is_zero
        assert fp_round(Fraction(-1, 10**6), params).is_zero
        # smallest positive survives
        assert fp_round(params.min_positive, params).value() == params.min_positive

    def test_exact_scalar_inputs(self):
        params = FPParams(1, 4)
        tight = ExactScalar.enclosure(Fraction(2, 3), Fraction(1, 10**9))
        assert fp_round(tight, params).to_text() == "0.6666e0"
        # inside the flush band the straddle is harmless
        assert fp_round(ExactScalar.enclosure(Fraction(0), Fraction(1, 1000)),
                        params).is_zero
        # across a truncation boundary it is not
        straddling = ExactScalar.enclosure(Fraction(6667, 10**4),
                                           Fraction(1, 10**9))
        with pytest.raises(UndecidableRounding):
            fp_round(straddling, params)


class TestTextAndIndex:
    def test_text_round_trip(self):
        for text in ("0.6006e0", "-0.1201e1", "0.9e-1", "0"):
            assert DecimalFP.from_text(text).to_text() == text

    def test_index_bijection_small(self):
        params = FPParams(1, 1)
        alg = build_apq(params)
        for i, v in enumerate(alg.embedding):
            assert fp_index(fp_round(v, params), params) == i

    def test_embedding_sorted(self):
        alg = build_apq(FPParams(1, 2))
        emb = list(alg.embedding)
        assert emb == sorted(emb)
        assert Fraction(0) in emb


class TestOps:
    @settings(max_examples=100, deadline=None)
    @given(in_band, in_band, st.booleans())
    def test_add_rounds_exact_sum(self, x, y, neg_y):
        params = FPParams(1, 3)
        if neg_y:
            y = -y
        a, b = fp_round(x, params), fp_round(y, params)
        got = fp_add(a, b, params)
        assert got == fp_round(a.value() + b.value(), params)

    @settings(max_examples=100, deadline=None)
    @given(in_band, in_band)
    def test_mul_rounds_exact_product(self, x, y):
        params = FPParams(1, 3)
        a, b = fp_round(x, params), fp_round(y, params)
        assert fp_mul(a, b, params) == fp_round(a.value() * b.value(), params)

    def test_ops_commute_exhaustively(self):
        params = FPParams(1, 1)
        alg = build_apq(params)
        add, mul = alg.ops["add"], alg.ops["mul"]
        for i in range(alg.size):
            for j in range(alg.size):
                assert add(i, j) == add(j, i)
                assert mul(i, j) == mul(j, i)

    def test_in_window_add_error_below_gap(self):
        # |x (+) y - (x + y)| < 10^(P-Q) whenever the exact sum stays in range
        params = FPParams(1, 3)
        gap = Fraction(10) ** (params.P - params.Q)
        alg = build_apq(params)
        probe = [Fraction(6006, 10**4), Fraction(-1, 3), Fraction(9, 2)]
        for x in probe:
            for y in probe:
                a, b = fp_round(x, params), fp_round(y, params)
                exact = a.value() + b.value()
                if abs(exact) <= params.max_value:
                    assert abs(fp_add(a, b, params).value() - exact) < gap

    def test_div_truncates(self):
        params = FPParams(1, 4)
        one = fp_round(Fraction(1), params)
        three = fp_round(Fraction(3), params)
        assert fp_div(one, three, params).to_text() == "0.3333e0"
        with pytest.raises(ZeroDivisionError):
            fp_div(one, fp_round(Fraction(0), params), params)

    def test_neg_is_exact(self):
        params = FPParams(1, 2)
        for q in (Fraction(2, 3), Fraction(-9), Fraction(0)):
            a = fp_round(q, params)
            assert fp_neg(a).value() == -a.value()
            assert fp_neg(fp_neg(a)) == a


class TestCancellationWitness:
    def test_reference_values_at_q4(self):
        w = cancellation_witness(FPParams(1, 4))
        assert w.alpha.to_text() == "0.6006e0"
        assert w.beta.to_text() == "0.6006e0"
        assert w.gamma.to_text() == "0.6005e0"
        assert w.sum_ab.to_text() == "0.1201e1"
        assert w.sum_ag == w.sum_ab
        assert w.beta != w.gamma

    def test_witness_realized_in_algebra_table(self):
        params = FPParams(1, 4)
        w = cancellation_witness(params)
        alg = build_apq(params)
        add = alg.ops["add"]
        ia, ib, ig = (fp_index(x, params) for x in (w.alpha, w.beta, w.gamma))
        assert add(ia, ib) == add(ia, ig)
        assert ib != ig

    @settings(max_examples=10, deadline=None)
    @given(st.integers(min_value=1, max_value=6), st.integers(min_value=1, max_value=6))
    def test_exists_at_every_precision(self, P, Q):
        w = cancellation_witness(FPParams(P, Q))
        assert w.sum_ab == w.sum_ag and w.beta != w.gamma


class TestParameterHelpers:
    def test_apq_params_reference(self):
        assert apq_params_for(2, Fraction(1, 10)) == FPParams(1, 2)

    @settings(max_examples=50, deadline=None)
    @given(st.fractions(min_value=Fraction(1, 4), max_value=Fraction(40),
                        max_denominator=64),
           st.sampled_from([Fraction(1, 2), Fraction(1, 10), Fraction(1, 100)]))
    def test_apq_params_sufficient(self, a, eps):
        params = apq_params_for(a, eps)
        assert params.max_value >= a
        assert Fraction(10) ** (params.P - params.Q) <= eps
        assert params.min_positive <= eps

    def test_apq_params_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            apq_params_for(0, Fraction(1, 10))
        with pytest.raises(ValueError):
            apq_params_for(2, Fraction(0))

    def test_inverse_threshold_solves_margin_equation(self):
        b, delta = Fraction(2), Fraction(1, 10)
        a0, eps0 = sufficient_params_inverse(b, delta)
        # eps0 is an upper bound for the root of eps*(2b + 1 + eps) = delta
        assert eps0 * (2 * b + 1 + eps0) >= delta
        slack = Fraction(1, 10**12)
        assert (eps0 - slack) * (2 * b + 1 + eps0 - slack) < delta
        assert a0 >= b + eps0
        assert a0 >= (2 * b + eps0) * eps0 + 1

    def test_inverse_threshold_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            sufficient_params_inverse(1, Fraction(1, 10))
        with pytest.raises(ValueError):
            sufficient_params_inverse(2, 0)
