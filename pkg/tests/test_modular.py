"""Balanced modular grids."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from finapprox.approx import check_approximation
from finapprox.modular import (ModularParams, balanced, build_modular,
                               mod_add, mod_mul, modular_params_for)
from finapprox.regions import Entourage, interval


class TestBalanced:
    def test_reference_residues(self):
        assert [balanced(x, 5) for x in range(-6, 7)] == \
            [-1, 0, 1, 2, -2, -1, 0, 1, 2, -2, -1, 0, 1]

    @settings(max_examples=100, deadline=None)
    @given(st.integers(-10**6, 10**6), st.integers(min_value=1, max_value=40))
    def test_residue_bounds_and_congruence(self, x, M):
        N = 2 * M + 1
        r = balanced(x, N)
        assert -M <= r <= M
        assert (x - r) % N == 0


class TestTable:
    def test_m2_addition_wraps(self):
        p = ModularParams(2, Fraction(1, 2))
        # coefficients: 1 + 1 = 2 stays, 2 + 2 = 4 wraps to -1
        assert mod_add(1, 1, p) == 2
        assert mod_add(2, 2, p) == -1
        assert mod_add(-2, 2, p) == 0
        alg = build_modular(p)
        one = alg.embedding.index(Fraction(1))       # coefficient 2
        assert alg.embedding[alg.ops["add"](one, one)] == Fraction(-1, 2)

    def test_m2_multiplication_floors(self):
        p = ModularParams(2, Fraction(1, 2))
        # (1*eps)*(1*eps) = 1/4 -> floor(1*1*eps) = 0
        assert mod_mul(1, 1, p) == 0
        # (2*eps)*(2*eps) = 1 -> floor(4*eps) = 2 -> value 1
        assert mod_mul(2, 2, p) == 2

    def test_embedding_is_symmetric_grid(self):
        alg = build_modular(ModularParams(3, Fraction(1, 4)))
        assert alg.embedding == tuple(Fraction(k, 4) for k in range(-3, 4))


class TestApproximation:
    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=1, max_value=12),
           st.sampled_from([Fraction(1, 2), Fraction(1, 3), Fraction(1, 8)]))
    def test_window_claim_holds(self, M, eps):
        p = ModularParams(M, eps)
        alg = build_modular(p)
        rep = check_approximation(alg, interval(-p.reach, p.reach, closed=True),
                                  Entourage(eps))
        assert rep.ok

    def test_in_window_errors_within_eps(self):
        p = ModularParams(8, Fraction(1, 4))
        alg = build_modular(p)
        for i in range(alg.size):
            for j in range(alg.size):
                x, y = alg.embedding[i], alg.embedding[j]
                if abs(x + y) <= p.reach:
                    got = alg.embedding[alg.ops["add"](i, j)]
                    assert got == x + y  # grid addition is exact in window
                if abs(x * y) <= p.reach:
                    got = alg.embedding[alg.ops["mul"](i, j)]
                    assert abs(got - x * y) < p.eps


class TestParamsFor:
    def test_reach_and_margin(self):
        p = modular_params_for(2, Fraction(1, 10))
        assert p.eps == Fraction(1, 20)
        assert p.reach >= 2

    @settings(max_examples=40, deadline=None)
    @given(st.fractions(min_value=Fraction(1, 4), max_value=Fraction(20),
                        max_denominator=32),
           st.sampled_from([Fraction(1, 2), Fraction(1, 7), Fraction(1, 16)]))
    def test_always_sufficient(self, a, eps):
        p = modular_params_for(a, eps)
        assert p.reach >= a
        assert p.eps <= eps / 2

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            modular_params_for(-1, Fraction(1, 2))
        with pytest.raises(ValueError):
            ModularParams(0, Fraction(1, 2))
        with pytest.raises(ValueError):
            ModularParams(2, Fraction(0))
