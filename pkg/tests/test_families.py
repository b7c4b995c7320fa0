"""Reference formula families and their analytic truth predicates."""

from fractions import Fraction

import pytest

from finapprox.families import (inverse_bounds, inverse_family, inverse_truth,
                                order_family, order_truth, threshold_family,
                                threshold_truth)
from finapprox.formulas import (Close, check_ll, check_regular, desugar_order,
                                format_formula)


class TestInverse:
    def test_formula_shape(self):
        f = inverse_family(Fraction(7, 4))
        assert format_formula(f) == ("forall x in (-7/4, -4/7) | (4/7, 7/4) "
                                     "exists y in [-7/4, -4/7] | [4/7, 7/4] "
                                     ": x*y = 1")
        assert check_regular(f)

    def test_bounds_refine_family(self):
        f = inverse_family(Fraction(7, 4))
        c2 = inverse_bounds(Fraction(3, 2), Fraction(2))
        assert check_ll(f, f.bounds(), c2)
        assert not check_ll(f, c2, f.bounds())

    def test_truth_boundary(self):
        # condition: c <= b*(1 + delta)
        b, delta = Fraction(2), Fraction(1, 10)
        edge = b * (1 + delta)                     # 11/5
        assert inverse_truth(edge, b, delta)
        assert not inverse_truth(edge + Fraction(1, 1000), b, delta)
        assert inverse_truth(Fraction(3, 2), b, delta)

    def test_empty_annulus_vacuous(self):
        assert inverse_truth(Fraction(1), Fraction(2), Fraction(1, 10))
        assert inverse_truth(Fraction(1, 2), Fraction(2), Fraction(1, 10))

    def test_validation(self):
        with pytest.raises(ValueError):
            inverse_family(1)
        with pytest.raises(ValueError):
            inverse_bounds(1, 2)
        with pytest.raises(ValueError):
            inverse_truth(Fraction(3, 2), Fraction(2), 0)


class TestOrder:
    def test_formula_matches_desugared_le(self):
        assert order_family(Fraction(2)) == desugar_order("le", 2)

    def test_truth_window(self):
        b = Fraction(2)
        assert order_truth(0, 0, b)                 # x <= y at equality
        assert order_truth(0, 4, b)                 # y = x + b^2 boundary
        assert not order_truth(0, Fraction(17, 4), b)
        assert not order_truth(1, 0, b)             # y < x

    def test_validation(self):
        with pytest.raises(ValueError):
            order_family(0)


class TestThreshold:
    def test_formula_close_variant_of_desugared_lt(self):
        f = threshold_family(Fraction(2), Fraction(1, 4))
        g = desugar_order("lt", 2)
        assert f.prefix == g.prefix
        atom_f, atom_g = f.matrix[0][0], g.matrix[0][0]
        assert isinstance(atom_f, Close) and atom_f.eps == Fraction(1, 4)
        assert (atom_f.t1, atom_f.t2) == (atom_g.t1, atom_g.t2)

    def test_truth_strict_at_cut(self):
        c, alpha = Fraction(2), Fraction(1, 2)
        cut = (1 - alpha) / (c * c)                 # 1/8
        assert not threshold_truth(0, cut, c, alpha)
        assert threshold_truth(0, cut + Fraction(1, 10**6), c, alpha)
        assert not threshold_truth(0, cut - Fraction(1, 10**6), c, alpha)

    def test_truth_translation_invariant(self):
        c, alpha = Fraction(3, 2), Fraction(1, 5)
        for shift in (Fraction(-2), Fraction(0), Fraction(7, 3)):
            assert threshold_truth(shift, shift + 1, c, alpha)
            assert not threshold_truth(shift, shift, c, alpha)

    def test_validation(self):
        with pytest.raises(ValueError):
            threshold_family(0, Fraction(1, 4))
        with pytest.raises(ValueError):
            threshold_family(Fraction(2), 0)


class TestRegularity:
    def test_all_families_regular(self):
        assert check_regular(inverse_family(Fraction(3, 2)))
        assert check_regular(order_family(Fraction(2)))
        assert check_regular(threshold_family(Fraction(2), Fraction(1, 4)))
