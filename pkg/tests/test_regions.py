"""Regions: membership, topology predicates, and formatting."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from finapprox.exact import ExactScalar
from finapprox.padics import PadicDigits
from finapprox.regions import (Entourage, Interval, PadicBall, RegionUnion,
                               annulus, closure_subset, format_region,
                               interval, is_compact_region,
                               is_relatively_compact_open, region_contains,
                               subset_of_interior)

q_small = st.fractions(min_value=-10, max_value=10)


class TestMembership:
    def test_closed_includes_endpoints(self):
        iv = interval(-1, 2, closed=True)
        assert region_contains(iv, Fraction(-1))
        assert region_contains(iv, Fraction(2))
        assert not region_contains(iv, Fraction(5, 2))

    def test_open_excludes_endpoints(self):
        iv = interval(-1, 2, closed=False)
        assert not region_contains(iv, Fraction(-1))
        assert not region_contains(iv, Fraction(2))
        assert region_contains(iv, Fraction(0))

    def test_union_is_componentwise(self):
        ann = annulus(Fraction(1, 2), Fraction(2), closed=False)
        assert region_contains(ann, Fraction(1))
        assert region_contains(ann, Fraction(-1))
        assert not region_contains(ann, Fraction(0))
        assert not region_contains(ann, Fraction(2))

    def test_padic_ball_norm_threshold(self):
        # pball(p, m) is p^-m Z_p: norm <= p^m, growing with m
        ball = PadicBall(2, -1)   # |x|_2 <= 1/2
        assert region_contains(ball, PadicDigits.from_fraction(Fraction(6), 2))
        assert not region_contains(ball, PadicDigits.from_fraction(Fraction(1), 2))
        assert not region_contains(ball, PadicDigits.from_fraction(Fraction(1, 2), 2))
        wide = PadicBall(2, 1)    # |x|_2 <= 2
        assert region_contains(wide, PadicDigits.from_fraction(Fraction(1, 2), 2))
        assert not region_contains(wide, PadicDigits.from_fraction(Fraction(1, 4), 2))

    def test_enclosed_scalar_decided_when_clear(self):
        iv = interval(0, 1, closed=True)
        inside = ExactScalar.enclosure(Fraction(1, 2), Fraction(1, 10))
        assert region_contains(iv, inside)

    def test_enclosed_scalar_too_coarse_raises(self):
        iv = interval(0, 1, closed=True)
        straddling = ExactScalar.enclosure(Fraction(1), Fraction(1, 10))
        with pytest.raises(ValueError):
            region_contains(iv, straddling)

    @given(q_small)
    def test_singleton_closed_interval(self, q):
        assert region_contains(interval(q, q, closed=True), q)


class TestTopologyPredicates:
    def test_compactness(self):
        assert is_compact_region(interval(0, 1, closed=True))
        assert not is_compact_region(interval(0, 1, closed=False))
        assert is_compact_region(PadicBall(3, 0))
        assert is_compact_region(annulus(1, 2, closed=True))

    def test_relatively_compact_open(self):
        assert is_relatively_compact_open(interval(0, 1, closed=False))
        assert not is_relatively_compact_open(interval(0, 1, closed=True))
        # p-adic balls are clopen: both predicates hold
        assert is_relatively_compact_open(PadicBall(2, 1))

    def test_closure_subset(self):
        assert closure_subset(interval(0, 1, closed=False),
                              interval(-1, 2, closed=False))
        assert not closure_subset(interval(0, 1, closed=False),
                                  interval(0, 1, closed=False))
        assert closure_subset(interval(0, 1, closed=False),
                              interval(0, 1, closed=True))

    def test_subset_of_interior(self):
        assert subset_of_interior(interval(0, 1, closed=True),
                                  interval(-1, 2, closed=True))
        assert not subset_of_interior(interval(0, 1, closed=True),
                                      interval(0, 1, closed=True))
        assert subset_of_interior(PadicBall(2, 1), PadicBall(2, 1))

    def test_annulus_refinement_pair(self):
        inner = annulus(Fraction(2, 3), Fraction(3, 2), closed=False)
        outer = annulus(Fraction(4, 7), Fraction(7, 4), closed=False)
        assert closure_subset(inner, outer)

    @given(q_small, q_small, q_small, q_small)
    def test_closure_subset_implies_membership(self, a, b, c, d):
        if not (a < b and c < d):
            return
        inner, outer = interval(a, b, closed=False), interval(c, d, closed=False)
        if closure_subset(inner, outer):
            assert region_contains(outer, a) and region_contains(outer, b)


class TestConstructionAndFormat:
    def test_inverted_interval_rejected(self):
        with pytest.raises(ValueError):
            interval(2, 1)

    def test_entourage_positive(self):
        with pytest.raises(ValueError):
            Entourage(Fraction(0))
        assert Entourage(Fraction(1, 8)).eps == Fraction(1, 8)

    def test_format_shapes(self):
        assert format_region(interval(-1, 2, closed=True)) == "[-1, 2]"
        assert format_region(interval(Fraction(1, 2), 2, closed=False)) == "(1/2, 2)"
        assert format_region(PadicBall(2, 0)) == "pball(2, 0)"
        ann = annulus(1, 2, closed=False)
        assert "|" in format_region(ann)

    def test_union_order_stable(self):
        # negative component first, then positive
        ann = annulus(Fraction(1, 2), 2)
        assert isinstance(ann, RegionUnion)
        assert len(ann.parts) == 2
        assert ann.parts[0].lo == Fraction(-2)
        assert ann.parts[1].lo == Fraction(1, 2)
