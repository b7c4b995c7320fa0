"""Finite rings and the grid-embedding probe.

brute_force_embedding_error enumerates every grid-valued embedding, so it
is the oracle the heuristic search is measured against on small inputs.
"""

import itertools
from fractions import Fraction

import pytest

from finapprox.algebra import corrupt_entry
from finapprox.rings import (EmbeddingSearchConfig, InfeasibleGridError,
                             RingAxiomError, best_embedding_error,
                             brute_force_embedding_error, build_ring,
                             enumerate_rings, gf, grid_control_units,
                             is_isomorphic_by, probe_report, product_ring,
                             score_embedding, ut2, verify_ring, zn)


class TestConstructions:
    def test_zn_is_a_ring(self):
        for n in (2, 3, 4, 6, 9):
            verify_ring(build_ring(zn(n)))

    def test_crt_z6_isomorphic_to_z2_x_z3(self):
        z6 = build_ring(zn(6))
        prod = build_ring(product_ring(zn(2), zn(3)))
        assert z6.size == prod.size == 6
        assert any(is_isomorphic_by(perm, z6, prod)
                   for perm in itertools.permutations(range(6)))

    def test_z4_not_isomorphic_to_z2_x_z2(self):
        z4 = build_ring(zn(4))
        klein = build_ring(product_ring(zn(2), zn(2)))
        assert not any(is_isomorphic_by(perm, z4, klein)
                       for perm in itertools.permutations(range(4)))

    def test_gf4_field_facts(self):
        g = build_ring(gf(2, 2))
        verify_ring(g)
        assert g.size == 4
        mul = g.op("mul")
        add = g.op("add")
        zero = next(z for z in range(4) if all(add(z, k) == k for k in range(4)))
        one = next(e for e in range(4)
                   if e != zero and all(mul(e, k) == k for k in range(4)))
        # every nonzero element invertible, and x^4 = x for all x
        for x in range(4):
            if x != zero:
                assert any(mul(x, y) == one for y in range(4))
            x4 = mul(mul(mul(x, x), x), x)
            assert x4 == x
        # characteristic 2: x + x = 0
        assert all(add(x, x) == zero for x in range(4))

    def test_gf_rejects_composite_base(self):
        with pytest.raises(ValueError):
            build_ring(gf(4, 1))

    def test_ut2_noncommutative_ring(self):
        u = build_ring(ut2(2))
        verify_ring(u)
        assert u.size == 8
        mul = u.op("mul")
        assert any(mul(i, j) != mul(j, i)
                   for i in range(8) for j in range(8))

    def test_verify_ring_catches_corruption(self):
        z6 = build_ring(zn(6))
        bad = corrupt_entry(z6, "mul", (2, 3), 1)
        with pytest.raises(RingAxiomError):
            verify_ring(bad)

    def test_enumerate_rings_enforces_order_cap(self):
        rings = enumerate_rings([zn(4), zn(6)], max_order=6)
        assert [r.size for r in rings] == [4, 6]
        with pytest.raises(ValueError, match="order 9 > 6"):
            enumerate_rings([zn(4), zn(9)], max_order=6)


class TestEmbeddingSearch:
    def test_search_matches_brute_force_z5(self):
        z5 = build_ring(zn(5))
        brute_err, _ = brute_force_embedding_error(z5, 1, Fraction(1, 2))
        best_err, units = best_embedding_error(z5, 1, Fraction(1, 2))
        assert brute_err == Fraction(5, 4)
        assert best_err == brute_err
        # the returned units realize the reported error
        ids = [int(u / Fraction(1, 2)) for u in units]
        score = score_embedding(z5, ids, 1, Fraction(1, 2))
        assert max(score["add"], score["mul"]) * Fraction(1, 2) == best_err

    def test_search_matches_brute_force_z6(self):
        z6 = build_ring(zn(6))
        brute_err, _ = brute_force_embedding_error(z6, 1, Fraction(1, 2))
        best_err, _ = best_embedding_error(z6, 1, Fraction(1, 2))
        assert brute_err == Fraction(3, 2)
        assert best_err == brute_err

    def test_pigeonhole_infeasibility(self):
        z5 = build_ring(zn(5))
        with pytest.raises(InfeasibleGridError, match="pigeonhole"):
            best_embedding_error(z5, 2, Fraction(1, 2))
        with pytest.raises(InfeasibleGridError):
            brute_force_embedding_error(z5, 2, Fraction(1, 2))

    def test_search_never_beats_brute_force(self):
        for spec in (zn(5), zn(6)):
            ring = build_ring(spec)
            brute_err, _ = brute_force_embedding_error(ring, 1, Fraction(1, 2))
            best_err, _ = best_embedding_error(
                ring, 1, Fraction(1, 2),
                EmbeddingSearchConfig(Fraction(1), Fraction(1, 2), seed=3))
            assert best_err >= brute_err

    def test_search_deterministic_by_seed(self):
        z9 = build_ring(zn(9))
        cfg = EmbeddingSearchConfig(Fraction(2), Fraction(1, 2), seed=11)
        r1 = best_embedding_error(z9, 2, Fraction(1, 2), cfg)
        r2 = best_embedding_error(z9, 2, Fraction(1, 2), cfg)
        assert r1 == r2


class TestControlAndScore:
    def test_grid_control_scores(self):
        for a, eps in ((1, Fraction(1, 2)), (2, Fraction(1, 2)),
                       (2, Fraction(1, 4))):
            alg, units = grid_control_units(a, eps)
            score = score_embedding(alg, units, a, eps)
            assert score["add"] == 0
            assert score["mul"] <= Fraction(1, 2)

    def test_control_is_not_a_ring(self):
        alg, _ = grid_control_units(2, Fraction(1, 2))
        with pytest.raises(RingAxiomError):
            verify_ring(alg)

    def test_score_normalizes_by_eps(self):
        z9 = build_ring(zn(9))
        units = list(range(-4, 5))
        s_half = score_embedding(z9, units, 2, Fraction(1, 2))
        assert s_half["add"] > 1  # wraparound breaks additivity hard


class TestProbeReport:
    def test_rows_and_control(self):
        rep = probe_report([zn(9)], [(Fraction(2), Fraction(1, 2))])
        assert "evidence, not a proof" in rep.header
        by_family = {r.family: r for r in rep.rows}
        probe = by_family["Z/9"]
        assert probe.status == "scored"
        assert max(probe.add_error, probe.mul_error) > 1
        control = by_family["grid-control (non-ring)"]
        assert control.add_error == 0
        assert control.mul_error <= 1

    def test_infeasible_cells_reported(self):
        rep = probe_report([zn(9)], [(Fraction(2), Fraction(1, 8))],
                           include_control=False)
        row = rep.rows[0]
        assert row.status == "infeasible"
        assert "pigeonhole" in row.detail
