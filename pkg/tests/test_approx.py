"""Grid and near-homomorphism checks.

The lattice oracle below is written against the definition directly: it
samples 1/100-spaced points of the region and measures distance to the
embedded carrier, independently of check_grid's interval reasoning.
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from finapprox.algebra import corrupt_entry
from finapprox.ambient import RealAmbient
from finapprox.approx import (MonotonePremiseError, canonical_approximation,
                              check_approximation, check_grid,
                              check_homomorphism, check_restriction_monotone,
                              nearest_step_index, perturbed_canonical)
from finapprox.modular import ModularParams, build_modular
from finapprox.regions import Entourage, Interval, RegionUnion, interval


def lattice_points(region, spacing=Fraction(1, 100)):
    """All multiples of `spacing` inside the region (plus exact endpoints)."""
    parts = region.parts if isinstance(region, RegionUnion) else (region,)
    pts = []
    for part in parts:
        k = part.lo / spacing
        k0 = k.numerator // k.denominator
        v = k0 * spacing
        while v <= part.hi:
            if part.contains(v):
                pts.append(v)
            v += spacing
        for end in (part.lo, part.hi):
            if part.contains(end):
                pts.append(end)
    return pts


def lattice_grid_ok(alg, region, eps: Fraction) -> bool:
    """Necessary condition for the grid property, via sampling."""
    emb = sorted(alg.embedding)
    for x in lattice_points(region):
        if min(abs(x - e) for e in emb) >= eps:
            return False
    return True


def modular_alg(M=2, eps=Fraction(1, 2)):
    return build_modular(ModularParams(M, eps))


class TestGrid:
    def test_modular_grid_on_claim_region(self):
        alg = modular_alg()
        region = interval(-1, 1, closed=True)
        ok, witness = check_grid(alg, region, Entourage(Fraction(1, 2)))
        assert ok and witness is None
        assert lattice_grid_ok(alg, region, Fraction(1, 2))

    def test_grid_fails_beyond_reach(self):
        alg = modular_alg()
        region = interval(-2, 2, closed=True)
        ok, witness = check_grid(alg, region, Entourage(Fraction(1, 2)))
        assert not ok and witness is not None
        assert not lattice_grid_ok(alg, region, Fraction(1, 2))

    def test_strictness_at_exact_spacing(self):
        # carrier step 1, eps 1/2: the midpoint sits exactly eps away
        alg = modular_alg(M=2, eps=Fraction(1))
        ok, _ = check_grid(alg, interval(-2, 2, closed=True),
                           Entourage(Fraction(1, 2)))
        assert not ok

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=2, max_value=8),
           st.sampled_from([Fraction(1, 2), Fraction(1, 4), Fraction(1, 5)]))
    def test_lattice_oracle_agrees_when_ok(self, M, eps):
        alg = modular_alg(M, eps)
        region = interval(-M * eps, M * eps, closed=True)
        ok, _ = check_grid(alg, region, Entourage(eps))
        assert ok
        assert lattice_grid_ok(alg, region, eps)


class TestHomomorphism:
    def test_modular_claim_verified(self):
        alg = modular_alg()
        rep = check_approximation(alg, interval(-1, 1, closed=True),
                                  Entourage(Fraction(1, 2)))
        assert rep.ok

    def test_in_window_corruption_detected(self):
        alg = modular_alg()
        # 1/2 + 1/2 = 1 stays inside [-1,1]; wreck that cell
        half = alg.embedding.index(Fraction(1, 2))
        zero = alg.embedding.index(Fraction(0))
        bad = corrupt_entry(alg, "add", (half, half), zero)
        rep = check_approximation(bad, interval(-1, 1, closed=True),
                                  Entourage(Fraction(1, 2)))
        assert not rep.hom_ok
        assert any(v.symbol == "add" and v.ids == (half, half)
                   for v in rep.hom_violations)

    def test_out_of_window_corruption_vacuous(self):
        alg = modular_alg()
        one = alg.embedding.index(Fraction(1))
        neg = alg.embedding.index(Fraction(-1, 2))
        # 1 + 1 = 2 leaves [-1,1], so this cell is never consulted there
        bad = corrupt_entry(alg, "add", (one, one), neg)
        rep = check_approximation(bad, interval(-1, 1, closed=True),
                                  Entourage(Fraction(1, 2)))
        assert rep.ok

    def test_violation_count_and_cap(self):
        alg = modular_alg(M=4, eps=Fraction(1, 2))
        bad = alg
        for k in range(3):
            bad = corrupt_entry(bad, "add", (k, k),
                                (k + 4) % bad.size)
        rep = check_approximation(bad, interval(-2, 2, closed=True),
                                  Entourage(Fraction(1, 2)), max_violations=2)
        assert not rep.hom_ok
        assert len(rep.hom_violations) <= 2
        assert rep.hom_violation_count >= len(rep.hom_violations)


class TestCanonical:
    @settings(max_examples=20, deadline=None)
    @given(st.sampled_from([Fraction(1), Fraction(3, 2), Fraction(2)]),
           st.sampled_from([Fraction(1, 4), Fraction(1, 8), Fraction(1, 10)]))
    def test_construction_is_approximation(self, a, eps):
        region = interval(-a, a, closed=True)
        alg = canonical_approximation(RealAmbient(), region, Entourage(eps),
                                      step=eps / 2)
        rep = check_approximation(alg, region, Entourage(eps))
        assert rep.ok

    def test_mul_rounds_ties_toward_zero(self):
        alg = canonical_approximation(RealAmbient(),
                                      interval(-2, 2, closed=True),
                                      Entourage(Fraction(3, 4)),
                                      step=Fraction(1, 2))
        vals = list(alg.embedding)
        half = vals.index(Fraction(1, 2))
        neg_half = vals.index(Fraction(-1, 2))
        # 1/2 * 1/2 = 1/4, exactly between grid points 0 and 1/2
        assert vals[alg.ops["mul"](half, half)] == Fraction(0)
        # -1/2 * 1/2 = -1/4 also snaps toward zero
        assert vals[alg.ops["mul"](neg_half, half)] == Fraction(0)

    def test_step_must_be_finer_than_eps(self):
        with pytest.raises(ValueError):
            canonical_approximation(RealAmbient(),
                                    interval(-1, 1, closed=True),
                                    Entourage(Fraction(1, 4)),
                                    step=Fraction(1, 4))

    def test_nearest_step_index_ties(self):
        assert nearest_step_index(Fraction(1, 4), Fraction(1, 2)) == 0
        assert nearest_step_index(Fraction(-1, 4), Fraction(1, 2)) == 0
        assert nearest_step_index(Fraction(3, 4), Fraction(1, 2)) == 1
        assert nearest_step_index(Fraction(-3, 4), Fraction(1, 2)) == -1


class TestPerturbed:
    def test_still_an_approximation(self):
        region = interval(-1, 1, closed=True)
        alg = perturbed_canonical(RealAmbient(), region,
                                  Entourage(Fraction(1, 4)),
                                  step=Fraction(1, 8), seed=7)
        rep = check_approximation(alg, region, Entourage(Fraction(1, 4)))
        assert rep.ok

    def test_seed_determinism(self):
        region = interval(-1, 1, closed=True)
        kw = dict(ent=Entourage(Fraction(1, 4)), step=Fraction(1, 8))
        a = perturbed_canonical(RealAmbient(), region, kw["ent"], kw["step"], seed=3)
        b = perturbed_canonical(RealAmbient(), region, kw["ent"], kw["step"], seed=3)
        c = perturbed_canonical(RealAmbient(), region, kw["ent"], kw["step"], seed=4)
        assert all(a.ops["add"](i, j) == b.ops["add"](i, j)
                   for i in range(a.size) for j in range(a.size))
        assert any(a.ops["add"](i, j) != c.ops["add"](i, j)
                   for i in range(a.size) for j in range(a.size)) \
            or any(a.ops["mul"](i, j) != c.ops["mul"](i, j)
                   for i in range(a.size) for j in range(a.size))


class TestRestrictionMonotone:
    def test_restriction_verifies(self):
        alg = modular_alg(M=4, eps=Fraction(1, 2))
        rep = check_restriction_monotone(
            alg, interval(-2, 2, closed=True), Entourage(Fraction(1, 2)),
            interval(-1, 1, closed=True), Entourage(Fraction(1, 2)))
        assert rep.ok

    def test_premise_subset_enforced(self):
        alg = modular_alg()
        with pytest.raises(MonotonePremiseError):
            check_restriction_monotone(
                alg, interval(-1, 1, closed=True), Entourage(Fraction(1, 2)),
                interval(-2, 2, closed=True), Entourage(Fraction(1, 2)))

    def test_premise_threshold_enforced(self):
        alg = modular_alg()
        with pytest.raises(MonotonePremiseError):
            check_restriction_monotone(
                alg, interval(-1, 1, closed=True), Entourage(Fraction(1, 2)),
                interval(-1, 1, closed=True), Entourage(Fraction(1, 4)))
