import random
from fractions import Fraction

import pytest

from gridposet.errors import DomainError, NotAntichain, NotPFree
from gridposet.extremal import is_p_free
from gridposet.grid import GridShape, Subset, level_profile, ranks_of, width_grid
from gridposet.lubell import (chain_mass_formula, claim1_construct,
                              claim2_blocks, conjecture_ratio, lubell_mass,
                              lym_check, mass_report_to_text)
from gridposet.poset import antichain_poset, chain_poset, k_poset


def maximal_chain_k2(k: int) -> Subset:
    """The staircase (1,1)..(1,k)..(k,k) in [k]^2."""
    shape = GridShape.uniform(k, 2)
    pts = [(1, j) for j in range(1, k + 1)] + [(i, k) for i in range(2, k + 1)]
    return Subset.from_points(shape, pts)


class TestMass:
    def test_maximal_chain_2x2(self):
        s = Subset.from_points(GridShape.uniform(2, 2), [(1, 1), (1, 2), (2, 2)])
        assert lubell_mass(s).total == Fraction(5, 2)

    def test_middle_level(self):
        s = Subset.from_points(GridShape.uniform(2, 2), [(1, 2), (2, 1)])
        assert lubell_mass(s).total == 1

    def test_empty(self):
        assert lubell_mass(Subset(GridShape.uniform(2, 2), 0)).total == 0

    def test_per_level_breakdown(self):
        s = Subset.from_points(GridShape.uniform(3, 2), [(1, 1), (2, 2), (1, 3)])
        report = lubell_mass(s)
        assert [(lm.level, lm.count) for lm in report.per_level] == [(0, 1), (2, 2)]
        assert report.total == Fraction(1, 1) + Fraction(2, 3)

    def test_trivial_inequality_on_random_subsets(self):
        rng = random.Random(42)
        for sides in [(3, 3), (2, 2, 2), (4, 2)]:
            shape = GridShape(sides)
            w = width_grid(shape)
            for _ in range(30):
                mask = rng.getrandbits(shape.size)
                s = Subset(shape, mask)
                total = lubell_mass(s).total
                assert Fraction(len(s), w) <= total

    def test_per_block_masses(self):
        result = claim1_construct(8, 2)
        report = lubell_mass(result.subset, blocks=result.block_subsets())
        assert sum((bm.mass for bm in report.per_block), Fraction(0)) == report.total


class TestChainMassFormula:
    def test_reference_values(self):
        assert chain_mass_formula(2) == Fraction(5, 2)
        assert chain_mass_formula(1) == 1
        assert chain_mass_formula(3) == Fraction(10, 3)

    @pytest.mark.parametrize("k", [1, 2, 3, 5, 8, 13, 20])
    def test_matches_explicit_chain(self, k):
        assert lubell_mass(maximal_chain_k2(k)).total == chain_mass_formula(k)

    def test_domain(self):
        with pytest.raises(DomainError):
            chain_mass_formula(0)


class TestLymCheck:
    def test_single_level(self):
        shape = GridShape.uniform(3, 2)
        ranks = ranks_of(shape)
        s = Subset.from_indices(shape, [i for i in range(shape.size) if ranks[i] == 2])
        assert lym_check(s)

    def test_full_level_mass_exactly_one(self):
        s = Subset.from_points(GridShape.uniform(3, 2), [(1, 3), (2, 2), (3, 1)])
        assert lubell_mass(s).total == 1
        assert lym_check(s)

    def test_chain_rejected(self):
        with pytest.raises(NotAntichain):
            lym_check(maximal_chain_k2(3))


class TestClaim1:
    def test_k8_n2_exact_points(self):
        result = claim1_construct(8, 2)
        assert sorted(result.subset.points()) == [(1, 1), (2, 3), (3, 2)]
        assert lubell_mass(result.subset).total == Fraction(3, 2)
        assert [b.count for b in result.blocks] == [1, 2]

    def test_k4_n2_single_block(self):
        result = claim1_construct(4, 2)
        assert sorted(result.subset.points()) == [(1, 1)]
        assert lubell_mass(result.subset).total == 1

    def test_small_k_empty(self):
        # floor(log2 k) - 1 = 0 blocks for k in {2, 3}
        assert len(claim1_construct(2, 2).subset) == 0
        assert len(claim1_construct(3, 3).subset) == 0

    def test_domain(self):
        with pytest.raises(DomainError):
            claim1_construct(1, 2)
        with pytest.raises(DomainError):
            claim1_construct(4, 1)

    @pytest.mark.parametrize("k,n", [(4, 2), (8, 2), (16, 2), (4, 3), (8, 3)])
    def test_k_free(self, k, n):
        result = claim1_construct(k, n)
        assert is_p_free(result.subset, k_poset())

    def test_blocks_are_antichains_within_levels(self):
        result = claim1_construct(16, 2)
        for b in result.blocks:
            assert b.count >= 1
            assert b.count <= b.level_size


class TestClaim2:
    def test_k3_n2_structure(self):
        rep = claim2_blocks(3, 2)
        assert rep.qminus_max_sum == 4
        assert rep.s == 2
        assert len(rep.blocks) == 2
        b0, b1 = rep.blocks
        assert b0.empty and b0.clipped and b0.size == 0
        assert not b1.empty and (b1.level_lo, b1.level_hi) == (0, 1)
        assert b1.size == 3
        assert rep.uncovered_sums == (4, 4)

    def test_block_sizes_sum_within_covered_range(self):
        for k, n in [(4, 2), (8, 2), (8, 3), (16, 2)]:
            rep = claim2_blocks(k, n)
            sizes = level_profile(GridShape.uniform(k, n)).sizes
            covered = sum(sizes[lev] for lev in range(0, (1 << rep.s) - n)
                          if 0 <= lev <= rep.qminus_max_sum - n)
            assert sum(b.size for b in rep.blocks) == covered

    def test_masses_additive_on_full_lower_half(self):
        k, n = 4, 2
        shape = GridShape.uniform(k, n)
        ranks = ranks_of(shape)
        rep0 = claim2_blocks(k, n)
        qmax = rep0.qminus_max_sum
        lower = Subset.from_indices(shape, [i for i in range(shape.size)
                                            if ranks[i] + n <= qmax])
        rep = claim2_blocks(k, n, lower)
        sizes = level_profile(shape).sizes
        expected = Fraction(0)
        for b in rep.blocks:
            if not b.empty:
                expected += sum((Fraction(sizes[lev], sizes[lev])
                                 for lev in range(b.level_lo, b.level_hi + 1)), Fraction(0))
        got = sum((b.mass for b in rep.blocks if b.mass is not None), Fraction(0))
        assert got == expected

    def test_inequalities_hold(self):
        for k, n in [(4, 2), (8, 2), (16, 2), (4, 3), (8, 3), (16, 3)]:
            rep = claim2_blocks(k, n)
            for b in rep.blocks:
                if not b.clipped and not b.empty:
                    assert b.bottom_bound_ok and b.top_bound_ok

    def test_subset_shape_mismatch(self):
        wrong = Subset(GridShape.uniform(2, 2), 1)
        with pytest.raises(DomainError):
            claim2_blocks(3, 2, wrong)

    def test_domain(self):
        with pytest.raises(DomainError):
            claim2_blocks(1, 2)


class TestConjectureRatio:
    def test_maximal_chain_ratio(self):
        rr = conjecture_ratio(antichain_poset(2), 4, 2, maximal_chain_k2(4))
        assert rr.mass == Fraction(47, 12)
        assert rr.ratio == Fraction(47, 24)
        assert rr.exact

    def test_claim1_ratio(self):
        rr = conjecture_ratio(k_poset(), 8, 2, claim1_construct(8, 2).subset)
        assert rr.mass == Fraction(3, 2)
        assert rr.ratio == Fraction(1, 2)

    def test_empty_subset(self):
        rr = conjecture_ratio(k_poset(), 4, 2, Subset(GridShape.uniform(4, 2), 0))
        assert rr.ratio == 0

    def test_not_p_free(self):
        with pytest.raises(NotPFree):
            conjecture_ratio(chain_poset(2), 4, 2, maximal_chain_k2(4))

    def test_non_power_of_two_flagged(self):
        rr = conjecture_ratio(antichain_poset(2), 3, 2, maximal_chain_k2(3))
        assert not rr.exact
        assert isinstance(rr.ratio, float)


def test_mass_report_text():
    s = Subset.from_points(GridShape.uniform(2, 2), [(1, 1), (1, 2), (2, 2)])
    text = mass_report_to_text(lubell_mass(s))
    lines = text.splitlines()
    assert lines[0] == "level\tcount\tlevel_size\tmass"
    assert lines[1] == "0\t1\t1\t1/1"
    assert lines[-1] == "total\t\t\t5/2"
