import math

import pytest

from gridposet.chains import corollary_window
from gridposet.errors import BudgetExceeded, DomainError
from gridposet.extremal import (certificate_from_doc, certificate_to_doc,
                                erdos_bound, is_p_free, load_certificate,
                                max_l_chain_free, max_p_free, pipeline_bound,
                                save_certificate, verify_certificate)
from gridposet.grid import GridShape, Subset, level_profile, width_grid
from gridposet.poset import (antichain_poset, chain_poset, k_poset,
                             make_poset, v_poset)
from oracles import brute_l_chain_free, brute_max_p_free, canonical_shapes

S32 = GridShape.uniform(3, 2)


class TestIsPFree:
    def test_antichain_has_no_two_chain(self):
        s = Subset.from_points(S32, [(1, 3), (2, 2), (3, 1)])
        assert is_p_free(s, chain_poset(2))

    def test_full_2x2_is_k_free(self):
        assert is_p_free(Subset.full(GridShape.uniform(2, 2)), k_poset())

    def test_full_3x3_contains_k(self):
        assert not is_p_free(Subset.full(S32), k_poset())

    def test_empty_subset(self):
        assert is_p_free(Subset(S32, 0), k_poset())


class TestMaxPFree:
    def test_two_antichain_gives_longest_chain(self):
        value, witness = max_p_free(S32, antichain_poset(2))
        assert value == brute_max_p_free(S32, antichain_poset(2)) == 5
        assert is_p_free(witness, antichain_poset(2))

    def test_two_chain_gives_width(self):
        value, _ = max_p_free(S32, chain_poset(2))
        assert value == width_grid(S32) == 3

    def test_k_on_2x2_whole_grid(self):
        value, witness = max_p_free(GridShape.uniform(2, 2), k_poset())
        assert value == 4
        assert witness == Subset.full(GridShape.uniform(2, 2))

    @pytest.mark.parametrize("poset", [k_poset(), v_poset(), antichain_poset(2),
                                       chain_poset(2), chain_poset(3)])
    @pytest.mark.parametrize("sides", [(2, 2), (3, 2), (2, 2, 2), (4, 3)])
    def test_matches_exhaustive_small(self, sides, poset):
        shape = GridShape(sides)
        value, witness = max_p_free(shape, poset)
        assert value == brute_max_p_free(shape, poset)
        assert is_p_free(witness, poset) and len(witness) == value

    def test_milp_engine_agrees_with_branch_bound(self, monkeypatch):
        # force both engines onto the same 24-point instance
        import gridposet.extremal as ex
        shape = GridShape((4, 3, 2))
        poset = chain_poset(3)
        ex._MAX_FREE_MEMO.clear()
        v_milp, w_milp = max_p_free(shape, poset)     # 24 > 20: MILP
        ex._MAX_FREE_MEMO.clear()
        monkeypatch.setattr(ex, "BRANCH_AND_BOUND_POINTS", 24)
        v_bb, w_bb = max_p_free(shape, poset)
        ex._MAX_FREE_MEMO.clear()
        assert (v_milp, w_milp) == (v_bb, w_bb)

    def test_chain_values_match_level_formula(self):
        # MILP route versus the independent level-sum formula
        shape = GridShape.uniform(2, 5)
        for l in (2, 3, 4):
            value, _ = max_p_free(shape, chain_poset(l))
            assert value == max_l_chain_free(shape, l)

    def test_witness_deterministic_and_maximal(self):
        shape = GridShape.uniform(2, 4)
        v1, w1 = max_p_free(shape, k_poset())
        v2, w2 = max_p_free(shape, k_poset())
        assert (v1, w1) == (v2, w2)
        for idx in range(shape.size):
            if idx not in w1:
                bigger = Subset(shape, w1.mask | (1 << idx))
                assert not is_p_free(bigger, k_poset())

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            max_p_free(GridShape.uniform(3, 4), k_poset(), max_points=64)

    def test_single_element_pattern(self):
        value, witness = max_p_free(GridShape.uniform(2, 2), make_poset(1, []))
        assert value == 0 and len(witness) == 0


class TestLChainFree:
    def test_l2_is_width(self):
        assert max_l_chain_free(S32, 2) == 3

    def test_l3_two_levels(self):
        assert max_l_chain_free(S32, 3) == 5
        assert erdos_bound(S32, 3) == 6
        assert max_l_chain_free(S32, 3) <= erdos_bound(S32, 3)

    def test_l_beyond_longest_chain(self):
        shape = GridShape((2, 3))
        N = shape.num_levels
        assert max_l_chain_free(shape, N + 2) == shape.size

    def test_domain(self):
        with pytest.raises(DomainError):
            max_l_chain_free(S32, 1)
        with pytest.raises(DomainError):
            erdos_bound(S32, 0)

    def test_against_brute_force_tiny(self):
        for sides in [(2, 2), (3, 2), (2, 2, 2), (4, 3)]:
            shape = GridShape(sides)
            for l in (2, 3, 4):
                assert max_l_chain_free(shape, l) == brute_l_chain_free(shape, l)


class TestPipeline:
    def test_3x3_two_antichain_single_block(self):
        cert = pipeline_bound(S32, antichain_poset(2))
        assert cert.dim == 2
        assert len(cert.blocks) == 1
        assert cert.total == 5
        assert cert.total >= max_p_free(S32, antichain_poset(2))[0]

    def test_2_to_4_with_k(self):
        cert = pipeline_bound(GridShape.uniform(2, 4), k_poset())
        assert cert.total == 16
        assert len(cert.blocks) == 9
        assert verify_certificate(cert).ok

    def test_k_equals_one_short_circuit(self):
        cert = pipeline_bound(GridShape.uniform(1, 3), k_poset())
        assert cert.total == 1

    def test_dimension_hypothesis(self):
        with pytest.raises(DomainError):
            pipeline_bound(GridShape.uniform(3, 1), k_poset())

    def test_non_uniform_rejected(self):
        with pytest.raises(DomainError):
            pipeline_bound(GridShape((2, 3)), k_poset())

    def test_pattern_cap_mode(self):
        cert = pipeline_bound(GridShape.uniform(2, 4), k_poset(),
                              cap_mode="pattern-cap", c_p=3)
        # caps are min(block size, c_p * max_side^(d-1))
        for b in cert.blocks:
            size = math.prod(b.sizes)
            assert b.cap == min(size, 3 * max(b.sizes) ** (cert.dim - 1))
        assert verify_certificate(cert).ok

    def test_pattern_cap_needs_constant(self):
        with pytest.raises(DomainError):
            pipeline_bound(GridShape.uniform(2, 4), k_poset(), cap_mode="pattern-cap")

    def test_sandwich_small(self):
        for sides, poset in [((2, 2, 2, 2), k_poset()), ((3, 3), v_poset()),
                             ((2, 2, 2, 2), chain_poset(3)), ((3, 3), chain_poset(2))]:
            shape = GridShape(sides)
            exact = max_p_free(shape, poset)[0]
            cert = pipeline_bound(shape, poset)
            assert exact <= cert.total
            assert verify_certificate(cert).ok

    def test_blocks_partition(self):
        cert = pipeline_bound(GridShape.uniform(3, 3), k_poset())
        assert sum(math.prod(b.sizes) for b in cert.blocks) == 27


class TestCertificates:
    def test_doc_roundtrip(self):
        cert = pipeline_bound(GridShape.uniform(2, 4), k_poset())
        assert certificate_from_doc(certificate_to_doc(cert)) == cert

    def test_file_roundtrip_and_reverify(self, tmp_path):
        cert = pipeline_bound(GridShape.uniform(2, 4), v_poset())
        path = tmp_path / "cert.json"
        save_certificate(path, cert)
        loaded = load_certificate(path)
        assert loaded == cert
        assert verify_certificate(loaded).ok

    def test_tampered_total_detected(self, tmp_path):
        import dataclasses
        cert = pipeline_bound(GridShape.uniform(2, 4), k_poset())
        bad = dataclasses.replace(cert, total=cert.total + 1)
        report = verify_certificate(bad)
        assert not report.ok and not report.total_ok

    def test_tampered_partition_detected(self):
        import dataclasses
        cert = pipeline_bound(GridShape.uniform(2, 4), k_poset())
        f0 = cert.factors[0]
        bad_f0 = dataclasses.replace(f0, chains=f0.chains[:-1])
        bad = dataclasses.replace(cert, factors=(bad_f0,) + cert.factors[1:])
        report = verify_certificate(bad)
        assert not report.ok


def test_windows_match_pipeline_factors():
    cert = pipeline_bound(GridShape.uniform(2, 6), chain_poset(2))
    for f in cert.factors:
        assert (f.low, f.high) == corollary_window(GridShape(f.sides))
