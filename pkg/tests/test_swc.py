import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from itertools import combinations

from gapless_mec.core import cost_fixed, labels_to_mask, mask_to_labels, standard_order
from gapless_mec.generator import GenSpec, generate
from gapless_mec.oracle import exact_bipartition
from gapless_mec.swc import (
    NotApplicable,
    Precision,
    Selection,
    SmallCaseError,
    build_subdivision,
    build_trisection,
    generalized_majority,
    generalized_vote,
    r_grid,
    runtime_subdivision,
    solve_swc,
    split_range,
    swc,
    swc_with_reassignment,
    upper_bias,
    weighted_majority,
    weighted_vote,
)

from conftest import FORCED, fm


def ref_count(rng_, labels, side):
    return sum(1 for i in rng_ if labels[i] == side)


class TestTrisection:
    def test_eight_reference_rows(self):
        labels = "A" * 8 + "B" * 4
        t = build_trisection(12, labels, "A", 0.5)
        assert ref_count(t.U, labels, "A") == 4
        assert ref_count(t.L, labels, "A") == 2
        assert ref_count(t.X, labels, "A") == 2

    def test_all_rows_one_side(self):
        t = build_trisection(4, "AAAA", "A", 0.5)
        assert (len(t.U), len(t.L), len(t.X)) == (2, 1, 1)

    def test_interleaved_rows(self):
        labels = "ABABABABAB"
        t = build_trisection(10, labels, "A", 0.5)
        # 5 A rows: U gets floor(2.5)=2, L gets ceil(1.25)=2
        assert ref_count(t.U, labels, "A") == 2 and ref_count(t.L, labels, "A") == 2
        assert labels[t.L.start] == "A" and labels[t.X.start] == "A"
        assert t.X.start == 8

    def test_too_few_rows(self):
        with pytest.raises(SmallCaseError):
            build_trisection(3, "ABB", "A", 0.5)

    @settings(max_examples=100, deadline=None)
    @given(st.text("AB", min_size=4, max_size=30), st.sampled_from(["A", "B"]),
           st.integers(1, 5))
    def test_invariants(self, labels, side, k):
        r = labels.count(side)
        try:
            sub = build_subdivision(len(labels), labels, side, 0.5, k)
        except SmallCaseError:
            assert r // 2 < 1 or r < 2
            return
        t = sub.trisection
        assert t.U.start == 0 and t.U.stop == t.L.start and t.L.stop == t.X.start
        assert t.X.stop == len(labels)
        assert labels[t.L.start] == side
        assert len(t.X) == 0 or labels[t.X.start] == side
        for part, chunks in ((t.U, sub.u_chunks), (t.L, sub.l_chunks)):
            assert chunks[0].start == part.start and chunks[-1].stop == part.stop
            counts = [ref_count(c, labels, side) for c in chunks]
            assert max(counts) - min(counts) <= 1
            assert all(labels[c.start] == side for c in chunks[1:])


def test_split_range_balanced():
    chunks = split_range(range(0, 10), list(range(10)), 3)
    assert [len(c) for c in chunks] == [4, 3, 3]


class TestVotes:
    def test_bias_at_half(self):
        assert upper_bias(0.5) == 2.0
        assert Precision().bias == 2.0

    def test_weighted_examples(self):
        M = fm("1", "0", "0", "0", "1")
        assert weighted_majority(M, 1, [0, 1], [2, 3], 0.5) == 0
        assert weighted_majority(M, 1, [], [], 0.5) == 1
        assert weighted_majority(M, 1, [0], [1], 0.5) == 1

    def test_wildcards_do_not_vote(self):
        M = fm("1-", "00", "-1")
        # column 1: U row 0 says 1 (x2), L rows say 0 once -> 1
        assert weighted_vote(M.signed[[0]], M.signed[[1, 2]], 0.5).tolist() == [1, 1]

    def test_generalized_examples(self):
        assert generalized_majority([(4, [1, 1])]) == 1
        assert generalized_majority([(9, [-1]), (1, [1, 1, 1])]) == 0
        assert generalized_majority([(3, [0, 0])]) == 1

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10 ** 6))
    def test_permutation_invariance(self, seed):
        rng = np.random.default_rng(seed)
        U = rng.integers(-1, 2, size=(6, 5))
        L = rng.integers(-1, 2, size=(4, 5))
        base = weighted_vote(U, L, 0.5)
        assert (weighted_vote(U[rng.permutation(6)], L[rng.permutation(4)], 0.5) == base).all()

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10 ** 6))
    def test_equal_weights_is_plain_sign(self, seed):
        rng = np.random.default_rng(seed)
        parts = [rng.integers(-1, 2, size=(3, 4)) for _ in range(3)]
        got = generalized_vote([(5, p) for p in parts], 4)
        plain = (np.vstack(parts).sum(axis=0) >= 0).astype(np.int8)
        assert (got == plain).all()


class TestSwc:
    def test_noise_free_split(self):
        M = fm(*(["0000"] * 6 + ["1111"] * 6))
        labels = "A" * 6 + "B" * 6
        sub_a = build_subdivision(12, labels, "A", 0.5, 2)
        sub_b = build_subdivision(12, labels, "B", 0.5, 2)
        sol = swc(M, sub_a, sub_b, 6, 6, Precision(small_r_cutoff=-1, rows_per_chunk=2))
        assert (sol.sigma, sol.sigma_prime, sol.cost) == ("0000", "1111", 0)

    def test_overlapping_selections_rejected(self):
        M = fm(*(["00"] * 8))
        sub = runtime_subdivision(8, "A", Precision())
        sel = Selection(((0,),), ((4,),))
        with pytest.raises(ValueError):
            swc(M, sub, sub, 4, 4, Precision(), selections=(sel, sel))

    def test_r_must_sum_to_n(self):
        M = fm(*(["00"] * 8))
        sub = runtime_subdivision(8, "A", Precision())
        with pytest.raises(ValueError):
            swc(M, sub, sub, 4, 3)

    def test_small_r_delegates(self):
        M = fm(*(["00"] * 8))
        sub = runtime_subdivision(8, "A", Precision())
        with pytest.raises(SmallCaseError):
            swc(M, sub, sub, 4, 4, Precision())

    def test_rank_assignment_is_optimal_for_its_strings(self, rng):
        M, _ = generate(GenSpec(10, 6, 0.15, "binary", seed=4))
        sub_a = runtime_subdivision(10, "A", Precision())
        sub_b = runtime_subdivision(10, "B", Precision())
        sel_a = Selection(((0, 1),), ((5,),))
        sel_b = Selection(((2, 3),), ((6,),))
        for r in range(1, 10):
            sol = swc(M, sub_a, sub_b, r, 10 - r, Precision(), selections=(sel_a, sel_b))
            assert sol.assignment.count("A") == r
            best = min(cost_fixed(M, sol.sigma, sol.sigma_prime,
                                  mask_to_labels(np.isin(np.arange(10), c)))
                       for c in combinations(range(10), r))
            assert sol.cost == best

    @pytest.mark.parametrize("n", [12, 14])
    def test_reference_subdivisions_ratio(self, n):
        precision = Precision(small_r_cutoff=-1)
        for seed in range(30):
            M, _ = generate(GenSpec(n, 8, 0.1, "binary", seed=seed))
            opt = exact_bipartition(M)
            r = opt.assignment.count("A")
            sub_a = build_subdivision(n, opt.assignment, "A", 0.5, precision.chunks_per_range)
            sub_b = build_subdivision(n, opt.assignment, "B", 0.5, precision.chunks_per_range)
            sol = swc_with_reassignment(M, sub_a, sub_b, r, n - r, precision,
                                        rng=np.random.default_rng(seed))
            assert opt.cost <= sol.cost <= 1.5 * opt.cost

    def test_reassignment_with_empty_tail_is_plain_swc(self):
        M, _ = generate(GenSpec(12, 6, 0.1, "binary", seed=1))
        labels = "AB" * 6
        sub_a = build_subdivision(12, labels, "A", 0.5, 2)
        sub_b = build_subdivision(12, labels, "B", 0.5, 2)
        p = Precision(small_r_cutoff=-1, rows_per_chunk=2, selection_trials=20)
        a = swc(M, sub_a, sub_b, 6, 6, p, rng=np.random.default_rng(0))
        b = swc_with_reassignment(M, sub_a, sub_b, 6, 6, p, rng=np.random.default_rng(0))
        assert b.cost <= a.cost


class TestSolveSwc:
    def test_rejects_non_swc(self):
        with pytest.raises(NotApplicable):
            solve_swc(fm("-1", "11"))

    def test_deterministic(self):
        M, _ = generate(GenSpec(12, 8, 0.1, "swc", seed=3))
        a = solve_swc(M, FORCED, seed=5)
        b = solve_swc(M, FORCED, seed=5)
        assert a == b and a.assignment == b.assignment

    @pytest.mark.parametrize("seed", range(5))
    def test_never_below_opt(self, seed):
        M, _ = generate(GenSpec(10, 8, 0.1, "swc", seed=seed))
        sol = solve_swc(M, FORCED, seed)
        assert sol.cost >= exact_bipartition(M).cost
        assert cost_fixed(M, sol.sigma, sol.sigma_prime, sol.assignment) == sol.cost

    def test_r_grid(self):
        assert r_grid(5, 0.5) == [0, 1, 2, 3, 4, 5]
        g = r_grid(100, 0.5)
        assert g[0] == 0 and g[-1] == 100 and 1 in g and 99 in g
