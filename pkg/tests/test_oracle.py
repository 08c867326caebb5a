import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gapless_mec.oracle import (
    BudgetExceeded,
    OracleBudget,
    all_strings,
    exact_bipartition,
    exact_fixed_count,
    exact_strings,
)

from conftest import fm, random_matrix


def test_all_zero_matrix():
    sol = exact_bipartition(fm("000", "000", "000"))
    assert sol.cost == 0
    assert (sol.sigma, sol.sigma_prime, sol.assignment) == ("000", "000", "AAB")


def test_four_rows_three_columns():
    M = fm("000", "001", "110", "111")
    assert exact_bipartition(M).cost == 2
    assert exact_strings(M).cost == 2


def test_cost_one_instance():
    sol = exact_bipartition(fm("010", "010", "101", "100"))
    assert sol.cost == 1 and sol.assignment == "AABB"


def test_strings_small_cases():
    assert exact_strings(fm("1")).cost == 0
    sol = exact_strings(fm("0", "1"))
    assert (sol.cost, sol.sigma, sol.sigma_prime) == (0, "0", "1")


def test_fixed_count_examples():
    assert exact_fixed_count(fm("0", "1"), 1).cost == 0
    assert exact_fixed_count(fm("0", "0", "1"), 3).cost == 1
    assert exact_fixed_count(fm("010", "010", "101", "100"), 2).cost == 1


def test_fixed_count_range():
    with pytest.raises(ValueError):
        exact_fixed_count(fm("0", "1"), 3)


def test_budgets():
    with pytest.raises(BudgetExceeded):
        exact_bipartition(fm(*["0"] * 4), OracleBudget(max_rows_for_bipartition=3))
    with pytest.raises(BudgetExceeded):
        exact_strings(fm("0000"), OracleBudget(max_cols_for_strings=3))
    with pytest.raises(ValueError):
        OracleBudget(0, 1)


def test_all_strings_order():
    assert all_strings(2).tolist() == [[-1, -1], [-1, 1], [1, -1], [1, 1]]


def test_row_one_fixed_to_a():
    assert exact_bipartition(fm("1", "0", "0")).assignment[0] == "A"


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_fixed_count_bounds(seed):
    M = random_matrix(np.random.default_rng(seed), 7, 5)
    best = exact_bipartition(M).cost
    per_r = [exact_fixed_count(M, r).cost for r in range(M.n + 1)]
    assert min(per_r) == best
    assert all(c >= best for c in per_r)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_reported_cost_is_consistent(seed):
    from gapless_mec.core import cost_fixed
    M = random_matrix(np.random.default_rng(seed), 6, 4)
    for sol in (exact_bipartition(M), exact_strings(M)):
        assert cost_fixed(M, sol.sigma, sol.sigma_prime, sol.assignment) == sol.cost
