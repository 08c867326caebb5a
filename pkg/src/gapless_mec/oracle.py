"""Exact brute-force solvers used as ground truth."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import kernels
from .core import FragmentMatrix, SolutionPair, cost, mask_to_labels, signs_to_bits


class BudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    max_rows_for_bipartition: int = 20
    max_cols_for_strings: int = 10

    def __post_init__(self):
        if self.max_rows_for_bipartition < 1 or self.max_cols_for_strings < 1:
            raise ValueError("oracle budgets must be positive")


DEFAULT_BUDGET = OracleBudget()


def _mask_bits(masks: np.ndarray, n: int) -> np.ndarray:
    return ((masks[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)


def best_of_masks(M: FragmentMatrix, masks: np.ndarray) -> SolutionPair:
    """Minimum-cost bipartition among ``masks`` with majority-completed strings.

    Ties are broken by the lexicographically smallest (sigma, sigma', labels).
    """
    masks = np.asarray(masks, dtype=np.int64)
    zeros = np.zeros(M.n, dtype=np.int64)
    costs = kernels.partition_costs(M.signed, masks, zeros, zeros)
    best = int(costs.min())
    tied = masks[costs == best]
    bits = _mask_bits(tied, M.n)
    S = M.signed.astype(np.int64)
    sum_a = bits.astype(np.int64) @ S
    sum_b = S.sum(axis=0) - sum_a
    sig = (sum_a >= 0).astype(np.int8)
    sig_p = (sum_b >= 0).astype(np.int8)
    # labels compare with 'A' < 'B', i.e. a set bit sorts first
    keys = [(~bits[:, i]).astype(np.int8) for i in range(M.n - 1, -1, -1)]
    keys += [sig_p[:, j] for j in range(M.m - 1, -1, -1)]
    keys += [sig[:, j] for j in range(M.m - 1, -1, -1)]
    k = int(np.lexsort(keys)[0])
    return SolutionPair(
        signs_to_bits(2 * sig[k] - 1),
        signs_to_bits(2 * sig_p[k] - 1),
        mask_to_labels(bits[k]),
        best,
    )


def exact_bipartition(M: FragmentMatrix, budget: OracleBudget = DEFAULT_BUDGET) -> SolutionPair:
    """Enumerate all bipartitions with row 1 fixed to A."""
    if M.n > budget.max_rows_for_bipartition:
        raise BudgetExceeded(f"n={M.n} exceeds bipartition budget {budget.max_rows_for_bipartition}")
    masks = 1 | (np.arange(1 << (M.n - 1), dtype=np.int64) << 1)
    return best_of_masks(M, masks)


def exact_fixed_count(M: FragmentMatrix, r: int,
                      budget: OracleBudget = DEFAULT_BUDGET) -> SolutionPair:
    """Best solution among bipartitions with exactly ``r`` rows labelled A."""
    if not 0 <= r <= M.n:
        raise ValueError(f"r={r} outside 0..{M.n}")
    if M.n > budget.max_rows_for_bipartition:
        raise BudgetExceeded(f"n={M.n} exceeds bipartition budget {budget.max_rows_for_bipartition}")
    weights = 1 << np.arange(M.n, dtype=np.int64)
    masks = np.fromiter((weights[list(c)].sum() for c in combinations(range(M.n), r)),
                        dtype=np.int64)
    return best_of_masks(M, masks)


def all_strings(m: int) -> np.ndarray:
    """All 2^m binary strings as rows of +-1 signs, column 1 most significant."""
    codes = np.arange(1 << m, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(m - 1, -1, -1, dtype=np.int64)) & 1
    return 2 * bits - 1


def exact_strings(M: FragmentMatrix, budget: OracleBudget = DEFAULT_BUDGET) -> SolutionPair:
    """Search all ordered pairs sigma <= sigma' directly."""
    if M.m > budget.max_cols_for_strings:
        raise BudgetExceeded(f"m={M.m} exceeds string budget {budget.max_cols_for_strings}")
    signs = all_strings(M.m)
    S = M.signed.astype(np.int64)
    nnz = np.abs(S).sum(axis=1)
    D = (nnz[:, None] - S @ signs.T) // 2
    pc = kernels.pair_cost_matrix(D)
    pc = np.where(pc < 0, np.iinfo(np.int64).max, pc)
    s, t = np.unravel_index(int(np.argmin(pc)), pc.shape)
    sigma, sigma_prime = signs_to_bits(signs[s]), signs_to_bits(signs[t])
    c, labels = cost(M, sigma, sigma_prime)
    return SolutionPair(sigma, sigma_prime, labels, c)
