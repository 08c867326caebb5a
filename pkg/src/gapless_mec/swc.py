"""Sampling-based solver for instances whose rows all cross column 1.

Rows are split into an upper range U, a lower range L and an ignored tail X
(a trisection), U and L are cut into chunks, a few rows are sampled per chunk
and each column is decided by a biased vote in which sparse U samples are
scaled up against dense L samples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement, product
from typing import Sequence

import numpy as np

from .core import (
    FragmentMatrix,
    SolutionPair,
    cost_fixed,
    default_solution,
    mask_to_labels,
    permute_back,
    row_distances,
    signs_to_bits,
    standard_order,
)
from .oracle import DEFAULT_BUDGET, exact_fixed_count


class SmallCaseError(ValueError):
    """Too few rows on one side; solve that case exactly instead."""


class NotApplicable(ValueError):
    """The instance does not satisfy the solver's structural precondition."""


@dataclass(frozen=True)
class Precision:
    eps: float = 0.5
    chunks_per_range: int | None = None
    rows_per_chunk: int | None = None
    selection_trials: int = 200
    exhaustive_limit: int = 256
    small_r_cutoff: int | None = None
    # controls for the layered programs
    dp_samples: int = 3
    beam_width: int = 24
    center_candidates: int = 4
    chunk_multiplier: int = 1
    max_interval_width: int = 64
    exact_completion_rows: int = 12

    def __post_init__(self):
        if not 0 < self.eps <= 0.5:
            raise ValueError("eps must lie in (0, 1/2]")
        if self.chunks_per_range is None:
            object.__setattr__(self, "chunks_per_range", max(1, round(1 / self.eps ** 2)))
        if self.rows_per_chunk is None:
            object.__setattr__(self, "rows_per_chunk", max(1, round(1 / self.eps ** 3)))
        if self.small_r_cutoff is None:
            object.__setattr__(self, "small_r_cutoff",
                               max(4, self.chunks_per_range * self.rows_per_chunk))
        if min(self.chunks_per_range, self.rows_per_chunk, self.selection_trials) < 1:
            raise ValueError("chunk, sample and trial counts must be >= 1")

    @property
    def frac_eps(self) -> Fraction:
        return Fraction(self.eps).limit_denominator(10 ** 6)

    @property
    def bias(self) -> float:
        return upper_bias(self.eps)


@lru_cache(maxsize=None)
def upper_bias(eps: float) -> float:
    e = Fraction(eps).limit_denominator(10 ** 6)
    return float((1 - e) / (e - e * e))


# --- trisections and chunks -----------------------------------------------

@dataclass(frozen=True)
class Trisection:
    U: range
    L: range
    X: range
    side: str = "A"


@dataclass(frozen=True)
class Subdivision:
    trisection: Trisection
    u_chunks: tuple[range, ...]
    l_chunks: tuple[range, ...]

    @property
    def chunks(self) -> tuple[range, ...]:
        return self.u_chunks + self.l_chunks


@dataclass(frozen=True)
class Selection:
    u: tuple[tuple[int, ...], ...]
    l: tuple[tuple[int, ...], ...]

    def rows(self) -> set[int]:
        return {i for part in self.u + self.l for i in part}

    @property
    def u_rows(self) -> list[int]:
        return [i for part in self.u for i in part]

    @property
    def l_rows(self) -> list[int]:
        return [i for part in self.l for i in part]


def _ref_positions(reference: str | Sequence[bool], side: str) -> list[int]:
    if isinstance(reference, str):
        return [i for i, lab in enumerate(reference) if lab == side]
    return [i for i, flag in enumerate(reference) if flag]


def build_trisection(n: int, reference: str | Sequence[bool], side: str,
                     eps: float) -> Trisection:
    """Consecutive ranges U, L, X counted against the rows labelled ``side``.

    U starts at row 0 and holds floor((1-eps) r) reference rows; L starts at the
    next reference row and holds ceil((eps-eps^2) r) of them; X is the rest and
    begins with a reference row when non-empty.
    """
    pos = _ref_positions(reference, side)
    r = len(pos)
    e = Fraction(eps).limit_denominator(10 ** 6)
    u = math.floor((1 - e) * r)
    l = min(math.ceil((e - e * e) * r), r - u)
    if u < 1 or l < 1:
        raise SmallCaseError(f"{r} reference rows on side {side} cannot form U and L")
    l_start = pos[u]
    x_start = pos[u + l] if u + l < r else n
    return Trisection(range(0, l_start), range(l_start, x_start), range(x_start, n), side)


def split_range(rng_: range, ref_pos: Sequence[int], k: int) -> tuple[range, ...]:
    """Cut ``rng_`` into at most ``k`` chunks with balanced reference counts.

    Every chunk but the first starts at a reference row.
    """
    inside = [p for p in ref_pos if rng_.start <= p < rng_.stop]
    if not inside:
        return (rng_,) if len(rng_) else ()
    k = min(k, len(inside))
    q, extra = divmod(len(inside), k)
    starts, idx = [], 0
    for t in range(k):
        starts.append(inside[idx])
        idx += q + (1 if t < extra else 0)
    starts[0] = rng_.start
    bounds = starts + [rng_.stop]
    return tuple(range(bounds[t], bounds[t + 1]) for t in range(k))


def build_subdivision(n: int, reference: str | Sequence[bool], side: str, eps: float,
                      chunks: int) -> Subdivision:
    tri = build_trisection(n, reference, side, eps)
    pos = _ref_positions(reference, side)
    return Subdivision(tri, split_range(tri.U, pos, chunks), split_range(tri.L, pos, chunks))


def runtime_subdivision(n: int, side: str, precision: Precision) -> Subdivision:
    """Subdivision quantised over all rows, used when no reference is known."""
    return build_subdivision(n, [True] * n, side, precision.eps, precision.chunks_per_range)


# --- voting ----------------------------------------------------------------

def weighted_vote(u_vals: np.ndarray, l_vals: np.ndarray, eps: float) -> np.ndarray:
    """Column-wise biased majority over signed entries (+1 one, -1 zero, 0 wildcard).

    Returns a 0/1 vector; a non-negative total gives 1.
    """
    u = np.asarray(u_vals, dtype=np.float64).reshape(-1, np.shape(u_vals)[-1])
    l = np.asarray(l_vals, dtype=np.float64).reshape(-1, np.shape(l_vals)[-1])
    nu = upper_bias(eps) * u.sum(axis=0) + l.sum(axis=0)
    return (nu >= 0).astype(np.int8)


def weighted_majority(M: FragmentMatrix, col: int, u_rows: Sequence[int],
                      l_rows: Sequence[int], eps: float) -> int:
    """Biased vote for one (1-based) column over selected row multisets."""
    S = M.signed
    j = col - 1
    return int(weighted_vote(S[list(u_rows), j:j + 1], S[list(l_rows), j:j + 1], eps)[0])


def generalized_vote(chunks: Sequence[tuple[float, np.ndarray]], width: int) -> np.ndarray:
    """Each chunk is ``(r_c, signed entries of its selected rows)``; weight by r_c."""
    rho = np.zeros(width, dtype=np.float64)
    for weight, vals in chunks:
        vals = np.asarray(vals, dtype=np.float64).reshape(-1, width)
        rho += weight * vals.sum(axis=0)
    return (rho >= 0).astype(np.int8)


def generalized_majority(col_entries: Sequence[tuple[float, Sequence[int]]]) -> int:
    """Single-column generalized majority from ``(r_c, selected entries)`` pairs."""
    chunks = [(w, np.asarray(list(v), dtype=np.float64).reshape(-1, 1)) for w, v in col_entries]
    return int(generalized_vote(chunks, 1)[0])


# --- the algorithm ---------------------------------------------------------

def _vote_strings(S: np.ndarray, sel: Selection, eps: float) -> np.ndarray:
    return weighted_vote(S[sel.u_rows], S[sel.l_rows], eps)


def assign_by_rank(S: np.ndarray, sigma: np.ndarray, sigma_prime: np.ndarray, r: int) -> np.ndarray:
    """The r rows with smallest dist(sigma) - dist(sigma') go to A (ties by row index)."""
    d = row_distances(S, sigma) - row_distances(S, sigma_prime)
    order = np.argsort(d, kind="stable")
    mask = np.zeros(S.shape[0], dtype=bool)
    mask[order[:r]] = True
    return mask


def _one_pass(M: FragmentMatrix, sel_a: Selection, sel_b: Selection, r: int,
              eps: float) -> SolutionPair:
    S = M.signed
    sig = _vote_strings(S, sel_a, eps)
    sig_p = _vote_strings(S, sel_b, eps)
    mask = assign_by_rank(S, sig, sig_p, r)
    sigma, sigma_prime = signs_to_bits(2 * sig - 1), signs_to_bits(2 * sig_p - 1)
    labels = mask_to_labels(mask)
    return SolutionPair(sigma, sigma_prime, labels, cost_fixed(M, sigma, sigma_prime, labels))


def selection_space_size(sub_a: Subdivision, sub_b: Subdivision, per_chunk: int) -> int:
    total = 1
    for ch in sub_a.chunks + sub_b.chunks:
        total *= math.comb(len(ch) + per_chunk - 1, per_chunk)
    return total


def sample_selection(sub: Subdivision, per_chunk: int, rng: np.random.Generator,
                     exclude: set[int] = frozenset(),
                     prefer: set[int] | None = None, single: bool = False) -> Selection:
    """Draw ``per_chunk`` rows with repetition from every chunk.

    Rows in ``exclude`` are never drawn.  When ``prefer`` meets a chunk the
    draw is restricted to that intersection.  With ``single`` one row is drawn
    per chunk and repeated.
    """
    def draw(ch: range) -> tuple[int, ...]:
        pool = [i for i in ch if i not in exclude]
        if prefer is not None:
            pool = [i for i in pool if i in prefer] or pool
        if not pool:
            return ()
        if single:
            return (int(rng.choice(pool)),) * per_chunk
        return tuple(sorted(int(i) for i in rng.choice(pool, size=per_chunk, replace=True)))
    return Selection(tuple(draw(c) for c in sub.u_chunks), tuple(draw(c) for c in sub.l_chunks))


def _enumerate_selections(sub: Subdivision, per_chunk: int):
    parts = [list(combinations_with_replacement(list(ch), per_chunk)) for ch in sub.chunks]
    k = len(sub.u_chunks)
    for combo in product(*parts):
        yield Selection(tuple(combo[:k]), tuple(combo[k:]))


def swc(M: FragmentMatrix, sub_a: Subdivision, sub_b: Subdivision, r: int, r_prime: int,
        precision: Precision = Precision(), selections: tuple[Selection, Selection] | None = None,
        rng: np.random.Generator | None = None) -> SolutionPair:
    """Vote both strings from row samples and assign the r best-fitting rows to A.

    With ``selections`` fixed this is a single pass; otherwise selections are
    enumerated (small spaces) or drawn at random and the cheapest outcome kept.
    """
    if r + r_prime != M.n:
        raise ValueError(f"r + r' = {r + r_prime} != n = {M.n}")
    if selections is not None:
        sel_a, sel_b = selections
        if sel_a.rows() & sel_b.rows():
            raise ValueError("A-side and B-side selections must be disjoint")
        return _one_pass(M, sel_a, sel_b, r, precision.eps)
    if min(r, r_prime) <= precision.small_r_cutoff:
        raise SmallCaseError(f"min(r, r')={min(r, r_prime)} <= cutoff {precision.small_r_cutoff}")
    S_ = precision.rows_per_chunk
    best: SolutionPair | None = None
    if selection_space_size(sub_a, sub_b, S_) <= precision.exhaustive_limit:
        candidates = ((a, b) for a in _enumerate_selections(sub_a, S_)
                      for b in _enumerate_selections(sub_b, S_) if not a.rows() & b.rows())
    else:
        rng = rng if rng is not None else np.random.default_rng(0)

        def draws():
            # Trials rotate between plain draws, draws restricted to the rows
            # the incumbent gives each side, and one repeated row per chunk.
            # All of them stay inside the same selection space.
            for t in range(precision.selection_trials):
                pa = pb = None
                if best is not None and t % 3 == 1:
                    pa = {i for i, lab in enumerate(best.assignment) if lab == "A"}
                    pb = set(range(M.n)) - pa
                single = t % 3 == 2
                a = sample_selection(sub_a, S_, rng, prefer=pa, single=single)
                yield a, sample_selection(sub_b, S_, rng, exclude=a.rows(), prefer=pb,
                                          single=single)
        candidates = draws()
    for sel_a, sel_b in candidates:
        sol = _one_pass(M, sel_a, sel_b, r, precision.eps)
        if best is None or sol.key() < best.key():
            best = sol
    if best is None:
        raise SmallCaseError("no pair of disjoint selections exists")
    return best


def swc_with_reassignment(M: FragmentMatrix, sub_a: Subdivision, sub_b: Subdivision,
                          r: int, r_prime: int, precision: Precision = Precision(),
                          selections: tuple[Selection, Selection] | None = None,
                          rng: np.random.Generator | None = None) -> SolutionPair:
    """Run ``swc`` (X rows are never sampled), then give every row of the common
    tail X to its closer string."""
    sol = swc(M, sub_a, sub_b, r, r_prime, precision, selections, rng)
    x_start = max(sub_a.trisection.X.start, sub_b.trisection.X.start)
    if x_start >= M.n:
        return sol
    S = M.signed
    da = row_distances(S[x_start:], sol.sigma)
    db = row_distances(S[x_start:], sol.sigma_prime)
    tail = mask_to_labels(da <= db)
    labels = sol.assignment[:x_start] + tail
    return SolutionPair(sol.sigma, sol.sigma_prime, labels,
                        cost_fixed(M, sol.sigma, sol.sigma_prime, labels))


# --- r guessing and the stand-alone solver ----------------------------------

def r_grid(n: int, eps: float) -> list[int]:
    if n <= 64:
        return list(range(n + 1))
    vals, k = {0, n}, 0
    while True:
        g = math.ceil((1 + eps) ** k)
        if g > n:
            break
        vals.update((g, n - g))
        k += 1
    return sorted(vals)


def one_sided(M: FragmentMatrix, side: str) -> SolutionPair:
    from .core import majority_complete
    return majority_complete(M, side * M.n)


def small_case(M: FragmentMatrix, r: int) -> SolutionPair | None:
    """Exact answer for a fixed A-count when affordable, else None."""
    if r in (0, M.n):
        return one_sided(M, "A" if r == M.n else "B")
    if M.n <= DEFAULT_BUDGET.max_rows_for_bipartition:
        return exact_fixed_count(M, r)
    return None


def is_swc_instance(M: FragmentMatrix) -> bool:
    return bool((M.starts == 1).all())


def solve_swc(M: FragmentMatrix, precision: Precision = Precision(), seed: int = 0) -> SolutionPair:
    """Loop over guesses of |A|; small guesses are solved exactly."""
    if not is_swc_instance(M):
        raise NotApplicable("swc requires every row to cross column 1")
    perm = standard_order(M)
    Ms = M.subset(perm)
    rng = np.random.default_rng(seed)
    best = None
    for r in r_grid(Ms.n, precision.eps):
        sol = None
        if min(r, Ms.n - r) <= precision.small_r_cutoff:
            sol = small_case(Ms, r)
        if sol is None:
            try:
                sub_a = runtime_subdivision(Ms.n, "A", precision)
                sub_b = runtime_subdivision(Ms.n, "B", precision)
                sol = swc_with_reassignment(
                    Ms, sub_a, sub_b, r, Ms.n - r,
                    replace(precision, small_r_cutoff=-1), rng=rng)
            except SmallCaseError:
                continue
        sol = default_solution(Ms, sol.sigma, sol.sigma_prime)
        if best is None or sol.key() < best.key():
            best = sol
    return permute_back(best, perm)
