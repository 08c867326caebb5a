"""Layered dynamic programs over blocks of an instance whose rows all cross column 1.

A block ``(a, b, c)`` splits rows into U = [a, b), L = [b, c) and the tail
X = [c, n) (0-based, standard ordering).  Its last column is the end of row
``b``.  A cell adds a chunking of U and L and a sampled selection of rows per
chunk; the selection votes the columns of the block.  A cell ``(a, b, c)`` is
continued by cells ``(b, c, c')`` that reuse its L chunks and L selection as
their U part.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels
from .core import (
    FragmentMatrix,
    SolutionPair,
    default_solution,
    majority_bits,
    mask_to_labels,
    permute_back,
    row_distances,
    signs_to_bits,
    standard_order,
)
from .swc import (
    NotApplicable,
    Precision,
    Selection,
    is_swc_instance,
    one_sided,
    r_grid,
    small_case,
    weighted_vote,
)


@dataclass(frozen=True)
class Block:
    a: int
    b: int
    c: int
    last_col: int

    def __post_init__(self):
        if not 0 <= self.a < self.b < self.c:
            raise ValueError(f"block boundaries must satisfy a < b < c, got {self.a, self.b, self.c}")


@dataclass(frozen=True)
class ChunkSet:
    """Chunk start rows of U (first is ``a``) and of L (first is ``b``), plus ``c``."""

    u: tuple[int, ...]
    l: tuple[int, ...]
    c: int

    def __post_init__(self):
        bounds = self.boundaries
        if any(x >= y for x, y in zip(bounds, bounds[1:])):
            raise ValueError("chunk boundaries must be strictly increasing")

    @property
    def boundaries(self) -> tuple[int, ...]:
        return self.u + self.l + (self.c,)

    @property
    def u_ranges(self) -> tuple[range, ...]:
        ends = self.u[1:] + (self.l[0],)
        return tuple(range(s, e) for s, e in zip(self.u, ends))

    @property
    def l_ranges(self) -> tuple[range, ...]:
        ends = self.l[1:] + (self.c,)
        return tuple(range(s, e) for s, e in zip(self.l, ends))


@dataclass(frozen=True)
class DpCell:
    block: Block
    chunks: ChunkSet
    selection: Selection
    value: int = field(compare=False)
    prefix: str = field(compare=False)

    @property
    def key(self) -> tuple:
        return (self.block.a, self.block.b, self.block.c, self.chunks.boundaries,
                self.selection.u, self.selection.l)


@dataclass(frozen=True)
class JointCell:
    cell_a: DpCell
    cell_b: DpCell
    value: int = field(compare=False)

    @property
    def key(self) -> tuple:
        return (self.cell_a.key, self.cell_b.key)

    @property
    def frontier(self) -> int:
        return min(self.cell_a.block.last_col, self.cell_b.block.last_col)


def is_predecessor(prev: DpCell, nxt: DpCell) -> bool:
    if (nxt.block.a, nxt.block.b) != (prev.block.b, prev.block.c):
        return False
    if prev.chunks.l != nxt.chunks.u:
        return False
    return prev.selection.l == nxt.selection.u


def is_joint_predecessor(prev: JointCell, nxt: JointCell) -> bool:
    same_a = prev.cell_a.key == nxt.cell_a.key
    same_b = prev.cell_b.key == nxt.cell_b.key
    if same_a and not same_b:
        return is_predecessor(prev.cell_b, nxt.cell_b)
    if same_b and not same_a:
        return is_predecessor(prev.cell_a, nxt.cell_a)
    return False


def joint_cell_valid(cell_a: DpCell, cell_b: DpCell, n: int) -> bool:
    """Disjoint selections and distinct chunk starts (row 0 and n are shared ends)."""
    if cell_a.selection.rows() & cell_b.selection.rows():
        return False
    ba = set(cell_a.chunks.boundaries) - {0, n}
    bb = set(cell_b.chunks.boundaries) - {0, n}
    return not ba & bb


# --- cell construction -------------------------------------------------------

def boundary_grid(n: int, eps: float) -> list[int]:
    """Candidate block boundaries: every row for n <= 32, else geometric in the
    number of remaining rows."""
    if n <= 32:
        return list(range(n + 1))
    remaining = set(range(0, 9))
    x = float(n)
    while x >= 1:
        remaining.add(int(np.ceil(x)))
        x *= (1 - eps * eps)
    return sorted({n - k for k in remaining if 0 <= k <= n})


def random_starts(lo: int, hi: int, k: int, rng: np.random.Generator,
                  forbidden: set[int] = frozenset()) -> tuple[int, ...]:
    """``lo`` plus up to ``k - 1`` interior chunk starts in (lo, hi) avoiding ``forbidden``."""
    if k <= 1 or hi - lo <= 1:
        return (lo,)
    pool = [x for x in range(lo + 1, hi) if x not in forbidden]
    take = min(k - 1, len(pool))
    if not take:
        return (lo,)
    picks = rng.permutation(len(pool))[:take]
    return (lo, *sorted(pool[i] for i in picks))


def sample_rows(ranges: Sequence[range], per_chunk: int, rng: np.random.Generator,
                exclude: set[int]) -> tuple[tuple[int, ...], ...]:
    out = []
    for ch in ranges:
        pool = [i for i in ch if i not in exclude] if exclude else ch
        if not len(pool):
            out.append(())
            continue
        idx = rng.integers(0, len(pool), size=per_chunk)
        out.append(tuple(sorted(pool[i] for i in idx)))
    return tuple(out)


def _vote(S: np.ndarray, sel: Selection, lo: int, hi: int, eps: float) -> str:
    if hi <= lo:
        return ""
    bits = weighted_vote(S[sel.u_rows, lo:hi], S[sel.l_rows, lo:hi], eps)
    return "".join("1" if x else "0" for x in bits)


def _apply_fixed(prefix: str, fixed: str | None) -> str:
    if not fixed:
        return prefix
    k = min(len(prefix), len(fixed))
    return fixed[:k] + prefix[k:]


def _single_error(S: np.ndarray, bits: str, lo: int) -> int:
    """Errors of all rows against ``bits`` placed at columns lo.. (0-based)."""
    if not bits:
        return 0
    return int(row_distances(S[:, lo:lo + len(bits)], bits).sum())


def _pair_window_cost(S: np.ndarray, sig: str, sig_p: str) -> int:
    F = min(len(sig), len(sig_p))
    if F == 0:
        return 0
    W = S[:, :F]
    return int(np.minimum(row_distances(W, sig[:F]), row_distances(W, sig_p[:F])).sum())


def _initial_blocks(n: int, ends: np.ndarray, grid: list[int], span: int) -> Iterable[Block]:
    for bi, b in enumerate(grid):
        if b <= 0 or b >= n:
            continue
        for c in grid[bi + 1:bi + 1 + span]:
            yield Block(0, b, c, int(ends[b]))


def _successor_blocks(block: Block, n: int, ends: np.ndarray, grid: list[int],
                      span: int) -> Iterable[Block]:
    if block.c >= n:
        return
    later = [c for c in grid if c > block.c][:span]
    for c in later:
        yield Block(block.b, block.c, c, int(ends[block.c]))


def _new_cell(S, block: Block, u_starts, u_sel, K, per_chunk, rng, eps, forbidden, exclude,
              base_prefix: str, fixed: str | None) -> DpCell:
    l_starts = random_starts(block.b, block.c, K, rng, forbidden)
    chunks = ChunkSet(tuple(u_starts), l_starts, block.c)
    l_sel = sample_rows(chunks.l_ranges, per_chunk, rng, exclude)
    sel = Selection(tuple(u_sel), l_sel)
    lo = len(base_prefix)
    prefix = base_prefix + _vote(S, sel, lo, max(lo, block.last_col), eps)
    return DpCell(block, chunks, sel, 0, _apply_fixed(prefix, fixed))


def _initial_cell(S, block, K, per_chunk, rng, eps, forbidden, exclude, fixed):
    u_starts = random_starts(block.a, block.b, K, rng, forbidden)
    u_chunks = ChunkSet(u_starts, (block.b,), block.c).u_ranges
    u_sel = sample_rows(u_chunks, per_chunk, rng, exclude)
    return _new_cell(S, block, u_starts, u_sel, K, per_chunk, rng, eps,
                     forbidden | set(u_starts), exclude | {i for p in u_sel for i in p}, "", fixed)


def _advance(S, cell: DpCell, block: Block, K, per_chunk, rng, eps, forbidden, exclude,
             fixed) -> DpCell:
    return _new_cell(S, block, cell.chunks.l, cell.selection.l, K, per_chunk, rng, eps,
                     forbidden, exclude, cell.prefix, fixed)


# --- completion --------------------------------------------------------------

def complete_pair(S: np.ndarray, sig: str, sig_p: str, limit: int,
                  allow_heuristic: bool = False) -> tuple[str, str] | None:
    """Extend both strings to full width given their common prefix.

    The prefixes are cut to their common length F.  If at most ``limit`` rows
    reach past F, all their assignments are enumerated with suffix majorities,
    which is optimal for the fixed prefix.  Otherwise None, or a few rounds of
    assign/majority refinement when ``allow_heuristic``.
    """
    n, m = S.shape
    F = min(len(sig), len(sig_p))
    sig, sig_p = sig[:F], sig_p[:F]
    if F >= m:
        return sig, sig_p
    W, R = S[:, :F], S[:, F:]
    da = row_distances(W, sig) if F else np.zeros(n, dtype=np.int64)
    db = row_distances(W, sig_p) if F else np.zeros(n, dtype=np.int64)
    tail = np.flatnonzero(np.abs(R).sum(axis=1) > 0)
    if len(tail) <= limit:
        masks = np.arange(1 << len(tail), dtype=np.int64)
        costs = kernels.partition_costs(R[tail], masks, da[tail], db[tail])
        best = int(masks[int(np.argmin(costs))])
        in_a = np.zeros(n, dtype=bool)
        in_a[tail[[(best >> k) & 1 == 1 for k in range(len(tail))]]] = True
    elif allow_heuristic:
        in_a = da <= db
        for _ in range(5):
            sa = majority_bits(R, in_a)
            sb = majority_bits(R, ~in_a)
            full_a = da + row_distances(R, sa)
            full_b = db + row_distances(R, sb)
            new = full_a <= full_b
            if (new == in_a).all():
                break
            in_a = new
    else:
        return None
    suf_a = "".join(map(str, majority_bits(R, in_a)))
    suf_b = "".join(map(str, majority_bits(R, ~in_a)))
    return sig + suf_a, sig_p + suf_b


# --- single-string program ---------------------------------------------------

def _split_off(M: FragmentMatrix, sigma: str, r: int, **meta) -> SolutionPair:
    """A gets the r rows closest to sigma; B's string is the majority of the rest."""
    d = row_distances(M.signed, sigma)
    order = np.argsort(d, kind="stable")
    mask = np.zeros(M.n, dtype=bool)
    mask[order[:r]] = True
    sig_p = "".join(map(str, majority_bits(M.signed, ~mask)))
    labels = mask_to_labels(mask)
    from .core import cost_fixed
    return SolutionPair(sigma, sig_p, labels, cost_fixed(M, sigma, sig_p, labels), meta)


def dp_single(M: FragmentMatrix, r: int, precision: Precision = Precision(),
              rng: np.random.Generator | None = None,
              audit: list | None = None) -> SolutionPair:
    """Single-string block program on an instance in standard ordering.

    Cells are initialised by a vote over their block and relaxed in order of
    their first row; a cell without tail (c = n) is finished with the optimal
    suffix, the column majority over all rows.
    """
    if not is_swc_instance(M):
        raise NotApplicable("dp_single requires every row to cross column 1")
    if np.any(np.diff(M.lengths) < 0):
        raise ValueError("rows must be in standard ordering")
    n, S, ends = M.n, M.signed, M.ends
    if r <= precision.small_r_cutoff or n <= 2:
        exact = small_case(M, r)
        if exact is not None:
            return exact
    rng = rng if rng is not None else np.random.default_rng(0)
    K, per, eps = precision.chunks_per_range, precision.rows_per_chunk, precision.eps
    grid = boundary_grid(n, eps)
    span = 3
    layers: dict[int, dict[tuple, DpCell]] = {}

    def relax(cell: DpCell, value: int) -> None:
        layer = layers.setdefault(cell.block.a, {})
        old = layer.get(cell.key)
        if old is None or value < old.value:
            layer[cell.key] = DpCell(cell.block, cell.chunks, cell.selection, value, cell.prefix)

    for block in _initial_blocks(n, ends, grid, span):
        for _ in range(precision.dp_samples):
            cell = _initial_cell(S, block, K, per, rng, eps, set(), set(), None)
            relax(cell, _single_error(S, cell.prefix, 0))

    best_sigma, best_cost = None, None
    a_values = sorted(layers)
    while a_values:
        a = a_values.pop(0)
        cells = sorted(layers[a].values(), key=lambda c: (c.value, c.key))
        by_block: dict[tuple, int] = {}
        for cell in cells:
            bk = (cell.block.a, cell.block.b, cell.block.c)
            by_block[bk] = by_block.get(bk, 0) + 1
            if by_block[bk] > precision.beam_width:
                continue
            if audit is not None:
                audit.append(cell)
            if cell.block.c == n:
                tail = "".join(map(str, majority_bits(S[:, len(cell.prefix):], np.ones(n, bool))))
                sigma = cell.prefix + tail
                total = cell.value + _single_error(S, tail, len(cell.prefix))
                if best_cost is None or (total, sigma) < (best_cost, best_sigma):
                    best_sigma, best_cost = sigma, total
                continue
            for block in _successor_blocks(cell.block, n, ends, grid, span):
                for _ in range(precision.dp_samples):
                    nxt = _advance(S, cell, block, K, per, rng, eps, set(), set(), None)
                    err = _single_error(S, nxt.prefix[len(cell.prefix):], len(cell.prefix))
                    relax(nxt, cell.value + err)
            for key in sorted(layers):
                if key > a and key not in a_values:
                    a_values.append(key)
            a_values.sort()
    if best_sigma is None:
        best_sigma = "".join(map(str, majority_bits(S, np.ones(n, bool))))
    return _split_off(M, best_sigma, r, algo="dp-single")


# --- pair program ------------------------------------------------------------

def dp_pair(M: FragmentMatrix, r: int, r_prime: int, precision: Precision = Precision(),
            rng: np.random.Generator | None = None, fixed: tuple[str, str] | None = None,
            delegate: bool = True, audit: list | None = None,
            keep: Callable[[JointCell], bool] | None = None) -> SolutionPair:
    """Joint program over pairs of cells, one per solution string.

    Exactly one side advances per step (the one whose block ends first, both on
    a tie).  A joint cell's value is the default-assignment cost of its two
    prefixes on the columns both cover.  Cells where one side has no tail are
    completed exactly when few rows reach past the common prefix.

    ``fixed`` pins the leading columns of both strings (used by the rooted
    solver); ``keep`` restricts which completed cells may be returned.
    """
    if not is_swc_instance(M):
        raise NotApplicable("dp_pair requires every row to cross column 1")
    if np.any(np.diff(M.lengths) < 0):
        raise ValueError("rows must be in standard ordering")
    if r < 0 or r_prime < 0 or r + r_prime != M.n:
        raise ValueError(f"infeasible split r={r}, r'={r_prime} for n={M.n}")
    n, S, ends = M.n, M.signed, M.ends
    if delegate and min(r, r_prime) <= precision.small_r_cutoff:
        exact = small_case(M, r)
        if exact is not None:
            return exact
    if delegate and min(r, r_prime) == 0:
        return one_sided(M, "A" if r == n else "B")
    rng = rng if rng is not None else np.random.default_rng(0)
    K, per, eps = precision.chunks_per_range, precision.rows_per_chunk, precision.eps
    grid = boundary_grid(n, eps)
    span = 3
    fa, fb = fixed if fixed else (None, None)
    limit = precision.exact_completion_rows

    best: tuple | None = None
    seen: dict[tuple, JointCell] = {}
    heap: list = []
    counter = 0

    def push(cell_a: DpCell, cell_b: DpCell) -> None:
        nonlocal counter
        if not joint_cell_valid(cell_a, cell_b, n):
            return
        value = _pair_window_cost(S, cell_a.prefix, cell_b.prefix)
        jc = JointCell(cell_a, cell_b, value)
        old = seen.get(jc.key)
        if old is not None and old.value <= value:
            return
        seen[jc.key] = jc
        order = (jc.frontier, cell_a.block.a + cell_b.block.a)
        heapq.heappush(heap, (order, value, counter, jc))
        counter += 1

    blocks = list(_initial_blocks(n, ends, grid, span))
    pos = {g: k for k, g in enumerate(grid)}
    for blk_a in blocks:
        for blk_b in blocks:
            if abs(pos[blk_a.b] - pos[blk_b.b]) > 2:
                continue
            if {blk_a.b, blk_a.c} & {blk_b.b, blk_b.c} - {n}:
                continue
            for _ in range(precision.dp_samples):
                ca = _initial_cell(S, blk_a, K, per, rng, eps, set(), set(), fa)
                cb = _initial_cell(S, blk_b, K, per, rng, eps,
                                   set(ca.chunks.boundaries), ca.selection.rows(), fb)
                push(ca, cb)

    bucket_counts: dict[tuple, int] = {}
    while heap:
        order, value, _, jc = heapq.heappop(heap)
        if seen.get(jc.key) is not jc:
            continue
        bucket_counts[order] = bucket_counts.get(order, 0) + 1
        if bucket_counts[order] > precision.beam_width:
            continue
        if audit is not None:
            audit.append(jc)
        ca, cb = jc.cell_a, jc.cell_b
        if ca.block.c == n or cb.block.c == n:
            done = complete_pair(S, ca.prefix, cb.prefix, limit)
            if done is not None and (keep is None or keep(jc)):
                sol = default_solution(M, *done)
                if best is None or sol.key() < best[0].key():
                    best = (sol, jc)
        ea, eb = ca.block.last_col, cb.block.last_col
        if ea <= eb:
            for blk in _successor_blocks(ca.block, n, ends, grid, span):
                for _ in range(precision.dp_samples):
                    nxt = _advance(S, ca, blk, K, per, rng, eps,
                                   set(cb.chunks.boundaries), cb.selection.rows(), fa)
                    push(nxt, cb)
        if eb <= ea:
            for blk in _successor_blocks(cb.block, n, ends, grid, span):
                for _ in range(precision.dp_samples):
                    nxt = _advance(S, cb, blk, K, per, rng, eps,
                                   set(ca.chunks.boundaries), ca.selection.rows(), fb)
                    push(ca, nxt)
    if best is None:
        # no cell could be completed exactly: refine the deepest one heuristically
        if seen:
            deepest = max(seen.values(), key=lambda j: (j.frontier, -j.value))
            start = (deepest.cell_a.prefix, deepest.cell_b.prefix)
        else:
            start = (fa or "", fb or "")
        done = complete_pair(S, *start, limit, allow_heuristic=True)
        sol = default_solution(M, *done)
    else:
        sol = best[0]
    return SolutionPair(sol.sigma, sol.sigma_prime, sol.assignment, sol.cost,
                        {"algo": "dp-pair", "cells": len(seen)})


# --- stand-alone solvers -----------------------------------------------------

def _solve_loop(M: FragmentMatrix, fn, precision: Precision, seed: int,
                audit: list | None) -> SolutionPair:
    if not is_swc_instance(M):
        raise NotApplicable("instance is not an SWC-instance (some row misses column 1)")
    perm = standard_order(M)
    Ms = M.subset(perm)
    rng = np.random.default_rng(seed)
    best = None
    for r in r_grid(Ms.n, precision.eps):
        cells: list | None = [] if audit is not None else None
        sol = fn(Ms, r, rng, cells)
        if audit is not None:
            audit.extend((r, c) for c in cells)
        sol = default_solution(Ms, sol.sigma, sol.sigma_prime)
        if best is None or sol.key() < best.key():
            best = sol
    return permute_back(best, perm)


def format_cell(r: int, cell: DpCell | JointCell) -> str:
    """One audit line: guess, boundaries per side, value."""
    parts = [cell] if isinstance(cell, DpCell) else [cell.cell_a, cell.cell_b]
    sides = " | ".join(",".join(map(str, c.chunks.boundaries)) for c in parts)
    return f"r={r} {sides} value={cell.value}"


def solve_dp_single(M: FragmentMatrix, precision: Precision = Precision(), seed: int = 0,
                    audit: list | None = None) -> SolutionPair:
    return _solve_loop(M, lambda Ms, r, rng, cells: dp_single(Ms, r, precision, rng, cells),
                       precision, seed, audit)


def solve_dp_pair(M: FragmentMatrix, precision: Precision = Precision(), seed: int = 0,
                  audit: list | None = None) -> SolutionPair:
    return _solve_loop(
        M, lambda Ms, r, rng, cells: dp_pair(Ms, r, Ms.n - r, precision, rng, audit=cells),
        precision, seed, audit)
