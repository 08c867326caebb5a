"""Instances without nested rows: rooted solving and left-to-right composition.

A rooted instance has a column crossed by every row.  Its all-binary centre
window is voted first; the parts right and left of the root are then solved
by the pair program with the centre pinned, the left part on the reversed
matrix.  A general instance without nested rows is cut into groups crossing
the columns of the q-sequence; consecutive groups only meet in an overlap
where the group with many more reference entries supplies the bits and the
remaining columns are voted jointly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
import numpy as np

from .core import (
    FragmentMatrix,
    SolutionPair,
    default_solution,
    is_subinterval_free,
    labels_to_mask,
    start_order,
    standard_order,
)
from .dp import dp_pair
from .oracle import BudgetExceeded, exact_fixed_count
from .swc import (
    NotApplicable,
    Precision,
    SmallCaseError,
    generalized_vote,
    r_grid,
    runtime_subdivision,
    small_case,
    swc,
)


# --- q-sequence ---------------------------------------------------------------

@dataclass(frozen=True)
class QSequence:
    columns: tuple[int, ...]

    def __post_init__(self):
        if any(x >= y for x, y in zip(self.columns, self.columns[1:])):
            raise ValueError("q-sequence must be strictly increasing")

    def crossings(self, start: int, end: int) -> list[int]:
        return [q for q in self.columns if start <= q <= end]


def _check_free(M: FragmentMatrix) -> None:
    if not is_subinterval_free(list(zip(M.starts.tolist(), M.ends.tolist()))):
        raise NotApplicable("instance has a row nested strictly inside another")


def build_qsequence(M: FragmentMatrix) -> QSequence:
    """Roots such that every row crosses exactly one of them."""
    _check_free(M)
    order = start_order(M)
    starts, ends = M.starts[order], M.ends[order]
    cols, i = [], 0
    while i < M.n:
        q = int(ends[i])
        cols.append(q)
        while i < M.n and starts[i] <= q:
            i += 1
    seq = QSequence(tuple(cols))
    for s, e in zip(starts, ends):
        if len(seq.crossings(int(s), int(e))) != 1:
            raise AssertionError(f"row [{s},{e}] crosses {seq.crossings(int(s), int(e))}")
    return seq


def root_groups(M: FragmentMatrix, seq: QSequence) -> list[np.ndarray]:
    """Row indices crossing each root, in root order."""
    out = []
    for q in seq.columns:
        out.append(np.flatnonzero((M.starts <= q) & (M.ends >= q)))
    return out


# --- dominance ------------------------------------------------------------------

def _factor(eps: float) -> Fraction:
    e = Fraction(eps).limit_denominator(1000)
    return 1 / (e * e)


def dominates(V1: np.ndarray, V2: np.ndarray, eps: float) -> bool:
    """V1 and V2 are signed arrays over the same columns (reference rows only).

    True iff on every column one side has no entries or V1 has at least
    1/eps^2 times as many entries as V2.
    """
    c1 = np.abs(np.atleast_2d(V1)).sum(axis=0)
    c2 = np.abs(np.atleast_2d(V2)).sum(axis=0)
    f = _factor(eps)
    return all(a == 0 or b == 0 or a >= f * b for a, b in zip(c1.tolist(), c2.tolist()))


@dataclass(frozen=True)
class DominanceReport:
    """Per shared column: 'L' left group dominant, 'R' right group dominant,
    'N' neither, 'V' one side empty.  ``interval`` is the 1-based inclusive
    column range without dominance, or None."""

    first_col: int
    pattern: str
    interval: tuple[int, int] | None

    def owner(self, col: int) -> str:
        return self.pattern[col - self.first_col]


def dominance_intervals(left: np.ndarray, right: np.ndarray, eps: float,
                        first_col: int = 1, strict: bool = True) -> DominanceReport:
    """Classify columns of two signed arrays covering the same column range.

    The left group must be dominant left of the non-dominance interval and the
    right group right of it; anything else raises when ``strict``.  Without
    ``strict`` the interval spans all non-dominance columns.
    """
    cl = np.abs(left).sum(axis=0).tolist() if len(left) else [0] * np.shape(left)[-1]
    cr = np.abs(right).sum(axis=0).tolist() if len(right) else [0] * np.shape(right)[-1]
    f = _factor(eps)
    pattern = []
    for a, b in zip(cl, cr):
        if a == 0 or b == 0:
            pattern.append("V")
        elif a >= f * b:
            pattern.append("L")
        elif b >= f * a:
            pattern.append("R")
        else:
            pattern.append("N")
    text = "".join(pattern)
    core = text.replace("V", "")
    monotone = core == "L" * core.count("L") + "N" * core.count("N") + "R" * core.count("R")
    if strict and not monotone:
        raise RuntimeError(f"dominance is not monotone: {text}")
    nz = [k for k, ch in enumerate(text) if ch == "N"]
    interval = (first_col + nz[0], first_col + nz[-1]) if nz else None
    return DominanceReport(first_col, text, interval)


# --- rooted instances ------------------------------------------------------

def _strings_only(Msub: FragmentMatrix, r: int, precision: Precision, rng,
                  fixed: tuple[str, str]) -> tuple[str, str]:
    perm = standard_order(Msub)
    sol = dp_pair(Msub.subset(perm), r, Msub.n - r, precision, rng, fixed=fixed, delegate=False)
    return sol.sigma, sol.sigma_prime


def center_candidates(MW: FragmentMatrix, r: int, precision: Precision,
                      rng: np.random.Generator) -> list[tuple[str, str]]:
    """Distinct (sigma, sigma') votes on the all-binary centre window."""
    out: list[tuple[str, str]] = []
    loose = replace(precision, small_r_cutoff=-1)
    for _ in range(precision.center_candidates):
        try:
            sub_a = runtime_subdivision(MW.n, "A", precision)
            sub_b = runtime_subdivision(MW.n, "B", precision)
            sol = swc(MW, sub_a, sub_b, r, MW.n - r, loose, rng=rng)
        except SmallCaseError:
            sol = None
        if sol is None:
            try:
                sol = exact_fixed_count(MW, r)
            except BudgetExceeded:
                return out
        pair = (sol.sigma, sol.sigma_prime)
        if pair not in out:
            out.append(pair)
    return out


def rooted_candidates(M: FragmentMatrix, root: int, precision: Precision = Precision(),
                      seed: int = 0) -> list[SolutionPair]:
    """Best solution per guess of |A|, cheapest first."""
    if not ((M.starts <= root) & (M.ends >= root)).all():
        raise NotApplicable(f"some row misses root column {root}")
    rng = np.random.default_rng(seed)
    n, m = M.n, M.m
    jt, js = int(M.starts.max()), int(M.ends.min())
    MW = M.column_window(jt, js)
    right = M.column_window(root, m)
    left = M.column_window(1, root).reversed()
    out = []
    for r in r_grid(n, precision.eps):
        best = None
        if min(r, n - r) <= max(precision.small_r_cutoff, 0):
            best = small_case(M, r)
        if best is None:
            for sig_w, sigp_w in center_candidates(MW, r, precision, rng):
                k = root - jt
                fixed_r = (sig_w[k:], sigp_w[k:])
                fixed_l = (sig_w[:k + 1][::-1], sigp_w[:k + 1][::-1])
                sr, spr = _strings_only(right, r, precision, rng, fixed_r)
                sl, spl = _strings_only(left, r, precision, rng, fixed_l)
                sigma = sl[::-1][:root - 1] + sr
                sigma_p = spl[::-1][:root - 1] + spr
                sol = default_solution(M, sigma, sigma_p)
                if best is None or sol.key() < best.key():
                    best = sol
        if best is None:
            continue
        best = default_solution(M, best.sigma, best.sigma_prime, r=r, root=root)
        out.append(best)
    out.sort(key=SolutionPair.key)
    return out


def solve_rooted(M: FragmentMatrix, root: int, precision: Precision = Precision(),
                 seed: int = 0) -> SolutionPair:
    cands = rooted_candidates(M, root, precision, seed)
    best = cands[0]
    return SolutionPair(best.sigma, best.sigma_prime, best.assignment, best.cost,
                        {"algo": "rooted", "root": root})


# --- composition along the q-sequence ---------------------------------------

@dataclass(frozen=True)
class _Candidate:
    rows: np.ndarray      # global row indices of the group
    mask: np.ndarray      # True where the row is labelled A
    sigma: str
    sigma_prime: str


def _side_bits(cand: _Candidate, side: int) -> str:
    return cand.sigma if side == 0 else cand.sigma_prime


def _side_rows(cand: _Candidate, side: int) -> np.ndarray:
    return cand.rows[cand.mask if side == 0 else ~cand.mask]


def _mismatch(S: np.ndarray, rows: np.ndarray, bits: np.ndarray, lo: int, hi: int) -> int:
    """Errors of ``rows`` against 0/1 ``bits`` on 0-based columns [lo, hi)."""
    if hi <= lo or not len(rows):
        return 0
    W = S[rows, lo:hi].astype(np.int64)
    signs = 2 * bits.astype(np.int64) - 1
    return int(((np.abs(W).sum() - (W @ signs).sum()) // 2))


def _regions(S: np.ndarray, rows: np.ndarray, lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
    """Split rows into those binary on all of [lo, hi) and the rest."""
    if not len(rows):
        return rows, rows
    full = (np.abs(S[rows, lo:hi]) > 0).all(axis=1)
    return rows[full], rows[~full]


def _chunked(rows: np.ndarray, count: int) -> list[np.ndarray]:
    count = max(1, min(count, len(rows)))
    return [c for c in np.array_split(rows, count) if len(c)]


def vote_interval(S: np.ndarray, left_rows: np.ndarray, right_rows: np.ndarray,
                  lo: int, hi: int, precision: Precision,
                  rng: np.random.Generator) -> np.ndarray:
    """Generalized majority over the four regions of a non-dominance interval.

    Each region is cut into chunks whose number grows with the guessed
    exponent k; every chunk votes through a sample weighted by its size.  The
    draw with fewest errors over the interval is kept.
    """
    rows_all = np.concatenate([left_rows, right_rows])
    up, upup = _regions(S, left_rows, lo, hi)
    down, downdown = _regions(S, right_rows, lo, hi)
    per = precision.rows_per_chunk
    inv = 1 / precision.eps
    kmax = max(0, math.ceil(math.log(max(2, len(rows_all)), inv)))
    best_bits, best_err = None, None
    for k in range(kmax + 1):
        count = math.ceil(inv ** k) * precision.chunk_multiplier
        for _ in range(max(1, precision.dp_samples)):
            chunks = []
            for region in (upup, up, down, downdown):
                for ch in _chunked(region, count):
                    pick = rng.choice(ch, size=per, replace=True)
                    chunks.append((len(ch) / per, S[pick, lo:hi]))
            bits = generalized_vote(chunks, hi - lo)
            err = _mismatch(S, rows_all, bits, lo, hi)
            if best_err is None or err < best_err:
                best_bits, best_err = bits, err
    if best_bits is None:
        best_bits = np.ones(hi - lo, dtype=np.int8)
    return best_bits


def merge_overlap(S: np.ndarray, left: _Candidate, right: _Candidate, lo: int, hi: int,
                  precision: Precision, rng: np.random.Generator
                  ) -> tuple[list[np.ndarray], int]:
    """Bits for both strings on columns [lo, hi) and their fixed-label errors."""
    out, err = [], 0
    for side in (0, 1):
        lr, rr = _side_rows(left, side), _side_rows(right, side)
        rep = dominance_intervals(S[lr, lo:hi], S[rr, lo:hi], precision.eps, lo + 1)
        lb = np.frombuffer(_side_bits(left, side)[lo:hi].encode(), dtype=np.uint8) - 48
        rb = np.frombuffer(_side_bits(right, side)[lo:hi].encode(), dtype=np.uint8) - 48
        bits = np.where(np.array([ch == "R" for ch in rep.pattern]), rb, lb).astype(np.int8)
        cl = np.abs(S[lr, lo:hi]).sum(axis=0) if len(lr) else np.zeros(hi - lo)
        for k, ch in enumerate(rep.pattern):
            if ch == "V" and cl[k] == 0:
                bits[k] = rb[k]
        if rep.interval is not None:
            best = None
            a0, a1 = rep.interval[0] - 1, rep.interval[1]
            for x0 in range(max(lo, a0 - 2), a0 + 1):
                for x1 in range(a1, min(hi, a1 + 2) + 1):
                    if x1 - x0 > precision.max_interval_width:
                        continue
                    trial = bits.copy()
                    trial[x0 - lo:x1 - lo] = vote_interval(S, lr, rr, x0, x1, precision, rng)
                    e = _mismatch(S, np.concatenate([lr, rr]), trial, lo, hi)
                    if best is None or e < best[0]:
                        best = (e, trial)
            if best is not None:
                bits = best[1]
        out.append(bits)
        err += _mismatch(S, np.concatenate([lr, rr]), bits, lo, hi)
    return out, err


def _group_candidates(M: FragmentMatrix, rows: np.ndarray, root: int,
                      precision: Precision, seed: int) -> list[_Candidate]:
    sub = M.subset(rows)
    sols = rooted_candidates(sub, root, precision, seed)[:max(1, precision.center_candidates)]
    out = []
    for sol in sols:
        mask = labels_to_mask(sol.assignment)
        out.append(_Candidate(rows, mask, sol.sigma, sol.sigma_prime))
        out.append(_Candidate(rows, ~mask, sol.sigma_prime, sol.sigma))
    return out


def solve_subinterval_free(M: FragmentMatrix, precision: Precision = Precision(),
                           seed: int = 0) -> SolutionPair:
    """Chain the rooted solutions of consecutive roots by a left-to-right DP."""
    seq = build_qsequence(M)
    if len(seq.columns) == 1:
        sol = solve_rooted(M, seq.columns[0], precision, seed)
        return SolutionPair(sol.sigma, sol.sigma_prime, sol.assignment, sol.cost,
                            {"algo": "subinterval-free", "roots": list(seq.columns)})
    S = M.signed
    rng = np.random.default_rng(seed)
    groups = root_groups(M, seq)
    spans = [(int(M.starts[g].min()) - 1, int(M.ends[g].max())) for g in groups]
    cands = [_group_candidates(M, g, q, precision, seed + j)
             for j, (g, q) in enumerate(zip(groups, seq.columns))]

    def own_cols(j: int) -> tuple[int, int]:
        lo, hi = spans[j]
        if j > 0:
            lo = max(lo, spans[j - 1][1])
        if j + 1 < len(spans):
            hi = min(hi, spans[j + 1][0])
        return lo, max(lo, hi)

    def unary(j: int, c: _Candidate) -> int:
        lo, hi = own_cols(j)
        total = 0
        for side in (0, 1):
            bits = np.frombuffer(_side_bits(c, side)[lo:hi].encode(), dtype=np.uint8) - 48
            total += _mismatch(S, _side_rows(c, side), bits, lo, hi)
        return total

    # Viterbi over groups; state = candidate of the current group
    value = [unary(0, c) for c in cands[0]]
    back: list[list[tuple[int, list[np.ndarray]]]] = []
    for j in range(1, len(groups)):
        lo, hi = spans[j][0], spans[j - 1][1]
        new_value, new_back = [], []
        for c in cands[j]:
            best = None
            for p_idx, p in enumerate(cands[j - 1]):
                if hi > lo:
                    bits, e = merge_overlap(S, p, c, lo, hi, precision, rng)
                else:
                    bits, e = [], 0
                v = value[p_idx] + e
                if best is None or v < best[0]:
                    best = (v, p_idx, bits)
            new_value.append(best[0] + unary(j, c))
            new_back.append((best[1], best[2]))
        value = new_value
        back.append(new_back)
    idx = int(np.argmin(value))
    chosen = [idx]
    merged: list[list[np.ndarray]] = []
    for j in range(len(groups) - 1, 0, -1):
        p_idx, bits = back[j - 1][chosen[-1]]
        merged.append(bits)
        chosen.append(p_idx)
    chosen.reverse()
    merged.reverse()
    sig = np.ones(M.m, dtype=np.int8)
    sig_p = np.ones(M.m, dtype=np.int8)
    for j, c_idx in enumerate(chosen):
        c = cands[j][c_idx]
        lo, hi = own_cols(j)
        sig[lo:hi] = np.frombuffer(c.sigma[lo:hi].encode(), dtype=np.uint8) - 48
        sig_p[lo:hi] = np.frombuffer(c.sigma_prime[lo:hi].encode(), dtype=np.uint8) - 48
    for j, bits in enumerate(merged, start=1):
        lo, hi = spans[j][0], spans[j - 1][1]
        if bits:
            sig[lo:hi], sig_p[lo:hi] = bits
    sigma = "".join(map(str, sig.tolist()))
    sigma_p = "".join(map(str, sig_p.tolist()))
    return default_solution(M, sigma, sigma_p, algo="subinterval-free",
                            roots=list(seq.columns))
