"""Length classes and a left-to-right combiner for arbitrary gapless instances.

With m padded to a power of two, class i holds rows whose length lies in
(m/2^(i+1), m/2^i] and q_i holds the columns k*m/2^(i+1).  Every row of class
i crosses one or two columns of q_i, and dropping the even-indexed columns
leaves exactly one crossing for rows that had two.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    FragmentMatrix,
    SolutionPair,
    default_solution,
    labels_to_mask,
    majority_bits,
    validate,
)
from .dp import solve_dp_pair
from .subinterval import (
    _Candidate,
    _mismatch,
    dominance_intervals,
    rooted_candidates,
    solve_rooted,
    solve_subinterval_free,
    vote_interval,
)
from .swc import Precision


def padded_width(m: int) -> int:
    return 1 << max(0, (m - 1).bit_length())


def length_class(length: int, m_pad: int) -> int:
    """Largest i with length * 2^i <= m_pad."""
    return (m_pad // length).bit_length() - 1


def class_columns(i: int, m_pad: int) -> tuple[int, ...]:
    step = max(1, m_pad >> (i + 1))
    return tuple(range(step, m_pad + 1, step))


@dataclass(frozen=True)
class LengthClass:
    index: int
    rows: tuple[int, ...]
    columns: tuple[int, ...]
    single: tuple[int, ...]   # rows crossing one column of ``columns``
    double: tuple[int, ...]   # rows crossing two


@dataclass(frozen=True)
class LengthClassIndex:
    m: int
    m_pad: int
    classes: tuple[LengthClass, ...]

    def row_class(self) -> dict[int, int]:
        return {r: c.index for c in self.classes for r in c.rows}

    def finest_columns(self) -> tuple[int, ...]:
        if not self.classes:
            return ()
        return tuple(q for q in self.classes[-1].columns if q <= self.m)

    def table(self) -> str:
        lines = ["class  rows  single  double  columns"]
        for c in self.classes:
            cols = ",".join(str(q) for q in c.columns if q <= self.m)
            lines.append(f"{c.index:>5}  {len(c.rows):>4}  {len(c.single):>6}  "
                         f"{len(c.double):>6}  {cols}")
        return "\n".join(lines)


def _crossed(start: int, end: int, columns: tuple[int, ...]) -> list[int]:
    lo = np.searchsorted(columns, start, side="left")
    hi = np.searchsorted(columns, end, side="right")
    return list(columns[lo:hi])


def verify_index(M: FragmentMatrix, idx: LengthClassIndex) -> None:
    """Assert the crossing, nesting and skipping properties."""
    seen = sorted(r for c in idx.classes for r in c.rows)
    assert seen == list(range(M.n)), "classes must partition the rows"
    by_i = {c.index: c for c in idx.classes}
    for i in range(max(by_i, default=-1)):
        assert set(class_columns(i, idx.m_pad)) <= set(class_columns(i + 1, idx.m_pad))
    for c in idx.classes:
        odd = c.columns[0::2]
        for r in c.rows:
            k = len(_crossed(int(M.starts[r]), int(M.ends[r]), c.columns))
            assert 1 <= k <= 2, f"row {r + 1} crosses {k} columns of class {c.index}"
            assert (k == 1) == (r in c.single)
        for r in c.double:
            k = len(_crossed(int(M.starts[r]), int(M.ends[r]), odd))
            assert k == 1, f"row {r + 1} crosses {k} odd columns of class {c.index}"


def build_index(M: FragmentMatrix) -> LengthClassIndex:
    m_pad = padded_width(M.m)
    members: dict[int, list[int]] = {}
    for r, length in enumerate(M.lengths.tolist()):
        members.setdefault(length_class(length, m_pad), []).append(r)
    classes = []
    for i in sorted(members):
        cols = class_columns(i, m_pad)
        single, double = [], []
        for r in members[i]:
            k = len(_crossed(int(M.starts[r]), int(M.ends[r]), cols))
            (single if k == 1 else double).append(r)
        classes.append(LengthClass(i, tuple(members[i]), cols, tuple(single), tuple(double)))
    idx = LengthClassIndex(M.m, m_pad, tuple(classes))
    verify_index(M, idx)
    return idx


def row_roots(M: FragmentMatrix, idx: LengthClassIndex) -> np.ndarray:
    """A root column per row: its only crossing, or the odd-indexed one of two."""
    roots = np.zeros(M.n, dtype=np.int64)
    for c in idx.classes:
        odd = c.columns[0::2]
        for r in c.single:
            roots[r] = _crossed(int(M.starts[r]), int(M.ends[r]), c.columns)[0]
        for r in c.double:
            roots[r] = _crossed(int(M.starts[r]), int(M.ends[r]), odd)[0]
    return roots


# --- combiner ----------------------------------------------------------------

def _bits(s: str) -> np.ndarray:
    return np.frombuffer(s.encode(), dtype=np.uint8).astype(np.int8) - 48


def _merge(S: np.ndarray, strings: list[np.ndarray], labelled: np.ndarray, in_a: np.ndarray,
           cand: _Candidate, precision: Precision, rng) -> list[np.ndarray]:
    """Fold a group candidate into the current strings over the group's columns."""
    rows = cand.rows
    lo = int(np.flatnonzero(np.abs(S[rows]).sum(axis=0))[0])
    hi = int(np.flatnonzero(np.abs(S[rows]).sum(axis=0))[-1]) + 1
    out = []
    for side in (0, 1):
        cur = strings[side].copy()
        prev = np.flatnonzero(labelled & (in_a if side == 0 else ~in_a))
        new = rows[cand.mask if side == 0 else ~cand.mask]
        rep = dominance_intervals(S[prev, lo:hi], S[new, lo:hi], precision.eps,
                                  lo + 1, strict=False)
        cb = _bits(cand.sigma if side == 0 else cand.sigma_prime)
        prev_count = np.abs(S[prev, lo:hi]).sum(axis=0) if len(prev) else np.zeros(hi - lo)
        for k, ch in enumerate(rep.pattern):
            if ch == "R" or (ch == "V" and prev_count[k] == 0):
                cur[lo + k] = cb[lo + k]
        runs, k = [], 0
        while k < len(rep.pattern):
            if rep.pattern[k] == "N":
                j = k
                while j < len(rep.pattern) and rep.pattern[j] == "N":
                    j += 1
                runs.append((lo + k, lo + j))
                k = j
            else:
                k += 1
        for a, b in runs:
            cur[a:b] = vote_interval(S, prev, new, a, b, precision, rng)
        out.append(cur)
    return out


def _extend(S: np.ndarray, strings: list[np.ndarray], labelled: np.ndarray, in_a: np.ndarray,
            rows: np.ndarray, fallback: np.ndarray) -> tuple:
    """Label the group's rows against the current strings and re-vote both sides.

    Distances count only columns already voted by that side's rows.  Ties go to
    the side with more voted columns under the row, then to ``fallback``.
    """
    W = S[rows].astype(np.int64)
    dist, overlap = [], []
    for side, cur in ((labelled & in_a, strings[0]), (labelled & ~in_a, strings[1])):
        covered = np.abs(S[side]).sum(axis=0) > 0   # columns this side has voted
        Wc = W[:, covered]
        overlap.append(np.abs(Wc).sum(axis=1))
        dist.append((overlap[-1] - Wc @ (2 * cur[covered].astype(np.int64) - 1)) // 2)
    (da, db), (oa, ob) = dist, overlap
    mask = np.where(da != db, da < db, np.where(oa != ob, oa > ob, fallback))
    lab = labelled.copy()
    lab[rows] = True
    a = in_a.copy()
    a[rows] = mask
    merged = []
    for side, cur in ((lab & a, strings[0]), (lab & ~a, strings[1])):
        has = np.abs(S[side]).sum(axis=0) > 0
        merged.append(np.where(has, majority_bits(S, side), cur).astype(np.int8))
    m = S.shape[1]
    value = (_mismatch(S, np.flatnonzero(lab & a), merged[0], 0, m)
             + _mismatch(S, np.flatnonzero(lab & ~a), merged[1], 0, m))
    return value, merged, lab, a


def _refine(M: FragmentMatrix, sol: SolutionPair, rounds: int = 10) -> SolutionPair:
    """Alternate default assignment and majority strings while the cost drops."""
    best = sol
    for _ in range(rounds):
        mask = labels_to_mask(best.assignment)
        sig = "".join(map(str, majority_bits(M.signed, mask)))
        sig_p = "".join(map(str, majority_bits(M.signed, ~mask)))
        nxt = default_solution(M, sig, sig_p)
        if nxt.cost >= best.cost:
            break
        best = nxt
    return best


def chain_solve(M: FragmentMatrix, precision: Precision = Precision(), seed: int = 0
                ) -> SolutionPair:
    """Solve each root group as a rooted instance and fold the groups in left to
    right, keeping a beam of the cheapest partial solutions."""
    idx = build_index(M)
    roots = row_roots(M, idx)
    S = M.signed
    rng = np.random.default_rng(seed)
    beam: list[tuple[int, list[np.ndarray], np.ndarray, np.ndarray]] = [
        (0, [np.ones(M.m, np.int8), np.ones(M.m, np.int8)],
         np.zeros(M.n, bool), np.zeros(M.n, bool))]
    width = max(1, precision.center_candidates)
    for k, q in enumerate(sorted(set(roots.tolist()))):
        rows = np.flatnonzero(roots == q)
        sols = rooted_candidates(M.subset(rows), int(q), precision, seed + k)[:width]
        cands = []
        for sol in sols:
            mask = labels_to_mask(sol.assignment)
            cands.append(_Candidate(rows, mask, sol.sigma, sol.sigma_prime))
            cands.append(_Candidate(rows, ~mask, sol.sigma_prime, sol.sigma))
        nxt = []
        for _, strings, labelled, in_a in beam:
            if labelled.any():
                for cand in cands:
                    nxt.append(_extend(S, strings, labelled, in_a, rows, cand.mask))
            for cand in cands:
                merged = _merge(S, strings, labelled, in_a, cand, precision, rng)
                lab = labelled.copy()
                lab[rows] = True
                a = in_a.copy()
                a[rows] = cand.mask
                value = (_mismatch(S, np.flatnonzero(lab & a), merged[0], 0, M.m)
                         + _mismatch(S, np.flatnonzero(lab & ~a), merged[1], 0, M.m))
                nxt.append((value, merged, lab, a))
        nxt.sort(key=lambda t: t[0])
        beam, seen = [], set()
        for state in nxt:
            labels = state[3][state[2]]
            key = min(labels.tobytes(), (~labels).tobytes())   # A/B swap is the same state
            if key not in seen:
                seen.add(key)
                beam.append(state)
            if len(beam) == width:
                break
    _, (sig, sig_p), _, _ = beam[0]
    sol = default_solution(M, "".join(map(str, sig.tolist())), "".join(map(str, sig_p.tolist())))
    return _refine(M, sol)


def solve_general(M: FragmentMatrix, precision: Precision = Precision(), seed: int = 0
                  ) -> SolutionPair:
    """Dispatch on the instance class; arbitrary instances go to ``chain_solve``."""
    diag = validate(M)
    if diag.swc:
        sol, how = solve_dp_pair(M, precision, seed), "dp-pair"
    elif diag.rooted_columns:
        sol, how = solve_rooted(M, diag.rooted_columns[0], precision, seed), "rooted"
    elif diag.subinterval_free:
        sol, how = solve_subinterval_free(M, precision, seed), "subinterval-free"
    else:
        sol, how = chain_solve(M, precision, seed), "chain"
    return SolutionPair(sol.sigma, sol.sigma_prime, sol.assignment, sol.cost,
                        {"algo": "general", "via": how})
