"""Instance and solution data model for gapless MEC.

Entries are stored internally as a signed int8 matrix: ``+1`` for a one,
``-1`` for a zero and ``0`` for a wildcard.  With that encoding the distance
of a row to a binary string ``s`` (as a ``+1/-1`` vector) is
``(nnz - row @ s) / 2`` and a column majority is the sign of a column sum.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np


class Symbol(enum.Enum):
    ZERO = "0"
    ONE = "1"
    WILDCARD = "-"

    @classmethod
    def parse(cls, ch: str) -> "Symbol":
        return cls(ch)


def dist_symbols(a: Symbol | str, b: Symbol | str) -> int:
    a = Symbol(a) if not isinstance(a, Symbol) else a
    b = Symbol(b) if not isinstance(b, Symbol) else b
    return int({a, b} == {Symbol.ZERO, Symbol.ONE})


def dist_strings(s: str, t: str) -> int:
    if len(s) != len(t):
        raise ValueError(f"length mismatch: {len(s)} != {len(t)}")
    return sum(dist_symbols(a, b) for a, b in zip(s, t))


@dataclass(frozen=True)
class Row:
    """A gapless row: ``bits`` occupy columns ``start .. end`` (1-based)."""

    start: int
    bits: str

    def __post_init__(self):
        if not self.bits:
            raise ValueError("row has no binary entries")
        if self.start < 1:
            raise ValueError(f"row start {self.start} < 1")
        if set(self.bits) - {"0", "1"}:
            raise ValueError(f"row bits must be binary, got {self.bits!r}")

    @property
    def end(self) -> int:
        return self.start + len(self.bits) - 1

    def __len__(self) -> int:
        return len(self.bits)

    def crosses(self, col: int) -> bool:
        return self.start <= col <= self.end

    def expand(self, m: int) -> str:
        return "-" * (self.start - 1) + self.bits + "-" * (m - self.end)

    @classmethod
    def from_text(cls, text: str) -> "Row":
        """Parse an m-width row such as ``--0110-``; raises on gaps."""
        stripped = text.strip("-")
        if not stripped:
            raise ValueError("row has no binary entries")
        if "-" in stripped:
            raise ValueError(f"row {text!r} is not gapless")
        return cls(text.index(stripped[0]) + 1, stripped)


@dataclass(frozen=True)
class FragmentMatrix:
    m: int
    rows: tuple[Row, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        if self.m < 1 or not self.rows:
            raise ValueError("instance needs n >= 1 and m >= 1")
        for i, row in enumerate(self.rows):
            if row.end > self.m:
                raise ValueError(f"row {i + 1} ends at column {row.end} > m={self.m}")

    @property
    def n(self) -> int:
        return len(self.rows)

    @classmethod
    def from_strings(cls, lines: Sequence[str]) -> "FragmentMatrix":
        widths = {len(s) for s in lines}
        if len(widths) != 1:
            raise ValueError("rows have different widths")
        return cls(widths.pop(), tuple(Row.from_text(s) for s in lines))

    @classmethod
    def from_intervals(cls, m: int, rows: Iterable[tuple[int, str]]) -> "FragmentMatrix":
        return cls(m, tuple(Row(s, b) for s, b in rows))

    def to_strings(self) -> list[str]:
        return [r.expand(self.m) for r in self.rows]

    @cached_property
    def signed(self) -> np.ndarray:
        out = np.zeros((self.n, self.m), dtype=np.int8)
        for i, row in enumerate(self.rows):
            out[i, row.start - 1:row.end] = [1 if b == "1" else -1 for b in row.bits]
        out.setflags(write=False)
        return out

    @cached_property
    def starts(self) -> np.ndarray:
        return np.array([r.start for r in self.rows], dtype=np.int64)

    @cached_property
    def ends(self) -> np.ndarray:
        return np.array([r.end for r in self.rows], dtype=np.int64)

    @cached_property
    def lengths(self) -> np.ndarray:
        return self.ends - self.starts + 1

    def subset(self, indices: Sequence[int]) -> "FragmentMatrix":
        return FragmentMatrix(self.m, tuple(self.rows[i] for i in indices))

    def column_window(self, first: int, last: int) -> "FragmentMatrix":
        """Columns ``first..last`` (1-based, inclusive); rows must intersect it."""
        rows = []
        for r in self.rows:
            s, e = max(r.start, first), min(r.end, last)
            if s > e:
                raise ValueError("row does not intersect the column window")
            rows.append(Row(s - first + 1, r.bits[s - r.start:e - r.start + 1]))
        return FragmentMatrix(last - first + 1, tuple(rows))

    def reversed(self) -> "FragmentMatrix":
        """Rows and columns both reversed."""
        return FragmentMatrix(
            self.m,
            tuple(Row(self.m - r.end + 1, r.bits[::-1]) for r in reversed(self.rows)),
        )


@dataclass(frozen=True)
class SolutionPair:
    """Two solution strings, a per-row A/B labelling and its error count."""

    sigma: str
    sigma_prime: str
    assignment: str
    cost: int
    meta: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def key(self) -> tuple:
        return (self.cost, self.sigma, self.sigma_prime, self.assignment)

    def swapped(self) -> "SolutionPair":
        flipped = self.assignment.translate(str.maketrans("AB", "BA"))
        return SolutionPair(self.sigma_prime, self.sigma, flipped, self.cost, self.meta)


def bits_to_signs(bits: str | np.ndarray) -> np.ndarray:
    if isinstance(bits, str):
        arr = np.frombuffer(bits.encode(), dtype=np.uint8) - ord("0")
    else:
        arr = np.asarray(bits)
    return (2 * arr.astype(np.int64) - 1)


def signs_to_bits(signs: np.ndarray) -> str:
    return "".join("1" if s > 0 else "0" for s in signs)


def labels_to_mask(labels: str) -> np.ndarray:
    """True where a row is labelled A."""
    return np.frombuffer(labels.encode(), dtype=np.uint8) == ord("A")


def mask_to_labels(mask: np.ndarray) -> str:
    return "".join("A" if a else "B" for a in mask)


def row_distances(signed: np.ndarray, bits: str | np.ndarray) -> np.ndarray:
    s = bits_to_signs(bits)
    nnz = np.abs(signed).sum(axis=1, dtype=np.int64)
    return (nnz - signed.astype(np.int64) @ s) // 2


def _check_strings(M: FragmentMatrix, *strings: str) -> None:
    for s in strings:
        if len(s) != M.m:
            raise ValueError(f"solution string has length {len(s)}, expected m={M.m}")
        if set(s) - {"0", "1"}:
            raise ValueError("solution strings must be binary")


def cost(M: FragmentMatrix, sigma: str, sigma_prime: str) -> tuple[int, str]:
    """Default-assignment cost; ties go to ``sigma`` (label A)."""
    _check_strings(M, sigma, sigma_prime)
    da = row_distances(M.signed, sigma)
    db = row_distances(M.signed, sigma_prime)
    mask = da <= db
    return int(np.minimum(da, db).sum()), mask_to_labels(mask)


def cost_fixed(M: FragmentMatrix, sigma: str, sigma_prime: str, assignment: str) -> int:
    _check_strings(M, sigma, sigma_prime)
    if len(assignment) != M.n or set(assignment) - {"A", "B"}:
        raise ValueError("assignment must have one A/B label per row")
    mask = labels_to_mask(assignment)
    da = row_distances(M.signed, sigma)
    db = row_distances(M.signed, sigma_prime)
    return int(np.where(mask, da, db).sum())


def majority_bits(signed: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Column majority over masked rows as 0/1; ties and empty columns give 1."""
    sums = signed[mask].sum(axis=0, dtype=np.int64)
    return (sums >= 0).astype(np.int8)


def majority_complete(M: FragmentMatrix, assignment: str) -> SolutionPair:
    if len(assignment) != M.n:
        raise ValueError("assignment length must equal n")
    mask = labels_to_mask(assignment)
    sigma = signs_to_bits(2 * majority_bits(M.signed, mask) - 1)
    sigma_prime = signs_to_bits(2 * majority_bits(M.signed, ~mask) - 1)
    return SolutionPair(sigma, sigma_prime, assignment,
                        cost_fixed(M, sigma, sigma_prime, assignment))


def default_solution(M: FragmentMatrix, sigma: str, sigma_prime: str, **meta) -> SolutionPair:
    c, labels = cost(M, sigma, sigma_prime)
    return SolutionPair(sigma, sigma_prime, labels, c, dict(meta))


# --- validation ------------------------------------------------------------

@dataclass
class Diagnostics:
    errors: list[str] = field(default_factory=list)
    binary: bool = False
    swc: bool = False
    subinterval_free: bool = False
    rooted_columns: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    @property
    def classes(self) -> list[str]:
        out = [name for name, flag in (("binary", self.binary), ("swc", self.swc),
                                       ("subinterval-free", self.subinterval_free)) if flag]
        if self.rooted_columns:
            out.append("rooted")
        return out or ["general"]

    def summary(self) -> str:
        if self.errors:
            return "invalid: " + "; ".join(self.errors)
        return "valid; classes: " + ", ".join(self.classes)


def is_subinterval_free(intervals: Sequence[tuple[int, int]]) -> bool:
    # Sorted by (start, -end), a strict containment shows up as a non-increasing end
    # between distinct intervals.
    uniq = sorted(set(intervals), key=lambda iv: (iv[0], -iv[1]))
    best_end = 0
    for _, e in uniq:
        if e <= best_end:
            return False
        best_end = e
    return True


def classify_intervals(m: int, intervals: Sequence[tuple[int, int]], diag: Diagnostics) -> None:
    diag.binary = all(s == 1 and e == m for s, e in intervals)
    diag.swc = all(s == 1 for s, _ in intervals)
    diag.subinterval_free = is_subinterval_free(intervals)
    lo = max(s for s, _ in intervals)
    hi = min(e for _, e in intervals)
    diag.rooted_columns = list(range(lo, hi + 1))


def validate_lines(lines: Sequence[str], m: int | None = None) -> Diagnostics:
    """Validate raw m-width row texts; never raises."""
    diag = Diagnostics()
    if not lines:
        diag.errors.append("instance has no rows")
        return diag
    m = m if m is not None else len(lines[0])
    if m < 1:
        diag.errors.append("instance has no columns")
        return diag
    intervals = []
    for i, text in enumerate(lines, start=1):
        if len(text) != m:
            diag.errors.append(f"row {i}: width {len(text)} != m={m}")
            continue
        bad = sorted(set(text) - {"0", "1", "-"})
        if bad:
            col = min(text.index(ch) for ch in bad) + 1
            diag.errors.append(f"row {i}, column {col}: invalid symbol {text[col - 1]!r}")
            continue
        stripped = text.strip("-")
        if not stripped:
            diag.errors.append(f"row {i}: empty row (no binary entries)")
            continue
        if "-" in stripped:
            col = text.index(stripped[0]) + stripped.index("-") + 1
            diag.errors.append(f"row {i}, column {col}: wildcard inside binary part (gap)")
            continue
        s = text.index(stripped[0]) + 1
        intervals.append((s, s + len(stripped) - 1))
    if not diag.errors:
        classify_intervals(m, intervals, diag)
    return diag


def validate(M: FragmentMatrix | Sequence[str]) -> Diagnostics:
    if isinstance(M, FragmentMatrix):
        return validate_lines(M.to_strings(), M.m)
    return validate_lines(list(M))


def standard_order(M: FragmentMatrix) -> np.ndarray:
    """Stable permutation sorting rows by increasing binary-part length."""
    return np.argsort(M.lengths, kind="stable")


def start_order(M: FragmentMatrix) -> np.ndarray:
    """Rows by increasing start, ties by increasing end."""
    return np.lexsort((M.ends, M.starts))


def permute_back(sol: SolutionPair, perm: np.ndarray) -> SolutionPair:
    """Map an assignment computed on ``M.subset(perm)`` back to original row order."""
    labels = [""] * len(perm)
    for new_i, old_i in enumerate(perm):
        labels[old_i] = sol.assignment[new_i]
    return SolutionPair(sol.sigma, sol.sigma_prime, "".join(labels), sol.cost, sol.meta)
