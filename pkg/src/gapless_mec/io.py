"""Text formats.

Instance (``.mec``)::

    n m
    <n lines of exactly m characters from {0,1,-}>

Solution::

    <sigma>
    <sigma_prime>
    <n labels from {A,B}>
    cost <integer>
"""
from __future__ import annotations

from pathlib import Path

from .core import FragmentMatrix, SolutionPair, validate_lines


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


def parse_mec(text: str) -> FragmentMatrix:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise FormatError("empty file", 1)
    header = lines[0].split()
    if len(header) != 2 or not all(h.isdigit() for h in header):
        raise FormatError("header must be 'n m'", 1)
    n, m = map(int, header)
    body = lines[1:]
    if len(body) != n:
        raise FormatError(f"expected {n} rows, found {len(body)}", len(lines) + 1)
    for k, row in enumerate(body, start=2):
        if len(row) != m:
            raise FormatError(f"row width {len(row)} != m={m}", k)
        for c, ch in enumerate(row, start=1):
            if ch not in "01-":
                raise FormatError(f"invalid symbol {ch!r}", k, c)
        stripped = row.strip("-")
        if not stripped:
            raise FormatError("row has no binary entries", k)
        if "-" in stripped:
            raise FormatError("wildcard inside binary part (gap)", k,
                              row.index(stripped[0]) + stripped.index("-") + 1)
    diag = validate_lines(body, m)
    if not diag.ok:
        raise FormatError(diag.summary())
    return FragmentMatrix.from_strings(body)


def format_mec(M: FragmentMatrix) -> str:
    return f"{M.n} {M.m}\n" + "".join(s + "\n" for s in M.to_strings())


def read_mec(path: str | Path) -> FragmentMatrix:
    return parse_mec(Path(path).read_text())


def write_mec(M: FragmentMatrix, path: str | Path) -> None:
    Path(path).write_text(format_mec(M))


def format_solution(sol: SolutionPair) -> str:
    return f"{sol.sigma}\n{sol.sigma_prime}\n{sol.assignment}\ncost {sol.cost}\n"


def parse_solution(text: str) -> SolutionPair:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if len(lines) != 4:
        raise FormatError(f"solution needs 4 lines, found {len(lines)}")
    sigma, sigma_prime, labels, cost_line = lines
    for k, (s, alphabet) in enumerate(((sigma, "01"), (sigma_prime, "01"), (labels, "AB")), 1):
        bad = [c for c, ch in enumerate(s, 1) if ch not in alphabet]
        if bad:
            raise FormatError(f"invalid symbol {s[bad[0] - 1]!r}", k, bad[0])
    parts = cost_line.split()
    if len(parts) != 2 or parts[0] != "cost" or not parts[1].isdigit():
        raise FormatError("last line must be 'cost <integer>'", 4)
    return SolutionPair(sigma, sigma_prime, labels, int(parts[1]))
