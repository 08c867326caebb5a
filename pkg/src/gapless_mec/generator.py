"""Seeded instances with planted haplotypes.

Two uniform binary haplotypes are drawn, each row copies an interval of its
haplotype and every copied bit is flipped with probability ``flip_rate``.
Interval starts are uniform over feasible positions and lengths uniform over
the family's admissible range.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FragmentMatrix, Row, SolutionPair, cost_fixed

FAMILIES = ("binary", "swc", "subinterval-free", "rooted", "general", "adversarial-density")


@dataclass(frozen=True)
class GenSpec:
    n: int
    m: int
    flip_rate: float = 0.0
    family: str = "general"
    balance: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be positive")
        if not 0 <= self.flip_rate <= 0.5:
            raise ValueError("flip_rate must lie in [0, 1/2]")
        if not 0 < self.balance < 1:
            raise ValueError("balance must lie in (0, 1)")
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        if self.family == "adversarial-density" and self.n < 2:
            raise ValueError("adversarial-density needs at least two rows")


def _uniform(rng, lo: int, hi: int) -> int:
    return int(rng.integers(lo, hi + 1))


def _intervals(spec: GenSpec, rng: np.random.Generator) -> list[tuple[int, int]]:
    n, m = spec.n, spec.m
    fam = spec.family
    if fam == "binary":
        return [(1, m)] * n
    if fam == "swc":
        return [(1, _uniform(rng, 1, m)) for _ in range(n)]
    if fam == "rooted":
        root = _uniform(rng, 1, m)
        return [(_uniform(rng, 1, root), _uniform(rng, root, m)) for _ in range(n)]
    if fam == "general":
        out = []
        for _ in range(n):
            s = _uniform(rng, 1, m)
            out.append((s, s + _uniform(rng, 1, m - s + 1) - 1))
        return out
    if fam == "adversarial-density":
        n_long = max(2, n // 6) if n >= 4 else 1
        short = max(1, m // 4)
        return [(1, m)] * n_long + [(1, _uniform(rng, 1, short)) for _ in range(n - n_long)]
    # subinterval-free: k distinct intervals with strictly increasing starts and ends
    k = _uniform(rng, 1, min(n, m, max(2, n // 3)))
    starts = np.sort(rng.choice(np.arange(1, m + 1), size=k, replace=False))
    ivs, prev_end = [], 0
    for t, s in enumerate(int(x) for x in starts):
        lo = max(s, prev_end + 1)
        hi = m - (k - 1 - t)
        hi_eff = max(lo, min(hi, s + max(1, m // 2)))
        e = _uniform(rng, lo, hi_eff)
        ivs.append((s, e))
        prev_end = e
    counts = 1 + rng.multinomial(n - k, [1 / k] * k)
    return [iv for iv, c in zip(ivs, counts) for _ in range(int(c))]


def generate(spec: GenSpec) -> tuple[FragmentMatrix, SolutionPair]:
    rng = np.random.default_rng(spec.seed)
    haps = rng.integers(0, 2, size=(2, spec.m))
    ivs = _intervals(spec, rng)
    labels = np.where(rng.random(spec.n) < spec.balance, 0, 1)
    if spec.family == "adversarial-density":
        n_long = sum(1 for s, e in ivs if e == spec.m and s == 1)
        labels[:n_long] = np.arange(n_long) % 2
    rows = []
    for (s, e), lab in zip(ivs, labels):
        bits = haps[lab, s - 1:e].copy()
        flips = rng.random(len(bits)) < spec.flip_rate
        bits[flips] ^= 1
        rows.append((Row(s, "".join(map(str, bits))), "AB"[lab]))
    if spec.family in ("swc", "adversarial-density"):
        rows.sort(key=lambda t: len(t[0]))
    else:
        rows.sort(key=lambda t: (t[0].start, t[0].end))
    M = FragmentMatrix(spec.m, tuple(r for r, _ in rows))
    sigma, sigma_prime = ("".join(map(str, h)) for h in haps)
    assignment = "".join(lab for _, lab in rows)
    planted = SolutionPair(sigma, sigma_prime, assignment,
                           cost_fixed(M, sigma, sigma_prime, assignment))
    return M, planted
