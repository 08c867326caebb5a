"""Benchmark suites: run solvers on generated instances and compare to the oracle."""
from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable

import numpy as np

from .core import FragmentMatrix, SolutionPair, cost_fixed
from .dp import solve_dp_pair, solve_dp_single
from .generator import GenSpec, generate
from .length_class import solve_general
from .oracle import BudgetExceeded, exact_bipartition, exact_strings
from .subinterval import solve_rooted, solve_subinterval_free
from .swc import Precision, solve_swc

HEADER = ["instance", "family", "n", "m", "algo", "seed", "cost", "opt", "ratio", "ms", "params"]


def _rooted(M: FragmentMatrix, precision: Precision, seed: int, root: int | None = None):
    if root is None:
        lo, hi = int(M.starts.max()), int(M.ends.min())
        if lo > hi:
            raise ValueError("no column is crossed by every row; pass a root")
        root = lo
    return solve_rooted(M, root, precision, seed)


ALGORITHMS: dict[str, Callable[..., SolutionPair]] = {
    "exact-bipartition": lambda M, p, s, root=None: exact_bipartition(M),
    "exact-strings": lambda M, p, s, root=None: exact_strings(M),
    "swc": lambda M, p, s, root=None: solve_swc(M, p, s),
    "dp-single": lambda M, p, s, root=None: solve_dp_single(M, p, s),
    "dp-pair": lambda M, p, s, root=None: solve_dp_pair(M, p, s),
    "rooted": _rooted,
    "subinterval-free": lambda M, p, s, root=None: solve_subinterval_free(M, p, s),
    "general": lambda M, p, s, root=None: solve_general(M, p, s),
}

# which solvers apply to which generated family
MATCHING = {
    "binary": ("swc", "dp-pair", "rooted", "general"),
    "swc": ("swc", "dp-single", "dp-pair", "general"),
    "rooted": ("rooted", "general"),
    "subinterval-free": ("subinterval-free", "general"),
    "general": ("general",),
    "adversarial-density": ("swc", "dp-pair"),
}


@dataclass(frozen=True)
class BenchConfig:
    families: tuple[str, ...] = ("swc", "rooted", "subinterval-free", "general")
    sizes: tuple[tuple[int, int], ...] = ((12, 8),)
    flip_rates: tuple[float, ...] = (0.0, 0.1)
    seeds: int = 3
    seed: int = 0
    algos: tuple[str, ...] | None = None
    precision: Precision = field(default_factory=Precision)

    @classmethod
    def from_text(cls, text: str, base: "BenchConfig | None" = None) -> "BenchConfig":
        """``key=value`` lines; keys are the field names, lists comma separated,
        sizes as ``12x8``.  Precision knobs use a ``precision.`` prefix."""
        base = base or cls()
        kw: dict = {}
        prec: dict = {}
        for ln, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line {ln}: expected key=value")
            key, value = (x.strip() for x in line.split("=", 1))
            items = [v.strip() for v in value.split(",") if v.strip()]
            if key == "families":
                kw[key] = tuple(items)
            elif key == "algos":
                kw[key] = tuple(items)
            elif key == "sizes":
                sizes = tuple(tuple(int(x) for x in v.split("x")) for v in items)
                if any(len(s) != 2 for s in sizes):
                    raise ValueError(f"config line {ln}: sizes must look like 12x8")
                kw[key] = sizes
            elif key == "flip_rates":
                kw[key] = tuple(float(v) for v in items)
            elif key in ("seeds", "seed"):
                kw[key] = int(value)
            elif key.startswith("precision."):
                name = key.split(".", 1)[1]
                prec[name] = float(value) if name == "eps" else int(value)
            else:
                raise ValueError(f"config line {ln}: unknown key {key!r}")
        if prec:
            kw["precision"] = Precision(**{**_precision_kwargs(base.precision, prec), **prec})
        merged = {**base.__dict__, **kw}
        return cls(**merged)


def _precision_kwargs(p: Precision, changed: dict | None = None) -> dict:
    kw = dict(p.__dict__)
    if changed and "eps" in changed:
        # derived knobs follow a new eps unless set explicitly
        for name in ("chunks_per_range", "rows_per_chunk", "small_r_cutoff"):
            kw[name] = None
    return kw


SUITES = {
    "default": BenchConfig(),
    "tiny": BenchConfig(families=("swc", "rooted"), seeds=2, flip_rates=(0.1,)),
}


def _params(p: Precision) -> str:
    return (f"eps={p.eps};K={p.chunks_per_range};S={p.rows_per_chunk};"
            f"cutoff={p.small_r_cutoff};trials={p.selection_trials}")


def run_cell(family: str, n: int, m: int, flip: float, algo: str, seed: int,
             precision: Precision) -> dict:
    M, _ = generate(GenSpec(n, m, flip, family, seed=seed))
    name = f"{family}-n{n}-m{m}-f{flip:g}-s{seed}"
    row = {"instance": name, "family": family, "n": n, "m": m, "algo": algo, "seed": seed,
           "cost": "", "opt": "", "ratio": "", "ms": "", "params": _params(precision)}
    t0 = time.perf_counter()
    try:
        sol = ALGORITHMS[algo](M, precision, seed)
    except Exception as exc:  # per-cell failures are recorded, not fatal
        row["cost"] = f"error:{type(exc).__name__}"
        return row
    row["_ms"] = f"{1000 * (time.perf_counter() - t0):.1f}"
    recomputed = cost_fixed(M, sol.sigma, sol.sigma_prime, sol.assignment)
    if recomputed != sol.cost:
        row["cost"] = f"mismatch:{sol.cost}!={recomputed}"
        return row
    row["cost"] = recomputed
    try:
        opt = exact_bipartition(M).cost
    except BudgetExceeded:
        row["opt"], row["ratio"] = "over-budget", "over-budget"
        return row
    row["opt"] = opt
    row["ratio"] = str(Fraction(recomputed, opt)) if opt else "opt-zero"
    return row


def _cells(config: BenchConfig) -> list[tuple]:
    out = []
    for fam, (n, m), flip in product(config.families, config.sizes, config.flip_rates):
        algos = config.algos or MATCHING[fam]
        for algo in algos:
            for k in range(config.seeds):
                out.append((fam, n, m, flip, algo, config.seed + k, config.precision))
    return out


def _run(args: tuple) -> dict:
    return run_cell(*args)


def bench_suite(config: BenchConfig, jobs: int = 1, timings: bool = False) -> list[dict]:
    cells = _cells(config)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_run, cells))
    else:
        rows = [_run(c) for c in cells]
    for row in rows:
        ms = row.pop("_ms", "")
        row["ms"] = ms if timings else ""
    rows.sort(key=lambda r: (r["family"], r["n"], r["m"], r["algo"], r["seed"], r["instance"]))
    return rows


def to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=HEADER, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def summarize(rows: list[dict]) -> dict:
    """Median and 95th percentile ratio per algorithm; OPT-0 cells counted apart."""
    out: dict = {}
    for row in rows:
        s = out.setdefault(row["algo"], {"ratios": [], "opt_zero": 0, "opt_zero_defects": 0,
                                         "over_budget": 0, "errors": 0})
        if not isinstance(row["cost"], int):
            s["errors"] += 1
        elif row["ratio"] == "opt-zero":
            s["opt_zero"] += 1
            s["opt_zero_defects"] += row["cost"] > 0
        elif row["ratio"] == "over-budget":
            s["over_budget"] += 1
        else:
            s["ratios"].append(float(Fraction(row["ratio"])))
    for s in out.values():
        r = s.pop("ratios")
        s["ratio_cells"] = len(r)
        s["median"] = round(float(np.median(r)), 6) if r else None
        s["p95"] = round(float(np.percentile(r, 95)), 6) if r else None
        s["max"] = round(max(r), 6) if r else None
    return dict(sorted(out.items()))


def format_summary(summary: dict) -> str:
    return json.dumps(summary, indent=2, sort_keys=True) + "\n"
