"""Acceptance checks; each records one pass/fail line for the terminal summary."""
import time
from dataclasses import replace

import numpy as np
import pytest

from gapless_mec.bench import BenchConfig, bench_suite
from gapless_mec.cli import main
from gapless_mec.core import FragmentMatrix, cost_fixed, majority_complete, mask_to_labels
from gapless_mec.dp import solve_dp_pair, solve_dp_single
from gapless_mec.generator import FAMILIES, GenSpec, generate
from gapless_mec.length_class import build_index, solve_general
from gapless_mec.oracle import all_strings, exact_bipartition, exact_strings
from gapless_mec.subinterval import solve_rooted, solve_subinterval_free
from gapless_mec.swc import (
    Precision,
    _vote_strings,
    runtime_subdivision,
    sample_selection,
    solve_swc,
)

from conftest import ACCEPTANCE, FORCED


def record(k: int, name: str, ok: bool, detail: str) -> None:
    ACCEPTANCE[k] = f"[{'PASS' if ok else 'FAIL'}] {k}. {name}: {detail}"


def test_1_oracle_cross_validation():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    bad = []
    for k in range(500):
        fam = FAMILIES[k % len(FAMILIES)]
        n, m = int(rng.integers(2, 11)), int(rng.integers(1, 7))
        M, _ = generate(GenSpec(n, m, float(rng.choice([0.0, 0.1, 0.3])), fam, seed=k))
        a, b = exact_bipartition(M), exact_strings(M)
        if a.cost != b.cost:
            bad.append(k)
    dt = time.perf_counter() - t0
    ok = not bad and dt < 60
    record(1, "oracle cross-validation", ok, f"500 instances, {len(bad)} disagreements, {dt:.1f}s")
    assert ok, bad


def test_2_majority_optimality():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    beaten = 0
    for k in range(200):
        n, m = int(rng.integers(1, 9)), int(rng.integers(1, 7))
        M, _ = generate(GenSpec(n, m, 0.2, FAMILIES[k % len(FAMILIES)] if n > 1 else "general",
                                seed=k))
        S = M.signed.astype(np.int64)
        signs = all_strings(m).astype(np.int64)
        D = (np.abs(S).sum(axis=1)[:, None] - S @ signs.T) // 2   # rows x strings
        for mask in range(1 << n):
            in_a = np.array([(mask >> i) & 1 for i in range(n)], bool)
            ca, cb = D[in_a].sum(axis=0), D[~in_a].sum(axis=0)
            # every ordered pair: ca[s] + cb[t]
            best_pair = int((ca[:, None] + cb[None, :]).min())
            if best_pair < majority_complete(M, mask_to_labels(in_a)).cost:
                beaten += 1
    dt = time.perf_counter() - t0
    ok = beaten == 0 and dt < 300
    record(2, "majority optimality", ok, f"200 instances, all assignments, {beaten} beaten, {dt:.1f}s")
    assert ok


def _root(M):
    return int(M.starts.max())


ZERO_NOISE = {
    "swc": ("swc", lambda M, s: solve_swc(M, seed=s)),
    "dp-single": ("swc", lambda M, s: solve_dp_single(M, seed=s)),
    "dp-pair": ("swc", lambda M, s: solve_dp_pair(M, seed=s)),
    "rooted": ("rooted", lambda M, s: solve_rooted(M, _root(M), seed=s)),
    "subinterval-free": ("subinterval-free", lambda M, s: solve_subinterval_free(M, seed=s)),
    "general": ("general", lambda M, s: solve_general(M, seed=s)),
}


def test_3_zero_noise_recovery():
    failures = []
    for algo, (family, fn) in ZERO_NOISE.items():
        for seed in range(30):
            M, _ = generate(GenSpec(16, 16, 0.0, family, seed=seed))
            if fn(M, seed).cost != 0:
                failures.append((algo, seed))
    record(3, "zero-noise recovery", not failures,
           f"6 solvers x 30 seeds at n=16 m=16, nonzero: {failures or 'none'}")
    assert not failures


GATES = {
    "dp-pair": ("swc", lambda M, s: solve_dp_pair(M, seed=s)),
    "rooted": ("rooted", lambda M, s: solve_rooted(M, _root(M), seed=s)),
    "subinterval-free": ("subinterval-free", lambda M, s: solve_subinterval_free(M, seed=s)),
}


@pytest.mark.parametrize("algo", list(GATES))
def test_4_approximation_gates(algo):
    family, fn = GATES[algo]
    t0 = time.perf_counter()
    ratios, zero_defects = [], 0
    for seed in range(30):
        M, _ = generate(GenSpec(14, 8, 0.1, family, seed=seed))
        cost, opt = fn(M, seed).cost, exact_bipartition(M).cost
        if opt == 0:
            zero_defects += cost > 0
        else:
            ratios.append(cost / opt)
    dt = time.perf_counter() - t0
    med, worst = float(np.median(ratios)), max(ratios)
    ok = med <= 1.2 and worst <= 1.5 and zero_defects == 0 and dt < 600
    line = f"{algo}: median {med:.3f}, max {worst:.3f}, {len(ratios)} ratio cells, {dt:.1f}s"
    prev = ACCEPTANCE.get(4)
    all_ok = ok and (prev is None or prev.startswith("[PASS]"))
    detail = (prev.split(": ", 1)[1] + "; " if prev else "") + line
    record(4, "approximation gates", all_ok, detail)
    assert ok


def test_5_length_class_fuzzing():
    rng = np.random.default_rng(5)
    violations = 0
    for k in range(1000):
        m = int(rng.integers(1, 1025))
        n = int(rng.integers(1, 40))
        starts = rng.integers(1, m + 1, size=n)
        ends = [int(rng.integers(s, m + 1)) for s in starts]
        M = FragmentMatrix.from_intervals(m, [(int(s), "0" * (e - s + 1))
                                              for s, e in zip(starts, ends)])
        try:
            idx = build_index(M)   # asserts the crossing and skipping properties
            for a, b in zip(idx.classes, idx.classes[1:]):
                assert set(a.columns) <= set(b.columns)
        except AssertionError:
            violations += 1
    record(5, "length-class fuzzing", violations == 0,
           f"1000 instances, m up to 1024, {violations} violations")
    assert violations == 0


def _density_instance(p: float, seed: int, n: int = 96, m: int = 16) -> FragmentMatrix:
    """Adversarial-density layout; each column has exactly round(p*|c|) zeros."""
    rng = np.random.default_rng(seed)
    layout, _ = generate(GenSpec(n, m, 0.0, "adversarial-density", seed=seed))
    starts, ends = layout.starts, layout.ends
    bits = np.zeros((n, m), dtype=np.int8)
    for j in range(1, m + 1):
        crossing = np.flatnonzero((starts <= j) & (ends >= j))
        ones = len(crossing) - round(p * len(crossing))
        bits[rng.choice(crossing, size=ones, replace=False), j - 1] = 1
    return FragmentMatrix.from_intervals(
        m, [(int(s), "".join(map(str, bits[i, s - 1:e])))
            for i, (s, e) in enumerate(zip(starts.tolist(), ends.tolist()))])


def test_6_weighted_vote_statistics():
    precision = Precision()
    lines, ok = [], True
    for p in (0.6, 0.75, 0.9):
        M = _density_instance(p, seed=6)
        S = M.signed
        count = np.abs(S).sum(axis=0)
        sub = runtime_subdivision(M.n, "A", precision)
        voted = list(sub.trisection.U) + list(sub.trisection.L)
        cols = np.abs(S[voted]).sum(axis=0) > 0   # columns the sampled ranges reach
        rng = np.random.default_rng(int(p * 100))
        errs = []
        for _ in range(1000):
            sel = sample_selection(sub, precision.rows_per_chunk, rng)
            sig = 2 * _vote_strings(S, sel, precision.eps).astype(np.int64) - 1
            errs.append(int((((count - (S * sig).sum(axis=0)) // 2)[cols]).sum()))
        planted = int((count - np.round(p * count)).astype(int)[cols].sum())
        ratio = np.mean(errs) / planted
        ok &= ratio <= 1.3
        lines.append(f"p={p}: {ratio:.3f}")
    record(6, "weighted-vote statistics", ok, ", ".join(lines) + " (bound 1.3)")
    assert ok


def test_7_cli_determinism(tmp_path):
    inst = tmp_path / "i.mec"
    main(["gen", "--family", "swc", "--n", "12", "--m", "8", "--flip-rate", "0.1",
          "--seed", "3", "--out", str(inst)])
    rooted = tmp_path / "r.mec"
    main(["gen", "--family", "rooted", "--n", "10", "--m", "8", "--flip-rate", "0.1",
          "--seed", "3", "--out", str(rooted)])
    calls = [["gen", "--family", "general", "--n", "14", "--m", "9", "--flip-rate", "0.1",
              "--seed", "4", "--truth", "{out}.truth"],
             ["bench", "--suite", "tiny", "--seed", "7", "--summary", "{out}.summary"],
             ["compare", str(inst)],
             ["inspect", str(inst), "--length-classes"],
             ["solve", str(rooted), "--algo", "rooted", "--json", "--small-r-cutoff", "0"]]
    free = tmp_path / "f.mec"
    main(["gen", "--family", "subinterval-free", "--n", "12", "--m", "9", "--flip-rate", "0.1",
          "--seed", "3", "--out", str(free)])
    for algo in ("exact-bipartition", "exact-strings", "swc", "dp-single", "dp-pair", "general"):
        calls.append(["solve", str(inst), "--algo", algo, "--json", "--seed", "5"])
    calls.append(["solve", str(free), "--algo", "subinterval-free", "--json",
                  "--small-r-cutoff", "0", "--center-candidates", "1"])
    calls.append(["solve", str(inst), "--algo", "dp-pair", "--small-r-cutoff", "0",
                  "--dump-cells", "{out}.cells"])
    differing = []
    for k, argv in enumerate(calls):
        blobs = []
        for rep in range(2):
            out = tmp_path / f"c{k}-{rep}"
            args = [a.format(out=out) for a in argv] + ["--out", str(out)]
            assert main(args) == 0, args
            blobs.append(b"".join(p.read_bytes() for p in sorted(tmp_path.glob(f"c{k}-{rep}*"))))
        if blobs[0] != blobs[1]:
            differing.append(" ".join(argv[:2]))
    record(7, "CLI determinism", not differing,
           f"{len(calls)} invocations repeated, differing: {differing or 'none'}")
    assert not differing


def test_8_never_below_opt():
    configs = [BenchConfig(flip_rates=(0.0, 0.1, 0.2), seeds=3),
               BenchConfig(families=("swc", "rooted", "subinterval-free", "general"),
                           flip_rates=(0.1,), seeds=1, precision=FORCED)]
    cells, below, inconsistent, errors = 0, [], [], []
    for cfg in configs:
        for row in bench_suite(cfg):
            cells += 1
            cost = row["cost"]
            if not isinstance(cost, int):
                (inconsistent if cost.startswith("mismatch") else errors).append(row["instance"])
                continue
            if isinstance(row["opt"], int) and cost < row["opt"]:
                below.append((row["instance"], row["algo"]))
    ok = not below and not inconsistent
    record(8, "never-below-OPT audit", ok,
           f"{cells} cells, below OPT: {len(below)}, recomputation mismatches: "
           f"{len(inconsistent)}, solver errors: {len(errors)}")
    assert ok
