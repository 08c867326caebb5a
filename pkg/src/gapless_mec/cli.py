"""Command line front end.

Exit codes: 0 success, 1 input or solver error, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import kernels
from .bench import ALGORITHMS, SUITES, BenchConfig, bench_suite, format_summary, summarize, to_csv
from .core import cost_fixed, validate_lines
from .dp import format_cell, solve_dp_pair, solve_dp_single
from .generator import FAMILIES, GenSpec, generate
from .io import FormatError, format_mec, format_solution, read_mec
from .length_class import build_index
from .oracle import BudgetExceeded, exact_bipartition
from .swc import NotApplicable, Precision


class CliError(Exception):
    pass


def _precision(args) -> Precision:
    try:
        p = Precision(eps=args.eps, chunks_per_range=args.chunks, rows_per_chunk=args.samples,
                      small_r_cutoff=args.small_r_cutoff)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    overrides = {k: v for k, v in (("selection_trials", args.trials),
                                   ("exhaustive_limit", args.exhaustive_limit),
                                   ("beam_width", args.beam_width),
                                   ("dp_samples", args.dp_samples),
                                   ("center_candidates", args.center_candidates),
                                   ("max_interval_width", args.max_interval_width)) if v is not None}
    return replace(p, **overrides)


def _add_precision(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("precision")
    g.add_argument("--epsilon", "--eps", dest="eps", type=float, default=0.5,
                   help="precision parameter in (0, 1/2]")
    g.add_argument("--chunks", type=int, help="chunks per row range (default round(1/eps^2))")
    g.add_argument("--samples-per-chunk", "--samples", dest="samples", type=int,
                   help="rows sampled per chunk (default round(1/eps^3))")
    g.add_argument("--small-r-cutoff", type=int,
                   help="guesses with fewer rows on a side are solved exactly")
    g.add_argument("--trials", type=int, help="random selection trials")
    g.add_argument("--exhaustive-limit", type=int,
                   help="enumerate all selections when there are at most this many")
    g.add_argument("--beam-width", type=int, help="cells kept per block in the programs")
    g.add_argument("--dp-samples", type=int, help="selections drawn per block")
    g.add_argument("--center-candidates", type=int, help="centre votes per root")
    g.add_argument("--max-interval-width", type=int,
                   help="widest non-dominance interval that is voted jointly")


def _load(path: str):
    try:
        return read_mec(path)
    except FormatError as exc:
        raise CliError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise CliError(str(exc)) from exc


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    try:
        text = Path(args.file).read_text()
    except OSError as exc:
        raise CliError(str(exc)) from exc
    lines = text.splitlines()
    body = lines[1:] if lines and len(lines[0].split()) == 2 else lines
    diag = validate_lines([ln for ln in body if ln.strip()])
    print(diag.summary())
    return 0 if diag.ok else 1


def cmd_gen(args) -> int:
    try:
        M, truth = generate(GenSpec(args.n, args.m, args.flip_rate, args.family,
                                    args.balance, args.seed))
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    _write(format_mec(M), args.out)
    if args.truth:
        Path(args.truth).write_text(format_solution(truth))
    return 0


def cmd_solve(args) -> int:
    M = _load(args.file)
    precision = _precision(args)
    audit: list | None = [] if args.dump_cells else None
    try:
        if args.algo == "dp-pair" and audit is not None:
            sol = solve_dp_pair(M, precision, args.seed, audit)
        elif args.algo == "dp-single" and audit is not None:
            sol = solve_dp_single(M, precision, args.seed, audit)
        elif args.algo == "rooted":
            sol = ALGORITHMS["rooted"](M, precision, args.seed, args.root)
        else:
            sol = ALGORITHMS[args.algo](M, precision, args.seed)
    except (NotApplicable, BudgetExceeded, ValueError) as exc:
        classes = ", ".join(validate_lines(M.to_strings()).classes)
        raise CliError(f"{args.algo}: {exc} (instance classes: {classes})") from exc
    cost = cost_fixed(M, sol.sigma, sol.sigma_prime, sol.assignment)
    if args.dump_cells:
        Path(args.dump_cells).write_text("".join(format_cell(r, c) + "\n" for r, c in audit))
    if args.json:
        record = {"algo": args.algo, "seed": args.seed, "cost": cost, "sigma": sol.sigma,
                  "sigma_prime": sol.sigma_prime, "assignment": sol.assignment,
                  "backend": kernels.BACKEND}
        _write(json.dumps(record, sort_keys=True) + "\n", args.out)
    else:
        _write(format_solution(sol), args.out)
    return 0


def cmd_bench(args) -> int:
    if args.suite not in SUITES:
        raise CliError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    config = SUITES[args.suite]
    if args.config:
        try:
            config = BenchConfig.from_text(Path(args.config).read_text(), config)
        except (OSError, ValueError) as exc:
            raise CliError(f"{args.config}: {exc}") from exc
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    rows = bench_suite(config, jobs=args.jobs, timings=args.timings)
    _write(to_csv(rows), args.out)
    summary = format_summary(summarize(rows))
    if args.summary:
        Path(args.summary).write_text(summary)
    elif args.out:
        sys.stdout.write(summary)
    return 0


def cmd_compare(args) -> int:
    M = _load(args.file)
    precision = _precision(args)
    lines = ["algo,cost"]
    for algo in args.algos.split(","):
        if algo not in ALGORITHMS:
            raise CliError(f"unknown algorithm {algo!r}")
        try:
            sol = ALGORITHMS[algo](M, precision, args.seed)
            lines.append(f"{algo},{cost_fixed(M, sol.sigma, sol.sigma_prime, sol.assignment)}")
        except (NotApplicable, BudgetExceeded, ValueError) as exc:
            lines.append(f"{algo},n/a ({exc})")
    try:
        lines.append(f"oracle,{exact_bipartition(M).cost}")
    except BudgetExceeded:
        lines.append("oracle,over-budget")
    _write("\n".join(lines) + "\n", args.out)
    return 0


def cmd_inspect(args) -> int:
    M = _load(args.file)
    diag = validate_lines(M.to_strings())
    out = [f"n={M.n} m={M.m}", diag.summary()]
    if diag.rooted_columns:
        out.append("rooted columns: " + ",".join(map(str, diag.rooted_columns)))
    if args.length_classes:
        out.append(build_index(M).table())
    _write("\n".join(out) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gapless-mec",
                                 description="Minimum error correction for gapless fragment matrices.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a .mec file and print its classes")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("gen", help="generate a planted instance")
    p.add_argument("--family", choices=FAMILIES, default="general")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--flip-rate", type=float, default=0.0)
    p.add_argument("--balance", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--truth", help="write the planted solution here")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="solve an instance")
    p.add_argument("file")
    p.add_argument("--algo", choices=sorted(ALGORITHMS), default="general")
    p.add_argument("--root", type=int, help="root column for --algo rooted")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.add_argument("--dump-cells", metavar="PATH", help="write the cell audit log (dp-single, dp-pair)")
    _add_precision(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="run a benchmark suite and write CSV")
    p.add_argument("--suite", default="default")
    p.add_argument("--config", help="key=value file overriding the suite")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--summary", help="write the ratio summary (JSON) here")
    p.add_argument("--timings", action="store_true", help="fill the ms column")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("compare", help="run several algorithms on one instance")
    p.add_argument("file")
    p.add_argument("--algos", default="swc,dp-pair,general")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    _add_precision(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("inspect", help="describe an instance")
    p.add_argument("file")
    p.add_argument("--length-classes", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_inspect)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
