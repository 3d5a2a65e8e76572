"""Command-line interface: truncation diagnostics, trace replay, method
comparison, micro-benchmarks and sequence metrics.

Exit codes: 0 on success, 2 for usage/parameter errors, 3 for corrupt or
unreadable input files.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time
from typing import List, Optional, Sequence

import numpy as np

from .baselines import BaselineConfig, PRESET_GRIDS, apply_truncation
from .dist import distribution_from_logits, sort_descending
from .equilibrium import select_threshold, select_threshold_naive
from .engine import GenerationSession, SyntheticSource, TraceSource, step_once
from .errors import (
    CorruptTraceError,
    DegenerateInputError,
    EqsampleError,
    InvalidParameterError,
    TraceFormatError,
)
from .metrics import diversity, rep_n
from .traceio import format_float, read_trace, write_results

DEFAULT_TAUS = [1.0]
BENCH_VOCAB_SIZES = [1000, 8000, 32000]

# Methods swept by `compare` when none are requested: the published grids
# plus the two parameter-free rows. min_p has no published grid and must be
# asked for explicitly with --param.
COMPARE_DEFAULT_METHODS = ["temperature", "top_k", "top_p", "eta", "mirostat", "typical", "equilibrium"]

TRAJECTORY_COLUMNS = ("step", "tau", "k", "P_k", "H_k", "Hbar_k", "f_k")


DEFAULT_SYNTHETIC_STEPS = 16


def _add_source_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", help="trace file (.eesl or .jsonl)")
    parser.add_argument(
        "--synthetic",
        choices=["uniform", "dirichlet", "zipf"],
        help="generate logits instead of reading a trace",
    )
    parser.add_argument("--vocab", type=int, default=64, help="synthetic vocabulary size")
    parser.add_argument("--alpha", type=float, default=1.0, help="synthetic Dirichlet concentration")
    parser.add_argument("--zipf-exponent", type=float, default=1.5, help="synthetic Zipf exponent")
    parser.add_argument("--source-seed", type=int, default=0, help="seed for synthetic logits")
    parser.add_argument(
        "--steps", type=int,
        help=f"maximum steps to process (default: whole trace, or {DEFAULT_SYNTHETIC_STEPS} synthetic steps)",
    )
    parser.add_argument(
        "--format", choices=["csv"], default="csv", help="results output format"
    )


def _add_method_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--method", default="equilibrium", help="truncation method")
    parser.add_argument("--param", type=float, help="method hyperparameter")
    parser.add_argument("--preset", type=int, help="index into the method's published grid")
    parser.add_argument(
        "--tau", type=float, action="append", help="temperature (repeatable; default 1.0)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eqsample",
        description="Entropy-equilibrium truncation sampling over logit traces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_trunc = sub.add_parser("truncate", help="per-step candidate-set diagnostics, no sampling")
    _add_source_args(p_trunc)
    _add_method_args(p_trunc)
    p_trunc.add_argument("--output", help="results CSV path (default: stdout)")
    p_trunc.add_argument(
        "--trajectory", action="store_true",
        help="also write the per-k selection trajectory (equilibrium method only)",
    )
    p_trunc.set_defaults(func=cmd_truncate)

    p_sample = sub.add_parser("sample", help="replay a trace and sample tokens")
    _add_source_args(p_sample)
    _add_method_args(p_sample)
    p_sample.add_argument("--seed", type=int, default=0, help="sampling seed (64-bit)")
    p_sample.add_argument("--output", help="results CSV path (default: stdout)")
    p_sample.set_defaults(func=cmd_sample)

    p_cmp = sub.add_parser("compare", help="run a method grid in one pass over a trace")
    _add_source_args(p_cmp)
    p_cmp.add_argument(
        "--method", action="append", dest="methods",
        help="method to include (repeatable; default: published grids)",
    )
    p_cmp.add_argument("--param", type=float, help="single hyperparameter instead of the grid")
    p_cmp.add_argument("--tau", type=float, action="append", help="temperature (repeatable)")
    p_cmp.add_argument("--seed", type=int, default=0, help="sampling seed shared by all sessions")
    p_cmp.add_argument("--output", help="results CSV path (default: stdout)")
    p_cmp.set_defaults(func=cmd_compare)

    p_bench = sub.add_parser("bench", help="micro-benchmark the per-step pipeline")
    p_bench.add_argument(
        "--vocab", type=int, action="append", dest="vocab_sizes",
        help=f"vocabulary size (repeatable; default {BENCH_VOCAB_SIZES})",
    )
    p_bench.add_argument("--reps", type=int, default=25, help="repetitions per measurement")
    p_bench.add_argument("--decay", type=float, default=0.7, help="geometric decay of the test distribution")
    p_bench.set_defaults(func=cmd_bench)

    p_metrics = sub.add_parser("metrics", help="repetition metrics over token sequences")
    p_metrics.add_argument("--input", required=True, help="JSON-lines file, one token array per line")
    p_metrics.add_argument("--output", help="metrics CSV path (default: stdout)")
    p_metrics.add_argument("--format", choices=["csv"], default="csv", help="results output format")
    p_metrics.set_defaults(func=cmd_metrics)

    return parser


def _make_config(args) -> BaselineConfig:
    if args.preset is not None and args.param is not None:
        raise InvalidParameterError("--param and --preset are mutually exclusive")
    if args.preset is not None:
        return BaselineConfig.from_preset(args.method, args.preset)
    if args.method == "top_k" and args.param is not None:
        return BaselineConfig(args.method, int(args.param))
    return BaselineConfig(args.method, args.param)


def _load_steps(args) -> List[np.ndarray]:
    if (args.input is None) == (args.synthetic is None):
        raise InvalidParameterError("exactly one of --input or --synthetic is required")
    if args.steps is not None and args.steps < 1:
        raise InvalidParameterError(f"--steps must be >= 1, got {args.steps}")
    if args.input is not None:
        source = TraceSource(read_trace(args.input))
        limit = args.steps if args.steps is not None else len(source)
    else:
        limit = args.steps if args.steps is not None else DEFAULT_SYNTHETIC_STEPS
        source = SyntheticSource(
            vocab_size=args.vocab,
            steps=limit,
            kind=args.synthetic,
            alpha=args.alpha,
            zipf_exponent=args.zipf_exponent,
            seed=args.source_seed,
        )
    return [logits for logits, _ in zip(iter(source), range(limit))]


def _taus(args) -> List[float]:
    taus = args.tau if args.tau else list(DEFAULT_TAUS)
    for tau in taus:
        if not tau > 0:
            raise InvalidParameterError(f"tau must be positive, got {tau}")
    return taus


def _emit_results(rows, output: Optional[str]) -> None:
    if output is None:
        write_results(rows, sys.stdout)
    else:
        write_results(rows, output)


def _trajectory_path(output: str) -> str:
    import os

    base, ext = os.path.splitext(output)
    return base + ".trajectory" + (ext or ".csv")


def cmd_truncate(args) -> int:
    config = _make_config(args)
    steps = _load_steps(args)
    taus = _taus(args)
    if args.trajectory and args.output is None:
        raise InvalidParameterError("--trajectory requires --output")

    rows = []
    trajectory_rows = []
    for tau in taus:
        # Stateless diagnostics: mirostat has no sampling feedback here, so
        # its bound stays at the initial value.
        session = GenerationSession(seed=0, config=config)
        for step, logits in enumerate(steps):
            dist = distribution_from_logits(logits, tau)
            result = apply_truncation(
                dist, config, session.mirostat_state, record_trajectory=args.trajectory
            )
            rows.append((step, result.method, tau, result.k_star, result.mass, result.norm_entropy, -1))
            if args.trajectory and result.trajectory:
                for point in result.trajectory:
                    trajectory_rows.append((step, tau, point))

    _emit_results(rows, args.output)
    if args.trajectory:
        import csv

        with open(_trajectory_path(args.output), "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(TRAJECTORY_COLUMNS)
            for step, tau, point in trajectory_rows:
                writer.writerow(
                    [
                        step,
                        format_float(tau),
                        point.k,
                        format_float(point.mass),
                        format_float(point.entropy),
                        format_float(point.norm_entropy),
                        format_float(point.objective),
                    ]
                )
    return 0


def cmd_sample(args) -> int:
    config = _make_config(args)
    steps = _load_steps(args)
    rows = []
    for tau in _taus(args):
        session = GenerationSession(seed=args.seed, config=config)
        for logits in steps:
            dist = distribution_from_logits(logits, tau)
            record = step_once(session, dist, tau)
            rows.append(
                (
                    record.step,
                    record.method,
                    tau,
                    record.result.k_star,
                    record.result.mass,
                    record.result.norm_entropy,
                    record.token,
                )
            )
    _emit_results(rows, args.output)
    return 0


def _compare_configs(args) -> List[BaselineConfig]:
    methods = args.methods if args.methods else list(COMPARE_DEFAULT_METHODS)
    configs: List[BaselineConfig] = []
    for method in methods:
        if method in ("temperature", "equilibrium"):
            configs.append(BaselineConfig(method))
        elif args.param is not None:
            param = int(args.param) if method == "top_k" else args.param
            configs.append(BaselineConfig(method, param))
        elif method in PRESET_GRIDS:
            configs.extend(BaselineConfig(method, value) for value in PRESET_GRIDS[method])
        else:
            raise InvalidParameterError(f"method {method!r} needs --param (no published grid)")
    return configs


def cmd_compare(args) -> int:
    steps = _load_steps(args)
    taus = _taus(args)
    configs = _compare_configs(args)
    sessions = {
        (ti, ci): GenerationSession(seed=args.seed, config=config)
        for ti, _ in enumerate(taus)
        for ci, config in enumerate(configs)
    }
    collected = {key: [] for key in sessions}
    # One pass over the trace: each step's sorted distribution is shared by
    # every method at the same temperature.
    for logits in steps:
        for ti, tau in enumerate(taus):
            dist = distribution_from_logits(logits, tau)
            for ci in range(len(configs)):
                record = step_once(sessions[(ti, ci)], dist, tau)
                collected[(ti, ci)].append(record)

    rows = []
    for ti, tau in enumerate(taus):
        for ci in range(len(configs)):
            for record in collected[(ti, ci)]:
                rows.append(
                    (
                        record.step,
                        record.method,
                        tau,
                        record.result.k_star,
                        record.result.mass,
                        record.result.norm_entropy,
                        record.token,
                    )
                )
    _emit_results(rows, args.output)
    return 0


def geometric_logits(vocab_size: int, decay: float) -> np.ndarray:
    """Peaked benchmark distribution: probabilities proportional to decay^rank."""
    if not 0.0 < decay < 1.0:
        raise InvalidParameterError(f"decay must lie in (0, 1), got {decay}")
    ranks = np.arange(vocab_size, dtype=np.float64)
    log_weights = ranks * np.log(decay)
    return log_weights


def run_benchmark(vocab_sizes: Sequence[int], reps: int, decay: float = 0.7) -> List[dict]:
    """Median per-step wall times and operation counters per vocabulary size."""
    if reps < 1:
        raise InvalidParameterError(f"reps must be >= 1, got {reps}")
    reports = []
    for vocab in vocab_sizes:
        if vocab < 2:
            raise InvalidParameterError(f"vocab size must be >= 2, got {vocab}")
        logits = geometric_logits(vocab, decay)

        def timed(fn, *fn_args):
            samples = []
            value = None
            for _ in range(reps):
                start = time.perf_counter()
                value = fn(*fn_args)
                samples.append(time.perf_counter() - start)
            return statistics.median(samples), value

        from .dist import temperature_softmax

        softmax_s, probs = timed(temperature_softmax, logits, 1.0)
        sort_s, dist = timed(sort_descending, probs)
        incremental_s, incremental = timed(select_threshold, dist)
        naive_s, naive = timed(lambda d: select_threshold_naive(d, stop_early=True), dist)
        reports.append(
            {
                "vocab_size": vocab,
                "support": dist.n,
                "k_star": incremental.k_star,
                "softmax_s": softmax_s,
                "sort_s": sort_s,
                "incremental_select_s": incremental_s,
                "naive_select_s": naive_s,
                "incremental_ops": incremental.entropy_ops,
                "naive_ops": naive.entropy_ops,
            }
        )
    return reports


def cmd_bench(args) -> int:
    vocab_sizes = args.vocab_sizes if args.vocab_sizes else list(BENCH_VOCAB_SIZES)
    reports = run_benchmark(vocab_sizes, args.reps, args.decay)
    header = (
        f"{'vocab':>8} {'k*':>5} {'softmax':>12} {'sort':>12} "
        f"{'incr-select':>12} {'naive-select':>12} {'incr-ops':>9} {'naive-ops':>10}"
    )
    print(header)
    for r in reports:
        print(
            f"{r['vocab_size']:>8} {r['k_star']:>5} {r['softmax_s']:>12.3e} {r['sort_s']:>12.3e} "
            f"{r['incremental_select_s']:>12.3e} {r['naive_select_s']:>12.3e} "
            f"{r['incremental_ops']:>9} {r['naive_ops']:>10}"
        )
    failures = [r for r in reports if r["incremental_ops"] > r["naive_ops"]]
    if failures:
        print("error: incremental selection did more work than the naive scan", file=sys.stderr)
        return 1
    print("ok: incremental selection ops <= naive scan ops at every vocabulary size")
    return 0


def cmd_metrics(args) -> int:
    sequences = []
    with open(args.input, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                tokens = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorruptTraceError(f"line {lineno}: invalid JSON: {exc}") from exc
            if not isinstance(tokens, list) or not all(
                isinstance(t, int) and not isinstance(t, bool) for t in tokens
            ):
                raise CorruptTraceError(f"line {lineno}: expected an array of integers")
            sequences.append(tokens)

    import csv

    def emit(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["line", "length", "rep_2", "rep_3", "rep_4", "diversity"])
        for i, tokens in enumerate(sequences):
            writer.writerow(
                [
                    i,
                    len(tokens),
                    format_float(rep_n(tokens, 2)),
                    format_float(rep_n(tokens, 3)),
                    format_float(rep_n(tokens, 4)),
                    format_float(diversity(tokens)),
                ]
            )

    if args.output is None:
        emit(sys.stdout)
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            emit(fh)
        scores = [diversity(tokens) for tokens in sequences]
        if scores:
            print(f"sequences: {len(scores)}  mean diversity: {format_float(sum(scores) / len(scores))}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (TraceFormatError, CorruptTraceError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (InvalidParameterError, DegenerateInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EqsampleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
