#!/usr/bin/env python3
"""Regenerate golden/golden_vectors.json from the primary CLI.

Each case stores one logit vector (f32-quantized, as trace files carry it),
a temperature, a sampling seed and a stream position, together with the
outputs the reference implementation produced for it: the kept candidate-set
size, the kept token ids in sorted order, the sampled token, and the float
diagnostics. k*, its diagnostics and the sampled token are parsed from the
CLI's CSV output; candidate ids come from the library's sorted distribution.

Run from the repository root with the package installed:

    python3 frontend/scripts/generate_golden.py
"""

import csv
import json
import os
import subprocess
import sys
import tempfile

import numpy as np

from eqsample import distribution_from_logits, select_threshold, uniform_at, write_trace

OUT_PATH = os.path.join(os.path.dirname(__file__), "..", "golden", "golden_vectors.json")
TAUS = (0.5, 0.8, 1.0, 1.2, 1.5)


def build_cases():
    rng = np.random.default_rng(424242)
    cases = []

    def add(logits, tau, seed, step_index=0):
        quantized = np.asarray(logits, dtype=np.float64).astype(np.float32).astype(np.float64)
        cases.append(
            {
                "id": len(cases),
                "tau": float(tau),
                "seed": str(int(seed)),
                "step_index": int(step_index),
                "logits": quantized,
            }
        )

    # flat: every token survives
    for vocab in (2, 3, 17, 64, 300):
        add(np.zeros(vocab), 1.0, rng.integers(0, 2**63))

    # one live token among masks
    for vocab in (4, 8, 32, 77, 128):
        logits = np.full(vocab, -np.inf)
        logits[int(rng.integers(0, vocab))] = float(rng.normal())
        add(logits, float(rng.choice(TAUS)), rng.integers(0, 2**63))

    # dirichlet shapes across concentrations
    for alpha in (0.1, 0.1, 0.1, 1.0, 1.0, 1.0, 10.0, 10.0, 10.0, 0.5):
        vocab = int(rng.integers(2, 400))
        probs = rng.dirichlet(np.full(vocab, alpha))
        add(np.log(np.maximum(probs, 1e-30)), float(rng.choice(TAUS)), rng.integers(0, 2**63))

    # geometric decay heads
    for decay in (0.3, 0.5, 0.7, 0.8, 0.9, 0.95, 0.97, 0.99, 0.5, 0.7):
        vocab = int(rng.integers(16, 320))
        add(np.arange(vocab) * np.log(decay), float(rng.choice(TAUS)), rng.integers(0, 2**63))

    # gaussian logits at each published temperature
    for i in range(10):
        vocab = int(rng.integers(2, 256))
        add(rng.normal(scale=3.0, size=vocab), TAUS[i % len(TAUS)], rng.integers(0, 2**63))

    # partial masks over random logits
    for _ in range(5):
        vocab = int(rng.integers(6, 96))
        logits = rng.normal(scale=2.0, size=vocab)
        masked = rng.choice(vocab, size=vocab // 3, replace=False)
        logits[masked] = -np.inf
        add(logits, float(rng.choice(TAUS)), rng.integers(0, 2**63))

    # later stream positions, including an extreme seed
    for step_index, seed in ((1, 7), (2, rng.integers(0, 2**63)), (3, 2**64 - 1),
                             (4, rng.integers(0, 2**63)), (2, 0)):
        vocab = int(rng.integers(8, 120))
        add(rng.normal(scale=2.5, size=vocab), float(rng.choice(TAUS)), seed, step_index)

    assert len(cases) == 50
    return cases


def run_cli(*argv):
    proc = subprocess.run([sys.executable, "-m", "eqsample.cli", *argv],
                          capture_output=True, text=True)
    if proc.returncode != 0:
        raise RuntimeError(f"CLI failed ({proc.returncode}): {proc.stderr}")
    return proc


def resolve_case(case, workdir):
    logits = case["logits"]
    vocab = logits.size
    # filler steps so the sampled row sits at the requested stream position
    steps = [np.zeros(vocab) for _ in range(case["step_index"])] + [logits]
    trace = os.path.join(workdir, f"case{case['id']}.jsonl")
    write_trace(np.stack(steps), trace)

    trunc_csv = os.path.join(workdir, f"case{case['id']}_trunc.csv")
    run_cli("truncate", "--input", trace, "--method", "equilibrium",
            "--tau", repr(case["tau"]), "--output", trunc_csv)
    with open(trunc_csv, newline="") as fh:
        trunc_row = list(csv.DictReader(fh))[case["step_index"]]

    sample_csv = os.path.join(workdir, f"case{case['id']}_sample.csv")
    run_cli("sample", "--input", trace, "--method", "equilibrium",
            "--tau", repr(case["tau"]), "--seed", case["seed"],
            "--output", sample_csv)
    with open(sample_csv, newline="") as fh:
        sample_row = list(csv.DictReader(fh))[case["step_index"]]

    assert trunc_row["k_star"] == sample_row["k_star"]
    k_star = int(trunc_row["k_star"])

    dist = distribution_from_logits(logits, case["tau"])
    result = select_threshold(dist)
    assert result.k_star == k_star, f"case {case['id']}: CLI and library disagree"

    # independent sanity check of the CLI token against the stream position
    u = uniform_at(int(case["seed"]), case["step_index"])
    cumulative = np.cumsum(dist.probs[:k_star])
    position = min(int(np.searchsorted(cumulative, u * cumulative[-1], side="right")), k_star - 1)
    assert int(dist.token_ids[position]) == int(sample_row["sampled_token"])

    return {
        "id": case["id"],
        "tau": case["tau"],
        "seed": case["seed"],
        "step_index": case["step_index"],
        "logits": ["-inf" if np.isneginf(v) else float(v) for v in logits],
        "k_star": k_star,
        "candidate_ids": dist.token_ids[:k_star].tolist(),
        "token": int(sample_row["sampled_token"]),
        "p_mass": float(result.mass),
        "norm_entropy": float(result.norm_entropy),
    }


def main():
    cases = build_cases()
    resolved = []
    with tempfile.TemporaryDirectory() as workdir:
        for case in cases:
            resolved.append(resolve_case(case, workdir))
    payload = {
        "description": "Reference outputs for the per-step truncation/sampling kernel, "
                       "produced by the eqsample CLI. Integer fields are bit-exact; "
                       "float diagnostics are informative (compare at 1e-9 relative).",
        "prng": "splitmix64",
        "uniform": "(output >> 11) * 2^-53, one draw per step index",
        "cases": resolved,
    }
    with open(OUT_PATH, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
    print(f"wrote {len(resolved)} cases to {os.path.normpath(OUT_PATH)}")


if __name__ == "__main__":
    main()
