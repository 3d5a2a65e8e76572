"""Bit-exact file formats for logit traces and per-step result CSVs.

Two trace encodings, selected by extension:

* ``.eesl`` (binary): magic ``EESL``, little-endian u32 version (=1),
  u32 vocab_size, u64 step count, then steps x vocab_size IEEE-754 f32
  values. Masked tokens are the f32 negative-infinity bit pattern.
* ``.jsonl``: one object per line: ``{"step": i, "logits": [...]}`` with the
  string ``"-inf"`` permitted as a masked-token sentinel.

Writers quantize payloads to f32 in both encodings, so the two forms of one
trace are value-identical and produce identical downstream results; readers
widen to f64. NaN anywhere is a corrupt trace.
"""

from __future__ import annotations

import csv
import json
import math
import os
import struct
from dataclasses import dataclass
from typing import IO, Iterable, Sequence, Union

import numpy as np

from .errors import CorruptTraceError, InvalidParameterError, TraceFormatError

MAGIC = b"EESL"
VERSION = 1
_HEADER = struct.Struct("<4sIIQ")

BINARY_EXTENSION = ".eesl"
JSONL_EXTENSION = ".jsonl"

RESULT_COLUMNS = ("step", "method", "tau", "k_star", "P_kstar", "Hbar_kstar", "sampled_token")


@dataclass(frozen=True)
class LogitTrace:
    """A recorded sequence of per-step logit vectors (f64, widened from f32)."""

    vocab_size: int
    steps: np.ndarray  # shape (num_steps, vocab_size)

    def __len__(self) -> int:
        return int(self.steps.shape[0])


def _as_payload(steps) -> np.ndarray:
    arr = np.asarray(steps, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidParameterError("trace payload must be a non-empty 2-D array")
    if np.isnan(arr).any() or np.isposinf(arr).any():
        raise InvalidParameterError("trace logits must be finite or -inf")
    # Quantize once so binary and JSONL encodings carry identical values.
    return arr.astype(np.float32)


def _format_for(path: Union[str, os.PathLike], fmt: str | None) -> str:
    if fmt is not None:
        if fmt not in ("binary", "jsonl"):
            raise InvalidParameterError(f"unknown trace format {fmt!r}")
        return fmt
    ext = os.path.splitext(os.fspath(path))[1].lower()
    if ext == BINARY_EXTENSION:
        return "binary"
    if ext == JSONL_EXTENSION:
        return "jsonl"
    raise InvalidParameterError(
        f"cannot infer trace format from extension {ext!r}; pass fmt explicitly"
    )


def write_trace(steps, path: Union[str, os.PathLike], fmt: str | None = None) -> None:
    """Write a (num_steps, vocab_size) array of logits to disk."""
    payload = _as_payload(steps)
    fmt = _format_for(path, fmt)
    num_steps, vocab = payload.shape
    if fmt == "binary":
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, VERSION, vocab, num_steps))
            fh.write(np.ascontiguousarray(payload, dtype="<f4").tobytes())
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i in range(num_steps):
            row = [
                "-inf" if math.isinf(v) else float(v)
                for v in payload[i].astype(np.float64)
            ]
            fh.write(json.dumps({"step": i, "logits": row}) + "\n")


def _reject_constant(name: str):
    raise CorruptTraceError(f"non-finite JSON constant {name!r} in trace")


def _read_jsonl(path) -> LogitTrace:
    rows = []
    vocab = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line, parse_constant=_reject_constant)
            except json.JSONDecodeError as exc:
                raise CorruptTraceError(f"line {lineno}: invalid JSON: {exc}") from exc
            if not isinstance(obj, dict) or "step" not in obj or "logits" not in obj:
                raise CorruptTraceError(f"line {lineno}: expected a step/logits object")
            if obj["step"] != len(rows):
                raise CorruptTraceError(
                    f"line {lineno}: step {obj['step']!r} out of sequence"
                )
            values = []
            for v in obj["logits"]:
                if v == "-inf":
                    values.append(-math.inf)
                elif isinstance(v, (int, float)) and not isinstance(v, bool):
                    if math.isnan(v) or v == math.inf:
                        raise CorruptTraceError(f"line {lineno}: non-finite logit {v!r}")
                    values.append(float(v))
                else:
                    raise CorruptTraceError(f"line {lineno}: invalid logit entry {v!r}")
            if vocab is None:
                vocab = len(values)
                if vocab < 1:
                    raise CorruptTraceError(f"line {lineno}: empty logit row")
            elif len(values) != vocab:
                raise CorruptTraceError(
                    f"line {lineno}: expected {vocab} logits, found {len(values)}"
                )
            rows.append(values)
    if not rows:
        raise CorruptTraceError("trace contains no steps")
    return LogitTrace(vocab_size=vocab, steps=np.array(rows, dtype=np.float64))


def _read_binary(path) -> LogitTrace:
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _HEADER.size:
        raise CorruptTraceError("file shorter than the trace header")
    magic, version, vocab, num_steps = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise TraceFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise TraceFormatError(f"unsupported trace version {version}")
    if vocab < 1 or num_steps < 1:
        raise CorruptTraceError("header declares an empty trace")
    expected = _HEADER.size + 4 * vocab * num_steps
    if len(data) != expected:
        raise CorruptTraceError(
            f"payload size mismatch: expected {expected} bytes, found {len(data)}"
        )
    payload = np.frombuffer(data, dtype="<f4", offset=_HEADER.size)
    steps = payload.reshape(num_steps, vocab).astype(np.float64)
    if np.isnan(steps).any():
        raise CorruptTraceError("trace payload contains NaN")
    if np.isposinf(steps).any():
        raise CorruptTraceError("trace payload contains +inf")
    return LogitTrace(vocab_size=int(vocab), steps=steps)


def read_trace(path: Union[str, os.PathLike]) -> LogitTrace:
    """Load and validate a trace in either encoding (chosen by extension)."""
    fmt = _format_for(path, None)
    if fmt == "binary":
        return _read_binary(path)
    return _read_jsonl(path)


def format_float(value: float) -> str:
    """9-significant-digit shortest form; round-trips any f32-precision value."""
    return f"{value:.9g}"


def write_results(rows: Iterable[Sequence], destination: Union[str, os.PathLike, IO[str]]) -> None:
    """Write per-step results as CSV with the fixed column schema.

    Each row is (step, method, tau, k_star, P_kstar, Hbar_kstar,
    sampled_token). Rows are written in the order given; LF line endings and
    :func:`format_float` keep repeated runs byte-identical.
    """

    def _emit(fh: IO[str]) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULT_COLUMNS)
        for step, method, tau, k_star, mass, norm_entropy, token in rows:
            writer.writerow(
                [
                    int(step),
                    method,
                    format_float(float(tau)),
                    int(k_star),
                    format_float(float(mass)),
                    format_float(float(norm_entropy)),
                    int(token),
                ]
            )

    if hasattr(destination, "write"):
        _emit(destination)
    else:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            _emit(fh)
