"""Tests for the binary/JSONL trace formats and the results CSV writer."""

import io
import json
import struct

import numpy as np
import pytest

from eqsample import (
    BaselineConfig,
    CorruptTraceError,
    GenerationSession,
    InvalidParameterError,
    TraceFormatError,
    TraceSource,
    generate,
    read_trace,
    write_results,
    write_trace,
)
from eqsample.traceio import MAGIC, VERSION, format_float


@pytest.fixture
def random_steps():
    rng = np.random.default_rng(0)
    steps = rng.normal(scale=3.0, size=(6, 10))
    steps[2, 7] = -np.inf
    steps[5, 0] = -np.inf
    return steps


class TestRoundTrip:
    @pytest.mark.parametrize("ext", [".eesl", ".jsonl"])
    def test_write_read_preserves_values(self, tmp_path, random_steps, ext):
        path = tmp_path / f"trace{ext}"
        write_trace(random_steps, path)
        trace = read_trace(path)
        assert trace.vocab_size == 10
        assert len(trace) == 6
        # Payloads are f32-quantized on write; the read side widens exactly.
        np.testing.assert_array_equal(trace.steps, random_steps.astype(np.float32).astype(np.float64))

    def test_binary_and_jsonl_carry_identical_values(self, tmp_path, random_steps):
        write_trace(random_steps, tmp_path / "t.eesl")
        write_trace(random_steps, tmp_path / "t.jsonl")
        binary = read_trace(tmp_path / "t.eesl")
        jsonl = read_trace(tmp_path / "t.jsonl")
        np.testing.assert_array_equal(binary.steps, jsonl.steps)

    def test_both_encodings_drive_identical_selection(self, tmp_path, random_steps):
        write_trace(random_steps, tmp_path / "t.eesl")
        write_trace(random_steps, tmp_path / "t.jsonl")
        outcomes = []
        for name in ("t.eesl", "t.jsonl"):
            session = GenerationSession(seed=5, config=BaselineConfig("equilibrium"))
            source = TraceSource(read_trace(tmp_path / name))
            result = generate(session, source, tau=1.0, max_steps=6)
            outcomes.append([r.result.k_star for r in result.records])
        assert outcomes[0] == outcomes[1]

    def test_write_rejects_nan(self, tmp_path):
        with pytest.raises(InvalidParameterError):
            write_trace(np.array([[1.0, np.nan]]), tmp_path / "t.eesl")

    def test_write_rejects_unknown_extension(self, tmp_path):
        with pytest.raises(InvalidParameterError):
            write_trace(np.ones((1, 2)), tmp_path / "t.bin")


class TestBinaryValidation:
    def test_truncated_file_is_corrupt(self, tmp_path, random_steps):
        path = tmp_path / "t.eesl"
        write_trace(random_steps, path)
        data = path.read_bytes()
        path.write_bytes(data[:-5])
        with pytest.raises(CorruptTraceError):
            read_trace(path)

    def test_short_header_is_corrupt(self, tmp_path):
        path = tmp_path / "t.eesl"
        path.write_bytes(b"EES")
        with pytest.raises(CorruptTraceError):
            read_trace(path)

    def test_bad_magic_is_format_error(self, tmp_path):
        path = tmp_path / "t.eesl"
        path.write_bytes(struct.pack("<4sIIQ", b"NOPE", VERSION, 2, 1) + b"\x00" * 8)
        with pytest.raises(TraceFormatError):
            read_trace(path)

    def test_bad_version_is_format_error(self, tmp_path):
        path = tmp_path / "t.eesl"
        path.write_bytes(struct.pack("<4sIIQ", MAGIC, 9, 2, 1) + b"\x00" * 8)
        with pytest.raises(TraceFormatError):
            read_trace(path)

    def test_nan_payload_is_corrupt(self, tmp_path):
        path = tmp_path / "t.eesl"
        payload = np.array([[1.0, np.nan]], dtype="<f4").tobytes()
        path.write_bytes(struct.pack("<4sIIQ", MAGIC, VERSION, 2, 1) + payload)
        with pytest.raises(CorruptTraceError):
            read_trace(path)

    def test_negative_infinity_is_legal(self, tmp_path):
        path = tmp_path / "t.eesl"
        payload = np.array([[1.0, -np.inf]], dtype="<f4").tobytes()
        path.write_bytes(struct.pack("<4sIIQ", MAGIC, VERSION, 2, 1) + payload)
        trace = read_trace(path)
        assert trace.steps[0, 1] == -np.inf


class TestJsonlValidation:
    def test_wrong_row_length_reports_line(self, tmp_path):
        path = tmp_path / "t.jsonl"
        path.write_text(
            json.dumps({"step": 0, "logits": [1.0, 2.0]})
            + "\n"
            + json.dumps({"step": 1, "logits": [1.0]})
            + "\n"
        )
        with pytest.raises(CorruptTraceError, match="line 2"):
            read_trace(path)

    def test_minus_inf_sentinel(self, tmp_path):
        path = tmp_path / "t.jsonl"
        path.write_text('{"step": 0, "logits": [0.5, "-inf"]}\n')
        trace = read_trace(path)
        assert trace.steps[0, 1] == -np.inf

    @pytest.mark.parametrize(
        "line",
        [
            "not json at all",
            '{"step": 0}',
            '[1.0, 2.0]',
            '{"step": 1, "logits": [1.0, 2.0]}',
            '{"step": 0, "logits": [1.0, "huge"]}',
            '{"step": 0, "logits": [1.0, true]}',
            '{"step": 0, "logits": [1.0, NaN]}',
            '{"step": 0, "logits": [1.0, Infinity]}',
            '{"step": 0, "logits": []}',
        ],
    )
    def test_malformed_lines_are_corrupt(self, tmp_path, line):
        path = tmp_path / "t.jsonl"
        path.write_text(line + "\n")
        with pytest.raises(CorruptTraceError):
            read_trace(path)

    def test_empty_file_is_corrupt(self, tmp_path):
        path = tmp_path / "t.jsonl"
        path.write_text("")
        with pytest.raises(CorruptTraceError):
            read_trace(path)


class TestResultsCsv:
    def test_empty_results_writes_header_only(self, tmp_path):
        path = tmp_path / "out.csv"
        write_results([], path)
        assert path.read_text() == "step,method,tau,k_star,P_kstar,Hbar_kstar,sampled_token\n"

    def test_rows_use_lf_and_nine_digit_floats(self):
        buffer = io.StringIO()
        write_results([(0, "equilibrium", 1.0, 3, 0.8, 1 / 3, 17)], buffer)
        text = buffer.getvalue()
        assert "\r" not in text
        assert text.splitlines()[1] == "0,equilibrium,1,3,0.8,0.333333333,17"

    def test_repeat_runs_are_byte_identical(self, tmp_path):
        rows = [(i, "top_p(0.9)", 0.8, 2, 0.91234567891, 0.5, i) for i in range(4)]
        write_results(rows, tmp_path / "a.csv")
        write_results(rows, tmp_path / "b.csv")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_format_float_examples(self):
        assert format_float(0.8) == "0.8"
        assert format_float(1 / 3) == "0.333333333"
        assert format_float(1.0) == "1"
        assert format_float(123456789012.0) == "1.23456789e+11"

    def test_engine_rows_have_positive_k_star(self, tmp_path):
        rng = np.random.default_rng(1)
        session = GenerationSession(seed=0, config=BaselineConfig("equilibrium"))
        result = generate(session, [rng.normal(size=12) for _ in range(5)], 1.0, 5)
        rows = [
            (r.step, r.method, r.tau, r.result.k_star, r.result.mass, r.result.norm_entropy, r.token)
            for r in result.records
        ]
        path = tmp_path / "out.csv"
        write_results(rows, path)
        lines = path.read_text().splitlines()[1:]
        assert all(int(line.split(",")[3]) >= 1 for line in lines)
