"""Seeded generation loop: softmax -> sort -> truncate -> sample, per step.

A :class:`GenerationSession` owns the PRNG stream and any cross-step sampler
state (mirostat's running bound). Sessions are single-threaded; run one per
method/temperature combination. The token drawn at step t depends only on
(seed, method config, logit sequence), so replays are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, Optional

import numpy as np

from .baselines import BaselineConfig, MirostatState, apply_truncation
from .dist import SortedDistribution, distribution_from_logits
from .equilibrium import TruncationResult
from .errors import GenerationAborted, InvalidParameterError
from .rng import SplitMix64


@dataclass
class GenerationSession:
    """PRNG stream plus sampler state threaded across generation steps."""

    seed: int
    config: BaselineConfig
    rng: SplitMix64 = field(init=False)
    mirostat_state: Optional[MirostatState] = field(init=False, default=None)
    step_count: int = field(init=False, default=0)

    def __post_init__(self):
        self.rng = SplitMix64(self.seed)
        if self.config.method == "mirostat":
            self.mirostat_state = MirostatState.fresh(self.config.parameter)


def _draw_position(probs: np.ndarray, u: float) -> int:
    """Inverse-CDF draw over an unnormalized weight vector with one uniform.

    Dividing the target by the total instead of renormalizing every weight
    reuses the mass already accumulated during truncation.
    """
    cumulative = np.cumsum(probs)
    target = u * cumulative[-1]
    position = int(np.searchsorted(cumulative, target, side="right"))
    return min(position, probs.size - 1)  # guard the u ~ 1 rounding edge


def sample_from_candidates(
    dist: SortedDistribution, k_star: int, session: GenerationSession
) -> int:
    """Draw one token id from the renormalized top-k_star prefix.

    Consumes exactly one uniform from the session stream, also when
    k_star == 1, so stream positions always equal step indices.
    """
    if not 1 <= k_star <= dist.n:
        raise InvalidParameterError(f"k_star must lie in [1, {dist.n}], got {k_star}")
    u = session.rng.next_uniform()
    position = _draw_position(dist.probs[:k_star], u)
    return int(dist.token_ids[position])


class TraceSource:
    """Logit source replaying a recorded trace, one step per row."""

    def __init__(self, trace):
        self.trace = trace

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.trace.steps)

    def __len__(self) -> int:
        return int(self.trace.steps.shape[0])


class SyntheticSource:
    """Seeded synthetic logit generator: uniform, Dirichlet or Zipf steps.

    Logits are the log of the generated probabilities, so replaying them at
    tau = 1 recovers the generated distribution exactly. The generator seed is
    independent of the sampling stream.
    """

    def __init__(
        self,
        vocab_size: int,
        steps: int,
        kind: str = "dirichlet",
        alpha: float = 1.0,
        zipf_exponent: float = 1.5,
        seed: int = 0,
    ):
        if vocab_size < 1:
            raise InvalidParameterError(f"vocab_size must be >= 1, got {vocab_size}")
        if steps < 1:
            raise InvalidParameterError(f"steps must be >= 1, got {steps}")
        if kind not in ("uniform", "dirichlet", "zipf"):
            raise InvalidParameterError(f"unknown synthetic kind {kind!r}")
        if kind == "dirichlet" and not alpha > 0:
            raise InvalidParameterError(f"alpha must be positive, got {alpha}")
        if kind == "zipf" and not zipf_exponent > 0:
            raise InvalidParameterError(f"zipf exponent must be positive, got {zipf_exponent}")
        self.vocab_size = vocab_size
        self.steps = steps
        self.kind = kind
        self.alpha = alpha
        self.zipf_exponent = zipf_exponent
        self.seed = seed

    def __iter__(self) -> Iterator[np.ndarray]:
        rng = np.random.default_rng(self.seed)
        for _ in range(self.steps):
            if self.kind == "uniform":
                yield np.zeros(self.vocab_size)
            elif self.kind == "dirichlet":
                probs = rng.dirichlet(np.full(self.vocab_size, self.alpha))
                yield np.log(np.maximum(probs, 1e-300))
            else:
                ranks = np.arange(1, self.vocab_size + 1, dtype=np.float64)
                weights = ranks ** -self.zipf_exponent
                probs = weights / weights.sum()
                rng.shuffle(probs)
                yield np.log(probs)

    def __len__(self) -> int:
        return self.steps


@dataclass(frozen=True)
class StepRecord:
    """Everything the results CSV needs about one generation step."""

    step: int
    method: str
    tau: float
    result: TruncationResult
    token: int


@dataclass
class GenerationResult:
    """Token sequence plus the per-step truncation diagnostics."""

    tokens: List[int]
    records: List[StepRecord]


def step_once(
    session: GenerationSession,
    dist: SortedDistribution,
    tau: float,
    record_trajectory: bool = False,
) -> StepRecord:
    """Truncate, draw one token and update sampler state for a single step.

    The step index is the session's running step count; exactly one uniform is
    consumed regardless of candidate-set size.
    """
    result = apply_truncation(
        dist, session.config, session.mirostat_state, record_trajectory
    )
    positions = result.positions()
    selected = dist.probs[positions]
    u = session.rng.next_uniform()
    pos = _draw_position(selected, u)
    token = int(dist.token_ids[positions[pos]])
    if session.mirostat_state is not None:
        renorm_prob = float(selected[pos] / np.sum(selected))
        session.mirostat_state = session.mirostat_state.after_sample(renorm_prob)
    record = StepRecord(
        step=session.step_count, method=result.method, tau=tau, result=result, token=token
    )
    session.step_count += 1
    return record


def generate(
    session: GenerationSession,
    source: Iterable[np.ndarray],
    tau: float,
    max_steps: int,
    record_trajectory: bool = False,
) -> GenerationResult:
    """Run the full per-step pipeline until the source ends or max_steps hit.

    Failures raised by the logit source abort generation and surface as
    :class:`GenerationAborted` carrying the tokens produced so far.
    """
    if max_steps < 1:
        raise InvalidParameterError(f"max_steps must be >= 1, got {max_steps}")
    tokens: List[int] = []
    records: List[StepRecord] = []
    iterator = iter(source)
    while len(tokens) < max_steps:
        try:
            logits = next(iterator)
        except StopIteration:
            break
        except Exception as exc:
            raise GenerationAborted(
                f"logit source failed at step {len(tokens)}: {exc}", tokens
            ) from exc
        dist = distribution_from_logits(logits, tau)
        record = step_once(session, dist, tau, record_trajectory)
        records.append(record)
        tokens.append(record.token)
    return GenerationResult(tokens=tokens, records=records)
