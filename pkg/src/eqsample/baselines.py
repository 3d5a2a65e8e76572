"""Comparison truncation rules and their published hyperparameter grids.

Each rule maps a :class:`~eqsample.dist.SortedDistribution` to a candidate
set. All rules except typical-set selection keep a prefix of the sorted
order, so they return a size; typical-set selection returns explicit
positions because it ranks tokens by entropy divergence rather than raw
probability.

The eta, typical and mirostat selection rules follow their original papers
(they are referenced, not defined, by the grid source); mirostat uses the
v2 scheme: truncate on surprise, then nudge the running bound ``mu`` by
``learning_rate * (observed surprise - target)`` after each sampled token.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .dist import SortedDistribution
from .equilibrium import TruncationResult, select_threshold
from .errors import InvalidParameterError

METHODS = (
    "temperature",
    "top_k",
    "top_p",
    "min_p",
    "eta",
    "typical",
    "mirostat",
    "equilibrium",
)

# Hyperparameter search grids, addressable by preset index from the CLI.
# temperature, min_p and equilibrium have no grid: temperature and
# equilibrium take no parameter at all.
PRESET_GRIDS = {
    "top_p": (0.75, 0.8, 0.85, 0.9, 0.95),
    "top_k": (5, 10, 20, 50, 100),
    "eta": (3e-4, 6e-4, 9e-4, 2e-3, 4e-3),
    "mirostat": (2.5, 3.0, 3.5, 4.0),
    "typical": (0.2, 0.9, 0.92, 0.95),
}

# Slack for cumulative-mass comparisons so exact thresholds (e.g. p = P_k)
# are honored under floating rounding.
_MASS_SLACK = 1e-12

MIROSTAT_LEARNING_RATE = 0.1
_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class MirostatState:
    """Cross-step state of the mirostat rule: a running surprise bound (bits)."""

    mu: float
    target_tau: float
    learning_rate: float = MIROSTAT_LEARNING_RATE

    @classmethod
    def fresh(cls, target_tau: float, learning_rate: float = MIROSTAT_LEARNING_RATE) -> "MirostatState":
        """Initial state: mu starts at twice the target surprise."""
        if not target_tau > 0:
            raise InvalidParameterError(f"mirostat target must be positive, got {target_tau}")
        if not learning_rate > 0:
            raise InvalidParameterError(f"learning rate must be positive, got {learning_rate}")
        return cls(mu=2.0 * target_tau, target_tau=target_tau, learning_rate=learning_rate)

    def after_sample(self, sampled_renorm_prob: float) -> "MirostatState":
        """Update mu from the renormalized probability of the sampled token."""
        if not 0.0 < sampled_renorm_prob <= 1.0:
            raise InvalidParameterError(
                f"sampled probability must lie in (0, 1], got {sampled_renorm_prob}"
            )
        observed = -math.log2(sampled_renorm_prob)
        new_mu = self.mu - self.learning_rate * (observed - self.target_tau)
        if not math.isfinite(new_mu):
            raise InvalidParameterError("mirostat bound diverged to a non-finite value")
        return replace(self, mu=new_mu)


@dataclass(frozen=True)
class BaselineConfig:
    """A sampler selector plus its single hyperparameter, if it takes one."""

    method: str
    parameter: Optional[float] = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidParameterError(f"unknown method {self.method!r}")
        p = self.parameter
        if self.method in ("temperature", "equilibrium"):
            if p is not None:
                raise InvalidParameterError(f"{self.method} takes no parameter")
            return
        if p is None:
            raise InvalidParameterError(f"{self.method} requires a parameter")
        if self.method == "top_k":
            if p < 1 or p != int(p):
                raise InvalidParameterError(f"top_k needs an integer >= 1, got {p}")
        elif self.method in ("top_p", "typical"):
            if not 0.0 < p <= 1.0:
                raise InvalidParameterError(f"{self.method} parameter must lie in (0, 1], got {p}")
        elif self.method == "min_p":
            if not 0.0 < p < 1.0:
                raise InvalidParameterError(f"min_p parameter must lie in (0, 1), got {p}")
        elif self.method in ("eta", "mirostat"):
            if not p > 0.0:
                raise InvalidParameterError(f"{self.method} parameter must be positive, got {p}")

    @classmethod
    def from_preset(cls, method: str, index: int) -> "BaselineConfig":
        """Pick the index-th grid value of a method's published search space."""
        if method not in PRESET_GRIDS:
            raise InvalidParameterError(f"no preset grid for method {method!r}")
        grid = PRESET_GRIDS[method]
        if not 0 <= index < len(grid):
            raise InvalidParameterError(
                f"preset index for {method} must lie in [0, {len(grid) - 1}], got {index}"
            )
        return cls(method=method, parameter=grid[index])

    def label(self) -> str:
        """Short display form, e.g. ``top_p(0.9)`` or ``equilibrium``."""
        if self.parameter is None:
            return self.method
        if self.method == "top_k":
            return f"{self.method}({int(self.parameter)})"
        return f"{self.method}({self.parameter:g})"


def truncate_top_k(dist: SortedDistribution, k: int) -> int:
    """Keep the k most probable tokens (clamped to the support size)."""
    if k < 1:
        raise InvalidParameterError(f"k must be >= 1, got {k}")
    return min(int(k), dist.n)


def truncate_top_p(dist: SortedDistribution, p: float) -> int:
    """Keep the smallest prefix whose cumulative probability reaches p."""
    if not 0.0 < p <= 1.0:
        raise InvalidParameterError(f"p must lie in (0, 1], got {p}")
    cumulative = np.cumsum(dist.probs)
    k = int(np.searchsorted(cumulative, p - _MASS_SLACK, side="left")) + 1
    return min(k, dist.n)


def truncate_min_p(dist: SortedDistribution, p_base: float) -> int:
    """Keep tokens at least ``p_base`` times as probable as the top token."""
    if not 0.0 < p_base < 1.0:
        raise InvalidParameterError(f"p_base must lie in (0, 1), got {p_base}")
    threshold = p_base * float(dist.probs[0])
    return int(np.count_nonzero(dist.probs >= threshold))


def full_entropy(dist: SortedDistribution) -> float:
    """Shannon entropy (nats) of the whole positive-probability support."""
    p = dist.probs
    return float(-(p * np.log(p)).sum())


def truncate_eta(dist: SortedDistribution, epsilon: float) -> int:
    """Keep tokens above an entropy-scaled probability floor (at least one).

    The floor is ``min(epsilon, sqrt(epsilon) * exp(-H))`` where H is the
    full-distribution entropy in nats.
    """
    if not epsilon > 0.0:
        raise InvalidParameterError(f"epsilon must be positive, got {epsilon}")
    floor = min(epsilon, math.sqrt(epsilon) * math.exp(-full_entropy(dist)))
    kept = int(np.count_nonzero(dist.probs >= floor))
    return max(kept, 1)


def truncate_typical(dist: SortedDistribution, coverage: float) -> np.ndarray:
    """Typical-set selection: rank by |surprise - entropy|, take a coverage prefix.

    Tokens are ordered by ascending divergence ``|-ln p_i - H|`` (ties broken
    by higher probability first, then by sorted position), and the minimal
    prefix whose probability sum reaches ``coverage`` is kept. Returns the
    selected positions within the sorted distribution, ascending; the set is
    generally not a prefix of the probability order.
    """
    if not 0.0 < coverage <= 1.0:
        raise InvalidParameterError(f"coverage must lie in (0, 1], got {coverage}")
    p = dist.probs
    divergence = np.abs(-np.log(p) - full_entropy(dist))
    # lexsort: last key is primary. Stable, so exact ties keep ascending position.
    order = np.lexsort((-p, divergence))
    cumulative = np.cumsum(p[order])
    count = int(np.searchsorted(cumulative, coverage - _MASS_SLACK, side="left")) + 1
    count = min(count, dist.n)
    return np.sort(order[:count]).astype(np.int64)


def truncate_mirostat(dist: SortedDistribution, state: MirostatState) -> int:
    """Keep tokens whose surprise (bits) stays within the running bound mu.

    The bound update happens after sampling, via
    :meth:`MirostatState.after_sample`.
    """
    if not math.isfinite(state.mu):
        raise InvalidParameterError("mirostat state must carry a finite mu")
    surprise = -np.log(dist.probs) / _LOG2
    kept = int(np.count_nonzero(surprise <= state.mu))
    return max(kept, 1)


def _selection_diagnostics(dist: SortedDistribution, positions: np.ndarray) -> tuple[float, float]:
    """(mass, normalized entropy) of an arbitrary candidate set."""
    selected = dist.probs[positions]
    mass = min(float(np.sum(selected)), 1.0)
    if selected.size == 1:
        return mass, 1.0
    renormalized = selected / np.sum(selected)
    entropy = float(-(renormalized * np.log(renormalized)).sum())
    norm = min(max(entropy / math.log(selected.size), 0.0), 1.0)
    return mass, norm


def apply_truncation(
    dist: SortedDistribution,
    config: BaselineConfig,
    mirostat_state: Optional[MirostatState] = None,
    record_trajectory: bool = False,
) -> TruncationResult:
    """Dispatch a config to its rule and package the diagnostics uniformly."""
    method = config.method
    if method == "equilibrium":
        return select_threshold(dist, record_trajectory=record_trajectory)

    candidates: Optional[np.ndarray] = None
    if method == "temperature":
        k = dist.n
    elif method == "top_k":
        k = truncate_top_k(dist, int(config.parameter))
    elif method == "top_p":
        k = truncate_top_p(dist, config.parameter)
    elif method == "min_p":
        k = truncate_min_p(dist, config.parameter)
    elif method == "eta":
        k = truncate_eta(dist, config.parameter)
    elif method == "typical":
        candidates = truncate_typical(dist, config.parameter)
        k = int(candidates.size)
    elif method == "mirostat":
        if mirostat_state is None:
            raise InvalidParameterError("mirostat requires a MirostatState")
        k = truncate_mirostat(dist, mirostat_state)
    else:  # pragma: no cover - METHODS is closed
        raise InvalidParameterError(f"unknown method {method!r}")

    positions = candidates if candidates is not None else np.arange(k, dtype=np.int64)
    mass, norm = _selection_diagnostics(dist, positions)
    return TruncationResult(
        k_star=k,
        mass=mass,
        norm_entropy=norm,
        method=config.label(),
        candidates=candidates,
    )
