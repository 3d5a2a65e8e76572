"""Exception taxonomy shared by every module in the package."""

from __future__ import annotations

from typing import Sequence


class EqsampleError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(EqsampleError, ValueError):
    """A caller-supplied parameter lies outside its documented domain."""


class DegenerateInputError(EqsampleError, ValueError):
    """Input carries no usable information (empty, or all entries masked)."""


class TraceFormatError(EqsampleError):
    """A trace file does not match any supported encoding (bad magic/version)."""


class CorruptTraceError(EqsampleError):
    """A trace file matches a known encoding but its payload is damaged."""


class GenerationAborted(EqsampleError):
    """The logit source failed mid-generation.

    Carries the tokens produced before the failure so callers can keep
    partial output.
    """

    def __init__(self, message: str, tokens: Sequence[int]):
        super().__init__(message)
        self.tokens = list(tokens)
        self.steps_completed = len(self.tokens)
