"""Shared exception types."""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine errors."""


class DimensionMismatch(EngineError):
    """A vector or matrix was used against a space of the wrong dimension."""

    def __init__(self, what: str, expected, got):
        super().__init__(f"{what}: expected {expected}, got {got}")
        self.expected = expected
        self.got = got


class SpaceMismatch(EngineError):
    """An ordinary class was used where a compactly-supported one is required, or vice versa."""


class ModelError(EngineError):
    """Malformed surface-model data (bad index, bad degree, unparseable file)."""


class FiberError(EngineError):
    """Fiber data rejected: structurally malformed or geometrically unrealizable."""


class WeightCapError(EngineError):
    """Requested conformal weight exceeds the configured cap."""

    def __init__(self, n: int, cap: int):
        super().__init__(
            f"weight {n} exceeds the cap {cap}; rerun with --max-weight to override"
        )
        self.n = n
        self.cap = cap


class InternalConsistencyError(EngineError):
    """A solvable-by-theory system failed to solve; indicates an engine bug."""


class InhomogeneousInput(EngineError):
    """An operation required a homogeneous vector but received a mixed one."""
