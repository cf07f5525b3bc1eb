"""Exception types shared across the package."""

from __future__ import annotations

import os

DEFAULT_MAX_CELLS = 20_000_000


def max_cells(override: int | None = None) -> int:
    """The active resource bound: explicit value, else ``CATEXT_MAX_CELLS``, else the default."""
    if override is not None:
        return override
    env = os.environ.get("CATEXT_MAX_CELLS")
    return int(env) if env else DEFAULT_MAX_CELLS


class CatextError(Exception):
    """Base class for errors raised by the library."""


class ResourceRefusal(CatextError):
    """A computation was declined because its estimated size exceeds a bound."""

    def __init__(self, what: str, estimate: int, limit: int):
        super().__init__(f"{what}: estimated size {estimate} exceeds limit {limit}")
        self.what = what
        self.estimate = estimate
        self.limit = limit


class HypothesisError(CatextError, ValueError):
    """An input does not satisfy the precondition of an operation."""


class PrecisionError(CatextError, ValueError):
    """The requested answer needs more p-adic precision than is available."""
