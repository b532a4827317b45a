from __future__ import annotations


class CapExceeded(ValueError):
    """A construction would exceed a configured size cap."""


class MixedRings(ValueError):
    """Operands live in different rings."""


class NotPBoolean(ValueError):
    """A construction needs a p-boolean base ring."""


class ConsistencyError(RuntimeError):
    """Two independent decision paths disagreed; indicates a bug."""
