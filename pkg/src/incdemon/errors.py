from __future__ import annotations


class CoherenceError(AssertionError):
    """Internal state disagrees with what it was derived from."""
