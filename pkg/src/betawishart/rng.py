"""Seeded, splittable random streams."""

import numpy as np

from .errors import InvalidArgumentError

__all__ = ["RngStream"]

_MASK64 = (1 << 64) - 1


class RngStream:
    """A reproducible random stream identified by ``(seed, stream_id)``.

    Distinct stream ids give statistically independent streams derived from
    the same seed, so work can be split across threads by stream id.
    A single instance is stateful and must not be shared between threads.

    Parameters
    ----------
    seed : int
        64-bit seed.
    stream_id : int, optional
        64-bit stream identifier.
    """

    def __init__(self, seed, stream_id=0):
        for name, v in (("seed", seed), ("stream_id", stream_id)):
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise InvalidArgumentError(f"{name} must be an integer")
            if not 0 <= int(v) <= _MASK64:
                raise InvalidArgumentError(f"{name} must fit in 64 unsigned bits")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self.generator = np.random.Generator(np.random.PCG64(ss))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def spawn(self, stream_id):
        """A fresh stream with the same seed and another id."""
        return RngStream(self.seed, stream_id)
