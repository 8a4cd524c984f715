"""Seeded, splittable random streams and the base distribution draws.

A stream is a counter-based Philox generator keyed by the pair
``(seed, stream_id)``.  Distinct key pairs give statistically independent
streams by construction, so the "split function" is simply key packing:
a job seed plus per-task stream ids (e.g. one per sample index) yields
reproducible, embarrassingly parallel batches.  With a fixed numpy version
the draw sequence for a given key is bit-identical across runs and
platforms.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError

_U64_MAX = 2**64 - 1


class RngStream:
    """One logical stream of randomness, owned by a single consumer at a time.

    All distribution methods are thin wrappers over ``numpy.random.Generator``
    with strict parameter validation; every draw advances this stream only.
    """

    __slots__ = ("seed", "stream_id", "_gen")

    def __init__(self, seed: int, stream_id: int = 0):
        for name, value in (("seed", seed), ("stream_id", stream_id)):
            if not isinstance(value, (int, np.integer)):
                raise ParameterError(f"{name} must be an integer, got {value!r}")
            if not 0 <= value <= _U64_MAX:
                raise ParameterError(f"{name} must fit in 64 bits, got {value}")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def substream(self, stream_id: int) -> "RngStream":
        """Fresh stream with the same seed and a new stream id.

        The child starts from its own key; it is independent of this stream
        and of any other id.  Callers own the id namespace.
        """
        return RngStream(self.seed, stream_id)

    # -- base draws ---------------------------------------------------------

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None):
        if not high > low:
            raise ParameterError(f"need high > low, got [{low}, {high}]")
        return self._gen.uniform(low, high, size)

    def exponential(self, scale: float = 1.0, size=None):
        if not scale > 0:
            raise ParameterError(f"exponential scale must be > 0, got {scale}")
        return self._gen.exponential(scale, size)

    def gamma(self, shape: float, scale: float = 1.0, size=None):
        if not (shape > 0 and scale > 0):
            raise ParameterError(f"gamma parameters must be > 0, got ({shape}, {scale})")
        return self._gen.gamma(shape, scale, size)

    def beta(self, a: float, b: float, size=None):
        if not (a > 0 and b > 0):
            raise ParameterError(f"beta parameters must be > 0, got ({a}, {b})")
        return self._gen.beta(a, b, size)

    def dirichlet(self, alphas) -> np.ndarray:
        """Simplex draw via normalized Gamma variables.

        The length-1 case is the point mass at (1,).  Components are
        renormalized so they sum to exactly 1.0 despite rounding.
        """
        a = np.asarray(alphas, dtype=float)
        if a.ndim != 1 or a.size == 0:
            raise ParameterError("dirichlet needs at least one concentration parameter")
        if not np.all(a > 0):
            raise ParameterError(f"dirichlet parameters must be > 0, got {alphas}")
        if a.size == 1:
            return np.ones(1)
        while True:
            g = self._gen.gamma(a)
            total = g.sum()
            if total > 0:  # tiny shapes can underflow every component to 0
                break
        w = g / total
        err = 1.0 - w.sum()
        if err != 0.0:
            w[np.argmax(w)] += err
        return w

    def weighted_index(self, weights) -> int:
        """Categorical draw proportional to nonnegative ``weights``."""
        w = np.asarray(weights, dtype=float)
        total = w.sum()
        if not total > 0 or np.any(w < 0):
            raise ParameterError(f"weights must be nonnegative with positive sum, got {weights}")
        u = self._gen.uniform(0.0, total)
        acc = 0.0
        for i, wi in enumerate(w):
            acc += wi
            if u < acc:
                return i
        return len(w) - 1
