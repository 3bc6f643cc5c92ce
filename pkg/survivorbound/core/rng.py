"""Counter-based random streams for reproducible simulation.

A ``SeededRng`` is identified by ``(seed, stream)``. Each pair maps to its own
Philox key through ``SeedSequence``, so streams can be handed to independent
chunks of work and replayed on any platform.
"""

from __future__ import annotations

import numpy as np


class SeededRng:
    """Philox-backed generator keyed by a 64-bit seed and a stream id."""

    def __init__(self, seed: int, stream: int = 0) -> None:
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        if stream < 0:
            raise ValueError(f"stream must be non-negative, got {stream}")
        self._seed = seed
        self._stream = stream
        sequence = np.random.SeedSequence(seed, spawn_key=(stream,))
        self._gen = np.random.Generator(np.random.Philox(sequence))

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def stream(self) -> int:
        return self._stream

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def substream(self, index: int) -> SeededRng:
        """Independent stream derived from this one; ``index`` selects the chunk."""
        return SeededRng(self._seed, self._stream * 1_000_003 + index + 1)

    # ── Draws ───────────────────────────────────────────────────────────

    def random(self, size: int | tuple[int, ...] | None = None) -> np.ndarray | float:
        return self._gen.random(size)

    def integers(self, low: int, high: int, size: int | None = None) -> np.ndarray | int:
        return self._gen.integers(low, high, size=size)

    def standard_exponential(self, size: int | tuple[int, ...]) -> np.ndarray:
        return self._gen.standard_exponential(size)

    def standard_gamma(self, shape: np.ndarray | float, size: tuple[int, ...] | None = None) -> np.ndarray:
        return self._gen.standard_gamma(shape, size=size)

    def choice(self, k: int, size: int, p: np.ndarray) -> np.ndarray:
        return self._gen.choice(k, size=size, p=p)

    def __repr__(self) -> str:
        return f"SeededRng(seed={self._seed}, stream={self._stream})"
