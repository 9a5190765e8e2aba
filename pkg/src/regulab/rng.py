"""Seeded random streams with stable, platform-independent derivation.

Every source of randomness in a run is a named stream derived from the run
seed.  Each agent gets its own stream so that adding or removing draws in one
subsystem (instrumentation, an extra agent, a forecaster) never perturbs the
sequences seen by the others.  Stream seeds are derived with SHA-256 rather
than Python's hash() so the mapping is identical on every platform and
interpreter.
"""

from __future__ import annotations

import hashlib
import random


def derive_seed(seed: int, label: str) -> int:
    digest = hashlib.sha256(f"{seed}/{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


class StreamRng(random.Random):
    """One independent random stream, identified by (seed, label)."""

    def __new__(cls, seed: int, label: str):
        return super().__new__(cls, derive_seed(seed, label))

    def __init__(self, seed: int, label: str):
        self.label = label
        super().__init__(derive_seed(seed, label))


class RngPool:
    """Lazily creates the named streams of a run, all derived from one seed."""

    def __init__(self, seed: int):
        self.seed = seed
        self._streams: dict[str, StreamRng] = {}

    def stream(self, label: str) -> StreamRng:
        rng = self._streams.get(label)
        if rng is None:
            rng = StreamRng(self.seed, label)
            self._streams[label] = rng
        return rng
