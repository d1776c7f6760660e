"""Counter-based random streams.

Every random draw in the package is addressed by ``(seed, round, purpose)``
and produces one uniform per item id, so the value seen by item ``k`` never
depends on evaluation order or on how work is split across workers.
"""

from __future__ import annotations

import zlib

import numpy as np

__all__ = ["stream", "uniforms", "purpose_code"]

_MASK64 = (1 << 64) - 1


def purpose_code(purpose: str) -> int:
    return zlib.crc32(purpose.encode("utf-8"))


def stream(seed: int, round_index: int, purpose: str) -> np.random.Generator:
    """Return a Philox generator keyed by ``(seed, round_index, purpose)``."""
    ss = np.random.SeedSequence([int(seed) & _MASK64, int(round_index), purpose_code(purpose)])
    key = ss.generate_state(2, dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def uniforms(seed: int, round_index: int, purpose: str, count: int) -> np.ndarray:
    """Uniforms in [0, 1), entry ``k`` belonging to item id ``k``.

    Philox is a counter-based generator, so ``uniforms(..., n)[:m]`` equals
    ``uniforms(..., m)`` for ``m <= n``; growing the item set never reshuffles
    the values of existing ids.
    """
    if count <= 0:
        return np.zeros(0, dtype=np.float64)
    return stream(seed, round_index, purpose).random(count)
