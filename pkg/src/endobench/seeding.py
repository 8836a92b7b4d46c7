"""Deterministic seed derivation for schedule-independent parallel generation.

Every stochastic corruption draws from a counter-based generator keyed by
a hash of (global seed, frame id, corruption type, severity), so batch
drivers may process frames in any order, on any number of workers, and
still produce byte-identical output.
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF


def derive_seed(global_seed: int, frame_id: str, ctype: str, severity: int) -> int:
    """Mix the four inputs into a 64-bit seed via SHA-256.

    Pure and collision-resistant: any change to any input yields an
    unrelated seed.
    """
    h = hashlib.sha256()
    h.update(struct.pack("<Q", global_seed & _MASK64))
    h.update(frame_id.encode("utf-8"))
    h.update(b"\x00")
    h.update(ctype.encode("ascii"))
    h.update(b"\x00")
    h.update(struct.pack("<q", severity))
    return int.from_bytes(h.digest()[:8], "little")


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based (Philox) generator for a derived seed."""
    return np.random.Generator(np.random.Philox(seed & _MASK64))
