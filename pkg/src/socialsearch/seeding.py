"""Deterministic random streams derived from one root seed.

Each consumer gets its own stream keyed by a fixed domain tag, so changing
one source of randomness (say, oracle noise) never shifts another (the
phase-1 sampling order).
"""

from __future__ import annotations

import hashlib

import numpy as np

DOMAIN_SAMPLING = 0x5A4D_5031  # phase-1 batches and random-search permutations
DOMAIN_ORACLE = 0x4E4F_4953  # per-image detection noise
DOMAIN_SYNTH = 0x5359_4E54  # synthetic survey generation

_MASK64 = (1 << 64) - 1


def _digest(text: str) -> int:
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:16], "little")


def stream(seed: int, domain: int, key: str | None = None) -> np.random.Generator:
    entropy = [int(seed) & _MASK64, domain]
    if key is not None:
        entropy.append(_digest(key))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))
