"""Deterministic seed derivation.

All randomness in the package flows from one user-facing seed. Each
stochastic component draws from its own substream so that, e.g., adding a
training step cannot shift the random numbers seen by SMOTE.
"""

import hashlib

import numpy as np


def derive_seed(seed: int, *names: str | int) -> int:
    """Derive a 32-bit child seed from ``seed`` and a component path.

    Stable across processes and platforms (unlike ``hash()``).
    """
    key = ":".join([str(seed), *map(str, names)])
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big")


def rng_for(seed: int, *names: str | int) -> np.random.Generator:
    """A fresh generator on the substream named by ``names``."""
    return np.random.default_rng(derive_seed(seed, *names))
