"""Deterministic seed derivation for replicate streams.

derive_seed(root, path) maps a 64-bit root seed and a path of labels (strings
or integers) to a child seed.  The mixing function is fixed for all time so
reports stay regenerable:

    state_0 = root mod 2^64
    state_{k+1} = splitmix64(state_k XOR H(label_k))

where H is the first 8 bytes (little endian) of BLAKE2b over a type-prefixed
encoding ("s:<text>" for strings, "i:<decimal>" for integers), and splitmix64
is the standard 64-bit finalizer.  An empty path returns the root unchanged.
"""

from __future__ import annotations

import hashlib
from typing import Sequence, Union

_MASK = (1 << 64) - 1

Label = Union[str, int]


def _splitmix64(state: int) -> int:
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _label_hash(label: Label) -> int:
    if isinstance(label, bool):
        raise TypeError("bool labels are ambiguous; use str or int")
    if isinstance(label, int):
        data = b"i:" + str(label).encode()
    elif isinstance(label, str):
        data = b"s:" + label.encode()
    else:
        raise TypeError(f"labels must be str or int, got {type(label).__name__}")
    digest = hashlib.blake2b(data, digest_size=8).digest()
    return int.from_bytes(digest, "little")


def derive_seed(root: int, path: Sequence[Label]) -> int:
    """Collision-resistant child seed for the given label path."""
    state = root & _MASK
    for label in path:
        state = _splitmix64(state ^ _label_hash(label))
    return state
