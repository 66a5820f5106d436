"""Deterministic RNG stream splitting.

Every unit of work (cell, trial, multi-start) gets its own generator whose
seed is ``hash64`` of the parent seed and the unit's coordinates.  The hash
is SplitMix64's finalizer folded over the inputs, so streams are stable
across runs and platforms.
"""

import struct

import numpy as np

_MASK = (1 << 64) - 1


def _mix(z):
    z = (z + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def float_bits(x):
    """IEEE-754 bit pattern of ``x`` as an unsigned 64-bit integer."""
    return struct.unpack("<Q", struct.pack("<d", float(x)))[0]


def hash64(*parts):
    """Fold integers, floats and strings into one 64-bit seed."""
    h = 0
    for part in parts:
        if isinstance(part, str):
            for byte in part.encode():
                h = _mix(h ^ byte)
            value = len(part)
        elif isinstance(part, float):
            value = float_bits(part)
        else:
            value = int(part) & _MASK
        h = _mix(h ^ value)
    return h


def stream(*parts):
    """A ``numpy.random.Generator`` seeded by ``hash64(*parts)``."""
    return np.random.default_rng(hash64(*parts))
