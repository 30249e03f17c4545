"""Counter-based deterministic sampling.

A splitmix64 finalizer applied to (seed, stream, counter) gives the same
sample stream on every platform, so reports are reproducible byte for byte.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(z):
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def stream_id(label):
    """FNV-1a hash of a label string, used to decorrelate sample streams."""
    h = 0xCBF29CE484222325
    for byte in label.encode("utf-8"):
        h = ((h ^ byte) * 0x100000001B3) & _MASK
    return h


def unit(seed, stream, counter):
    """Deterministic uniform draw in [0, 1)."""
    state = (seed * 0x2545F4914F6CDD1D + stream) & _MASK
    return (_mix(state + counter * _GOLDEN) >> 11) * 2.0 ** -53


def sample_box(box, count, seed, label):
    """``count`` points uniform over a product of intervals."""
    stream = stream_id(label)
    points = []
    m = len(box)
    for j in range(count):
        pt = []
        for c, (lo, hi) in enumerate(box):
            u = unit(seed, stream, j * m + c)
            pt.append(lo + (hi - lo) * u)
        points.append(tuple(pt))
    return points
