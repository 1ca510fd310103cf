"""
Counter-based random numbers keyed by (seed, draw, stream).

Philox4x32 with ten rounds. Every uniform is a pure function of its key, so
draws can be evaluated in any order or in parallel and still reproduce.
"""
import numpy as np
from numba import njit

_MASK32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)
_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_SHIFT5 = np.uint64(5)
_SHIFT6 = np.uint64(6)

# Stream tags separating the window sampler from model kernels
WINDOW_STREAM = 0xFFFFFFFF00000001


@njit(cache=True)
def philox4x32_10(c0, c1, c2, c3, k0, k1):
    """
    Philox4x32-10 block function on uint64-held 32-bit words.

    Returns:
        tuple: four output words
    """
    for _ in range(10):
        p0 = _M0 * c0
        p1 = _M1 * c2
        hi0 = p0 >> _SHIFT32
        lo0 = p0 & _MASK32
        hi1 = p1 >> _SHIFT32
        lo1 = p1 & _MASK32
        c0, c1, c2, c3 = (hi1 ^ c1 ^ k0) & _MASK32, lo1, (hi0 ^ c3 ^ k1) & _MASK32, lo0
        k0 = (k0 + _W0) & _MASK32
        k1 = (k1 + _W1) & _MASK32
    return c0, c1, c2, c3


@njit(cache=True)
def keyed_uniform(seed, draw, stream):
    """
    Uniform double in [0, 1) for the key (seed, draw, stream).

    Args:
        seed: uint64 seed
        draw: uint64 draw index (counter words 0-1)
        stream: uint64 stream index (counter words 2-3)
    """
    r0, r1, _, _ = philox4x32_10(
        draw & _MASK32, (draw >> _SHIFT32) & _MASK32,
        stream & _MASK32, (stream >> _SHIFT32) & _MASK32,
        seed & _MASK32, (seed >> _SHIFT32) & _MASK32,
    )
    hi = np.float64(r0 >> _SHIFT5)
    lo = np.float64(r1 >> _SHIFT6)
    return (hi * 67108864.0 + lo) / 9007199254740992.0


@njit(cache=True)
def keyed_uniforms(seed, start, count, stream):
    out = np.empty(count, dtype=np.float64)
    for i in range(count):
        out[i] = keyed_uniform(seed, np.uint64(start + i), stream)
    return out


def as_key(value):
    """Reduce a Python integer to the 64-bit key space."""
    return np.uint64(int(value) & 0xFFFFFFFFFFFFFFFF)
