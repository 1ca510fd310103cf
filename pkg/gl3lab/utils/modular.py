"""
Ramanujan tau function by number-theoretic-transform power series.

Delta(q) = q * prod (1 - q^n)^24 and prod (1 - q^n)^3 has the Jacobi
expansion sum (-1)^k (2k+1) q^(k(k+1)/2), so tau(n + 1) is the coefficient
of q^n in the eighth power of that series. The power is taken modulo four
NTT primes and lifted by the Chinese remainder theorem.
"""
import logging

import numpy as np
from numba import njit

from gl3lab.utils.number_theory import primes_up_to

logger = logging.getLogger(__name__)

# (modulus, primitive root); each modulus is c * 2^k + 1 with k >= 23
NTT_PRIMES = (
    (998244353, 3),
    (167772161, 3),
    (469762049, 3),
    (754974721, 11),
)
_MAX_TRANSFORM = 1 << 23


@njit(cache=True)
def _pow_mod(base, exponent, mod):
    result = 1
    base %= mod
    while exponent > 0:
        if exponent & 1:
            result = result * base % mod
        base = base * base % mod
        exponent >>= 1
    return result


@njit(cache=True)
def _ntt(a, invert, mod, root):
    n = a.shape[0]
    j = 0
    for i in range(1, n):
        bit = n >> 1
        while j & bit:
            j ^= bit
            bit >>= 1
        j ^= bit
        if i < j:
            tmp = a[i]
            a[i] = a[j]
            a[j] = tmp
    length = 2
    while length <= n:
        w = _pow_mod(root, (mod - 1) // length, mod)
        if invert:
            w = _pow_mod(w, mod - 2, mod)
        half = length // 2
        for start in range(0, n, length):
            wn = 1
            for k in range(half):
                u = a[start + k]
                v = a[start + k + half] * wn % mod
                a[start + k] = (u + v) % mod
                a[start + k + half] = (u - v + mod) % mod
                wn = wn * w % mod
        length <<= 1
    if invert:
        inv_n = _pow_mod(n, mod - 2, mod)
        for i in range(n):
            a[i] = a[i] * inv_n % mod


@njit(cache=True)
def _square_truncated(series, size, mod, root):
    length = series.shape[0]
    work = np.zeros(size, dtype=np.int64)
    work[:length] = series
    _ntt(work, False, mod, root)
    for i in range(size):
        work[i] = work[i] * work[i] % mod
    _ntt(work, True, mod, root)
    return work[:length].copy()


@njit(cache=True)
def _eta_cubed(length, mod):
    series = np.zeros(length, dtype=np.int64)
    k = 0
    while k * (k + 1) // 2 < length:
        value = (2 * k + 1) % mod
        if k % 2 == 1:
            value = (mod - value) % mod
        series[k * (k + 1) // 2] = value
        k += 1
    return series


def _tau_residues(M, mod, root):
    size = 1
    while size < 2 * M:
        size <<= 1
    series = _eta_cubed(M, mod)
    for _ in range(3):
        series = _square_truncated(series, size, mod, root)
    return series


def _crt_signed(residues):
    """Combine residues mod NTT_PRIMES into the symmetric-range integer."""
    value, modulus = 0, 1
    for r, (mod, _) in zip(residues, NTT_PRIMES):
        r = int(r)
        t = ((r - value) * pow(modulus, -1, mod)) % mod
        value += modulus * t
        modulus *= mod
    if value > modulus // 2:
        value -= modulus
    return value


def _residue_table(M):
    if M < 1:
        raise ValueError(f'tau table length must be positive, got {M}')
    size = 1
    while size < 2 * M:
        size <<= 1
    if size > _MAX_TRANSFORM:
        raise ValueError(f'tau table of length {M} exceeds the transform limit')
    logger.debug(f'Computing tau residues up to {M} with transform size {size}')
    return [_tau_residues(M, mod, root) for mod, root in NTT_PRIMES]


def ramanujan_tau(M):
    """
    Exact tau(1..M) as Python integers.

    Values are exact while |tau(n)| stays below half the CRT modulus,
    which holds for every n <= 10**5.

    Returns:
        list: tau values, entry i holding tau(i + 1)
    """
    residues = _residue_table(M)
    return [_crt_signed([res[i] for res in residues]) for i in range(M)]


def ramanujan_tau_at_primes(P):
    """
    Exact tau(p) for all primes p <= P.

    Deligne's bound |tau(p)| <= 2 p^(11/2) keeps every prime value inside
    the CRT range up to P = 10**6 and beyond.

    Returns:
        tuple: (primes int64 array, list of tau(p) as Python ints)
    """
    primes = primes_up_to(P)
    if primes.size == 0:
        return primes, []
    residues = _residue_table(P)
    values = [_crt_signed([res[p - 1] for res in residues]) for p in primes.tolist()]
    return primes, values
