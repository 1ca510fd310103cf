"""
Integer sieves and factorization helpers.

All sieves return arrays indexed 0..N with index 0 unused, so that
``values[n]`` is the value at n.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def divisor_counts(N):
    """
    Number of divisors d(n) for 0 <= n <= N.

    Args:
        N: Upper bound of the sieve

    Returns:
        ndarray: int64 array with d[0] = 0
    """
    d = np.zeros(N + 1, dtype=np.int64)
    for a in range(1, N + 1):
        for m in range(a, N + 1, a):
            d[m] += 1
    return d


@njit(cache=True)
def divisor3_counts(N):
    """
    Triple divisor function d3 = 1 * d by a second multiplicative pass.
    """
    d = divisor_counts(N)
    d3 = np.zeros(N + 1, dtype=np.int64)
    for a in range(1, N + 1):
        q = 1
        for m in range(a, N + 1, a):
            d3[m] += d[q]
            q += 1
    return d3


@njit(cache=True)
def prime_sieve(N):
    """Boolean primality table for 0..N."""
    is_prime = np.ones(N + 1, dtype=np.bool_)
    is_prime[0] = False
    if N >= 1:
        is_prime[1] = False
    p = 2
    while p * p <= N:
        if is_prime[p]:
            for m in range(p * p, N + 1, p):
                is_prime[m] = False
        p += 1
    return is_prime


def primes_up_to(N):
    if N < 2:
        return np.zeros(0, dtype=np.int64)
    return np.flatnonzero(prime_sieve(N)).astype(np.int64)


@njit(cache=True)
def smallest_prime_factors(N):
    """Smallest prime factor of every 2 <= n <= N (spf[0] = spf[1] = 0)."""
    spf = np.zeros(N + 1, dtype=np.int64)
    for p in range(2, N + 1):
        if spf[p] == 0:
            for m in range(p, N + 1, p):
                if spf[m] == 0:
                    spf[m] = p
    return spf


@njit(cache=True)
def cubefree_kernels(N):
    """
    Cube-free decomposition n = kernel * root**3 for every 1 <= n <= N.

    Returns:
        tuple: (kernel, root) int64 arrays indexed 0..N
    """
    kernel = np.arange(N + 1, dtype=np.int64)
    root = np.ones(N + 1, dtype=np.int64)
    root[0] = 0
    p = 2
    while p * p * p <= N:
        # Only primes matter; composite p has no cube left to strip
        is_prime = True
        q = 2
        while q * q <= p:
            if p % q == 0:
                is_prime = False
                break
            q += 1
        if is_prime:
            cube = p * p * p
            for m in range(cube, N + 1, cube):
                while kernel[m] % cube == 0:
                    kernel[m] //= cube
                    root[m] *= p
        p += 1
    return kernel, root


def cubefree_decompose(n):
    """
    Write n = kernel * r**3 with kernel cube-free.

    Args:
        n: Positive integer

    Returns:
        tuple: (kernel, r)
    """
    n = int(n)
    kernel, r = n, 1
    p = 2
    while p * p * p <= kernel:
        cube = p * p * p
        while kernel % cube == 0:
            kernel //= cube
            r *= p
        p += 1
    return kernel, r


def is_cubefree(n):
    """Trial division by every c**3 with c <= n**(1/3)."""
    n = int(n)
    c = 2
    while c * c * c <= n:
        if n % (c * c * c) == 0:
            return False
        c += 1
    return True


def factorize(n, spf=None):
    """
    Prime factorization as a list of (p, e) pairs in increasing p.

    Args:
        n: Positive integer
        spf: Optional smallest-prime-factor table covering n
    """
    n = int(n)
    factors = []
    if spf is not None and n < len(spf):
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            factors.append((p, e))
        return factors
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            factors.append((p, e))
        p += 1
    if n > 1:
        factors.append((n, 1))
    return factors


def integer_cube_root(x):
    """Largest r with r**3 <= x for x >= 0."""
    x = int(x)
    if x < 1:
        return 0
    r = int(round(x ** (1.0 / 3.0)))
    while (r + 1) ** 3 <= x:
        r += 1
    while r ** 3 > x:
        r -= 1
    return r
