"""Compiled inner loops.

Every function here has a twin with the same name and signature in
``numpy_impl``; the two are interchangeable and are cross-checked in the
test suite.  Moduli are int64 and must stay below 2**62.
"""

import numpy as np
from numba import njit

NAME = "numba"

_DIRECT = 1 << 31


@njit(cache=True, nogil=True)
def _mulmod(a, b, m):
    if m < _DIRECT:
        return ((a % m) * (b % m)) % m
    # shift-and-add keeps every intermediate below 2**63
    r = 0
    a = a % m
    b = b % m
    while b > 0:
        if b & 1:
            r += a
            if r >= m:
                r -= m
        a += a
        if a >= m:
            a -= m
        b >>= 1
    return r


@njit(cache=True, nogil=True)
def _powmod(b, e, m):
    r = 1 % m
    b = b % m
    while e > 0:
        if e & 1:
            r = _mulmod(r, b, m)
        b = _mulmod(b, b, m)
        e >>= 1
    return r


@njit(cache=True, nogil=True)
def _powmod_arrays(b, e, m, out):
    for i in range(out.shape[0]):
        out[i] = _powmod(b[i], e[i], m[i])


def powmod(b, e, m):
    """Elementwise ``b**e mod m`` over broadcast int64 arrays."""
    b, e, m = np.broadcast_arrays(np.asarray(b, np.int64), np.asarray(e, np.int64),
                                  np.asarray(m, np.int64))
    shape = b.shape
    out = np.empty(b.size, np.int64)
    _powmod_arrays(np.ascontiguousarray(b).ravel(), np.ascontiguousarray(e).ravel(),
                   np.ascontiguousarray(m).ravel(), out)
    return out.reshape(shape)


@njit(cache=True, nogil=True)
def sieve_segment(lo, hi, base_primes):
    """Primality flags for the integers in ``[lo, hi)``."""
    flags = np.ones(hi - lo, np.bool_)
    for i in range(lo, min(2, hi)):
        flags[i - lo] = False
    for q in base_primes:
        if q * q >= hi:
            break
        start = q * q
        if start < lo:
            start = ((lo + q - 1) // q) * q
        for j in range(start - lo, hi - lo, q):
            flags[j] = False
    return flags


@njit(cache=True, nogil=True)
def _order_one(r, p, small_primes):
    n = p - 1
    o = p - 1
    for q in small_primes:
        if q * q > n:
            break
        if n % q == 0:
            while n % q == 0:
                n //= q
            while o % q == 0 and _powmod(r, o // q, p) == 1:
                o //= q
    if n > 1:
        if o % n == 0 and _powmod(r, o // n, p) == 1:
            o //= n
    return o


@njit(cache=True, nogil=True)
def orders(r, primes, small_primes):
    """Multiplicative order of ``r`` modulo each odd prime in ``primes``.

    ``small_primes`` must contain every prime up to ``sqrt(max(primes))``.
    """
    out = np.empty(primes.shape[0], np.int64)
    for i in range(primes.shape[0]):
        out[i] = _order_one(r, primes[i], small_primes)
    return out


@njit(cache=True, nogil=True)
def pair_scan(r, targets, primes, ords):
    """For each prime: is some ``target - r**a`` in the subgroup <r>?

    Membership uses ``x**ord == 1``, valid because F_p* is cyclic.  Returns
    the first exponent that works, or -1.
    """
    out = np.full(primes.shape[0], -1, np.int64)
    for i in range(primes.shape[0]):
        p = primes[i]
        o = ords[i]
        t = targets[i] % p
        x = 1
        for a in range(o):
            y = (t - x) % p
            if y != 0 and _powmod(y, o, p) == 1:
                out[i] = a
                break
            x = _mulmod(x, r, p)
    return out


@njit(cache=True, nogil=True)
def cyclic_powers(r, o, p):
    """``[r**0, r**1, ..., r**(o-1)] mod p``."""
    out = np.empty(o, np.int64)
    x = 1 % p
    for i in range(o):
        out[i] = x
        x = _mulmod(x, r, p)
    return out


@njit(cache=True, nogil=True)
def _or_shifted(dst, src, shift):
    q = shift >> 6
    b = shift & 63
    n = src.shape[0]
    if b == 0:
        for i in range(n):
            dst[q + i] |= src[i]
    else:
        lo = np.uint64(b)
        hi = np.uint64(64 - b)
        for i in range(n):
            w = src[i]
            dst[q + i] |= w << lo
            dst[q + i + 1] |= w >> hi


@njit(cache=True, nogil=True)
def shift_or_sum(xwords, yelems, p):
    """Packed bitset of ``{x + y mod p}`` for x in xwords, y in yelems.

    Each y ORs a shifted copy of X into a 2p-bit window; the upper half is
    folded back onto the lower half at the end.
    """
    nw = xwords.shape[0]
    window = np.zeros(2 * nw + 2, np.uint64)
    for y in yelems:
        _or_shifted(window, xwords, y)
    out = np.zeros(nw, np.uint64)
    q = p >> 6
    b = p & 63
    for i in range(nw):
        hi_part = window[q + i] >> np.uint64(b)
        if b != 0:
            hi_part |= window[q + i + 1] << np.uint64(64 - b)
        out[i] = window[i] | hi_part
    tail = p & 63
    if tail:
        out[nw - 1] &= (np.uint64(1) << np.uint64(tail)) - np.uint64(1)
    return out


@njit(cache=True, nogil=True)
def coset_step(reps, elems, o, p):
    """All sums ``c + e`` (c in reps, e in elems) and their coset labels.

    The label of a nonzero x is ``x**o mod p``; it identifies the coset
    x·R of the order-o subgroup R.  Zero gets label 0.
    """
    n = reps.shape[0] * elems.shape[0]
    values = np.empty(n, np.int64)
    labels = np.empty(n, np.int64)
    k = 0
    for c in reps:
        for e in elems:
            v = (c + e) % p
            values[k] = v
            labels[k] = _powmod(v, o, p) if v != 0 else 0
            k += 1
    return values, labels
