"""Vectorised numpy versions of the kernels in ``numba_impl``.

Loops run over prime factors, exponent bits or sumset summands; the data
axis is always a numpy array.  Used when numba is unavailable or disabled.
"""

import numpy as np

NAME = "numpy"

_DIRECT = 1 << 31


def _mulmod(a, b, m):
    a = a % m
    b = b % m
    if np.all(m < _DIRECT):
        return (a * b) % m
    r = np.zeros(np.broadcast(a, b, m).shape, np.int64)
    a = np.broadcast_to(a, r.shape).copy()
    b = np.broadcast_to(b, r.shape).copy()
    while np.any(b > 0):
        odd = (b & 1) == 1
        r = np.where(odd, r + a, r)
        r = np.where(r >= m, r - m, r)
        a = a + a
        a = np.where(a >= m, a - m, a)
        b >>= 1
    return r


def powmod(b, e, m):
    """Elementwise ``b**e mod m`` over broadcast int64 arrays."""
    b, e, m = np.broadcast_arrays(np.asarray(b, np.int64), np.asarray(e, np.int64),
                                  np.asarray(m, np.int64))
    m = m.copy()
    b = b % m
    e = e.copy()
    r = np.ones_like(b) % m
    while np.any(e > 0):
        odd = (e & 1) == 1
        r = np.where(odd, _mulmod(r, b, m), r)
        b = _mulmod(b, b, m)
        e >>= 1
    return r


def sieve_segment(lo, hi, base_primes):
    """Primality flags for the integers in ``[lo, hi)``."""
    flags = np.ones(hi - lo, np.bool_)
    flags[: max(0, min(2, hi) - lo)] = False
    for q in base_primes:
        q = int(q)
        if q * q >= hi:
            break
        start = max(q * q, -(-lo // q) * q)
        flags[start - lo :: q] = False
    return flags


def orders(r, primes, small_primes):
    """Multiplicative order of ``r`` modulo each odd prime in ``primes``.

    ``small_primes`` must contain every prime up to ``sqrt(max(primes))``.
    """
    primes = np.asarray(primes, np.int64)
    n = primes - 1
    o = primes - 1
    for q in small_primes:
        q = int(q)
        if q * q > int(n.max(initial=0)):
            break
        hit = n % q == 0
        if not hit.any():
            continue
        while True:
            again = hit & (n % q == 0)
            if not again.any():
                break
            n = np.where(again, n // q, n)
        while True:
            cand = hit & (o % q == 0)
            idx = np.flatnonzero(cand)
            if idx.size == 0:
                break
            one = powmod(r, o[idx] // q, primes[idx]) == 1
            if not one.any():
                break
            o[idx[one]] //= q
            hit = np.zeros_like(hit)
            hit[idx[one]] = True
    # leftover cofactor is a single prime
    idx = np.flatnonzero((n > 1) & (o % np.maximum(n, 1) == 0))
    if idx.size:
        one = powmod(r, o[idx] // n[idx], primes[idx]) == 1
        o[idx[one]] //= n[idx[one]]
    return o


def pair_scan(r, targets, primes, ords):
    """For each prime: is some ``target - r**a`` in the subgroup <r>?

    Returns the first exponent that works, or -1.
    """
    primes = np.asarray(primes, np.int64)
    ords = np.asarray(ords, np.int64)
    out = np.full(primes.shape[0], -1, np.int64)
    t = np.asarray(targets, np.int64) % primes
    active = np.arange(primes.shape[0])
    x = np.ones(primes.shape[0], np.int64) % primes
    a = 0
    while active.size:
        p = primes[active]
        y = (t[active] - x[active]) % p
        ok = (y != 0) & (powmod(y, ords[active], p) == 1)
        out[active[ok]] = a
        x[active] = _mulmod(x[active], r, p)
        a += 1
        active = active[~ok & (ords[active] > a)]
    return out


def cyclic_powers(r, o, p):
    """``[r**0, r**1, ..., r**(o-1)] mod p``, built by doubling."""
    out = np.array([1 % p], np.int64)
    step = r % p
    while out.size < o:
        out = np.concatenate([out, _mulmod(out, np.int64(step), np.int64(p))])
        step = int(_mulmod(np.int64(step), np.int64(step), np.int64(p)))
    return out[:o]


def _or_shifted(dst, src, shift):
    q, b = divmod(int(shift), 64)
    n = src.shape[0]
    if b == 0:
        dst[q : q + n] |= src
    else:
        dst[q : q + n] |= src << np.uint64(b)
        dst[q + 1 : q + n + 1] |= src >> np.uint64(64 - b)


def shift_or_sum(xwords, yelems, p):
    """Packed bitset of ``{x + y mod p}`` via a folded 2p-bit window."""
    nw = xwords.shape[0]
    window = np.zeros(2 * nw + 2, np.uint64)
    for y in yelems:
        _or_shifted(window, xwords, y)
    q, b = divmod(int(p), 64)
    hi_part = window[q : q + nw] >> np.uint64(b)
    if b:
        hi_part |= window[q + 1 : q + nw + 1] << np.uint64(64 - b)
    out = window[:nw] | hi_part
    if b:
        out[nw - 1] &= np.uint64((1 << b) - 1)
    return out


def coset_step(reps, elems, o, p):
    """All sums ``c + e`` (c in reps, e in elems) and their coset labels."""
    values = (np.asarray(reps, np.int64)[:, None] + np.asarray(elems, np.int64)[None, :]) % p
    values = values.ravel()
    labels = powmod(values, o, p)
    labels[values == 0] = 0
    return values, labels
