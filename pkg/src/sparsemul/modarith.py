"""Modular arithmetic substrate: primes, factorization, multiplicative order."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._kernels import kernels as K

KERNEL_MODULUS_CAP = 1 << 62
TRIAL_BOUND = 100_000
SEGMENT = 1 << 18
# above this the kernel would sieve too many trial divisors; factor instead
TRIAL_SIEVE_CAP = 1 << 40


class FactorizationError(ArithmeticError):
    """Raised when the rho budget runs out on a composite cofactor."""

    def __init__(self, n, cofactor, partial):
        super().__init__(f"incomplete factorization of {n}: cofactor {cofactor} left unfactored")
        self.n = n
        self.cofactor = cofactor
        self.partial = partial


@dataclass(frozen=True)
class FactorMultiset:
    factors: tuple[tuple[int, int], ...]

    @property
    def value(self) -> int:
        return math.prod(q**e for q, e in self.factors)

    @property
    def omega(self) -> int:
        """Number of prime factors counted with multiplicity."""
        return sum(e for _, e in self.factors)

    @property
    def primes(self) -> list[int]:
        return [q for q, _ in self.factors]

    def __iter__(self):
        return iter(self.factors)

    def __str__(self):
        return "·".join(f"{q}^{e}" if e > 1 else str(q) for q, e in self.factors)


@dataclass(frozen=True)
class OrderProfile:
    p: int
    r: int
    ord: int
    pm1_factors: FactorMultiset
    s: int
    w: int


def pow_mod(base: int, exp: int, p: int) -> int:
    if p < 2:
        raise ValueError("modulus must be at least 2")
    if exp < 0:
        raise ValueError("exponent must be nonnegative")
    return pow(base, exp, p)


def two_adic_split(n: int) -> tuple[int, int]:
    """``n = 2**s * w`` with ``w`` odd."""
    if n < 1:
        raise ValueError("two_adic_split needs n >= 1")
    s = (n & -n).bit_length() - 1
    return s, n >> s


@lru_cache(maxsize=64)
def _base_primes(limit: int) -> np.ndarray:
    n = int(limit) + 1
    flags = np.ones(n, np.bool_)
    flags[:2] = False
    for i in range(2, math.isqrt(n - 1) + 1):
        if flags[i]:
            flags[i * i :: i] = False
    out = np.flatnonzero(flags).astype(np.int64)
    out.flags.writeable = False
    return out


def primes_in_range(lo: int, hi: int) -> np.ndarray:
    """Primes ``p`` with ``lo <= p < hi``, one sieve segment at a time."""
    lo = max(int(lo), 0)
    hi = int(hi)
    if hi <= lo:
        return np.empty(0, np.int64)
    base = _base_primes(math.isqrt(hi - 1) + 1)
    parts = []
    for start in range(lo, hi, SEGMENT):
        stop = min(start + SEGMENT, hi)
        flags = K.sieve_segment(start, stop, base)
        parts.append(np.flatnonzero(flags).astype(np.int64) + start)
    return np.concatenate(parts)


def sieve_primes(limit: int) -> np.ndarray:
    """All primes ``<= limit`` in ascending order (empty for ``limit < 2``)."""
    if limit < 2:
        return np.empty(0, np.int64)
    return primes_in_range(2, int(limit) + 1)


# -- primality -------------------------------------------------------------

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_DETERMINISTIC_BELOW = 3_317_044_064_679_887_385_961_981


def _strong_probable_prime(n: int, a: int) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _jacobi(a: int, n: int) -> int:
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _strong_lucas(n: int) -> bool:
    if math.isqrt(n) ** 2 == n:
        return False
    d = 5
    while (j := _jacobi(d, n)) != -1:
        if j == 0 and abs(d) != n:
            return False
        d = -d - 2 if d > 0 else -d + 2
    p, q = 1, (1 - d) // 4
    k, s = n + 1, 0
    while k % 2 == 0:
        k //= 2
        s += 1
    # binary Lucas chain for U_k, V_k
    u, v, qk = 0, 2, 1
    inv2 = (n + 1) // 2
    for bit in bin(k)[2:]:
        u, v = u * v % n, (v * v - 2 * qk) % n
        qk = qk * qk % n
        if bit == "1":
            u, v = (p * u + v) * inv2 % n, (d * u + p * v) * inv2 % n
            qk = qk * q % n
    if u == 0 or v == 0:
        return True
    for _ in range(s - 1):
        v = (v * v - 2 * qk) % n
        qk = qk * qk % n
        if v == 0:
            return True
    return False


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin below 3.3e24, Baillie-PSW above."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n == q:
            return True
        if n % q == 0:
            return False
    if n < _MR_DETERMINISTIC_BELOW:
        return all(_strong_probable_prime(n, a) for a in _MR_BASES)
    return _strong_probable_prime(n, 2) and _strong_lucas(n)


# -- factorization -----------------------------------------------------------

def _brent(n: int, rng: random.Random, budget: int) -> int | None:
    """One nontrivial factor of composite odd ``n`` or None on budget exhaustion."""
    spent = 0
    while spent < budget:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r <<= 1
            spent += r
            if spent >= budget:
                break
        if g == n:
            while True:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
                if g > 1:
                    break
        if 1 < g < n:
            return g
    return None


def factorize(n: int, rho_budget: int = 1 << 24) -> FactorMultiset:
    """Prime factorization of ``n >= 2``.

    Trial division by primes below 10**5, then Brent's rho seeded from ``n``
    so repeated calls agree.  Raises FactorizationError rather than report a
    composite as prime.
    """
    n = int(n)
    if n < 2:
        raise ValueError("nothing to factor")
    found: dict[int, int] = {}
    m = n
    for q in _base_primes(TRIAL_BOUND):
        q = int(q)
        if q * q > m:
            break
        while m % q == 0:
            found[q] = found.get(q, 0) + 1
            m //= q
    stack = [m] if m > 1 else []
    rng = random.Random(n)
    while stack:
        c = stack.pop()
        if c < TRIAL_BOUND * TRIAL_BOUND or is_prime(c):
            # after trial division every cofactor below the square bound is prime
            found[c] = found.get(c, 0) + 1
            continue
        d = _brent(c, rng, rho_budget)
        if d is None:
            raise FactorizationError(n, c, FactorMultiset(tuple(sorted(found.items()))))
        stack.extend((d, c // d))
    return FactorMultiset(tuple(sorted(found.items())))


def _check_odd_prime(p: int):
    if p % 2 == 0 or p < 3:
        raise ValueError("modulus must be an odd prime")
    if not is_prime(p):
        raise ValueError("modulus must be an odd prime")


def multiplicative_order(r: int, p: int) -> OrderProfile:
    """Order of ``r`` in F_p*, by stripping prime factors off ``p - 1``."""
    _check_odd_prime(p)
    if r % p == 0:
        raise ValueError("base not invertible")
    fac = factorize(p - 1)
    o = p - 1
    for q, _ in fac:
        while o % q == 0 and pow(r, o // q, p) == 1:
            o //= q
    s, w = two_adic_split(p - 1)
    return OrderProfile(p=p, r=r % p, ord=o, pm1_factors=fac, s=s, w=w)


def orders_of(r: int, primes) -> np.ndarray:
    """Vectorised order of ``r`` modulo many odd primes below the kernel cap."""
    primes = np.asarray(primes, np.int64)
    if primes.size == 0:
        return np.empty(0, np.int64)
    top = int(primes.max())
    if top >= KERNEL_MODULUS_CAP:
        raise ValueError("modulus exceeds the 2**62 kernel cap")
    big = primes >= TRIAL_SIEVE_CAP
    if not big.any():
        return K.orders(np.int64(r), primes, _base_primes(math.isqrt(top) + 1))
    out = np.empty(primes.size, np.int64)
    small = primes[~big]
    if small.size:
        out[~big] = K.orders(np.int64(r), small, _base_primes(math.isqrt(int(small.max())) + 1))
    out[big] = [multiplicative_order(r, int(p)).ord for p in primes[big]]
    return out


def primitive_root(p: int) -> int:
    """Smallest primitive root of the odd prime ``p``."""
    _check_odd_prime(p)
    qs = factorize(p - 1).primes
    g = 2
    while True:
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
        g += 1
