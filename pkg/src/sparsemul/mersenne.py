"""Light multiples of Mersenne-number factors.

If ``2**n - 1`` has Omega prime factors (with multiplicity) and
``k**Omega < n``, some prime factor q has no multiple of Hamming weight
<= k: otherwise the product of light multiples of the prime-power parts is
a multiple of ``2**n - 1`` of weight at most ``k**Omega``, below Stolarsky's
floor n.  This module searches for such a q and replays the product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement

from .modarith import FactorMultiset, factorize, multiplicative_order
from .sumset import SearchBudgetExceeded
from .weight import VerificationError, min_weight_multiple

MAX_N = 90
MAX_K = 6
# exhaustive integer cross-check only below this prime
BRUTE_FORCE_BOUND = 500
BRUTE_FORCE_SUBSETS = 2_000_000


@dataclass(frozen=True)
class MersenneWitness:
    n: int
    k: int
    factors: FactorMultiset
    omega: int
    condition_holds: bool
    witness_q: int | None
    verified_weight_floor: int | None
    # prime factors that do have a multiple of weight <= k
    light_factors: tuple[int, ...] = ()

    def row(self) -> dict:
        return {"n": self.n, "k": self.k, "factors": str(self.factors), "omega": self.omega,
                "condition": self.condition_holds, "witness": self.witness_q,
                "floor": self.verified_weight_floor}


def _sums(powers, q: int, j: int) -> set[int]:
    return {sum(c) % q for c in combinations_with_replacement(powers, j)}


def neg_one_terms(q: int, order: int, j_max: int) -> int | None:
    """Smallest ``j <= j_max`` with -1 a sum of j powers of two mod q.

    Meet in the middle over exponent multisets in [0, order); meant for the
    small orders of Mersenne factors (``order | n``).
    """
    powers = [pow(2, a, q) for a in range(order)]
    cache: dict[int, set[int]] = {}

    def layer(i):
        if i not in cache:
            cache[i] = _sums(powers, q, i)
        return cache[i]

    for j in range(1, j_max + 1):
        lo = j // 2
        hi = layer(j - lo)
        if lo == 0:
            if q - 1 in hi:
                return j
        elif any((q - 1 - x) % q in hi for x in layer(lo)):
            return j
    return None


def _brute_force_floor(q: int, floor: int) -> bool | None:
    """Integer search: is there an odd multiple ``1 + sum 2**b`` of weight < floor?

    Positions b are distinct in [1, ord); any lighter multiple reduces to
    this shape (shift out trailing zeros, fold exponents mod ord, carries
    only lower the weight).  None when the search space is too large.
    """
    order = multiplicative_order(2, q).ord
    sizes = range(0, floor - 1)
    if sum(math.comb(order - 1, j) for j in sizes) > BRUTE_FORCE_SUBSETS:
        return None
    for j in sizes:
        for bits in combinations(range(1, order), j):
            if (1 + sum(1 << b for b in bits)) % q == 0:
                return False
    return True


def verify_weight_floor(q: int, floor: int) -> bool:
    """Whether every positive multiple of q has Hamming weight >= floor.

    Decided by the minimal-weight search with cap ``floor - 1``; for q below
    500 an independent integer enumeration must agree.
    """
    if floor <= 2:
        return True  # odd q has no weight-one multiple
    try:
        light = min_weight_multiple(q, weight_cap=floor - 1)
        result = light is None
    except SearchBudgetExceeded:
        order = multiplicative_order(2, q).ord
        result = neg_one_terms(q, order, floor - 2) is None
    if q < BRUTE_FORCE_BOUND:
        brute = _brute_force_floor(q, floor)
        if brute is not None and brute != result:
            raise VerificationError(f"weight floor {floor} for {q}: search says {result}, "
                                    f"enumeration says {brute}")
    return result


def _condition(n: int, k: int, omega: int) -> bool:
    return k**omega < n


def mersenne_witness(n: int, k: int) -> MersenneWitness:
    """Smallest prime factor q of ``2**n - 1`` with no multiple of weight <= k."""
    if not 2 <= n <= MAX_N:
        raise ValueError(f"n must lie in [2, {MAX_N}]")
    if not 2 <= k <= MAX_K:
        raise ValueError(f"k must lie in [2, {MAX_K}]")
    fac = factorize((1 << n) - 1)
    holds = _condition(n, k, fac.omega)
    witness, light = None, []
    for q in fac.primes:
        order = multiplicative_order(2, q).ord
        if neg_one_terms(q, order, k - 1) is None:
            if witness is None:
                witness = q
        else:
            light.append(q)
    floor = None
    if witness is not None:
        if not verify_weight_floor(witness, k + 1):
            raise VerificationError(f"witness {witness} for (n={n}, k={k}) failed re-verification")
        floor = k + 1
    elif holds:
        raise VerificationError(
            f"no prime factor of 2**{n}-1 lacks a multiple of weight <= {k} "
            f"although {k}**{fac.omega} < {n}")
    return MersenneWitness(n=n, k=k, factors=fac, omega=fac.omega, condition_holds=holds,
                           witness_q=witness, verified_weight_floor=floor,
                           light_factors=tuple(light))


# -- product replay ----------------------------------------------------------

def lightest_multiple(modulus: int, period: int) -> int:
    """Lightest odd multiple ``1 + sum 2**b`` of ``modulus``, b distinct in [1, period).

    ``period`` must be a multiple of the order of 2 mod ``modulus``.
    """
    for j in range(period):
        for bits in combinations(range(1, period), j):
            v = 1 + sum(1 << b for b in bits)
            if v % modulus == 0:
                return v
    raise ValueError(f"no multiple of {modulus} with period {period}")


@dataclass(frozen=True)
class ProductReplay:
    n: int
    parts: tuple[tuple[int, int], ...]  # (prime power, multiple)
    value: int
    popcount: int
    weight_product: int

    @property
    def holds(self) -> bool:
        mersenne = (1 << self.n) - 1
        return self.value % mersenne == 0 and self.weight_product >= self.popcount >= self.n


def product_replay(n: int) -> ProductReplay:
    """Multiply lightest multiples of each prime-power part of ``2**n - 1``.

    The product is a multiple of ``2**n - 1``, so its weight is at least n,
    and at most the product of the part weights.
    """
    if not 2 <= n <= 20:
        raise ValueError("product replay is limited to 2 <= n <= 20")
    fac = factorize((1 << n) - 1)
    parts = tuple((q**e, lightest_multiple(q**e, n)) for q, e in fac)
    value = math.prod(m for _, m in parts)
    return ProductReplay(n=n, parts=parts, value=value, popcount=value.bit_count(),
                         weight_product=math.prod(m.bit_count() for _, m in parts))
