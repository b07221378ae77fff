"""Odd-order subgroups A = <a**(2**s)> with 0 outside A + A.

A has odd order, so -1 is not in A and no two elements of A cancel; hence
0 is missing from A + A.  A is a subgroup, so A*A = A and therefore
A*A + A*A = A + A.
"""

from __future__ import annotations

import math
import random
import warnings
from dataclasses import dataclass, field

import numpy as np

from .modarith import _check_odd_prime, factorize, multiplicative_order, orders_of, sieve_primes
from .subgroup import ResidueSet, SubgroupDescriptor, odd_part_subgroup
from .sumset import add_sets
from .weight import VerificationError

CLOSURE_SAMPLES = 1000
_ROW_BLOCK = 256


@dataclass(frozen=True)
class RestrictedExample:
    p: int
    a: int
    s: int
    w: int
    A: SubgroupDescriptor = field(repr=False)
    size_A: int
    zero_in_2A: bool
    size_2A: int
    size_ratio: float
    minus_one_in_A: bool = False
    products_checked: bool = False  # full A*A and A*A + A*A computed

    @property
    def covers_field(self) -> bool:
        return self.size_2A == self.p

    def csv_row(self) -> str:
        return (f"{self.p},{self.a},{self.s},{self.w},{self.size_A},{self.size_2A},"
                f"{str(self.zero_in_2A).lower()},{self.size_ratio:.6f}")


CSV_HEADER = "p,a,s,w,size_A,size_2A,zero_in_2A,ratio"


def product_set(X: ResidueSet) -> ResidueSet:
    """``{x * y mod p}`` over all pairs, in row blocks."""
    elems = X.to_array()
    p = X.p
    out = ResidueSet.empty(p)
    for i in range(0, elems.size, _ROW_BLOCK):
        block = (elems[i : i + _ROW_BLOCK, None] * elems[None, :]) % p
        out = out | ResidueSet.from_elements(p, np.unique(block))
    return out


def verify_example(p: int, a: int, full_products: bool = False, seed: int = 0) -> RestrictedExample:
    """Build A for (p, a), compute A + A exactly and check the structure."""
    _check_odd_prime(p)
    if a % p == 0:
        raise ValueError("base not invertible")
    A = odd_part_subgroup(a, p)
    s = (p - 1 & -(p - 1)).bit_length() - 1
    w = (p - 1) >> s
    two_a = add_sets(A.elements, A.elements)
    neg_in = (p - 1) in A.elements
    zero_in = 0 in two_a
    if neg_in or zero_in:
        raise VerificationError(f"odd-order subgroup mod {p} has -1 in A or 0 in A+A")
    elems = A.element_array()
    rng = random.Random(seed)
    for _ in range(CLOSURE_SAMPLES):
        x, y = rng.choice(elems), rng.choice(elems)
        if int(x) * int(y) % p not in A.elements:
            raise VerificationError(f"A mod {p} not closed under multiplication")
    if full_products:
        prod = product_set(A.elements)
        if prod != A.elements:
            raise VerificationError(f"A*A != A mod {p}")
        if add_sets(prod, prod) != two_a:
            raise VerificationError(f"A*A + A*A != A + A mod {p}")
    return RestrictedExample(
        p=p, a=a, s=s, w=w, A=A, size_A=A.order, zero_in_2A=zero_in, size_2A=two_a.card,
        size_ratio=A.order * math.log(p) ** 3 / p, minus_one_in_A=neg_in,
        products_checked=full_products,
    )


def _odd_primes_coprime(a: int, limit: int) -> np.ndarray:
    primes = sieve_primes(limit)
    primes = primes[primes > 2]
    return primes[a % primes != 0]


def find_halforder_primes(a: int, limit: int) -> list[int]:
    """Primes p <= limit with ord_p(a) = (p - 1)/2 and (p - 1)/2 odd."""
    if a < 2:
        raise ValueError("base must be >= 2")
    primes = _odd_primes_coprime(a, limit)
    primes = primes[primes % 4 == 3]
    hits = primes[orders_of(a, primes) == (primes - 1) // 2].tolist()
    for p in hits:
        if multiplicative_order(a, p).ord != (p - 1) // 2:
            raise VerificationError(f"order of {a} mod {p} disagrees between routes")
    return hits


def find_primroot_3mod4_primes(limit: int) -> list[int]:
    """Primes p <= limit, p = 3 mod 4, with 2 a primitive root."""
    if limit < 3:
        raise ValueError("limit must be >= 3")
    primes = _odd_primes_coprime(2, limit)
    primes = primes[primes % 4 == 3]
    hits = primes[orders_of(2, primes) == primes - 1].tolist()
    for p in hits:
        if multiplicative_order(2, p).ord != p - 1:
            raise VerificationError(f"2 is not a primitive root mod {p}")
    return hits


def is_squarefree(a: int) -> bool:
    return all(e == 1 for _, e in factorize(a))


def scan_restricted(a: int, limit: int, min_ratio: float = 0.0,
                    full_products: bool = False) -> list[RestrictedExample]:
    """Every odd prime p <= limit, p not dividing a, whose example qualifies.

    Qualifying means ``size_ratio >= min_ratio`` and A + A misses part of F_p.
    """
    if a < 2:
        raise ValueError("base must be >= 2")
    if not is_squarefree(a):
        warnings.warn(f"base {a} is not square-free; scanning anyway")
    out = []
    for p in _odd_primes_coprime(a, limit).tolist():
        ex = verify_example(p, a, full_products=full_products)
        if ex.size_ratio >= min_ratio and not ex.covers_field:
            out.append(ex)
    return out


def to_csv(examples) -> str:
    return CSV_HEADER + "\n" + "".join(ex.csv_row() + "\n" for ex in examples)
