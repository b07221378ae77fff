"""Multiplicative subgroups of F_p* stored as dense residue bit tables."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from ._kernels import kernels as K
from .modarith import (
    _check_odd_prime,
    multiplicative_order,
    primitive_root,
    two_adic_split,
)

# bits, i.e. 32 MiB per table
MAX_DENSE_MODULUS = 1 << 28


def _nwords(p: int) -> int:
    return (p + 63) // 64


class ResidueSet:
    """Subset of Z/pZ as a packed little-endian uint64 bit vector."""

    __slots__ = ("p", "bits", "card")

    def __init__(self, p: int, bits: np.ndarray, card: int | None = None):
        if p > MAX_DENSE_MODULUS:
            raise ValueError(f"modulus {p} too large for a dense residue table")
        self.p = int(p)
        self.bits = bits
        self.card = int(card) if card is not None else int(np.bitwise_count(bits).sum())

    @classmethod
    def from_elements(cls, p: int, elements) -> "ResidueSet":
        idx = np.asarray(elements, np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= p):
            raise ValueError("residue out of range")
        flags = np.zeros(_nwords(p) * 64, np.bool_)
        flags[idx] = True
        bits = np.packbits(flags, bitorder="little").view("<u8").astype(np.uint64)
        return cls(p, bits)

    @classmethod
    def empty(cls, p: int) -> "ResidueSet":
        return cls(p, np.zeros(_nwords(p), np.uint64), 0)

    @classmethod
    def full(cls, p: int, include_zero: bool = True) -> "ResidueSet":
        start = 0 if include_zero else 1
        return cls.from_elements(p, np.arange(start, p))

    def to_array(self) -> np.ndarray:
        flags = np.unpackbits(self.bits.astype("<u8").view(np.uint8), bitorder="little")
        return np.flatnonzero(flags[: self.p]).astype(np.int64)

    def __contains__(self, x) -> bool:
        x = int(x)
        if not 0 <= x < self.p:
            raise ValueError(f"residue {x} outside [0, {self.p})")
        return bool((int(self.bits[x >> 6]) >> (x & 63)) & 1)

    def __len__(self):
        return self.card

    def __iter__(self):
        return iter(self.to_array().tolist())

    def __eq__(self, other):
        if not isinstance(other, ResidueSet):
            return NotImplemented
        return self.p == other.p and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.p, self.bits.tobytes()))

    def __or__(self, other):
        _same_modulus(self, other)
        return ResidueSet(self.p, self.bits | other.bits)

    def __and__(self, other):
        _same_modulus(self, other)
        return ResidueSet(self.p, self.bits & other.bits)

    def issubset(self, other) -> bool:
        _same_modulus(self, other)
        return not np.any(self.bits & ~other.bits)

    def covers_nonzero(self) -> bool:
        return self.card - (0 in self) == self.p - 1

    def __repr__(self):
        if self.card <= 12:
            return f"ResidueSet(p={self.p}, {sorted(self)})"
        return f"ResidueSet(p={self.p}, card={self.card})"


def _same_modulus(x: ResidueSet, y: ResidueSet):
    if x.p != y.p:
        raise ValueError(f"modulus mismatch: {x.p} vs {y.p}")


def contains(rset: ResidueSet, x: int) -> bool:
    return x in rset


@dataclass(frozen=True, eq=False)
class SubgroupDescriptor:
    p: int
    generators: tuple[int, ...]
    elements: ResidueSet
    order: int
    powers: np.ndarray | None = field(default=None, repr=False)
    """``powers[i] = g**i`` for a single generator g; None otherwise."""

    @property
    def dlog(self) -> np.ndarray | None:
        """Dense index table, ``dlog[g**i] = i`` and -1 off the subgroup."""
        if self.powers is None:
            return None
        cached = self.__dict__.get("_dlog")
        if cached is None:
            cached = np.full(self.p, -1, np.int32 if self.p < 2**31 else np.int64)
            cached[self.powers] = np.arange(self.order)
            object.__setattr__(self, "_dlog", cached)
        return cached

    def log(self, x: int) -> int:
        if self.powers is None:
            raise ValueError("index map only exists for single-generator subgroups")
        i = int(self.dlog[x % self.p])
        if i < 0:
            raise ValueError(f"{x} is not in the subgroup")
        return i

    def element_array(self) -> np.ndarray:
        if self.powers is not None:
            return np.sort(self.powers)
        return self.elements.to_array()

    def __contains__(self, x):
        return x in self.elements


def _cyclic(g: int, o: int, p: int, generators) -> SubgroupDescriptor:
    powers = K.cyclic_powers(np.int64(g % p), np.int64(o), np.int64(p))
    return SubgroupDescriptor(
        p=p,
        generators=tuple(int(x) for x in generators),
        elements=ResidueSet.from_elements(p, powers),
        order=o,
        powers=powers,
    )


def generate_cyclic(r: int, p: int) -> SubgroupDescriptor:
    """``<r>`` in F_p* together with its exponent index."""
    if p > MAX_DENSE_MODULUS:
        raise ValueError(f"modulus {p} too large for a dense residue table")
    prof = multiplicative_order(r, p)
    return _cyclic(r, prof.ord, p, (r % p,))


def generate_multi(gens, p: int) -> SubgroupDescriptor:
    """Subgroup generated by up to three residues.

    F_p* is cyclic, so the result is the unique subgroup whose order is the
    lcm of the generators' orders: the powers of ``g**((p-1)/d)`` for a
    primitive root g.
    """
    gens = [int(x) for x in gens]
    if not 1 <= len(gens) <= 3:
        raise ValueError("between one and three generators expected")
    _check_odd_prime(p)
    if p > MAX_DENSE_MODULUS:
        raise ValueError(f"modulus {p} too large for a dense residue table")
    if any(x % p == 0 for x in gens):
        raise ValueError("generator not invertible")
    d = reduce(math.lcm, (multiplicative_order(x, p).ord for x in gens))
    h = pow(primitive_root(p), (p - 1) // d, p)
    desc = _cyclic(h, d, p, [x % p for x in gens])
    return SubgroupDescriptor(p=p, generators=desc.generators, elements=desc.elements, order=d)


def odd_part_subgroup(a: int, p: int) -> SubgroupDescriptor:
    """``<a**(2**s)>`` where ``p - 1 = 2**s * w``; every element has odd order."""
    _check_odd_prime(p)
    if a % p == 0:
        raise ValueError("base not invertible")
    s, _ = two_adic_split(p - 1)
    g = pow(a, 1 << s, p)
    return generate_cyclic(g, p)


__all__ = [
    "MAX_DENSE_MODULUS",
    "ResidueSet",
    "SubgroupDescriptor",
    "contains",
    "generate_cyclic",
    "generate_multi",
    "odd_part_subgroup",
]
