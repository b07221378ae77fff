"""Iterated sumsets kR of multiplicative subgroups R of F_p*.

Two engines compute kR:

* ``SumsetLayers`` builds every layer as a dense bit table with the
  shift-or kernel; it works for any base set.
* ``CosetLayers`` exploits that kR is a union of cosets of R when R is a
  subgroup (``kR * R = kR``).  A layer is stored as the set of coset labels
  ``x**|R| mod p`` plus one representative per coset, so a step costs about
  p label evaluations no matter how large R is, and nothing is sized by p
  when R is small.  This is the engine behind ``min_terms`` and friends.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import kernels as K
from .subgroup import ResidueSet, SubgroupDescriptor, _same_modulus

MAX_TERMS = 8
_KERNEL_CAP = 1 << 62
_PAIR_BLOCK = 1 << 22
# census steps stay below p pairs; this leaves room up to ~1.6e7
DEFAULT_PAIR_BUDGET = 1 << 24
# Python-integer path for moduli >= 2**62
BIG_MODULUS_PAIR_BUDGET = 1 << 20


class SearchBudgetExceeded(RuntimeError):
    """A sumset layer would need more work than the configured budget."""


# -- dense route -------------------------------------------------------------

def add_sets(X: ResidueSet, Y: ResidueSet) -> ResidueSet:
    """``{x + y mod p}``; one shifted OR of the larger table per element of the smaller."""
    _same_modulus(X, Y)
    if X.card == 0 or Y.card == 0:
        return ResidueSet.empty(X.p)
    if Y.card > X.card:
        X, Y = Y, X
    return ResidueSet(X.p, K.shift_or_sum(X.bits, Y.to_array(), np.int64(X.p)))


@dataclass
class SumsetLayers:
    p: int
    base: ResidueSet
    layers: list[ResidueSet] = field(default_factory=list)
    covered_at: int | None = None

    def __getitem__(self, k: int) -> ResidueSet:
        if not 1 <= k <= len(self.layers):
            raise IndexError(f"layer {k} not built (have 1..{len(self.layers)})")
        return self.layers[k - 1]

    @property
    def k_max(self) -> int:
        return len(self.layers)


def build_layers(base: ResidueSet, k_max: int) -> SumsetLayers:
    """Layers ``1R .. k_max R`` as dense tables."""
    if not 1 <= k_max <= MAX_TERMS:
        raise ValueError(f"k_max must lie in [1, {MAX_TERMS}]")
    out = SumsetLayers(p=base.p, base=base, layers=[base])
    cur = base
    for k in range(1, k_max + 1):
        if k > 1:
            cur = add_sets(cur, base)
            out.layers.append(cur)
        if out.covered_at is None and cur.covers_nonzero():
            out.covered_at = k
    return out


# -- coset route -------------------------------------------------------------

def _py_coset_step(reps, elems, o, p):
    values = [(c + e) % p for c in reps for e in elems]
    labels = [pow(v, o, p) if v else 0 for v in values]
    return values, labels


class CosetLayers:
    """Lazily extended layers of kR for the order-``order`` subgroup R of F_p*.

    ``elems`` must be exactly the elements of R.  Moduli at or above 2**62
    fall back to Python integers.
    """

    def __init__(self, p: int, elems, order: int, pair_budget: int = DEFAULT_PAIR_BUDGET):
        self.p = int(p)
        self.pair_budget = pair_budget
        self.order = int(order)
        self.n_cosets = (self.p - 1) // self.order
        self._big = self.p >= _KERNEL_CAP
        if self._big:
            self.pair_budget = min(pair_budget, BIG_MODULUS_PAIR_BUDGET)
        if self._big:
            self.elems = [int(e) for e in elems]
        else:
            self.elems = np.asarray(elems, np.int64)
        if len(self.elems) != self.order:
            raise ValueError("element list does not match the subgroup order")
        one = 1 % self.p
        # (sorted labels, representatives aligned with labels, 0 in layer?)
        self._layers = [(self._arr([one]), self._arr([one]), False)]

    def _arr(self, xs):
        return list(xs) if self._big else np.asarray(xs, np.int64)

    @classmethod
    def of(cls, R: SubgroupDescriptor) -> "CosetLayers":
        elems = R.powers if R.powers is not None else R.element_array()
        return cls(R.p, elems, R.order)

    def _step(self, labels, reps, zero):
        seeds = list(reps) + [0] if zero else reps
        work = len(seeds) * self.order
        if work > self.pair_budget:
            raise SearchBudgetExceeded(
                f"layer {len(self._layers) + 1} mod {self.p} needs {work} sums "
                f"(budget {self.pair_budget})")
        if self._big:
            values, labs = _py_coset_step(seeds, self.elems, self.order, self.p)
            first = {}
            for v, lab in zip(values, labs):
                if v and lab not in first:
                    first[lab] = v
            new_zero = any(v == 0 for v in values)
            keys = sorted(first)
            return keys, [first[k] for k in keys], new_zero
        seeds = np.asarray(seeds, np.int64)
        block = max(1, _PAIR_BLOCK // max(1, self.order))
        all_labels, all_reps, new_zero = [], [], False
        for i in range(0, seeds.size, block):
            values, labs = K.coset_step(seeds[i : i + block], self.elems,
                                        np.int64(self.order), np.int64(self.p))
            nz = values != 0
            new_zero |= bool((~nz).any())
            u, idx = np.unique(labs[nz], return_index=True)
            all_labels.append(u)
            all_reps.append(values[nz][idx])
        labs = np.concatenate(all_labels)
        reps_out = np.concatenate(all_reps)
        u, idx = np.unique(labs, return_index=True)
        return u, reps_out[idx], new_zero

    def layer(self, k: int):
        if k < 1:
            raise ValueError("layers start at k = 1")
        while len(self._layers) < k:
            self._layers.append(self._step(*self._layers[-1]))
        return self._layers[k - 1]

    def label(self, x: int) -> int:
        x %= self.p
        return pow(x, self.order, self.p) if x else 0

    def contains(self, m: int, k: int) -> bool:
        labels, _, zero = self.layer(k)
        m %= self.p
        if m == 0:
            return zero
        lab = self.label(m)
        if self._big:
            return lab in set(labels)
        i = np.searchsorted(labels, lab)
        return bool(i < labels.size and labels[i] == lab)

    def contains_many(self, values: np.ndarray, k: int) -> np.ndarray:
        labels, _, zero = self.layer(k)
        values = np.asarray(values, np.int64) % self.p
        labs = K.powmod(values, np.int64(self.order), np.int64(self.p))
        hit = np.isin(labs, labels)
        hit[values == 0] = zero
        return hit

    def size(self, k: int) -> int:
        labels, _, zero = self.layer(k)
        return len(labels) * self.order + int(zero)

    def covers_nonzero(self, k: int) -> bool:
        return len(self.layer(k)[0]) == self.n_cosets

    def first_layer_containing(self, m: int, k_max: int) -> int | None:
        for k in range(1, k_max + 1):
            if self.contains(m, k):
                return k
        return None


# -- public operations -------------------------------------------------------

def _members(rset: ResidueSet, values: np.ndarray) -> np.ndarray:
    words = rset.bits[values >> 6]
    return ((words >> (values & 63).astype(np.uint64)) & np.uint64(1)).astype(bool)


def _check_target(R: SubgroupDescriptor, m: int) -> int:
    m %= R.p
    if m == 0:
        raise ValueError("target must be nonzero")
    return m


def _check_k(k: int):
    if not 1 <= k <= MAX_TERMS:
        raise ValueError(f"number of terms must lie in [1, {MAX_TERMS}]")


def in_two_fold(R: SubgroupDescriptor, m: int) -> bool:
    """``m in R + R`` by scanning a over R and testing ``m - a`` in R."""
    vals = (m - R.element_array()) % R.p
    return bool(_members(R.elements, vals).any())


def min_terms(R: SubgroupDescriptor, m: int, k_max: int = 6, method: str = "coset") -> int | None:
    """Smallest ``k <= k_max`` with m a sum of exactly k elements of R, else None.

    ``method="bitset"`` builds dense layers instead of coset layers; both
    give the same answer.
    """
    _check_k(k_max)
    m = _check_target(R, m)
    if m in R.elements:
        return 1
    if k_max == 1:
        return None
    if in_two_fold(R, m):
        return 2
    if method == "bitset":
        layers = build_layers(R.elements, k_max)
        return next((k for k in range(3, k_max + 1) if m in layers[k]), None)
    if method != "coset":
        raise ValueError(f"unknown method {method!r}")
    eng = CosetLayers.of(R)
    return next((k for k in range(3, k_max + 1) if eng.contains(m, k)), None)


def covers_all(R: SubgroupDescriptor, k: int) -> bool:
    """Whether kR contains every nonzero residue."""
    _check_k(k)
    return CosetLayers.of(R).covers_nonzero(k)


def _greedy_exponents(eng: CosetLayers, powers, m: int, k: int) -> list[int]:
    """Lexicographically smallest ascending exponent list with sum ``m``."""
    p = eng.p
    exps: list[int] = []
    cur = m % p
    for j in range(k, 1, -1):
        if eng._big:
            a = next((i for i, x in enumerate(powers) if eng.contains(cur - x, j - 1)), None)
        else:
            ok = eng.contains_many((cur - powers) % p, j - 1)
            a = int(np.argmax(ok)) if ok.any() else None
        if a is None:
            raise ValueError("no representation")
        exps.append(a)
        cur = (cur - int(powers[a])) % p
    if eng._big:
        last = next((i for i, x in enumerate(powers) if int(x) == cur), None)
    else:
        hits = np.flatnonzero(powers == cur)
        last = int(hits[0]) if hits.size else None
    if last is None:
        raise ValueError("no representation")
    exps.append(last)
    return exps


def reconstruct_exponents(R: SubgroupDescriptor, m: int, k: int) -> list[int]:
    """Exponents ``a_1 <= ... <= a_k`` in [0, ord) with ``sum g**a_i == m (mod p)``."""
    if R.powers is None:
        raise ValueError("index map required; build R with generate_cyclic")
    _check_k(k)
    m %= R.p
    eng = CosetLayers.of(R)
    if not eng.contains(m, k):
        raise ValueError("no representation")
    exps = _greedy_exponents(eng, R.powers, m, k)
    g = R.generators[0]
    if sum(pow(g, a, R.p) for a in exps) % R.p != m:
        raise AssertionError("reconstructed exponents fail re-verification")
    return exps


@dataclass(frozen=True)
class GrowthStats:
    size_R: int
    size_2R: int
    ratio_to_8_5: float


def sumset_growth(R: SubgroupDescriptor) -> GrowthStats:
    """Exact ``|R + R|`` (zero included when present) and ``|2R| / |R|**1.6``."""
    if R.order < 2:
        raise ValueError("growth needs |R| >= 2")
    size = CosetLayers.of(R).size(2)
    return GrowthStats(size_R=R.order, size_2R=size, ratio_to_8_5=size / R.order ** 1.6)
