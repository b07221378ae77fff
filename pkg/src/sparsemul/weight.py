"""Minimal-Hamming-weight multiples of primes, with integer certificates."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .modarith import _check_odd_prime, multiplicative_order
from .subgroup import MAX_DENSE_MODULUS, generate_cyclic
from ._kernels import kernels as K
from .sumset import CosetLayers, _greedy_exponents


class VerificationError(RuntimeError):
    """An object failed its own integer re-verification."""


@dataclass(frozen=True)
class WeightCertificate:
    p: int
    exponents: tuple[int, ...]
    value: int
    weight: int
    cofactor: int

    def verify(self) -> bool:
        return (
            self.value > 0
            and self.value % self.p == 0
            and self.value == self.cofactor * self.p
            and self.value.bit_count() == self.weight
        )

    def bit_exponents(self) -> list[int]:
        """Positions of the one bits of ``value``, highest first."""
        v = self.value
        return [i for i in range(v.bit_length() - 1, -1, -1) if v >> i & 1]

    def __str__(self):
        exps = ",".join(str(a) for a in sorted(self.exponents, reverse=True))
        return (f"p={self.p} w={self.weight} exps=[{exps}] "
                f"value=0x{self.value:X} cofactor={self.cofactor}")

    _FORMAT = re.compile(
        r"p=(\d+) w=(\d+) exps=\[([\d,]*)\] value=0x([0-9A-Fa-f]+) cofactor=(\d+)$")

    @classmethod
    def parse(cls, text: str) -> "WeightCertificate":
        m = cls._FORMAT.match(text.strip())
        if m is None:
            raise ValueError(f"not a certificate: {text!r}")
        p, w, exps, value, cof = m.groups()
        cert = cls(p=int(p), exponents=tuple(sorted(int(e) for e in exps.split(",") if e)),
                   value=int(value, 16), weight=int(w), cofactor=int(cof))
        if not cert.verify():
            raise VerificationError(f"certificate does not verify: {text!r}")
        return cert


def normalize_certificate(p: int, exponents) -> WeightCertificate:
    """Certificate for ``sum 2**a`` over the exponent multiset.

    Repeated exponents carry (``2**a + 2**a = 2**(a+1)``) because the value
    is formed as an exact integer; divisibility is checked on that integer.
    """
    exps = tuple(sorted(int(a) for a in exponents))
    if not exps or exps[0] < 0:
        raise ValueError("exponents must be a nonempty multiset of nonnegative integers")
    if sum(pow(2, a, p) for a in exps) % p:
        raise ValueError("not a multiple")
    value = sum(1 << a for a in exps)
    if value % p:
        raise VerificationError("residue test passed but the integer is not a multiple")
    return WeightCertificate(p=p, exponents=exps, value=value,
                             weight=value.bit_count(), cofactor=value // p)


def _coset_engine(p: int, order: int):
    if p <= MAX_DENSE_MODULUS:
        R = generate_cyclic(2, p)
        return CosetLayers.of(R), R.powers
    if p < 1 << 62:
        powers = K.cyclic_powers(2, order, p)
    else:
        powers = [pow(2, i, p) for i in range(order)]
    return CosetLayers(p, powers, order), powers


def min_weight_multiple(p: int, weight_cap: int | None = None) -> WeightCertificate | None:
    """Minimal-weight positive multiple of ``p``, or None if it exceeds ``weight_cap``.

    A weight-(k+1) multiple ``1 + 2**a_1 + ... + 2**a_k`` exists exactly when
    -1 is a sum of k powers of two mod p (divide any multiple by its lowest
    power of two).  So the minimal weight is one more than the first sumset
    layer of <2> containing -1.
    """
    if p == 2:
        raise ValueError("multiples of 2 trivially have weight 1")
    _check_odd_prime(p)
    order = multiplicative_order(2, p).ord
    eng, powers = _coset_engine(p, order)
    k_cap = None if weight_cap is None else weight_cap - 1
    k = 1
    # the layers of <2> are nested and must reach -1 within p - 1 terms
    while k_cap is None or k <= k_cap:
        if eng.contains(p - 1, k):
            break
        k += 1
    else:
        return None
    exps = _greedy_exponents(eng, powers, p - 1, k)
    cert = normalize_certificate(p, [0] + exps)
    if not cert.verify() or cert.weight != k + 1:
        raise VerificationError(f"certificate for {p} failed re-verification: {cert}")
    return cert


def stolarsky_check(n: int, t: int) -> bool:
    """``popcount(t * (2**n - 1)) >= n``; true for every positive t."""
    if n < 1 or t < 1:
        raise ValueError("n and t must be positive")
    return (t * ((1 << n) - 1)).bit_count() >= n
