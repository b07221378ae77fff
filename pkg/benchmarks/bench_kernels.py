"""Compare the numba and numpy kernel backends on census-shaped inputs.

    python3 benchmarks/bench_kernels.py [--limit 1000000] [--repeat 3]

Each kernel runs once untimed (JIT warm-up) and then ``--repeat`` times;
the best wall time is reported along with an output-equality check.
"""

import argparse
import time

import numpy as np

from sparsemul._kernels import get_backend
from sparsemul.modarith import _base_primes, sieve_primes


def best_of(fn, repeat):
    out = fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def same(a, b):
    if isinstance(a, tuple):
        return all(np.array_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def cases(limit):
    primes = sieve_primes(limit)[1:]
    small = _base_primes(int(limit**0.5) + 1)
    nb = get_backend("numba")
    ords = nb.orders(np.int64(2), primes, small)
    odd = ords % 2 == 1
    p_odd, o_odd = primes[odd], ords[odd]
    p_big = int(primes[-1])
    words = (p_big + 63) // 64
    rng = np.random.default_rng(0)
    xbits = rng.integers(0, 2**63, words, dtype=np.int64).astype(np.uint64)
    tail = p_big % 64
    if tail:
        xbits[-1] &= np.uint64((1 << tail) - 1)
    yelems = rng.choice(p_big, 64, replace=False).astype(np.int64)
    q, qo = 131071, 17
    elems = nb.cyclic_powers(np.int64(2), np.int64(qo), np.int64(q))
    reps = rng.choice(q, 4096, replace=False).astype(np.int64)
    return {
        "sieve_segment": lambda K: K.sieve_segment(0, limit, small),
        "orders": lambda K: K.orders(np.int64(2), primes, small),
        "pair_scan": lambda K: K.pair_scan(np.int64(2), p_odd - 1, p_odd, o_odd),
        "shift_or_sum": lambda K: K.shift_or_sum(xbits, yelems, np.int64(p_big)),
        "coset_step": lambda K: K.coset_step(reps, elems, np.int64(qo), np.int64(q)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--limit", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = [get_backend("numba"), get_backend("numpy")]
    print(f"{'kernel':<14}{'numba s':>10}{'numpy s':>10}{'speedup':>9}  equal")
    for name, fn in cases(args.limit).items():
        (t_nb, out_nb), (t_np, out_np) = (best_of(lambda K=K: fn(K), args.repeat) for K in backends)
        print(f"{name:<14}{t_nb:>10.4f}{t_np:>10.4f}{t_np / t_nb:>8.1f}x  {same(out_nb, out_np)}")


if __name__ == "__main__":
    main()
