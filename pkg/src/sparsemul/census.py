"""Prime census: T_1 / T_2 / T_6 membership and order statistics up to X.

A prime p is in T_k when it divides some ``2**a_1 + ... + 2**a_k + 1``,
i.e. when -1 is a sum of k elements of R = <2> mod p.

* T_1 iff ord_p(2) is even (then -1 is a power of two).
* T_2 is decided by scanning a over [0, ord) and testing whether
  ``-1 - 2**a`` lies in R, with membership ``x**ord == 1``.
* T_2 exceptions get their exact minimal term count from the coset layers.

Work is cut into contiguous ranges; each range yields a ``ChunkSummary``
and the merge of summaries is associative and commutative.
"""

from __future__ import annotations

import json
import logging
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from ._kernels import kernels as K
from .modarith import _check_odd_prime, orders_of, primes_in_range
from .sumset import CosetLayers

log = logging.getLogger(__name__)

HASSE_DENSITY = Fraction(17, 24)
THETAS = (Fraction(2, 5), Fraction(1, 2), Fraction(677, 1000), Fraction(3, 4))
T6 = 6
CHECKPOINT_MAGIC = "# sparsemul census checkpoint v1"


class CensusIOError(OSError):
    pass


@dataclass(frozen=True)
class ClassificationRecord:
    p: int
    ord2: int | None
    s: int | None
    w: int | None
    in_t1: bool
    in_t2: bool
    min_terms_neg1: int | None = None
    diag_34: bool = False
    skipped: bool = False

    def to_json(self) -> str:
        return json.dumps({"p": self.p, "ord2": self.ord2, "s": self.s, "w": self.w,
                           "t1": self.in_t1, "t2": self.in_t2, "mt": self.min_terms_neg1},
                          separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "ClassificationRecord":
        d = json.loads(line)
        p, o = d["p"], d["ord2"]
        return cls(p=p, ord2=o, s=d["s"], w=d["w"], in_t1=d["t1"], in_t2=d["t2"],
                   min_terms_neg1=d.get("mt"), diag_34=o is not None and o**4 > p**3 and d["t2"])


def min_terms_neg1(p: int, order: int, k_max: int = T6, start: int = 1) -> int | None:
    """Fewest powers of two summing to -1 mod p, if at most ``k_max``."""
    eng = CosetLayers(p, K.cyclic_powers(np.int64(2), np.int64(order), np.int64(p)), order)
    for k in range(start, k_max + 1):
        if eng.contains(p - 1, k):
            return k
    return None


def _at_least_power(ords: np.ndarray, primes: np.ndarray, theta: Fraction) -> np.ndarray:
    """``ord >= p**theta`` elementwise, exact at the boundary."""
    gap = np.log(ords.astype(float)) - float(theta) * np.log(primes.astype(float))
    out = gap > 0
    for i in np.flatnonzero(np.abs(gap) < 1e-9):
        out[i] = int(ords[i]) ** theta.denominator >= int(primes[i]) ** theta.numerator
    return out


def _split(pm1: np.ndarray):
    low = pm1 & -pm1
    s = np.bitwise_count(low - 1).astype(np.int64)
    return s, pm1 >> s


def classify_primes(primes, compute_t6: bool = False) -> dict[str, np.ndarray]:
    """Columnar classification of odd primes (see module docstring)."""
    primes = np.asarray(primes, np.int64)
    ords = orders_of(2, primes)
    s, w = _split(primes - 1)
    t1 = ords % 2 == 0
    t2 = t1.copy()
    odd = np.flatnonzero(~t1)
    if odd.size:
        hit = K.pair_scan(np.int64(2), primes[odd] - 1, primes[odd], ords[odd])
        t2[odd] = hit >= 0
    mt = np.full(primes.size, -1, np.int64)
    if compute_t6:
        mt[t1] = 1
        mt[t2 & ~t1] = 2
    for i in np.flatnonzero(~t2):
        k = min_terms_neg1(int(primes[i]), int(ords[i]), start=3)
        mt[i] = -1 if k is None else k
    # p**3 is never a fourth power, so >= and > agree
    d34 = _at_least_power(ords, primes, Fraction(3, 4))
    return {"p": primes, "ord2": ords, "s": s, "w": w, "t1": t1, "t2": t2, "mt": mt,
            "gt34": d34}


def classify_prime(p: int, compute_t6: bool = False) -> ClassificationRecord:
    if p == 2:
        return ClassificationRecord(p=2, ord2=None, s=None, w=None, in_t1=False,
                                    in_t2=False, skipped=True)
    _check_odd_prime(p)
    cols = classify_primes([p], compute_t6)
    return _records(cols)[0]


def _records(cols) -> list[ClassificationRecord]:
    out = []
    for i in range(cols["p"].size):
        mt = int(cols["mt"][i])
        o, p = int(cols["ord2"][i]), int(cols["p"][i])
        t2 = bool(cols["t2"][i])
        out.append(ClassificationRecord(
            p=p, ord2=o, s=int(cols["s"][i]), w=int(cols["w"][i]), in_t1=bool(cols["t1"][i]),
            in_t2=t2, min_terms_neg1=None if mt < 0 else mt,
            diag_34=o**4 > p**3 and t2))
    return out


# -- aggregation -------------------------------------------------------------

def _theta_key(theta: Fraction) -> str:
    return f"{float(theta):g}"


@dataclass
class ChunkSummary:
    ranges: list[tuple[int, int]] = field(default_factory=list)
    prime_count: int = 0
    odd_count: int = 0
    t1_count: int = 0
    # (p, min terms or None) for primes outside T_2
    exceptions: list[tuple[int, int | None]] = field(default_factory=list)
    theta_counts: dict[str, int] = field(default_factory=lambda: {_theta_key(t): 0 for t in THETAS})
    diag34_violations: list[int] = field(default_factory=list)
    # float sums depend on merge order, so timing stays out of equality
    elapsed: float = field(default=0.0, compare=False)

    def merge(self, other: "ChunkSummary") -> "ChunkSummary":
        return ChunkSummary(
            ranges=sorted(self.ranges + other.ranges),
            prime_count=self.prime_count + other.prime_count,
            odd_count=self.odd_count + other.odd_count,
            t1_count=self.t1_count + other.t1_count,
            exceptions=sorted(self.exceptions + other.exceptions),
            theta_counts={k: self.theta_counts[k] + other.theta_counts[k] for k in self.theta_counts},
            diag34_violations=sorted(self.diag34_violations + other.diag34_violations),
            elapsed=self.elapsed + other.elapsed,
        )

    def to_json(self) -> str:
        return json.dumps(asdict(self), separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "ChunkSummary":
        d = json.loads(text)
        return cls(ranges=[tuple(r) for r in d["ranges"]], prime_count=d["prime_count"],
                   odd_count=d["odd_count"], t1_count=d["t1_count"],
                   exceptions=[(p, k) for p, k in d["exceptions"]],
                   theta_counts=d["theta_counts"], diag34_violations=d["diag34_violations"],
                   elapsed=d["elapsed"])


def _summarize(cols, prime_count: int, lo: int, hi: int, elapsed: float) -> ChunkSummary:
    p, o = cols["p"], cols["ord2"]
    exc = [(int(q), None if k < 0 else int(k))
           for q, k in zip(p[~cols["t2"]], cols["mt"][~cols["t2"]])]
    return ChunkSummary(
        ranges=[(lo, hi)],
        prime_count=prime_count,
        odd_count=int(p.size),
        t1_count=int(cols["t1"].sum()),
        exceptions=exc,
        theta_counts={_theta_key(t): int(_at_least_power(o, p, t).sum()) for t in THETAS},
        diag34_violations=[int(q) for q in p[cols["gt34"] & ~cols["t2"]]],
        elapsed=elapsed,
    )


@dataclass
class CensusReport:
    lo: int
    X: int
    prime_count: int
    odd_prime_count: int
    t1_count: int
    t2_exception_list: list[int]
    t2_exception_terms: dict[int, int | None]
    t6_exception_count: int | None
    ord_quantiles: dict[str, float]
    diag34_violations: list[int]
    runtime: dict[str, float] = field(default_factory=dict)

    @property
    def t1_fraction(self) -> float:
        return self.t1_count / self.prime_count

    @property
    def t2_exception_fraction(self) -> float:
        return len(self.t2_exception_list) / self.prime_count

    @property
    def below_sqrt_fraction(self) -> float:
        """Fraction of odd primes with ord_p(2) < sqrt(p)."""
        return 1.0 - self.ord_quantiles[_theta_key(Fraction(1, 2))]

    def summary_rows(self) -> list[tuple[str, object]]:
        rows = [
            ("range_lo", self.lo), ("X", self.X),
            ("prime_count", self.prime_count), ("odd_prime_count", self.odd_prime_count),
            ("t1_count", self.t1_count), ("t1_fraction", f"{self.t1_fraction:.6f}"),
            ("hasse_17_24", f"{float(HASSE_DENSITY):.6f}"),
            ("t1_minus_hasse", f"{self.t1_fraction - float(HASSE_DENSITY):+.6f}"),
            ("t2_exception_count", len(self.t2_exception_list)),
            ("t2_exception_fraction", f"{self.t2_exception_fraction:.6e}"),
            ("t6_exception_count", "" if self.t6_exception_count is None else self.t6_exception_count),
        ]
        rows += [(f"ord_ge_p^{k}", f"{v:.6f}") for k, v in self.ord_quantiles.items()]
        rows.append(("diag34_violations", len(self.diag34_violations)))
        rows += [(f"runtime_{k}", f"{v:.3f}") for k, v in self.runtime.items()]
        return rows

    def to_csv(self) -> str:
        return "metric,value\n" + "".join(f"{k},{v}\n" for k, v in self.summary_rows())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["t2_exception_terms"] = {str(k): v for k, v in self.t2_exception_terms.items()}
        d["t1_fraction"] = self.t1_fraction
        return d


def _report(summary: ChunkSummary, lo: int, X: int, runtime: dict) -> CensusReport:
    exc = dict(summary.exceptions)
    odd = summary.odd_count
    return CensusReport(
        lo=lo, X=X,
        prime_count=summary.prime_count,
        odd_prime_count=odd,
        t1_count=summary.t1_count,
        t2_exception_list=sorted(exc),
        t2_exception_terms=exc,
        t6_exception_count=sum(1 for v in exc.values() if v is None),
        ord_quantiles={k: (v / odd if odd else 0.0) for k, v in summary.theta_counts.items()},
        diag34_violations=summary.diag34_violations,
        runtime=runtime,
    )


def density_report(records) -> CensusReport:
    """Aggregate an iterable of ClassificationRecord into a CensusReport."""
    recs = sorted(records, key=lambda r: r.p)
    if not recs:
        raise ValueError("empty record stream")
    odd = [r for r in recs if not r.skipped and r.p != 2]
    p = np.array([r.p for r in odd], np.int64)
    o = np.array([r.ord2 for r in odd], np.int64)
    summary = ChunkSummary(
        ranges=[(recs[0].p, recs[-1].p + 1)],
        prime_count=len(recs),
        odd_count=len(odd),
        t1_count=sum(r.in_t1 for r in odd),
        exceptions=[(r.p, r.min_terms_neg1) for r in odd if not r.in_t2],
        theta_counts={_theta_key(t): int(_at_least_power(o, p, t).sum()) if odd else 0
                      for t in THETAS},
        diag34_violations=[r.p for r in odd if r.ord2**4 > r.p**3 and not r.in_t2],
    )
    return _report(summary, recs[0].p, recs[-1].p, {})


# -- chunked driver ----------------------------------------------------------

def default_chunk_size(X: int) -> int:
    return int(min(250_000, max(10_000, X // 32)))


def _run_chunk(lo: int, hi: int, compute_t6: bool, want_records: bool):
    t0 = time.perf_counter()
    primes = primes_in_range(lo, hi)
    odd = primes[primes > 2]
    cols = classify_primes(odd, compute_t6)
    summary = _summarize(cols, int(primes.size), lo, hi, time.perf_counter() - t0)
    text = None
    if want_records:
        recs = _records(cols)
        if primes.size and primes[0] == 2:
            recs.insert(0, classify_prime(2))
        text = "".join(r.to_json() + "\n" for r in recs if not r.skipped)
    return summary, text


def _chunk_ranges(X: int, chunk: int, lo: int = 2):
    return [(a, min(a + chunk, X + 1)) for a in range(lo, X + 1, chunk)]


def _header(X: int, chunk: int, compute_t6: bool) -> str:
    return f"{CHECKPOINT_MAGIC}\n# X={X} chunk={chunk} t6={int(compute_t6)}\n"


def _load_checkpoint(path: Path, X: int, chunk: int, compute_t6: bool) -> dict:
    try:
        lines = path.read_text().splitlines()
        if lines[:2] != _header(X, chunk, compute_t6).splitlines():
            raise ValueError("checkpoint header does not match this run")
        done = {}
        for line in lines[2:]:
            if not line.strip():
                continue
            lo, hi, payload = line.split(" ", 2)
            done[(int(lo), int(hi))] = ChunkSummary.from_json(payload)
        return done
    except FileNotFoundError:
        return {}
    except (OSError, ValueError, KeyError, IndexError) as exc:
        warnings.warn(f"ignoring unreadable checkpoint {path}: {exc}; starting fresh")
        return {}


def _write_checkpoint(path: Path, X: int, chunk: int, compute_t6: bool, done: dict):
    tmp = path.with_name(path.name + ".tmp")
    body = "".join(f"{lo} {hi} {done[(lo, hi)].to_json()}\n" for lo, hi in sorted(done))
    tmp.write_text(_header(X, chunk, compute_t6) + body)
    os.replace(tmp, path)


def _parts_dir(checkpoint: Path) -> Path:
    return checkpoint.with_name(checkpoint.name + ".parts")


def run_census(
    X: int,
    compute_t6: bool = False,
    checkpoint_path=None,
    workers: int = 1,
    chunk_size: int | None = None,
    jsonl_path=None,
    stop_after: int | None = None,
) -> CensusReport:
    """Classify every prime up to X.

    With ``checkpoint_path`` each finished chunk is recorded atomically and
    a rerun skips it; per-chunk JSONL lands next to the checkpoint so the
    final JSONL is identical whether or not the run was interrupted.
    ``stop_after`` halts after that many new chunks (used to test resume).
    """
    if X < 3:
        raise ValueError("census needs X >= 3")
    if workers < 1:
        raise ValueError("worker count must be >= 1")
    chunk = chunk_size or default_chunk_size(X)
    t0 = time.perf_counter()
    ckpt = Path(checkpoint_path) if checkpoint_path else None
    done = _load_checkpoint(ckpt, X, chunk, compute_t6) if ckpt else {}
    want = jsonl_path is not None
    parts = _parts_dir(ckpt) if ckpt and want else None
    if parts is not None:
        parts.mkdir(exist_ok=True)
        # a chunk counts as done only if its records survived too
        done = {r: s for r, s in done.items() if (parts / f"{r[0]}.jsonl").exists()}
    texts: dict[tuple[int, int], str] = {}
    todo = [r for r in _chunk_ranges(X, chunk) if r not in done]
    if stop_after is not None:
        todo = todo[:stop_after]
    log.info("census to %d: %d chunks, %d already done, %d workers", X, len(todo) + len(done),
             len(done), workers)

    def finish(rng, summary, text):
        done[rng] = summary
        try:
            if parts is not None:
                tmp = parts / f"{rng[0]}.jsonl.tmp"
                tmp.write_text(text)
                os.replace(tmp, parts / f"{rng[0]}.jsonl")
            elif text is not None:
                texts[rng] = text
            if ckpt:
                _write_checkpoint(ckpt, X, chunk, compute_t6, done)
        except OSError as exc:
            raise CensusIOError(f"census aborted writing results for {rng}: {exc}") from exc
        log.info("chunk [%d, %d) done: %d primes, %d T2 exceptions", rng[0], rng[1],
                 summary.prime_count, len(summary.exceptions))

    if workers == 1 or len(todo) <= 1:
        for lo, hi in todo:
            finish((lo, hi), *_run_chunk(lo, hi, compute_t6, want))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futs = {pool.submit(_run_chunk, lo, hi, compute_t6, want): (lo, hi) for lo, hi in todo}
            for fut in as_completed(futs):
                finish(futs[fut], *fut.result())

    if stop_after is not None and len(done) < len(_chunk_ranges(X, chunk)):
        raise InterruptedError(f"stopped after {stop_after} chunks")

    total = ChunkSummary()
    for rng in sorted(done):
        total = total.merge(done[rng])
    if want:
        try:
            with open(jsonl_path, "w") as fh:
                for rng in sorted(done):
                    fh.write((parts / f"{rng[0]}.jsonl").read_text() if parts else texts[rng])
        except OSError as exc:
            raise CensusIOError(f"could not write {jsonl_path}: {exc}") from exc
    runtime = {"wall_seconds": time.perf_counter() - t0, "chunk_seconds": total.elapsed,
               "chunks": float(len(done)), "workers": float(workers)}
    return _report(total, 2, X, runtime)

