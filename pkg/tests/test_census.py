import json
import random

import pytest

from sparsemul.census import (
    CensusIOError,
    ChunkSummary,
    ClassificationRecord,
    _run_chunk,
    classify_prime,
    density_report,
    run_census,
)

from oracles import in_t1_loop, in_t2_double_loop, min_terms_neg1, order_loop, sieve_list

# frozen from oracles.in_t2_double_loop over every odd prime below 10**4
EXCEPTIONS_BELOW_10K = [31, 89, 127, 223, 233, 431, 601, 881, 911, 1103, 1801, 2089, 2351,
                        3191, 3391, 4513, 5209, 6361, 8191, 9623, 9719]
# oracles.min_terms_neg1 for the list above, None meaning more than six
MIN_TERMS_BELOW_10K = [4, 3, 6, 3, 3, 3, 3, 3, 3, 3, 4, 3, 3, 3, 3, 3, 3, 3, None, 3, 4]


def test_classify_examples():
    r7 = classify_prime(7)
    assert (r7.ord2, r7.in_t1, r7.in_t2) == (3, False, True)
    r5 = classify_prime(5)
    assert (r5.ord2, r5.in_t1) == (4, True)
    r89 = classify_prime(89)
    assert (r89.ord2, r89.in_t1, r89.in_t2, r89.min_terms_neg1) == (11, False, False, 3)
    assert (r89.s, r89.w) == (3, 11)
    two = classify_prime(2)
    assert two.skipped and two.ord2 is None
    with pytest.raises(ValueError):
        classify_prime(9)


def test_classify_t6_fill():
    assert classify_prime(5, compute_t6=True).min_terms_neg1 == 1
    assert classify_prime(7, compute_t6=True).min_terms_neg1 == 2
    assert classify_prime(7).min_terms_neg1 is None
    assert classify_prime(8191).min_terms_neg1 is None


def test_census_100_matches_double_loop():
    rep = run_census(100)
    assert rep.prime_count == 25
    assert rep.t2_exception_list == [p for p in sieve_list(100)[1:] if not in_t2_double_loop(p)]
    assert rep.t2_exception_list == [31, 89]


def test_census_3():
    rep = run_census(3)
    assert rep.prime_count == 2 and rep.t1_count == 1
    with pytest.raises(ValueError):
        run_census(2)


def test_exceptions_below_10k():
    rep = run_census(10**4, chunk_size=3000)
    assert rep.t2_exception_list == EXCEPTIONS_BELOW_10K
    assert [rep.t2_exception_terms[p] for p in EXCEPTIONS_BELOW_10K] == MIN_TERMS_BELOW_10K
    assert rep.t6_exception_count == 1
    assert rep.prime_count == len(sieve_list(10**4))


def test_min_terms_frozen_values_match_oracle():
    got = [min_terms_neg1(p, 6) for p in EXCEPTIONS_BELOW_10K if p < 3000]
    assert got == [k for p, k in zip(EXCEPTIONS_BELOW_10K, MIN_TERMS_BELOW_10K) if p < 3000]


def test_records_against_oracles(tmp_path):
    out = tmp_path / "r.jsonl"
    run_census(3000, jsonl_path=out, compute_t6=True)
    recs = [ClassificationRecord.from_json(line) for line in out.read_text().splitlines()]
    assert [r.p for r in recs] == sieve_list(3000)[1:]
    for r in recs:
        assert r.ord2 == order_loop(2, r.p)
        assert r.in_t1 == in_t1_loop(r.p) == (r.ord2 % 2 == 0)
        assert r.s is not None and (r.p - 1) == (1 << r.s) * r.w and r.w % 2
        # nesting T_1 in T_2 in T_6
        if r.in_t1:
            assert r.in_t2 and r.min_terms_neg1 == 1
        if r.in_t2:
            assert r.min_terms_neg1 <= 2
        if r.min_terms_neg1 is not None:
            assert r.min_terms_neg1 <= 6


def test_jsonl_schema(tmp_path):
    out = tmp_path / "r.jsonl"
    run_census(100, jsonl_path=out)
    lines = out.read_text().splitlines()
    assert len(lines) == 24
    d = json.loads(next(l for l in lines if l.startswith('{"p":89')))
    assert d == {"p": 89, "ord2": 11, "s": 3, "w": 11, "t1": False, "t2": False, "mt": 3}
    assert list(d) == ["p", "ord2", "s", "w", "t1", "t2", "mt"]


def test_determinism_and_chunking(tmp_path):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    ra = run_census(20_000, jsonl_path=a, chunk_size=10_000)
    rb = run_census(20_000, jsonl_path=b, chunk_size=10_000)
    rc = run_census(20_000, jsonl_path=c, chunk_size=7_000)
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()
    assert ra.t2_exception_list == rb.t2_exception_list == rc.t2_exception_list
    assert ra.ord_quantiles == rc.ord_quantiles


def test_parallel_matches_serial(tmp_path):
    serial = run_census(30_000, chunk_size=10_000, jsonl_path=tmp_path / "s")
    par = run_census(30_000, chunk_size=10_000, workers=2, jsonl_path=tmp_path / "p")
    assert (tmp_path / "s").read_bytes() == (tmp_path / "p").read_bytes()
    assert serial.to_dict()["t2_exception_list"] == par.to_dict()["t2_exception_list"]
    assert serial.t1_count == par.t1_count


@pytest.mark.parametrize("stop", [1, 2, 4])
def test_resume_equivalence(tmp_path, stop):
    ck = tmp_path / "ck"
    with pytest.raises(InterruptedError):
        run_census(50_000, checkpoint_path=ck, chunk_size=10_000, stop_after=stop,
                   jsonl_path=tmp_path / "partial")
    resumed = run_census(50_000, checkpoint_path=ck, chunk_size=10_000, jsonl_path=tmp_path / "r")
    fresh = run_census(50_000, chunk_size=10_000, jsonl_path=tmp_path / "f")
    assert (tmp_path / "r").read_bytes() == (tmp_path / "f").read_bytes()
    drop = {"runtime"}
    assert ({k: v for k, v in resumed.to_dict().items() if k not in drop}
            == {k: v for k, v in fresh.to_dict().items() if k not in drop})


def test_unreadable_checkpoint_starts_fresh(tmp_path):
    ck = tmp_path / "ck"
    ck.write_text("garbage\n")
    with pytest.warns(UserWarning, match="starting fresh"):
        rep = run_census(1000, checkpoint_path=ck)
    assert rep.prime_count == 168
    assert ck.read_text().startswith("# sparsemul census checkpoint")


def test_io_failure_aborts(tmp_path):
    with pytest.raises(CensusIOError):
        run_census(1000, jsonl_path=tmp_path / "missing" / "out.jsonl")


def test_merge_is_associative_and_commutative():
    parts = [_run_chunk(lo, lo + 5000, False, False)[0] for lo in range(2, 30_002, 5000)]
    ref = ChunkSummary()
    for s in parts:
        ref = ref.merge(s)
    rng = random.Random(3)
    for _ in range(5):
        order = parts[:]
        rng.shuffle(order)
        # a random bracketing
        while len(order) > 1:
            i = rng.randrange(len(order) - 1)
            order[i : i + 2] = [order[i].merge(order[i + 1])]
        assert order[0] == ref
    assert ChunkSummary.from_json(ref.to_json()) == ref


def test_density_report():
    one = density_report([classify_prime(7)])
    assert one.t1_fraction == 0
    with pytest.raises(ValueError, match="empty"):
        density_report([])
    recs = [classify_prime(p) for p in sieve_list(2000)]
    rep = density_report(recs)
    direct = run_census(2000)
    assert rep.t1_count == direct.t1_count
    assert rep.t2_exception_list == direct.t2_exception_list
    assert rep.ord_quantiles == direct.ord_quantiles
    assert "t1_minus_hasse" in rep.to_csv()


def test_report_invariants():
    rep = run_census(50_000)
    assert 0 <= rep.t1_fraction <= 1
    assert rep.t2_exception_list == sorted(rep.t2_exception_list)
    primes = set(sieve_list(50_000))
    assert set(rep.t2_exception_list) <= primes
    q = rep.ord_quantiles
    assert q["0.4"] >= q["0.5"] >= q["0.677"] >= q["0.75"]
