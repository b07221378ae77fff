import numpy as np
import pytest

from sparsemul.subgroup import ResidueSet, generate_cyclic, generate_multi
from sparsemul.sumset import (
    CosetLayers,
    SearchBudgetExceeded,
    add_sets,
    build_layers,
    covers_all,
    in_two_fold,
    min_terms,
    reconstruct_exponents,
    sumset_growth,
)

from oracles import exact_sumsets, iterated_sumsets, pair_sums, sieve_list


def test_add_sets_example():
    x = ResidueSet.from_elements(5, [1, 2])
    assert list(add_sets(x, x)) == [2, 3, 4]
    assert add_sets(x, ResidueSet.empty(5)).card == 0


def test_add_sets_matches_pairs():
    rng = np.random.default_rng(7)
    for p in (2, 3, 63, 64, 65, 127, 128, 129, 1000, 4099):
        for _ in range(5):
            xs = rng.choice(p, size=rng.integers(1, min(p, 60) + 1), replace=False)
            ys = rng.choice(p, size=rng.integers(1, min(p, 60) + 1), replace=False)
            got = add_sets(ResidueSet.from_elements(p, xs), ResidueSet.from_elements(p, ys))
            want = {(int(a) + int(b)) % p for a in xs for b in ys}
            assert set(got) == want


def test_min_terms_examples():
    assert min_terms(generate_cyclic(2, 7), 6, 6) == 2
    assert min_terms(generate_cyclic(2, 23), 22, 6) == 2
    r89 = generate_cyclic(2, 89)
    assert min_terms(r89, 88, 6) == 3
    assert min_terms(r89, 88, 6, method="bitset") == 3
    assert min_terms(r89, 88, 2) is None
    with pytest.raises(ValueError, match="nonzero"):
        min_terms(r89, 89, 3)
    with pytest.raises(ValueError):
        min_terms(r89, 1, 9)
    with pytest.raises(ValueError, match="unknown method"):
        min_terms(r89, 88, 3, method="magic")


def test_layers_match_enumeration():
    for p in sieve_list(110)[1:]:
        R = generate_cyclic(2, p)
        want = exact_sumsets(list(R.elements), p, 4)
        dense = build_layers(R.elements, 4)
        eng = CosetLayers.of(R)
        for k in range(1, 5):
            assert set(dense[k]) == want[k - 1]
            assert eng.size(k) == len(want[k - 1])
            hits = eng.contains_many(np.arange(p), k)
            assert set(np.flatnonzero(hits).tolist()) == want[k - 1]


def test_two_enumeration_oracles_agree():
    for p in sieve_list(80)[1:]:
        R = generate_cyclic(2, p)
        assert exact_sumsets(list(R.elements), p, 4) == iterated_sumsets(list(R.elements), p, 4)


def test_layers_for_multi_generator_subgroups():
    for p, gens in [(31, [5]), (61, [3, 9]), (101, [16]), (131, [2, 3])]:
        R = generate_multi(gens, p)
        want = exact_sumsets(list(R.elements), p, 3)
        eng = CosetLayers.of(R)
        for k in (1, 2, 3):
            assert eng.size(k) == len(want[k - 1])


def test_in_two_fold_matches_pairs():
    for p in sieve_list(300)[1:]:
        R = generate_cyclic(2, p)
        two = pair_sums(list(R.elements), p)
        for m in range(1, p):
            assert in_two_fold(R, m) == (m in two)


def test_covers_all_examples():
    assert covers_all(generate_cyclic(2, 7), 2)
    assert not covers_all(generate_cyclic(2, 89), 2)
    assert covers_all(generate_cyclic(2, 89), 6)
    assert build_layers(generate_cyclic(2, 7).elements, 3).covered_at == 2


def test_reconstruct_examples():
    r23 = generate_cyclic(2, 23)
    exps = reconstruct_exponents(r23, 22, 2)
    assert exps == [2, 6]
    assert sum(pow(2, a, 23) for a in exps) % 23 == 22
    assert reconstruct_exponents(generate_cyclic(2, 89), 88, 3) == [1, 3, 8]
    with pytest.raises(ValueError, match="no representation"):
        reconstruct_exponents(generate_cyclic(2, 89), 88, 2)
    with pytest.raises(ValueError, match="index map"):
        reconstruct_exponents(generate_multi([2], 7), 6, 2)


def test_reconstruct_is_lexicographically_first():
    from itertools import combinations_with_replacement
    for p in (23, 41, 73, 89, 113):
        R = generate_cyclic(2, p)
        for k in (2, 3):
            reachable = exact_sumsets(list(R.elements), p, k)[-1]
            for m in sorted(reachable - {0})[:15]:
                best = next(c for c in combinations_with_replacement(range(R.order), k)
                            if sum(pow(2, a, p) for a in c) % p == m)
                assert reconstruct_exponents(R, m, k) == list(best)


def test_growth_examples():
    assert sumset_growth(generate_cyclic(2, 7)).size_2R == 6
    assert sumset_growth(generate_cyclic(2, 11)).size_2R == 11
    g = sumset_growth(generate_cyclic(2, 23))
    assert (g.size_R, g.size_2R) == (11, 22)
    assert g.ratio_to_8_5 == pytest.approx(22 / 11**1.6)


def test_pair_budget_guard():
    # 2**a + 2**b lies in the coset of 1 + 2**(b-a), so 2R has few labels
    eng = CosetLayers(2**31 - 1, [pow(2, i, 2**31 - 1) for i in range(31)], 31, pair_budget=100)
    eng.layer(2)
    with pytest.raises(SearchBudgetExceeded):
        eng.layer(3)


def test_big_modulus_route():
    q = 2**89 - 1
    eng = CosetLayers(q, [1 << i for i in range(89)], 89)
    assert eng.contains(3, 2) and not eng.contains(7, 2) and eng.contains(7, 3)
    assert eng.size(2) == 89 * 90 // 2
