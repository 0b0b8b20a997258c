from itertools import permutations

import pytest

from lexshell.complex import check_crossing, descent_sets, flag_h, verify_shelling
from lexshell.series import TruncatedSeries, wreath_elements
from lexshell.wreath import (
    WreathError,
    canonical_rep,
    chain_of_word,
    classified_descents,
    classify_positions,
    enumerate_wreath_facets,
    face_ring_hilbert,
    facet_count,
    hilbert_numerator,
    is_orbit_rep,
    wreath_complex,
    wreath_key,
)


def act(g, word):
    return tuple(g[x - 1] + 1 for x in word)


def brute_min(k, n, word):
    return min(act(g, word) for g in wreath_elements(k, n))


def chain_orbit(k, n, word, support):
    chain = chain_of_word(word, support)
    return min(tuple(tuple(sorted(g[x - 1] + 1 for x in a)) for a in chain)
               for g in wreath_elements(k, n))


@pytest.mark.parametrize("k,n", [(2, 2), (2, 3), (3, 2)])
def test_canonical_rep_is_the_orbit_minimum(k, n):
    for w in permutations(range(1, k * n + 1)):
        assert canonical_rep(k, w) == brute_min(k, n, w)


@pytest.mark.parametrize("k,n", [(2, 2), (2, 3), (3, 2)])
def test_key_equality_is_orbit_equality(k, n):
    N = k * n
    for mask in range(1 << (N - 1)):
        support = tuple(r for r in range(1, N) if mask >> (r - 1) & 1)
        by_key, by_orbit = {}, {}
        for w in permutations(range(1, N + 1)):
            by_key.setdefault(wreath_key(k, n, chain_of_word(w, support), support), set()).add(w)
            by_orbit.setdefault(chain_orbit(k, n, w, support), set()).add(w)
        assert sorted(map(sorted, by_key.values())) == sorted(map(sorted, by_orbit.values()))


def test_representative_condition_for_k2():
    def condition(w, n):
        pos = {x: i for i, x in enumerate(w)}
        return all(pos[2 * i - 1] < pos[2 * i] and pos[2 * i - 1] < pos[2 * i + 1] for i in range(1, n)) \
            and pos[2 * n - 1] < pos[2 * n]

    for n in range(1, 5):
        for w in permutations(range(1, 2 * n + 1)):
            assert condition(w, n) == is_orbit_rep(2, w)


@pytest.mark.parametrize("k,n", [(1, 3), (2, 2), (2, 3), (3, 2), (2, 4), (4, 2), (3, 3)])
def test_facet_counts(k, n):
    assert len(enumerate_wreath_facets(k, n)) == facet_count(k, n)


def test_cap_and_malformed_chains():
    with pytest.raises(WreathError):
        enumerate_wreath_facets(2, 7)
    with pytest.raises(WreathError):
        wreath_key(2, 2, [{1, 2}, {1}], (2, 3))
    with pytest.raises(WreathError):
        classify_positions(2, (2, 1, 3, 4))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_classification_matches_topological_descents(n):
    c = wreath_complex(2, n)
    for w, ds in zip(c.facets, descent_sets(c)):
        assert classified_descents(classify_positions(n, w)) == ds


@pytest.mark.parametrize("k,n", [(2, 2), (2, 3), (3, 2), (2, 4), (4, 2)])
def test_generated_complexes_pass_crossing_and_sum_h(k, n):
    c = wreath_complex(k, n)
    assert check_crossing(c).passed
    assert sum(flag_h(c).values()) == len(c)


def test_s3_wreath_s2_lex_order_is_not_a_shelling():
    cert = verify_shelling(wreath_complex(3, 2))
    assert not cert.passed


def test_hilbert_of_s2_wreath_s2():
    c = wreath_complex(2, 2)
    num = hilbert_numerator(c, 20).integers()
    assert num[:5] == [1, 0, 1, 0, 1] and not any(num[5:])
    expect = TruncatedSeries([1, 0, 1, 0, 1], 20).div_cyclotomic(1).div_cyclotomic(2).div_cyclotomic(3)
    assert face_ring_hilbert(c, 20) == expect
