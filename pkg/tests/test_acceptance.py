"""Acceptance suite: one PASS/FAIL line per criterion, exact arithmetic throughout.

Run with ``pytest tests/test_acceptance.py -v`` (lines are repeated in the
terminal summary) or directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import random
import time

import pytest

from lexshell.complex import (
    descent_order,
    descent_sets,
    flag_h,
    minimal_new_faces,
    shelling_exists,
    topological_descents,
    verify_partitioning,
    verify_shelling,
)
from lexshell.partition import ELEVEN_ELEVEN_INTERVAL, b_s_table, check_icc, interval_icc, rp2_witness
from lexshell.partitioning import LinkModel, build_partitioning, link_subcomplex_minimal_face
from lexshell.series import TruncatedSeries, molien, monomial_orbit_count, wreath_product_group
from lexshell.wreath import (
    HONEST_DESCENT,
    SWAP_ASCENT,
    classified_descents,
    classify_positions,
    enumerate_wreath_facets,
    face_ring_hilbert,
    gs_numerator,
    hilbert_numerator,
    wreath_complex,
)

RESULTS: dict = {}

# representatives of the 15 orbits with swap ascents (o) and descents (*)
DOTTED = [
    "123456", "1235*46", "123o56*4", "13*2456", "13*25*46", "13*256*4", "1o34*256",
    "1o345*26", "1o3456*2", "135*246", "13o5*26*4", "1o35*4*26", "1o35*46*2",
    "13o56*24", "1o3o56*4*2",
]

STUBBORN = ["142536", "142563", "145236", "145263"]


def parse_dotted(s: str):
    word, marks = [], {}
    for ch in s:
        if ch.isdigit():
            word.append(int(ch))
        else:
            marks[len(word)] = ch
    return tuple(word), marks


def record(number: int, ok: bool, detail: str) -> bool:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[number] = line
    print(line)
    return ok


def cyclotomic_product(d: int, degree: int) -> TruncatedSeries:
    s = TruncatedSeries.one(degree)
    for r in range(1, d + 1):
        s = s.mul_cyclotomic(r)
    return s


def criterion_1() -> bool:
    start = time.perf_counter()
    facets = enumerate_wreath_facets(2, 3)
    wall = time.perf_counter() - start
    expect = [parse_dotted(s)[0] for s in DOTTED]
    ok = facets == expect and expect == sorted(expect) and wall < 1
    return record(1, ok, f"{len(facets)} facets in lex order, {wall:.3f}s")


def criterion_2() -> bool:
    c = wreath_complex(2, 3)
    ds = descent_sets(c)
    ok = True
    for (word, marks), w, d in zip(map(parse_dotted, DOTTED), c.facets, ds):
        cls = classify_positions(3, w)
        dots = {r for r in marks}
        ok &= word == w and classified_descents(cls) == d == dots
        ok &= all((cls[r - 1] == SWAP_ASCENT) == (marks[r] == "o")
                  and (cls[r - 1] == HONEST_DESCENT) == (marks[r] == "*") for r in marks)
    spot = {"123564": {3, 5}, "134562": {1, 5}, "135264": {2, 3, 5}}
    index = {"".join(map(str, w)): i for i, w in enumerate(c.facets)}
    ok &= all(ds[index[k]] == v for k, v in spot.items())
    return record(2, ok, "classification = topological descents = dot pattern on all 15 facets")


def criterion_3() -> bool:
    ok = True
    wall = 0.0
    for n in range(2, 6):
        start = time.perf_counter()
        c = wreath_complex(2, n)
        ok &= verify_shelling(c).passed
        wall = time.perf_counter() - start
    ok &= len(c) == 945 and c.d == 9 and wall < 120
    return record(3, ok, f"lex shelling for n=2..5; n=5: {len(c)} facets in {wall:.2f}s")


def criterion_4() -> bool:
    start = time.perf_counter()
    c = wreath_complex(3, 2)
    none = shelling_exists(c) is None
    wall = time.perf_counter() - start
    index = {"".join(map(str, w)): i for i, w in enumerate(c.facets)}
    members = {index[w] for w in STUBBORN}
    rnd = random.Random(20261016)
    sampled = 2000
    ok_orders = True
    for _ in range(sampled):
        order = list(range(len(c)))
        rnd.shuffle(order)
        last = max(p for p, f in enumerate(order) if f in members)
        ok_orders &= {1, 3, 5} <= topological_descents(c, order, last)
        ok_orders &= all({1, 3, 5} <= g for g in minimal_new_faces(c, order, last))
    ok = none and len(c) == 10 and wall < 60 and ok_orders
    return record(4, ok, f"search exhausted in {wall:.3f}s; {{1,3,5}} in last stubborn facet over {sampled} orders")


def criterion_5() -> bool:
    c = wreath_complex(3, 2)
    D = 40
    num = (face_ring_hilbert(c, D) * cyclotomic_product(5, D)).integers()
    expect = [1, 0, 1, 1, 2, 1, 2, 1, 1] + [0] * (D - 8)
    ok = num == expect and sum(num) == 10 == len(c)
    six = (face_ring_hilbert(c, D) * cyclotomic_product(6, D)).integers()
    return record(5, ok, f"numerator exact through q^40 with five factors; N(1)={sum(num)}; "
                         f"six factors would give {six[:10]}...")


def criterion_6() -> bool:
    c = wreath_complex(2, 3)
    D = 40
    gs = gs_numerator(c, descent_sets(c))
    lhs = TruncatedSeries(gs, D)
    for r in range(1, 6):
        lhs = lhs.div_cyclotomic(r)
    ok = lhs == face_ring_hilbert(c, D) and hilbert_numerator(c, D).integers()[: len(gs)] == gs
    return record(6, ok, f"GS numerator {gs} over (1-q)...(1-q^5) = face ring series through q^40")


def criterion_7() -> bool:
    ok = True
    wall = 0.0
    for n in range(3, 9):
        start = time.perf_counter()
        bs = b_s_table(n)
        wall = time.perf_counter() - start
        ok &= all(bs[frozenset(range(1, i + 1))] == 0 for i in range(1, n - 1))
    ok &= wall < 300
    return record(7, ok, f"b_{{1..i}}(n)=0 for n<=8; n=8 in {wall:.2f}s")


def criterion_8() -> bool:
    r = rp2_witness()
    ok = r.f_vector == (3, 6, 4) and r.betti == [1, 1, 1]
    return record(8, ok, f"link at ranks {r.link_labels}: f={r.f_vector}, GF(2) Betti={r.betti}")


def criterion_9() -> bool:
    ok = True
    bad = None
    from lexshell.partition import partition_complex

    for n in range(3, 8):
        res = build_partitioning(n)
        c = partition_complex(n)
        good = res.passed and res.histogram_matches and verify_partitioning(c, res.assignment).passed
        if not good and bad is None:
            bad = (n, res.counterexample)
        ok &= good
    detail = "verified with histogram = flag_h for n=3..7" if ok else f"counterexample {bad}"
    return record(9, ok, detail)


LINK_CASES = [(m, k) for m in range(2, 11) for k in range(1, 10) if (k + 1) * m <= 10]


def criterion_10() -> bool:
    s1 = (1, 2, 3, 7, 8, 9, 10, 4, 5, 6)
    s2 = (1, 2, 3, 9, 10, 4, 5, 6, 7, 8)
    example = link_subcomplex_minimal_face(10, 2, [tuple(range(1, 11)), s1, s2]) == {8, 17, 28}
    small = link_subcomplex_minimal_face(3, 1, [(1, 2, 3), (1, 3, 2)]) == {2, 5}
    identity = all(link_subcomplex_minimal_face(m, k, [tuple(range(1, m + 1))] * (k + 1)) == frozenset()
                   for m, k in LINK_CASES)
    agree, partitions, realizable = [], [], []
    for m, k in LINK_CASES:
        model = LinkModel(m, k)
        c = model.complex()
        assignment = [model.to_colors(model.minimal_face(f)) for f in c.facets]
        h = flag_h(c)
        hist: dict = {}
        for g in assignment:
            hist[g] = hist.get(g, 0) + 1
        partitions.append(verify_partitioning(c, assignment).passed and all(hist.get(s, 0) == v for s, v in h.items()))
        agree.append([frozenset(g) for g in assignment] == descent_sets(c))
        realizable.append(descent_order(c, assignment) is not None)
    k1 = all(a for a, (m, k) in zip(agree, LINK_CASES) if k == 1)
    multi = [(m, k) for (m, k), r in zip(LINK_CASES, realizable) if not r]
    ok = example and small and identity and all(partitions) and all(realizable)
    detail = (f"examples {example and small}, identity->empty {identity}, "
              f"partitioning+flag_h on all {len(LINK_CASES)} (m,k) {all(partitions)}, "
              f"lex-descent agreement for k=1 {k1}; no facet order realizes the formula as "
              f"topological descents for {multi}")
    return record(10, ok, detail)


def criterion_11() -> bool:
    icc = all(check_icc(n).passed for n in range(3, 7))
    pre = interval_icc(*ELEVEN_ELEVEN_INTERVAL, sort=False)
    post = interval_icc(*ELEVEN_ELEVEN_INTERVAL, sort=True)
    w = pre.witness
    witness_ok = (not pre.passed and w.first_labels == (1, 2, 13, 15)
                  and all(a < b for a, b in zip(w.offending_labels, w.offending_labels[1:])))
    ok = icc and witness_ok and post.passed
    detail = f"ICC on all rooted intervals n=3..6 {icc}; presort witness {w.first_labels if w else None} vs {w.offending_labels if w else None}"
    return record(11, ok, detail)


def criterion_12() -> bool:
    ok = True
    for n in range(1, 5):
        g = wreath_product_group(2, n)
        coeffs = molien(g, 12).integers()
        ok &= coeffs == [monomial_orbit_count(g, d) for d in range(13)]
    return record(12, ok, "Molien = monomial orbit counts for S2 wr S_n, n<=4, degree<=12")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12]


@pytest.mark.parametrize("number", [i for i in range(1, 13) if i != 10])
def test_criterion(number):
    assert CRITERIA[number - 1]()


@pytest.mark.xfail(strict=True, reason="for k >= 2 the formula is a partitioning of an unshellable "
                                        "link; no facet order has it as its topological descents")
def test_criterion_10():
    assert criterion_10()


if __name__ == "__main__":
    results = [f() for f in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria pass")
