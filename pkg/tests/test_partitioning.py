from itertools import permutations, product

import pytest

from lexshell.complex import (
    descent_order,
    descent_sets,
    flag_h,
    shelling_exists,
    verify_partitioning,
    verify_shelling,
)
from lexshell.partition import partition_complex
from lexshell.partitioning import (
    LinkModel,
    PartitioningError,
    build_partitioning,
    extend_face_to_facet,
    link_face,
    link_subcomplex_minimal_face,
    similar_groups,
    transition_words,
)


def histogram(assignment):
    out = {}
    for g in assignment:
        out[frozenset(g)] = out.get(frozenset(g), 0) + 1
    return out


def matches_flag_h(c, assignment):
    h, got = flag_h(c), histogram(assignment)
    return all(got.get(s, 0) == v for s, v in h.items()) and set(got) <= set(h)


def formula_assignment(model):
    c = model.complex()
    return c, [model.to_colors(model.minimal_face(f)) for f in c.facets]


# -- the formula -------------------------------------------------------------

def test_identity_tuples_have_empty_minimal_face():
    for m, k in [(2, 1), (3, 2), (10, 3)]:
        ident = tuple(range(1, m + 1))
        assert link_subcomplex_minimal_face(m, k, [ident] * (k + 1)) == frozenset()


def test_worked_ten_block_example():
    s1 = (1, 2, 3, 7, 8, 9, 10, 4, 5, 6)
    s2 = (1, 2, 3, 9, 10, 4, 5, 6, 7, 8)
    got = link_subcomplex_minimal_face(10, 2, [tuple(range(1, 11)), s1, s2])
    assert got == {8, 17, 28}


def test_three_blocks_one_slot():
    assert link_subcomplex_minimal_face(3, 1, [(1, 2, 3), (1, 3, 2)]) == {2, 5}


def test_bad_inputs():
    with pytest.raises(PartitioningError):
        link_subcomplex_minimal_face(3, 1, [(2, 1, 3), (1, 2, 3)])
    with pytest.raises(PartitioningError):
        link_subcomplex_minimal_face(3, 2, [(1, 2, 3), (1, 2, 3)])
    with pytest.raises(PartitioningError):
        transition_words(3, [(1, 2, 3), (1, 1, 2)])


@pytest.mark.parametrize("m", [2, 3, 4])
def test_one_slot_formula_equals_lex_descents(m):
    model = LinkModel(m, 1)
    c, assignment = formula_assignment(model)
    assert verify_shelling(c).passed
    assert [frozenset(g) for g in assignment] == descent_sets(c)


@pytest.mark.parametrize("m,k", [(2, 2), (2, 3), (3, 2)])
def test_multi_slot_formula_is_a_partitioning(m, k):
    c, assignment = formula_assignment(LinkModel(m, k))
    assert verify_partitioning(c, assignment).passed
    assert matches_flag_h(c, assignment)


@pytest.mark.parametrize("m,k", [(2, 2), (2, 3)])
def test_multi_slot_links_have_no_shelling(m, k):
    c, assignment = formula_assignment(LinkModel(m, k))
    assert shelling_exists(c) is None
    assert descent_order(c, assignment) is None


@pytest.mark.parametrize("m,k", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (4, 1)])
def test_twin_variant_is_a_partitioning(m, k):
    c, assignment = formula_assignment(LinkModel(m, k, twins=True))
    assert verify_partitioning(c, assignment).passed
    assert matches_flag_h(c, assignment)


# -- extending faces -----------------------------------------------------------

@pytest.mark.parametrize("m,k", [(2, 1), (3, 1), (2, 2), (3, 2)])
def test_every_face_extends_into_its_own_interval(m, k):
    model = LinkModel(m, k)
    c = model.complex()
    index = {f: i for i, f in enumerate(c.facets)}
    ranks = model.formula_ranks
    for sigmas in c.facets:
        for mask in range(1 << len(ranks)):
            support = frozenset(r for b, r in enumerate(ranks) if mask >> b & 1)
            face = link_face(m, k, sigmas, support)
            ext = extend_face_to_facet(face)
            g = link_subcomplex_minimal_face(m, k, ext)
            assert g <= support
            colors = model.to_colors(model.rank(r // m, r % m) for r in support)
            assert c.cell(index[sigmas], colors) == c.cell(index[ext], colors)


def test_full_and_empty_faces():
    m, k = 3, 2
    ranks = LinkModel(m, k).formula_ranks
    sigmas = ((1, 2, 3), (2, 3, 1), (3, 1, 2))
    assert extend_face_to_facet(link_face(m, k, sigmas, ranks)) == sigmas
    ident = tuple(range(1, m + 1))
    assert extend_face_to_facet(link_face(m, k, sigmas, ())) == (ident,) * (k + 1)


def test_five_blocks_three_slots_face():
    sigmas = ((1, 2, 3, 4, 5), (3, 5, 4, 1, 2), (5, 2, 3, 4, 1), (1, 4, 2, 5, 3))
    face = link_face(5, 3, sigmas, {2, 3, 8, 16, 19})
    ext = extend_face_to_facet(face)
    assert link_subcomplex_minimal_face(5, 3, ext) == {3, 8, 16, 19}
    assert link_face(5, 3, ext, {2, 3, 8, 16, 19}).signature() == face.signature()


def test_face_ranks_are_checked():
    with pytest.raises(PartitioningError):
        link_face(3, 1, ((1, 2, 3), (1, 2, 3)), {3})


# -- the global construction --------------------------------------------------

def test_small_partitionings():
    assert build_partitioning(3).assignment == [frozenset()]
    assert build_partitioning(4).assignment == [frozenset(), frozenset({1})]


@pytest.mark.parametrize("n", range(3, 8))
def test_partitioning_up_to_seven(n):
    res = build_partitioning(n)
    assert res.passed and res.histogram_matches
    assert all(p["rule"] == "shelling-step" for p in res.provenance)
    assert verify_partitioning(partition_complex(n), res.assignment).passed


@pytest.mark.parametrize("n,sizes", [(8, [40]), (9, [40, 45])])
def test_search_rule_partitions_eight_and_nine(n, sizes):
    res = build_partitioning(n, "search")
    assert res.passed and res.histogram_matches
    assert [len(f["members"]) for f in res.families] == sizes


def test_similarity_rule_counterexample_at_eight():
    res = build_partitioning(8, "similarity")
    assert not res.passed
    assert res.counterexample["support"] == [1, 3, 4]
    assert res.counterexample["covering"] == [267, 269]


def test_non_shelling_steps_sit_in_similar_block_families():
    c = partition_complex(8)
    res = build_partitioning(8, "search")
    fam = res.families[0]
    assert fam["members"] == list(range(232, 272))
    for i in fam["members"]:
        groups = similar_groups(c.facets[i].tree, c.d)
        assert any(set(fam["link_ranks"]) <= g.link_ranks(c.d) for g in groups)
    failing = verify_shelling(c).failure[0]
    assert failing in fam["members"]
