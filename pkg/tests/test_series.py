from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from lexshell.series import (
    PermGroup,
    SeriesError,
    TruncatedSeries,
    cycle_type,
    molien,
    monomial_orbit_count,
    series_div_cyclotomic,
    symmetric_group,
    trivial_group,
    wreath_elements,
    wreath_product_group,
)

D = 20


def test_trivial_group_on_one_letter_gives_all_ones():
    assert molien(trivial_group(1), D).integers() == [1] * (D + 1)


def test_s2_on_two_letters():
    got = molien(symmetric_group(2), 9).integers()
    assert got == [1, 1, 2, 2, 3, 3, 4, 4, 5, 5]


def test_s2_wreath_s2_quadratic_coefficient():
    assert molien(wreath_product_group(2, 2), 4).integers()[2] == 3


@pytest.mark.parametrize("g,d,expected", [
    (symmetric_group(2), 3, 2),
    (wreath_product_group(2, 3), 2, 3),
    (wreath_product_group(3, 2), 0, 1),
    (trivial_group(3), 0, 1),
])
def test_orbit_count_examples(g, d, expected):
    assert monomial_orbit_count(g, d) == expected


def test_div_cyclotomic_examples():
    one = TruncatedSeries.one(D)
    assert series_div_cyclotomic(one, 1).integers() == [1] * (D + 1)
    s = TruncatedSeries([1, 0, -1], D)
    assert series_div_cyclotomic(s, 2) == one
    with pytest.raises(SeriesError):
        series_div_cyclotomic(one, 0)


def test_wreath_group_orders_and_closure():
    for k, n, order in [(2, 2, 8), (2, 3, 48), (3, 2, 72), (2, 4, 384)]:
        g = wreath_product_group(k, n)
        assert g.order() == order
        assert set(g.elements()) == set(wreath_elements(k, n))
        ident = tuple(range(k * n))
        assert ident in g.elements()


def test_one_row_wreath_is_symmetric_group():
    for k in range(1, 5):
        got = molien(wreath_product_group(k, 1), D)
        expect = TruncatedSeries.one(D)
        for r in range(1, k + 1):
            expect = expect.div_cyclotomic(r)
        assert got == expect


def test_molien_matches_orbits_for_small_groups():
    groups = [symmetric_group(3), wreath_product_group(3, 2), PermGroup(4, [(1, 2, 3, 0)])]
    for g in groups:
        coeffs = molien(g, 8).integers()
        assert coeffs == [monomial_orbit_count(g, d) for d in range(9)]


def test_group_cap_and_bad_generators():
    with pytest.raises(SeriesError):
        PermGroup(3, [(0, 0, 1)])
    with pytest.raises(SeriesError):
        PermGroup(6, symmetric_group(6).generators, cap=100).order()


def test_coefficients_are_exact_fractions():
    s = molien(wreath_product_group(2, 2), 6)
    assert all(isinstance(x, Fraction) for x in s.coeffs)


def test_cycle_type():
    assert cycle_type((1, 0, 2, 4, 3)) == (1, 2, 2)


def test_non_integral_coefficients_are_rejected():
    with pytest.raises(SeriesError):
        TruncatedSeries([Fraction(1, 2)]).integers()
    with pytest.raises(SeriesError):
        TruncatedSeries([0, 1], 3) / TruncatedSeries([0, 1], 3)


series = st.lists(st.integers(-5, 5), min_size=1, max_size=8)


@settings(max_examples=60, deadline=None)
@given(series, st.integers(1, 6))
def test_divide_then_multiply_is_identity(cs, r):
    s = TruncatedSeries(cs, 15)
    assert s.div_cyclotomic(r).mul_cyclotomic(r) == s


@settings(max_examples=60, deadline=None)
@given(series, series)
def test_product_then_quotient(a, b):
    b = [1] + b[1:]
    x, y = TruncatedSeries(a, 10), TruncatedSeries(b, 10)
    assert (x * y) / y == x
    assert x + y - y == x
