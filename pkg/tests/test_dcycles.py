from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dpweyl.cache import get_group
from dpweyl.conjugacy import are_conjugate, census, is_cuspidal_in_P, p_complement
from dpweyl.dcycles import (
    SignedCycleType,
    cuspidal_types,
    d_coordinates,
    even_partitions,
    realize_type,
    signed_cycle_type,
    signed_cycle_types_batch,
    w5_coordinates,
)
from dpweyl.errors import DomainError
from dpweyl.lattice import IntPolynomial, Isometry, char_poly_restricted, e_lattice, form_value, parse_vector, reflection
from dpweyl.weylgroups import parabolic_P_generators, standard_coxeter


@pytest.mark.parametrize("n", range(4, 9))
def test_coordinates_orthonormal(n):
    c = d_coordinates(n)
    assert c.m == n - 1
    for i, ei in enumerate(c.e):
        for j, ej in enumerate(c.e):
            assert form_value(ei, ej) == (-1 if i == j else 0)


def test_reflection_swaps_first_two():
    n = 7
    c = d_coordinates(n)
    r = reflection(parse_vector(n, "E6 - E7"))
    assert c.signed_image(r, 0) == (1, 1)
    assert c.signed_image(r, 1) == (0, 1)
    assert signed_cycle_type(r) == SignedCycleType(((2, 1),) + ((1, 1),) * 4)


def test_parse_and_print():
    t = SignedCycleType.parse("[3-2-]")
    assert t == SignedCycleType.negative((3, 2))
    assert str(t) == "[3-2-]"
    assert SignedCycleType.parse(t.unicode()) == t
    assert str(SignedCycleType.parse("[1-21-1]")) == "[21-1-1]"
    assert str(SignedCycleType(((1, 1), (1, -1)))) == "[1-1]"
    for bad in ("3-2-", "[3x]", "[--]"):
        with pytest.raises(DomainError):
            SignedCycleType.parse(bad)
    with pytest.raises(DomainError):
        SignedCycleType(((0, 1),))


def test_identity_type():
    t = signed_cycle_type(Isometry.identity(6))
    assert t == SignedCycleType(((1, 1),) * 5) and t.order() == 1 and t.size == 5


@settings(max_examples=100)
@given(st.lists(st.tuples(st.integers(1, 6), st.sampled_from([1, -1])), min_size=1, max_size=5), st.integers(1, 30))
def test_power_rule_matches_order(cycles, k):
    t = SignedCycleType(tuple(cycles))
    assert t.power(t.order()) == SignedCycleType(((1, 1),) * t.size)
    assert t.power(k).size == t.size
    assert t.power(k).order() == t.order() // np.gcd(t.order(), k)


def test_w5_named_types():
    d2d3 = realize_type((2, 1, 1, 1), 5)
    assert str(signed_cycle_type(d2d3, "W5")) == "[2-1-1-1-]"
    assert str(signed_cycle_type(d2d3 @ d2d3, "W5")) == "[1-1-111]"
    d5a1 = realize_type((3, 2), 5)
    assert str(signed_cycle_type(d5a1, "W5")) == "[3-2-]"
    assert str(signed_cycle_type(d5a1 ** 3, "W5")) == "[2-1-1-1-]"
    labels = {r.carter_label: r.representative for r in census(5) if r.carter_label}
    assert are_conjugate(d5a1, labels["D_5(a_1)"])
    assert are_conjugate(d2d3, labels["D_2+D_3"])
    assert are_conjugate(realize_type((4, 1), 5), labels["D_5"])


def test_realize_type_examples():
    g = realize_type((3, 2), 5)
    assert (g ** 12).is_identity() and not (g ** 6).is_identity() and not (g ** 4).is_identity()
    chi = char_poly_restricted(g, e_lattice(5))
    assert chi == IntPolynomial.t_power_plus(3) * IntPolynomial.t_power_plus(2)
    h = realize_type((1, 1, 1, 1))
    assert h.n == 5 and (h @ h).is_identity() and not h.is_identity()
    with pytest.raises(DomainError):
        realize_type((2, 1, 1))
    with pytest.raises(DomainError):
        realize_type((3,))
    with pytest.raises(DomainError):
        realize_type((2, 2), 7)


@pytest.mark.parametrize("m", range(3, 8))
def test_realize_round_trip_and_charpoly(m):
    n = m + 1
    for part, order, poly in cuspidal_types(m):
        g = realize_type(part)
        assert signed_cycle_type(g) == SignedCycleType.negative(part)
        assert is_cuspidal_in_P(g)
        assert char_poly_restricted(g, p_complement(n)) == poly
        assert (g ** order).is_identity()
        assert signed_cycle_type(g).order() == order


@pytest.mark.parametrize("m,orders", [
    (4, [2, 4, 6]),
    (6, [10, 8, 6, 4, 6, 2]),
    (7, [12, 20, 24, 4, 12, 8, 4]),
])
def test_cuspidal_type_orders(m, orders):
    got = [o for _, o, _ in cuspidal_types(m)]
    assert Counter(got) == Counter(orders)
    assert all(len(p) % 2 == 0 and sum(p) == m for p, _, _ in cuspidal_types(m))


def test_even_partitions_counts():
    # partitions of m into an even number of parts
    assert [len(even_partitions(m)) for m in range(1, 9)] == [0, 1, 1, 3, 3, 6, 7, 12]


@pytest.mark.parametrize("n", [5, 6])
def test_exhaustive_cuspidality_agreement(n):
    G = get_group(n, "parabolic_P")
    coords = d_coordinates(n)
    types = signed_cycle_types_batch(G.elements, coords)
    for i in range(0, G.order, max(1, G.order // 300)):
        g = G.isometry(i)
        t = types[i]
        assert t == signed_cycle_type(g)
        cusp = t.all_negative() and len(t.cycles) % 2 == 0
        assert cusp == is_cuspidal_in_P(g)
        k = 1 + i % t.order()
        assert signed_cycle_type(g ** k) == t.power(k)
    # every element permutes the +-e_i (the batch would have raised otherwise)
    assert len(types) == G.order


def test_outside_model_is_rejected():
    with pytest.raises(DomainError):
        signed_cycle_type(standard_coxeter(6))


def test_w5_model_covers_w5():
    G = get_group(5)
    types = signed_cycle_types_batch(G.elements, w5_coordinates())
    assert len(types) == 1920
    # D5 has 2^4 * 5! elements
    assert all(t.size == 5 for t in types)


def test_generators_permute_coordinates():
    for n in range(4, 9):
        c = d_coordinates(n)
        for _, g in parabolic_P_generators(n).generators:
            assert all(c.signed_image(g, i) is not None for i in range(c.m))
