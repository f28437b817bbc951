import numpy as np
import pytest

from dpweyl.errors import DomainError, RefusalError, ResourceError
from dpweyl.lattice import Isometry, canonical_class, char_poly_restricted, cyclotomic_order, e_lattice, form_value
from dpweyl.weylgroups import (
    KNOWN_WEYL_ORDERS,
    GeneratorSet,
    coxeter_number,
    element_order,
    enumerate_group,
    parabolic_P_generators,
    standard_coxeter,
    wall_generators,
    weyl_generators,
)

J = lambda n: np.diag([1] + [-1] * n)  # noqa: E731


@pytest.mark.parametrize("n", range(3, 9))
def test_generators_fix_K_and_preserve_form(n):
    K = canonical_class(n)
    for gens in (weyl_generators(n), parabolic_P_generators(n)):
        for name, g in gens.generators:
            assert g.apply(K) == K, name
            A = np.array(g.matrix)
            assert np.array_equal(A.T @ J(n) @ A, J(n))
    assert len(weyl_generators(n)) == n
    assert len(parabolic_P_generators(n)) == n - 1


def test_wall_generators_include_non_weyl_reflection():
    gens = wall_generators(5)
    assert gens.names[-1] == "Ref[E5]"
    assert gens.isometries[-1].apply(canonical_class(5)) != canonical_class(5)
    assert len(wall_generators(2)) == 3
    with pytest.raises(DomainError):
        wall_generators(10)


def test_generator_validation():
    with pytest.raises(DomainError):
        weyl_generators(2)
    with pytest.raises(DomainError):
        parabolic_P_generators(9)
    with pytest.raises(DomainError):
        GeneratorSet(3, (), "bogus")


@pytest.mark.parametrize("n", range(3, 7))
def test_group_orders(n):
    group = enumerate_group(weyl_generators(n))
    assert group.order == KNOWN_WEYL_ORDERS[n]
    assert sum(group.layer_sizes) == group.order
    assert standard_coxeter(n) in group
    assert group.index_of(np.eye(n + 1, dtype=group.elements.dtype))[0] >= 0


@pytest.mark.parametrize("n,order", [(3, 4), (4, 24), (5, 192), (6, 1920)])
def test_parabolic_orders(n, order):
    # the remaining simple roots form D_{n-1}: A1xA1, A3, D4, D5
    assert enumerate_group(parabolic_P_generators(n)).order == order


def test_group_closed_under_products(seed):
    group = enumerate_group(weyl_generators(4))
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, group.order, size=(50, 2))
    prods = np.einsum("nij,njk->nik", group.elements[idx[:, 0]].astype(np.int64),
                      group.elements[idx[:, 1]].astype(np.int64))
    assert np.all(group.index_of(prods.astype(group.elements.dtype)) >= 0)


@pytest.mark.parametrize("n,h", [(3, 6), (4, 5), (5, 8), (6, 12), (7, 18), (8, 30)])
def test_coxeter_element(n, h):
    w = standard_coxeter(n)
    assert coxeter_number(n) == h
    assert element_order(w) == h
    chi = char_poly_restricted(w, e_lattice(n))
    assert cyclotomic_order(chi) == h
    assert chi.multiplicity(1) == 0


def test_element_order_cap():
    assert element_order(Isometry.identity(4)) == 1
    with pytest.raises(ResourceError):
        element_order(standard_coxeter(8), cap=29)
    with pytest.raises(DomainError):
        element_order(Isometry.identity(4), cap=0)
    # the Coxeter element of the hyperbolic reflection group has infinite order
    gens = wall_generators(3).isometries
    g = gens[0] @ gens[1] @ gens[2] @ gens[3]
    with pytest.raises(ResourceError):
        element_order(g, cap=200)


def test_refusals():
    with pytest.raises(RefusalError):
        enumerate_group(weyl_generators(8))
    with pytest.raises(RefusalError):
        enumerate_group(wall_generators(3))
    with pytest.raises(ResourceError):
        enumerate_group(wall_generators(3), cap=500)


def test_roots_of_w4_are_minus_two_vectors():
    # every conjugate of a simple root stays a (-2)-vector orthogonal to K
    n = 4
    group = enumerate_group(weyl_generators(n))
    alpha = np.array([1, -1, -1, -1, 0])
    images = {tuple(int(x) for x in m.astype(np.int64) @ alpha) for m in group.elements}
    assert len(images) == 20  # roots of A_4
    K = canonical_class(n)
    for v in images:
        from dpweyl.lattice import LatticeVector

        w = LatticeVector(n, v)
        assert form_value(w, w) == -2 and form_value(w, K) == 0
