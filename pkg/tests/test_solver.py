import random

import pytest
from hypothesis import given, settings, strategies as st

from operadic.linalg import Matrix
from operadic.complexes import ChainMap, identity_map, sphere, zero_complex
from operadic.coalgebras import Cofree, PCoalgebra, check_morphism
from operadic.solver import NoSolution, solve_coalgebra_morphism, stratified_solve

from conftest import complexes, operad


def test_unconstrained_chain_maps_default_to_zero():
    S, T = sphere(1, 2), sphere(1, 2)
    res = stratified_solve(S.dim, T.dim, 2, lambda d: Matrix(0, T.dim(d)),
                           lambda d, comps, k: {}, lambda d, comps: [])
    assert all(m.is_zero() for m in res.comps.values())
    assert not res.unique and res.free[1] == 1


def test_prescribed_value_is_kept():
    S, T = sphere(1, 1), sphere(1, 1)
    res = stratified_solve(S.dim, T.dim, 1, lambda d: Matrix(0, 1), lambda d, comps, k: {},
                           lambda d, comps: [({0: 1}, {0: 5})])
    assert res.comps[1] == Matrix.from_rows([[5]]) and res.unique


def test_inconsistent_prescriptions():
    F = Cofree(operad("As", 2), sphere(1, 2), 2)
    one = identity_map(F.complex)
    two = ChainMap(F.complex, F.complex, {1: Matrix.from_rows([[2]]), 2: Matrix.from_rows([[4]])})
    with pytest.raises(NoSolution) as e:
        solve_coalgebra_morphism(F, F, pre=[(one, one), (one, two)])
    assert e.value.degree == 1


def test_blocked_degree_is_named():
    # x -> y forces rho(h(x^2)) = y (x) y, impossible in a primitive target
    P = operad("As", 2)
    X = Cofree(P, sphere(1, 2), 2)
    Y = PCoalgebra(P, sphere(1, 2))
    b = ChainMap(X.complex, Y.complex, {1: Matrix.from_rows([[1]]), 2: Matrix(0, 1)})
    with pytest.raises(NoSolution) as e:
        solve_coalgebra_morphism(X, Y, post=[(identity_map(Y.complex), b)])
    assert e.value.degree == 2


def test_into_cofree_on_zero_is_unique():
    P = operad("Com", 3)
    X = Cofree(P, sphere(2, 4), 4)
    h, res = solve_coalgebra_morphism(X, Cofree(P, zero_complex(4), 4), result=True)
    assert res.unique and check_morphism(h) == []


@settings(max_examples=25, deadline=None)
@given(complexes(max_degree=3, max_dim=2, min_total=1), complexes(max_degree=3, max_dim=2),
       st.sampled_from(["As", "Com"]), st.integers(0, 10 ** 6))
def test_jittered_solutions_are_morphisms(V, W, name, seed):
    # random choices in one degree may not extend to the next; then the
    # deterministic solve must still succeed
    P = operad(name, 3)
    X, Y = Cofree(P, V, 3), Cofree(P, W, 3)
    try:
        h = solve_coalgebra_morphism(X, Y, rng=random.Random(seed))
    except NoSolution:
        h = solve_coalgebra_morphism(X, Y)
        assert h.map.is_zero()
    assert check_morphism(h) == []


def test_search_escapes_a_blocking_zero_choice():
    # p kills degree 1, so h(x) is free; p h(x^2) = 1 needs h(x) = +-x
    P = operad("As", 2)
    X = Cofree(P, sphere(1, 2), 2)
    Y = PCoalgebra(P, sphere(2, 2))
    p = ChainMap(X.complex, Y.complex, {1: Matrix(0, 1), 2: Matrix.from_rows([[1]])})
    h = solve_coalgebra_morphism(X, X, post=[(p, p)])
    assert check_morphism(h) == [] and h.comp(1).cols[0][0] in (1, -1)
