import random

import pytest
from hypothesis import given, settings, strategies as st

from operadic.linalg import Matrix, inverse, rank
from operadic.complexes import (
    ChainMap, complex_from_dims, cone_of_identity, direct_sum, homology, identity_map, sphere,
    zero_complex, zero_map,
)
from operadic.coalgebras import (
    Cofree, CoalgebraMorphism, NotCoreflexive, PCoalgebra, check_coalgebra, check_morphism,
    cofree, cofree_lift, cofree_map, comonad_coproduct, direct_sum_coalgebra, equalizer,
    finite_subcoalgebra, identity_morphism, pairing, pairing_into_product, product, pushout,
    zero_coalgebra,
)
from operadic.solver import solve_coalgebra_morphism
from operadic.model import random_morphism

from conftest import complexes, operad


def is_iso(f):
    top = max(f.source.max_degree, f.target.max_degree)
    return all(f.comp(n).nrows == f.comp(n).ncols and f.comp(n).rank() == f.comp(n).nrows
               for n in range(1, top + 1))


def test_zero_coalgebra_valid():
    assert check_coalgebra(zero_coalgebra(operad("As"), 3)) == []


def test_cofree_dims():
    assert Cofree(operad("As"), sphere(1, 3), 3).dims() == {1: 1, 2: 1, 3: 1}
    assert Cofree(operad("Com"), sphere(1, 3), 3).dims() == {1: 1, 2: 0, 3: 0}


def test_cofree_two_even_generators():
    C = complex_from_dims({2: 2}, max_degree=4)
    assert Cofree(operad("As"), C, 4).dims() == {1: 0, 2: 2, 3: 0, 4: 4}
    assert Cofree(operad("Com"), C, 4).dims() == {1: 0, 2: 2, 3: 0, 4: 3}


@pytest.mark.parametrize("name", ["As", "Com", "Lie3"])
def test_cofree_valid(name):
    V, _ = cone_of_identity(complex_from_dims({1: 1, 2: 1}, max_degree=2))
    F = Cofree(operad(name, 3), V, 3)
    assert check_coalgebra(F) == []


def test_cofree_on_zero_is_final():
    P = operad("As")
    F0 = Cofree(P, zero_complex(3), 3)
    assert F0.space.total_dim() == 0
    A = Cofree(P, sphere(1, 3), 3)
    h, res = solve_coalgebra_morphism(A, F0, result=True)
    assert res.unique and check_morphism(h) == []


def test_equivariance_fault_named():
    F = Cofree(operad("As"), sphere(1, 3), 3)
    coops = {k: dict(v) for k, v in F.coops.items()}
    m = coops[(2, 1)][2]
    coops[(2, 1)][2] = m.scale(3)
    bad = PCoalgebra(F.operad, F.complex, coops)
    kinds = [v for v in check_coalgebra(bad) if v.kind == "equivariance"]
    assert kinds and kinds[0].witness[:2] in ((2, 0), (2, 1))


def test_sign_fault_breaks_coassociativity():
    F = Cofree(operad("As"), sphere(1, 3), 3)
    coops = {k: dict(v) for k, v in F.coops.items()}
    coops[(2, 0)][3] = coops[(2, 0)][3].scale(-1)
    coops[(2, 1)][3] = coops[(2, 1)][3].scale(-1)
    bad = PCoalgebra(F.operad, F.complex, coops)
    assert any(v.kind == "coassociativity" for v in check_coalgebra(bad))


def test_lift_of_projection_is_identity():
    F = Cofree(operad("As"), sphere(1, 3), 3)
    h = cofree_lift(F, F.pi, F)
    assert h.map == identity_map(F.complex)


def test_deconcatenation_shape():
    # rho on the degree-3 element x^3 only hits x (x) x^2 and x^2 (x) x
    F = Cofree(operad("As"), sphere(1, 3), 3)
    y = F.rho_basis(2, 0, (3, 0))
    assert set(y) == {((1, 0), (2, 0)), ((2, 0), (1, 0))}
    assert all(v for v in y.values())


def test_lift_of_zero_on_primitive_is_zero():
    P = operad("As")
    C = PCoalgebra(P, complex_from_dims({1: 1, 2: 2}, max_degree=2))
    F = Cofree(P, sphere(1, 2), 2)
    h = cofree_lift(C, zero_map(C.complex, F.V), F)
    assert h.map.is_zero()


def _random_source(P, C, seed):
    r = random.Random(seed)
    pick = r.randint(0, 2)
    if pick == 0:
        return PCoalgebra(P, C)
    if pick == 1:
        return Cofree(P, C, C.max_degree)
    F = Cofree(P, C, C.max_degree)
    b = r.choice(F.space.basis()) if F.space.basis() else None
    if b is None:
        return PCoalgebra(P, C)
    return finite_subcoalgebra(F, (b[0], {b[1]: 1}))[0]


@settings(max_examples=30, deadline=None)
@given(complexes(max_degree=3, max_dim=2, min_total=1), complexes(max_degree=3, max_dim=2),
       st.sampled_from(["As", "Com"]), st.integers(0, 10 ** 6))
def test_cofree_universal_property(Cx, V, name, seed):
    P = operad(name, 3)
    X = _random_source(P, Cx, seed)
    D = max(X.max_degree, V.max_degree)
    F = Cofree(P, V, D)
    from operadic.complexes import random_chain_map
    g = random_chain_map(X.complex, V, random.Random(seed))
    h = cofree_lift(X, g, F)
    assert check_morphism(h) == []
    assert F.pi @ h.map == g
    # uniqueness: the degree-by-degree affine solve has no free parameters
    h2, res = solve_coalgebra_morphism(X, F, post=[(F.pi, g)], result=True)
    assert res.unique and h2.map == h.map


def test_equalizer_of_equal_maps():
    F = Cofree(operad("As"), sphere(1, 3), 3)
    idF = identity_morphism(F)
    E, inc = equalizer(idF, idF)
    assert E.dims() == F.dims() and check_morphism(inc) == []


def test_equalizer_rejects_non_retraction():
    F = Cofree(operad("As"), sphere(1, 3), 3)
    idF = identity_morphism(F)
    with pytest.raises(NotCoreflexive):
        equalizer(idF, idF, zero_map(F.complex, F.complex))


def test_equalizer_of_zero_object():
    Z = zero_coalgebra(operad("As"), 2)
    E, _ = equalizer(identity_morphism(Z), identity_morphism(Z))
    assert E.space.total_dim() == 0


def test_product_with_final_object():
    P = operad("As")
    A = Cofree(P, sphere(1, 3), 3)
    E, prA, _ = product(A, Cofree(P, zero_complex(3), 3))
    assert is_iso(prA) and check_morphism(prA) == []


def test_product_of_cofrees_is_cofree_of_sum():
    P = operad("Com", 3)
    V, W = sphere(1, 3), sphere(2, 3)
    FV, FW = Cofree(P, V, 3), Cofree(P, W, 3)
    E, pV, pW = product(FV, FW, 3)
    S, iV, iW, _, _ = direct_sum(V, W)
    FS = Cofree(P, S, 3)
    assert E.dims() == FS.dims()
    phi = cofree_lift(E, iV @ FV.pi @ pV.map + iW @ FW.pi @ pW.map, FS)
    assert is_iso(phi) and check_morphism(phi) == []


@settings(max_examples=15, deadline=None)
@given(complexes(max_degree=2, max_dim=2, min_total=1), st.integers(0, 10 ** 6))
def test_product_universal_property(Cx, seed):
    P = operad("As", 3)
    rng = random.Random(seed)
    X = _random_source(P, Cx, seed)
    R = Cofree(P, sphere(1, 2), 2)
    S = Cofree(P, cone_of_identity(sphere(1, 1))[0], 2)
    prod = product(R, S, 2)
    E, pR, pS = prod
    u, v = random_morphism(X, R, rng), random_morphism(X, S, rng)
    h = pairing(u, v, E)
    assert (pR @ h).map == u.map and (pS @ h).map == v.map
    h2, res = solve_coalgebra_morphism(X, E, post=[(pR, u), (pS, v)], result=True)
    assert res.unique and h2.map == h.map
    assert pairing_into_product(u, v, prod).map == h.map


def test_finite_subcoalgebra_of_primitive():
    C = PCoalgebra(operad("As"), complex_from_dims({2: 2}, max_degree=2))
    K, _ = finite_subcoalgebra(C, (2, {0: 1, 1: 1}))
    assert K.dims() == {1: 0, 2: 1}


def test_finite_subcoalgebra_top_cofree_element():
    F = Cofree(operad("As"), sphere(1, 3), 3)
    K, inc = finite_subcoalgebra(F, (3, {0: 1}))
    assert sum(K.dims().values()) == 3
    assert check_morphism(inc) == []


def test_finite_subcoalgebra_degree_one():
    F = Cofree(operad("As"), complex_from_dims({1: 2}, max_degree=3), 3)
    K, _ = finite_subcoalgebra(F, (1, {0: 1, 1: 2}))
    assert K.dims() == {1: 1, 2: 0, 3: 0}


def test_finite_subcoalgebra_rejects_bad_element():
    F = Cofree(operad("As"), sphere(1, 2), 2)
    with pytest.raises(ValueError):
        finite_subcoalgebra(F, (3, {0: 1}))


def test_pushout_over_zero_is_sum():
    P = operad("As")
    B, C = Cofree(P, sphere(1, 2), 2), PCoalgebra(P, sphere(2, 2))
    Z = zero_coalgebra(P, 2)
    Q, jB, jC = pushout(CoalgebraMorphism(Z, B, zero_map(Z.complex, B.complex)),
                        CoalgebraMorphism(Z, C, zero_map(Z.complex, C.complex)))
    S, _, _ = direct_sum_coalgebra(B, C)
    assert Q.dims() == S.dims() and check_coalgebra(Q) == []


def test_pushout_along_identity():
    P = operad("As")
    A = Cofree(P, sphere(1, 3), 3)
    K, inc = finite_subcoalgebra(A, (2, {0: 1}))
    Q, jB, jC = pushout(identity_morphism(K), inc)
    assert Q.dims() == A.dims() and is_iso(jC)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_pushout_dims_match_chain_quotient(seed):
    from operadic.model import sample_generating_family
    P = operad("As", 3)
    fam = sample_generating_family(P, max_dim=3, max_degree=3, seed=seed, size=1)
    i = fam.members[0]
    Y = Cofree(P, complex_from_dims({1: 1, 2: 1}, max_degree=3), 3)
    a = random_morphism(i.source, Y, random.Random(seed))
    Q, jY, jB = pushout(a, i, keep_left=True)
    for d in range(1, 4):
        # chain-level oracle: (Y (+) B) / {a(x) - i(x)}
        rel = Matrix(Y.complex.dim(d) + i.target.complex.dim(d), i.source.complex.dim(d),
                     [dict(list(a.comp(d).cols[k].items())
                           + [(Y.complex.dim(d) + r, -v) for r, v in i.comp(d).cols[k].items()])
                      for k in range(i.source.complex.dim(d))])
        assert Q.complex.dim(d) == Y.complex.dim(d) + i.target.complex.dim(d) - rel.rank()
    assert check_coalgebra(Q) == []
    assert all(jY.comp(d).rank() == jY.comp(d).ncols for d in range(1, 4))


def test_comonad_coproduct_counital_and_coassociative():
    P = operad("Com", 3)
    F = Cofree(P, sphere(2, 4), 4)
    delta, FF = comonad_coproduct(F)
    assert FF.pi @ delta.map == identity_map(F.complex)
    delta2, FFF = comonad_coproduct(FF)
    lhs = delta2.map @ delta.map
    rhs = cofree_map(FF, FFF, delta.map).map @ delta.map
    assert lhs == rhs


def test_comonad_coproduct_of_zero():
    F = Cofree(operad("As"), zero_complex(2), 2)
    delta, FF = comonad_coproduct(F)
    assert FF.space.total_dim() == 0
