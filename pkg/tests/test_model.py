import random

import pytest
from hypothesis import given, settings, strategies as st

from operadic.complexes import (
    complex_from_dims, cone_of_identity, is_quasi_iso, sphere, zero_map,
    identity_map,
)
from operadic.coalgebras import (
    Cofree, CoalgebraMorphism, PCoalgebra, check_morphism, finite_subcoalgebra,
    identity_morphism, product, zero_coalgebra,
)
from operadic.model import (
    GeneratingFamily, LiftingProblem, NoLiftFound, SquareError, StageBudgetExhausted,
    classify_coalgebra_morphism, factorize_cof_trivfib, factorize_smallobject,
    is_injective_morphism, rlp_failures, sample_generating_family, sample_squares,
    solve_lifting,
)

from conftest import operad


def zero_into(X):
    Z = zero_coalgebra(X.operad, X.max_degree)
    return CoalgebraMorphism(Z, X, zero_map(Z.complex, X.complex))


def same(f, g):
    top = max(f.source.max_degree, f.target.max_degree)
    return all(f.comp(n) == g.comp(n) for n in range(1, top + 1))


@pytest.fixture(scope="module")
def acyclic_family():
    return sample_generating_family(operad("As", 3), max_dim=4, max_degree=3, acyclic=True,
                                    seed=11, size=6)


def test_classify_identity(acyclic_family):
    F = Cofree(operad("As", 3), sphere(1, 3), 3)
    flags = classify_coalgebra_morphism(identity_morphism(F), acyclic_family)
    assert flags == {"weak_equivalence": True, "cofibration": True, "fibration_wrt": True}


def test_classify_subcoalgebra_inclusion():
    F = Cofree(operad("As", 3), sphere(1, 3), 3)
    _, inc = finite_subcoalgebra(F, (2, {0: 1}))
    flags = classify_coalgebra_morphism(inc)
    assert flags["cofibration"] and flags["fibration_wrt"] is None


def test_projection_is_acyclic_fibration(acyclic_family):
    P = operad("As", 3)
    A = Cofree(P, sphere(1, 3), 3)
    V, _ = cone_of_identity(sphere(1, 2))
    _, prA, _ = product(A, Cofree(P, V, 3), 3)
    flags = classify_coalgebra_morphism(prA, acyclic_family)
    assert flags["weak_equivalence"] and flags["fibration_wrt"]


def test_lift_identity_cofibration():
    P = operad("As", 3)
    X = Cofree(P, sphere(1, 3), 3)
    A = Cofree(P, complex_from_dims({1: 1, 2: 1}, max_degree=3), 3)
    a = CoalgebraMorphism(A, X, zero_map(A.complex, X.complex))
    pr = LiftingProblem(identity_morphism(A), identity_morphism(X), a, a)
    cert = solve_lifting(pr)
    assert same(cert.h.map, a.map)


def test_noncommuting_square_rejected():
    P = operad("As", 2)
    S = PCoalgebra(P, sphere(1, 2))
    idS = identity_morphism(S)
    zero = CoalgebraMorphism(S, S, zero_map(S.complex, S.complex))
    with pytest.raises(SquareError):
        LiftingProblem(idS, idS, idS, zero)


def test_blocked_square_reports_degree():
    P = operad("As", 2)
    S = PCoalgebra(P, sphere(1, 2))
    Z = zero_coalgebra(P, 2)
    i = zero_into(S)
    p = zero_into(S)
    a = identity_morphism(Z)
    b = identity_morphism(S)
    with pytest.raises(NoLiftFound) as e:
        solve_lifting(LiftingProblem(i, p, a, b))
    assert e.value.degree == 1


@pytest.mark.parametrize("seed", range(4))
def test_adjunction_lifts_for_sampled_cofibrations(seed):
    P = operad("As", 3)
    fam = sample_generating_family(P, max_dim=4, max_degree=3, seed=seed, size=3)
    C = Cofree(P, sphere(2, 3), 3)
    V, _ = cone_of_identity(complex_from_dims({1: 1, 2: 1}, max_degree=2))
    X, prC, _ = product(C, Cofree(P, V, 3), 3)
    rng = random.Random(seed)
    for i in fam:
        for sq in sample_squares(i, prC, rng, 2):
            cert = solve_lifting(sq)
            assert cert.strategy == "adjunction"
            assert same((cert.h @ sq.i).map, sq.a.map) and same((prC @ cert.h).map, sq.b.map)
            assert check_morphism(cert.h) == []


def test_factorize_identity():
    P = operad("As", 3)
    A = Cofree(P, sphere(1, 3), 3)
    fz = factorize_cof_trivfib(identity_morphism(A))
    assert same((fz.q @ fz.j).map, identity_map(A.complex))
    assert all(fz.certificates.values())


def test_factorize_from_zero():
    P = operad("As", 3)
    C = Cofree(P, sphere(1, 3), 3)
    fz = factorize_cof_trivfib(zero_into(C))
    assert fz.middle.dims() == C.dims()
    assert fz.j.map.is_zero()


def test_factorize_primitive_into_zero():
    P = operad("As", 3)
    Dm = PCoalgebra(P, sphere(1, 3))
    Z = zero_coalgebra(P, 3)
    f = CoalgebraMorphism(Dm, Z, zero_map(Dm.complex, Z.complex))
    fz = factorize_cof_trivfib(f, 3)
    V, _ = cone_of_identity(Dm.complex)
    assert fz.middle.dims() == Cofree(P, V, 3).dims()
    assert all(fz.certificates.values())


def test_trivial_fibration_has_rlp():
    P = operad("As", 3)
    f = zero_into(Cofree(P, sphere(1, 3), 3))
    fz = factorize_cof_trivfib(f)
    fam = sample_generating_family(P, max_dim=4, max_degree=3, seed=3, size=8)
    assert rlp_failures(fz.q, fam, seed=5) == []


def test_smallobject_empty_family():
    P = operad("As", 3)
    f = zero_into(Cofree(P, sphere(1, 3), 3))
    fz = factorize_smallobject(f, GeneratingFamily([], False))
    assert fz.certificates["stages"] == 0
    assert fz.middle is f.source and same(fz.q.map, f.map)


def test_smallobject_acyclic_family_terminates(acyclic_family):
    P = operad("As", 3)
    f = zero_into(Cofree(P, sphere(1, 3), 3))
    fz = factorize_smallobject(f, acyclic_family, max_stages=8, seed=1)
    assert fz.certificates["i_injective"] and fz.certificates["i_weak_equivalence"]
    assert all(step["injective"] and step["weak_equivalence"] for step in fz.log)
    assert same((fz.q @ fz.j).map, f.map)
    assert rlp_failures(fz.q, acyclic_family, seed=1) == []


def test_smallobject_single_member_attaches_copies():
    P = operad("As", 3)
    B = PCoalgebra(P, sphere(1, 3))
    member = zero_into(B)
    Y = Cofree(P, sphere(1, 3), 3)
    f = zero_into(Y)
    fz = factorize_smallobject(f, GeneratingFamily([member], False), max_stages=4, seed=0)
    first = fz.log[0]
    # 0 -> B attaches one copy of B per unlifted square
    assert first["dims"] == {d: first["attached"] * B.complex.dim(d) for d in (1, 2, 3)}


def test_stage_budget_reported():
    P = operad("As", 3)
    B = PCoalgebra(P, sphere(1, 3))
    f = zero_into(Cofree(P, sphere(1, 3), 3))
    with pytest.raises(StageBudgetExhausted) as e:
        factorize_smallobject(f, GeneratingFamily([zero_into(B)], False), max_stages=0)
    assert e.value.remaining


def test_family_dim_one_shapes():
    fam = sample_generating_family(operad("As", 3), max_dim=1, max_degree=3, seed=2, size=5)
    for i in fam:
        assert i.source.space.total_dim() == 0 and i.target.space.total_dim() == 1
        assert not i.target.coops


def test_family_deterministic():
    P = operad("Com", 3)
    f1 = sample_generating_family(P, seed=9, size=6)
    f2 = sample_generating_family(P, seed=9, size=6)
    assert [(i.source.dims(), i.target.dims(), i.map) for i in f1] == \
           [(i.source.dims(), i.target.dims(), i.map) for i in f2]


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_acyclic_family_members_are_weak_equivalences(seed):
    fam = sample_generating_family(operad("As", 3), max_dim=4, max_degree=3, acyclic=True,
                                   seed=seed, size=4)
    for i in fam:
        assert is_injective_morphism(i) and is_quasi_iso(i.map)
        assert sum(i.target.dims().values()) <= 4
