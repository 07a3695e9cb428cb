from fractions import Fraction as Q
from itertools import permutations

import pytest
from hypothesis import given, settings, strategies as st

from operadic.linalg import Matrix, hstack
from operadic.operads import (
    BadOperad, Operad, SigmaModule, builtin_as, builtin_com, builtin_lie3, builtin_operad,
    check_operad_axioms, dualize,
)
from operadic import perms


# oracle: evaluate As(n) on 2x2 rational matrices -----------------------------------


def mat_mul(a, b):
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2))
                 for i in range(2))


def mat_add(a, b, c=1):
    return tuple(tuple(a[i][j] + c * b[i][j] for j in range(2)) for i in range(2))


ZERO = ((0, 0), (0, 0))


def evaluate_as(P, n, vec, xs):
    """Sum over words w of vec[w] * x_{w0} x_{w1} ... using the label of each basis word."""
    words = perms.all_perms(n)
    out = ZERO
    for k, c in vec.items():
        prod = ((1, 0), (0, 1))
        for letter in words[k]:
            prod = mat_mul(prod, xs[letter])
        out = mat_add(out, prod, c)
    return out


def sample_matrices(k, seed):
    vals = [Q(((seed * 7 + i * 13) % 11) - 5, 1 + i % 3) for i in range(4 * k)]
    return [((vals[4 * j], vals[4 * j + 1]), (vals[4 * j + 2], vals[4 * j + 3])) for j in range(k)]


def test_as_compositions_match_substitution():
    P = builtin_as(4)
    for m, n in [(2, 2), (2, 3), (3, 2)]:
        for i in range(1, m + 1):
            xs = sample_matrices(m + n - 1, m * 10 + n + i)
            for a in range(P.dim(m)):
                for b in range(P.dim(n)):
                    lhs = evaluate_as(P, m + n - 1, P.compose(m, n, i, {a: 1}, {b: 1}), xs)
                    inner = evaluate_as(P, n, {b: 1}, xs[i - 1:i - 1 + n])
                    outer = xs[:i - 1] + [inner] + xs[i - 1 + n:]
                    assert lhs == evaluate_as(P, m, {a: 1}, outer)


def test_as_action_renames_variables():
    P = builtin_as(3)
    xs = sample_matrices(3, 4)
    for a in range(2):
        s = perms.adjacent(a, 3)
        for k in range(6):
            lhs = evaluate_as(P, 3, P.module.act(3, {k: 1}, s), xs)
            assert lhs == evaluate_as(P, 3, {k: 1}, [xs[s[j]] for j in range(3)])


def test_builtins_valid():
    for P in (builtin_as(4), builtin_com(4), builtin_lie3()):
        assert check_operad_axioms(P) == []


def test_builtin_dims():
    assert [builtin_as(4).dim(n) for n in range(1, 5)] == [1, 2, 6, 24]
    assert [builtin_com(5).dim(n) for n in range(1, 6)] == [1] * 5
    assert [builtin_lie3().dim(n) for n in (1, 2, 3)] == [1, 1, 2]
    assert builtin_operad("lie").dim(3) == 2


def test_lie3_dimension_by_brute_force():
    # all bracketings [[xa, xb], xc] as noncommutative polynomials; count independent ones
    def bracket(u, v):
        out = {}
        for w1, c1 in u.items():
            for w2, c2 in v.items():
                out[w1 + w2] = out.get(w1 + w2, 0) + c1 * c2
                out[w2 + w1] = out.get(w2 + w1, 0) - c1 * c2
        return {k: v for k, v in out.items() if v}

    x = [{(i,): 1} for i in range(3)]
    vecs = []
    for a, b, c in permutations(range(3)):
        vecs.append(bracket(bracket(x[a], x[b]), x[c]))
    words = sorted({w for v in vecs for w in v})
    M = Matrix(len(words), len(vecs), [{words.index(w): Q(c) for w, c in v.items()} for v in vecs])
    assert M.rank() == 2


def test_lie3_jacobi_holds_inside_lie():
    L = builtin_lie3()
    br = {0: Q(1)}
    b = L.compose(2, 2, 1, br, br)  # [[x1,x2],x3]
    jac = {}
    for s in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        for k, v in L.module.act(3, b, s).items():
            jac[k] = jac.get(k, 0) + v
    assert not any(jac.values())


def test_corrupted_composition_reported():
    P = builtin_as(4)
    bad = dict(P.comps)
    M = bad[(2, 2, 1)]
    cols = [dict(c) for c in M.cols]
    cols[0] = {k: 2 * v for k, v in cols[0].items()}
    bad[(2, 2, 1)] = Matrix(M.nrows, M.ncols, cols)
    Pb = Operad(P.module, P.unit, bad, "bad", check=False)
    kinds = {v.kind for v in check_operad_axioms(Pb)}
    assert "sequential associativity" in kinds
    with pytest.raises(BadOperad):
        Operad(P.module, P.unit, bad, "bad")


def test_broken_presentation_reported():
    T = Matrix.from_rows([[1, 1], [0, 1]])
    mod = SigmaModule(2, {1: 1, 2: 2}, {2: [T]})
    assert [v.kind for v in mod.presentation_violations()] == ["involution"]


def test_dualize_com_identity_tables():
    D = dualize(builtin_com(3))
    for M in D.decomps.values():
        assert M == Matrix.identity(1)


def test_dualize_involution():
    P = builtin_as(3)
    P2 = dualize(dualize(P))
    assert P2.comps == P.comps
    assert all(P2.module.gens[n] == P.module.gens[n] for n in range(1, 4))


def test_lie3_dual_decomposition_rank():
    D = dualize(builtin_lie3())
    stacked = hstack([D.decomps[(2, 2, 1)].transpose(), D.decomps[(2, 2, 2)].transpose()])
    # transposes of the two decomposition maps Lie(3)* -> Lie(2)* (x) Lie(2)*
    assert stacked.rank() == 2


def test_lie3_single_decomposition_rank_one():
    D = dualize(builtin_lie3())
    assert D.decomps[(2, 2, 1)].rank() == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.data())
def test_rep_is_a_right_action(n, data):
    P = builtin_as(4)
    s = data.draw(st.permutations(list(range(n))))
    t = data.draw(st.permutations(list(range(n))))
    s, t = tuple(s), tuple(t)
    # mu.(s t) = (mu.s).t in the right-action convention
    assert P.rep(n, perms.compose(s, t)) == P.rep(n, t) @ P.rep(n, s)


@settings(max_examples=30, deadline=None)
@given(st.permutations([0, 1, 2, 3]))
def test_word_reconstructs_permutation(s):
    s = tuple(s)
    acc = perms.identity(4)
    for a in perms.word(s):
        acc = perms.compose(acc, perms.adjacent(a, 4))
    assert acc == s


def test_truncate_keeps_axioms():
    P = builtin_as(4).truncate(3)
    assert P.max_arity == 3 and check_operad_axioms(P) == []
