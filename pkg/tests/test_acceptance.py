"""Acceptance criteria, exact arithmetic throughout.

Each test records one PASS/FAIL line; the lines are printed together at the
end of the session.
"""

import os
import random
import subprocess
import sys

from operadic.linalg import Matrix, inverse, solve_many
from operadic.complexes import (
    complex_from_dims, cone_of_identity, homology, identity_map, is_quasi_iso, sphere,
    zero_complex, zero_map,
)
from operadic.schur import schur_evaluate
from operadic.coalgebras import (
    Cofree, CoalgebraMorphism, PCoalgebra, check_coalgebra, check_morphism, cofree_lift,
    finite_subcoalgebra, product, zero_coalgebra,
)
from operadic.algebras import (
    FreeAlgebra, check_algebra_morphism, free_extension, solve_algebra_morphism,
)
from operadic.envelope import acyclic_invariance, check_cor_2_10, check_prop_2_8
from operadic.model import (
    GeneratingFamily, is_injective_morphism, random_complex, random_morphism, rlp_failures,
    factorize_cof_trivfib, factorize_smallobject, sample_generating_family,
)
from operadic.solver import solve_coalgebra_morphism
from operadic.bialgebras import (
    BialgebraMorphism, builtin_law, check_bialgebra, check_mixed_law, factorize_bialgebra,
    lift_free_to_bialgebra, zero_bialgebra,
)
from operadic.cli import main

from conftest import ACCEPTANCE, operad
from cli_corpus import commands, write_corpus


def record(n, ok, detail):
    ACCEPTANCE[n] = "criterion %2d: %s  %s" % (n, "PASS" if ok else "FAIL", detail)
    print(ACCEPTANCE[n])
    assert ok, detail


# corpora ----------------------------------------------------------------------------


def small_complexes(seed, count, top=3, max_dim=2):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        dims = {n: rng.randint(0, max_dim) for n in range(1, top + 1)}
        if any(dims.values()):
            out.append(random_complex(dims, rng, top))
    return out


def scrambled(C, rng):
    """C with a random integer change of basis in every degree."""
    g = {}
    for n in range(1, C.max_degree + 1):
        k = C.dim(n)
        while True:
            M = Matrix.from_rows([[rng.randint(-2, 2) for _ in range(k)] for _ in range(k)], k)
            if M.rank() == k:
                break
        g[n] = M
    d = {n: g[n - 1] @ C.diff(n) @ inverse(g[n]) for n in range(2, C.max_degree + 1)
         if C.dim(n) and C.dim(n - 1)}
    return complex_from_dims(C.dims(), d, max_degree=C.max_degree)


def acyclic_corpus():
    """Cones of random complexes (top degree 4) and scrambled copies."""
    out = [cone_of_identity(sphere(1, 3))[0], cone_of_identity(sphere(2, 3))[0],
           zero_complex(4)]
    rng = random.Random(20)
    for X in small_complexes(21, 10, top=3, max_dim=1):
        V, _ = cone_of_identity(X)
        out.append(V)
        out.append(scrambled(V, rng))
    return out


def coalgebra_corpus(P, seed, count, top=3):
    """Primitive, cofree and finite sub-coalgebras of random small complexes."""
    rng = random.Random(seed)
    out = []
    for i, C in enumerate(small_complexes(seed, count, top, 1)):
        kind = i % 3
        if kind == 0:
            out.append(PCoalgebra(P, C))
        elif kind == 1:
            out.append(Cofree(P, C, top))
        else:
            F = Cofree(P, C, top)
            basis = F.space.basis()
            d, k = rng.choice(basis)
            out.append(finite_subcoalgebra(F, (d, {k: 1}))[0])
    return out


# 1 --------------------------------------------------------------------------------------


def test_criterion_01_norm_retraction():
    count, odd, bad = 0, 0, []
    names = ["As", "Com", "Lie3"]
    for i, C in enumerate(small_complexes(1, 40, top=4, max_dim=2)):
        M = operad(names[i % 3]).module
        S = schur_evaluate(M, C, 4)
        has_odd = any(C.dim(d) for d in (1, 3))
        for n in (1, 2, 3):
            for d in range(n, 5):
                N, p = S.norm_map(n, d)
                if not N.ncols:
                    continue
                count += 1
                odd += has_odd
                if p @ N != Matrix.identity(N.ncols):
                    bad.append((i, n, d))
    record(1, not bad and count >= 100 and odd > 0,
           "%d instances (%d with odd generators), %d failures" % (count, odd, len(bad)))


# 2 --------------------------------------------------------------------------------------


def test_criterion_02_acyclic_invariance():
    corpus = acyclic_corpus()
    bad = []
    for i, V in enumerate(corpus):
        assert homology(V).is_zero()
        for name in ("As", "Com", "Lie3"):
            if not acyclic_invariance(operad(name).module, V, 4)["holds"]:
                bad.append((i, name))
    record(2, not bad and len(corpus) >= 20,
           "%d acyclic complexes x 3 operads, %d failures" % (len(corpus), len(bad)))


# 3 --------------------------------------------------------------------------------------


def test_criterion_03_enveloping_product():
    triples = []
    for name in ("As", "Com"):
        P = operad(name, 3)
        As = coalgebra_corpus(P, 30 + len(name), 12, top=3)
        Cs = small_complexes(40 + len(name), 12, top=3, max_dim=1)
        triples += [(P, A, C, 3) for A, C in zip(As, Cs)]
        triples += [(P, PCoalgebra(P, sphere(1, 4)), cone_of_identity(sphere(1, 3))[0], 4),
                    (P, Cofree(P, sphere(2, 4), 4), sphere(2, 4), 4)]
    bad = []
    for k, (P, A, C, D) in enumerate(triples):
        try:
            cert = check_prop_2_8(A, C, D)
            assert cert.envelope_dims == cert.product_dims
        except AssertionError as e:
            bad.append((k, str(e)))
    record(3, not bad and len(triples) >= 25,
           "%d (P, A, C) triples, verified isomorphisms, %d failures" % (len(triples), len(bad)))


# 4 --------------------------------------------------------------------------------------


def test_criterion_04_acyclic_projection():
    corpus = acyclic_corpus()
    bad = []
    for i, V in enumerate(corpus):
        P = operad("As" if i % 2 else "Com", 3)
        A = [PCoalgebra(P, sphere(1, 4)), Cofree(P, sphere(2, 4), 4)][i % 2]
        if not check_cor_2_10(A, V, 4)["weak_equivalence"]:
            bad.append(i)
    record(4, not bad, "%d acyclic C, %d projections not weak equivalences"
           % (len(corpus), len(bad)))


# 5 --------------------------------------------------------------------------------------


def test_criterion_05_factorization():
    P = operad("As", 3)
    family = sample_generating_family(P, max_dim=4, max_degree=3, seed=55, size=50)
    assert len(family) == 50
    rng = random.Random(5)
    sources = coalgebra_corpus(P, 50, 27)
    targets = coalgebra_corpus(P, 51, 27)
    maps = [random_morphism(X, Y, rng) for X, Y in zip(sources, targets)]
    F1 = Cofree(P, sphere(1, 3), 3)
    maps.append(CoalgebraMorphism(zero_coalgebra(P, 3), F1, zero_map(zero_complex(3), F1.complex)))
    bad, rlp = [], 0
    for k, f in enumerate(maps):
        fz = factorize_cof_trivfib(f)
        top = max(f.source.max_degree, f.target.max_degree)
        ok = (all((fz.q @ fz.j).comp(n) == f.comp(n) for n in range(1, top + 1))
              and all(fz.certificates.values()))
        fails = rlp_failures(fz.q, family, seed=k, squares_per_member=1)
        rlp += len(fails)
        if not ok or fails:
            bad.append(k)
    record(5, not bad and len(maps) >= 25,
           "%d morphisms, 50-member family, %d lifting failures" % (len(maps), rlp))


# 6 --------------------------------------------------------------------------------------


def test_criterion_06_small_object():
    runs = []
    for name in ("As", "Com"):
        P = operad(name, 3)
        F1 = Cofree(P, sphere(1, 3) if name == "As" else sphere(2, 3), 3)
        Z = zero_coalgebra(P, 3)
        zero_in = CoalgebraMorphism(Z, F1, zero_map(Z.complex, F1.complex))
        for acyclic in (True, False):
            fam = sample_generating_family(P, max_dim=3, max_degree=3, acyclic=acyclic,
                                           seed=60 + acyclic, size=4)
            runs.append((zero_in, fam))
        A = coalgebra_corpus(P, 61, 2)
        f = random_morphism(A[0], F1, random.Random(6))
        runs.append((f, sample_generating_family(P, max_dim=3, max_degree=3, acyclic=True,
                                                 seed=62, size=4)))
    bad, stages = [], []
    for k, (f, fam) in enumerate(runs):
        fz = factorize_smallobject(f, fam, max_stages=16, seed=k)
        stages.append(fz.certificates["stages"])
        ok = (fz.certificates["i_injective"]
              and all(s["injective"] for s in fz.log)
              and (not fam.acyclic or all(s["weak_equivalence"] for s in fz.log))
              and (fz.q @ fz.j).map == f.map
              and not rlp_failures(fz.q, fam, seed=k))
        if not ok:
            bad.append(k)
    record(6, not bad, "%d runs at D = 3, stages %s, %d failures" % (len(runs), stages, len(bad)))


# 7 --------------------------------------------------------------------------------------


def test_criterion_07_finite_subcoalgebra():
    P = operad("As", 3)
    corpus = coalgebra_corpus(P, 70, 9) + [Cofree(operad("Com", 3), sphere(2, 4), 4)]
    corpus.append(product(Cofree(P, sphere(1, 3), 3), Cofree(P, sphere(2, 3), 3), 3)[0])
    rng = random.Random(7)
    count, bad = 0, []
    for A in corpus:
        for d in range(1, A.max_degree + 1):
            n = A.complex.dim(d)
            vecs = [{k: 1} for k in range(n)]
            if n > 1:
                vecs += [{k: rng.randint(-3, 3) or 1 for k in range(n)} for _ in range(2)]
            for v in vecs:
                count += 1
                K, inc = finite_subcoalgebra(A, (d, v))
                img, _ = solve_many(inc.comp(d), [v])
                ok = (check_coalgebra(K) == [] and check_morphism(inc) == []
                      and is_injective_morphism(inc) and img[0] is not None
                      and all(K.complex.dim(e) == 0 for e in range(d + 1, K.max_degree + 1)))
                if not ok:
                    bad.append((d, v))
    record(7, not bad, "%d homogeneous elements, %d failures" % (count, len(bad)))


# 8 --------------------------------------------------------------------------------------


def test_criterion_08_universal_properties():
    rng = random.Random(8)
    from operadic.complexes import random_chain_map
    cof_bad = free_bad = 0
    cof_n = free_n = 0
    for i in range(60):
        name = ("As", "Com")[i % 2]
        P = operad(name, 3)
        X = coalgebra_corpus(P, 800 + i, 3)[i % 3]
        V = small_complexes(900 + i, 1, 3, 2)[0]
        F = Cofree(P, V, 3)
        g = random_chain_map(X.complex, V, rng)
        h = cofree_lift(X, g, F)
        h2, res = solve_coalgebra_morphism(X, F, post=[(F.pi, g)], result=True)
        cof_n += 1
        if check_morphism(h) or F.pi @ h.map != g or not res.unique or h2.map != h.map:
            cof_bad += 1
        W = small_complexes(1000 + i, 1, 3, 2)[0]
        FA = FreeAlgebra(P, V, 3)
        B = FreeAlgebra(P, W, 3)
        k = random_chain_map(V, B.complex, rng)
        e = free_extension(FA, B, k)
        e2, res = solve_algebra_morphism(FA, B, pre=[(FA.eta, k)], result=True)
        free_n += 1
        if check_algebra_morphism(e) or e.map @ FA.eta != k or not res.unique or e2.map != e.map:
            free_bad += 1
    record(8, not cof_bad and not free_bad and min(cof_n, free_n) >= 50,
           "cofree %d probes (%d failures), free %d probes (%d failures)"
           % (cof_n, cof_bad, free_n, free_bad))


# 9 --------------------------------------------------------------------------------------


def test_criterion_09_bialgebra_lift():
    law = builtin_law("biassociative")
    Q = law.Q
    probes = [PCoalgebra(Q, sphere(1, 3)), PCoalgebra(Q, sphere(2, 3)),
              PCoalgebra(Q, complex_from_dims({1: 2}, max_degree=3)), Cofree(Q, sphere(1, 3), 3)]
    axioms = check_mixed_law(law, probes, 3)
    bad = []
    for dims in ({1: 1}, {1: 2}, {2: 1}, {1: 1, 2: 1}):
        V = complex_from_dims(dims, max_degree=3)
        B = lift_free_to_bialgebra(PCoalgebra(Q, V), law, 3)
        tensor = FreeAlgebra(law.P, V, 3)
        ok = (B.dims() == tensor.dims() and B.algebra.ops == tensor.ops
              and check_coalgebra(B.coalgebra) == [] and check_bialgebra(B) == [])
        if not ok:
            bad.append(dims)
    record(9, not bad and not axioms,
           "4 tensor bialgebras (%d failures), %d law axiom violations" % (len(bad), len(axioms)))


# 10 -------------------------------------------------------------------------------------


def test_criterion_10_bialgebra_factorization():
    law = builtin_law("biassociative")
    Q = law.Q
    runs, bad, stages = 0, [], []
    for k, dims in enumerate(({1: 1}, {1: 2}, {2: 1})):
        T = lift_free_to_bialgebra(PCoalgebra(Q, complex_from_dims(dims, max_degree=2)), law, 2)
        Z = zero_bialgebra(law, 2)
        f = BialgebraMorphism(Z, T, zero_map(Z.complex, T.complex))
        for acyclic in (False, True):
            fam = sample_generating_family(Q, max_dim=2, max_degree=2, acyclic=acyclic,
                                           seed=100 + k, size=4)
            runs += 1
            fz = factorize_bialgebra(f, fam, law, max_stages=16, seed=k)
            stages.append(fz.certificates["stages"])
            ok = (fz.certificates["i_injective"] and all(s["injective"] for s in fz.log)
                  and (fz.q @ fz.j).map == f.map and check_bialgebra(fz.middle) == []
                  and not rlp_failures(fz.q.underlying_coalgebra(), fam, seed=k))
            if not ok:
                bad.append((k, acyclic))
    record(10, not bad, "%d runs at D = 2, stages %s, %d failures" % (runs, stages, len(bad)))


# 11 -------------------------------------------------------------------------------------


def test_criterion_11_cli_determinism(tmp_path):
    files = write_corpus(tmp_path)
    env = dict(os.environ, PYTHONHASHSEED="12345")
    bad = []
    cmds = commands(files)
    for k, (argv, code) in enumerate(cmds):
        first, second = tmp_path / ("a%d.json" % k), tmp_path / ("b%d.json" % k)
        got = main(argv + ["--out", str(first)])
        res = subprocess.run([sys.executable, "-m", "operadic"] + argv + ["--out", str(second)],
                             env=env, capture_output=True)
        if got != code or res.returncode != code or first.read_bytes() != second.read_bytes():
            bad.append(argv[:2])
    verbs = {a[0] for a, _ in cmds}
    record(11, not bad and len(verbs) == 15,
           "%d runs over %d verbs, %d mismatches" % (len(cmds), len(verbs), len(bad)))
