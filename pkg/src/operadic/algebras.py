"""P-algebras over positively graded complexes.

Operations are matrices gamma_(n,k): (C^(x)n)_d -> C_d for basis elements
e_k of P(n), 2 <= n.  Conventions dual to the coalgebra side:

  gamma_(p.s) = gamma_p o L(s)
  gamma_(p o_i q) = gamma_p o (id .. gamma_q in slot i .. id)
"""

import random
from dataclasses import dataclass
from fractions import Fraction

from .linalg import Matrix, is_injective, is_surjective, rref, solve_many, vec_add
from .complexes import (
    ChainMap, direct_sum, identity_map, is_quasi_iso, quotient_complex, zero_complex, zero_map,
)
from .coalgebras import act_tensor, _section
from .operads import Violation
from .schur import SchurValue
from .solver import NoSolution, _with_lookahead, stratified_solve
from . import perms


class IllFormedAlgebra(ValueError):
    pass


class PAlgebra:
    def __init__(self, operad, complex, ops=None, name=None):
        self.operad = operad
        self.complex = complex
        self.name = name
        self.ops = {}
        for (n, k), per in (ops or {}).items():
            if n < 2 or n > self.top_arity():
                if any(not m.is_zero() for m in per.values()):
                    raise IllFormedAlgebra("operation of arity %d out of range" % n)
                continue
            if not 0 <= k < operad.dim(n):
                raise IllFormedAlgebra("operation index %d outside P(%d)" % (k, n))
            mats = {}
            for d, m in per.items():
                if d < 1 or d > complex.max_degree:
                    if not m.is_zero():
                        raise IllFormedAlgebra("operation in degree %d out of range" % d)
                    continue
                cols = len(complex.space.tensor_basis(n, d)[0])
                if m.shape != (complex.dim(d), cols):
                    raise IllFormedAlgebra("gamma_(%d,%d) in degree %d has shape %s, expected %s"
                                           % (n, k, d, m.shape, (complex.dim(d), cols)))
                if not m.is_zero():
                    mats[d] = m
            if mats:
                self.ops[(n, k)] = mats

    @property
    def space(self):
        return self.complex.space

    @property
    def max_degree(self):
        return self.complex.max_degree

    def top_arity(self):
        return min(self.operad.max_arity, self.complex.max_degree)

    def dims(self):
        return self.complex.dims()

    def gamma(self, n, k, d):
        m = self.ops.get((n, k), {}).get(d)
        if m is None:
            cols = len(self.space.tensor_basis(n, d)[0])
            return Matrix.zeros(self.complex.dim(d), cols)
        return m

    def gamma_basis(self, n, k, t):
        """gamma_(e_k)(t) for a basis tensor t, as {basis element: coeff}."""
        if n == 1:
            return {t[0]: 1 / self.operad.unit[0]} if k == 0 else {}
        d = sum(b[0] for b in t)
        m = self.ops.get((n, k), {}).get(d)
        if m is None:
            return {}
        _, tidx = self.space.tensor_basis(n, d)
        return {(d, r): v for r, v in m.cols[tidx[t]].items()}

    def gamma_apply(self, n, p, y):
        """gamma_p(y) for sparse p in P(n) and y = {tensor: coeff}."""
        out = {}
        for k, a in p.items():
            for t, c in y.items():
                vec_add(out, self.gamma_basis(n, k, t), a * c)
        return out

    def __repr__(self):
        return "PAlgebra(%s, dims=%r)" % (self.operad.name, self.dims())


def zero_algebra(P, max_degree=1):
    return PAlgebra(P, zero_complex(max_degree))


@dataclass
class AlgebraMorphism:
    source: object
    target: object
    map: object
    cell_attachment: object = None    # the chain map j when this is P(j)

    def comp(self, n):
        return self.map.comp(n)

    def apply(self, x):
        return self.map.apply(x)

    def __matmul__(self, other):
        return AlgebraMorphism(other.source, self.target, self.map @ other.map)

    def __eq__(self, other):
        return isinstance(other, AlgebraMorphism) and self.map == other.map

    __hash__ = None


def identity_algebra_morphism(A):
    return AlgebraMorphism(A, A, identity_map(A.complex))


def _tensors(space, n, top):
    for d in range(n, top + 1):
        for t in space.tensor_basis(n, d)[0]:
            yield t


def _insert(slot, n, t, fn):
    """Replace factors slot..slot+n-1 of t by the single element fn(those factors)."""
    out = {}
    for b, c in fn(t[slot:slot + n]).items():
        key = t[:slot] + (b,) + t[slot + n:]
        out[key] = out.get(key, 0) + c
    return out


def check_algebra(A):
    """All violated algebra identities with witnesses (empty means valid)."""
    P, C = A.operad, A.complex
    out = []
    if C.square_defect() is not None:
        out.append(Violation("d o d", ()))
    top = A.top_arity()
    D = C.max_degree
    for n in range(2, top + 1):
        for k in range(P.dim(n)):
            for d in range(2, D + 1):
                lhs = C.diff(d) @ A.gamma(n, k, d)
                rhs = A.gamma(n, k, d - 1) @ C.tensor_diff_matrix(n, d)
                if lhs != rhs:
                    out.append(Violation("differential", (n, k, d)))
            for a in range(n - 1):
                s = perms.adjacent(a, n)
                ps = P.module.gens[n][a].cols[k]
                for t in _tensors(C.space, n, D):
                    lhs = A.gamma_apply(n, ps, {t: 1})
                    rhs = A.gamma_apply(n, {k: 1}, act_tensor({t: 1}, s))
                    if lhs != rhs:
                        out.append(Violation("equivariance", (n, k, a, t)))
    for m in range(2, top + 1):
        for n in range(2, top + 2 - m):
            for a in range(P.dim(m)):
                for b in range(P.dim(n)):
                    for i in range(1, m + 1):
                        comp = P.compose(m, n, i, {a: 1}, {b: 1})
                        for t in _tensors(C.space, m + n - 1, D):
                            lhs = A.gamma_apply(m + n - 1, comp, {t: 1})
                            inner = _insert(i - 1, n, t,
                                            lambda u, b=b: A.gamma_basis(n, b, u))
                            rhs = A.gamma_apply(m, {a: 1}, inner)
                            if lhs != rhs:
                                out.append(Violation("associativity", (m, a, i, n, b, t)))
    return out


def tensor_image(f, y):
    out = {}
    for t, c in y.items():
        vec_add(out, f.apply_tensor(t), c)
    return out


def check_algebra_morphism(f):
    out = []
    if f.map.commutation_defect() is not None:
        out.append(Violation("chain map", (f.map.commutation_defect(),)))
    A, B = f.source, f.target
    top = min(A.top_arity(), B.top_arity())
    for n in range(2, top + 1):
        for k in range(A.operad.dim(n)):
            for t in _tensors(A.space, n, A.max_degree):
                lhs = f.map.apply(A.gamma_basis(n, k, t))
                rhs = B.gamma_apply(n, {k: 1}, tensor_image(f.map, {t: 1}))
                if lhs != rhs:
                    out.append(Violation("operation", (n, k, t)))
    return out


# free algebras ----------------------------------------------------------


class FreeAlgebra(PAlgebra):
    """P(V) truncated at max_degree, with the generator inclusion eta: V -> P(V)."""

    def __init__(self, P, V, max_degree=None):
        D = max_degree or V.max_degree
        self.V = V
        self.schur = SchurValue(P.module, V, D)
        S = self.schur
        self.operad = P
        self.complex = S.complex
        ops = {}
        for n in range(2, min(P.max_arity, D) + 1):
            for k in range(P.dim(n)):
                per = {}
                for d in range(n, D + 1):
                    tb, _ = S.space.tensor_basis(n, d)
                    cols = [self._product(n, k, t) for t in tb]
                    per[d] = Matrix(S.space.dim(d), len(cols), cols)
                ops[(n, k)] = per
        PAlgebra.__init__(self, P, S.complex, ops, name="%s(V)" % (P.name or "P"))
        u = P.unit
        comps = {}
        for d in range(1, D + 1):
            cols = [S.project(1, u, ((d, i),)) for i in range(V.dim(d))]
            comps[d] = Matrix(S.space.dim(d), len(cols), cols)
        self.eta = ChainMap(V, S.complex, comps, check=False)

    def rep(self, b):
        """(arity, vector of P(n), sorted tensor) representing the basis element b."""
        n, t0, j = self.schur.entries[b[0]][b[1]]
        return n, self.schur.fix(n, t0).basis.cols[j], t0

    def _product(self, n, k, t):
        parts = [self.rep(b) for b in t]
        N = sum(p[0] for p in parts)
        if N > self.operad.max_arity:
            return {}
        vec = self.operad.total(n, {k: Fraction(1)}, [(p[0], p[1]) for p in parts])
        if not vec:
            return {}
        tt = tuple(x for p in parts for x in p[2])
        return self.schur.project(N, vec, tt)


def free_algebra(P, V, max_degree=None):
    return FreeAlgebra(P, V, max_degree)


def free_extension(F, B, g):
    """The algebra morphism P(V) -> B extending the chain map g: V -> B."""
    u = F.operad.unit[0]
    comps = {}
    for d in range(1, F.max_degree + 1):
        cols = []
        for k in range(F.complex.dim(d)):
            n, m, t0 = F.rep((d, k))
            if d > B.max_degree:
                cols.append({})
            elif n == 1:
                cols.append({r: c * m.get(0, 0) / u for (_, r), c in g.apply_basis(t0[0]).items()})
            else:
                y = g.apply_tensor(t0)
                cols.append({r: c for (_, r), c in B.gamma_apply(n, m, y).items()})
        comps[d] = Matrix(B.complex.dim(d), len(cols), cols)
    return AlgebraMorphism(F, B, ChainMap(F.complex, B.complex, comps, check=False))


def free_map(F1, F2, j):
    """P(j): P(V1) -> P(V2) for a chain map j: V1 -> V2; remembers j as a cell attachment."""
    f = free_extension(F1, F2, F2.eta @ j)
    f.cell_attachment = j
    return f


# solving for algebra morphisms --------------------------------------------


def _cm(f):
    return f.map if hasattr(f, "map") else f


def solve_algebra_morphism(X, Y, pre=(), post=(), rng=None, result=False):
    """An algebra morphism h: X -> Y with h i = a for (i, a) in pre and p h = b for (p, b) in post.

    Raises NoSolution naming the degree where no extension exists.
    """
    P = X.operad
    C, T = X.complex, Y.complex
    top = X.max_degree
    pre = [(_cm(i), _cm(a)) for i, a in pre]
    post = [(_cm(p), _cm(b)) for p, b in post]

    def lhs(d):
        from .linalg import vstack
        blocks = [T.diff(d)] if d >= 2 else []
        blocks += [p.comp(d) for p, _ in post]
        blocks = [b for b in blocks if b.nrows]
        return vstack(blocks) if blocks else Matrix(0, T.dim(d))

    def rhs(d, comps, k):
        out, off = {}, 0
        if d >= 2 and T.dim(d - 1):
            for (e, i), c in C.d_basis((d, k)).items():
                for r, v in comps[e].cols[i].items():
                    out[off + r] = out.get(off + r, 0) + c * v
            off += T.dim(d - 1)
        for p, b in post:
            if p.comp(d).nrows:
                for r, v in b.comp(d).cols[k].items():
                    out[off + r] = out.get(off + r, 0) + v
                off += p.comp(d).nrows
        return {r: v for r, v in out.items() if v}

    def fixed(d, comps):
        pairs = []
        for i, a in pre:
            for w in range(i.comp(d).ncols):
                pairs.append((dict(i.comp(d).cols[w]), dict(a.comp(d).cols[w])))
        h = ChainMap(C, T, {e: comps[e] for e in comps}, check=False)
        for n in range(2, min(X.top_arity(), d) + 1):
            for k in range(P.dim(n)):
                for t in X.space.tensor_basis(n, d)[0]:
                    u = {r: v for (_, r), v in X.gamma_basis(n, k, t).items()}
                    val = Y.gamma_apply(n, {k: 1}, h.apply_tensor(t)) if d <= Y.max_degree else {}
                    pairs.append((u, {r: v for (_, r), v in val.items()}))
        return pairs

    res = _with_lookahead(lambda la: stratified_solve(C.dim, T.dim, top, lhs, rhs, fixed, rng, la),
                          C, T, top, pre, post, rng)
    h = AlgebraMorphism(X, Y, ChainMap(C, T, res.comps, check=False))
    return (h, res) if result else h


# quotients and pushouts -----------------------------------------------------


def ideal_closure(A, gens):
    """Span of the ideal generated by gens = {degree: [sparse vectors]}, closed under d."""
    D = A.max_degree
    P = A.operad
    piv = {d: {} for d in range(1, D + 1)}
    span = {d: [] for d in range(1, D + 1)}
    queue = []

    def add(d, v):
        v = {k: Fraction(c) for k, c in v.items() if c}
        if not v:
            return
        p, pivots, _ = rref(list(piv[d].values()) + [v], A.complex.dim(d))
        if len(pivots) > len(piv[d]):
            piv[d] = p
            span[d].append(v)
            queue.append((d, v))

    for d, vs in gens.items():
        for v in vs:
            add(d, v)
    while queue:
        d, v = queue.pop()
        if d >= 2:
            add(d - 1, A.complex.diff(d).apply(v))
        for n in range(2, min(A.top_arity(), D) + 1):
            for rest_deg in range(n - 1, D - d + 1):
                others = A.space.tensor_basis(n - 1, rest_deg)[0] if n > 1 else [()]
                for slot in range(n):
                    for o in others:
                        y = {o[:slot] + ((d, i),) + o[slot:]: c for i, c in v.items()}
                        for k in range(P.dim(n)):
                            img = A.gamma_apply(n, {k: 1}, y)
                            add(d + rest_deg, {r: c for (_, r), c in img.items()})
    return {d: Matrix(A.complex.dim(d), len(span[d]), span[d]) for d in range(1, D + 1)}


def algebra_quotient(A, ideal, prefer_from=None):
    """A / ideal with the induced operations; ``ideal`` must be closed (see ideal_closure)."""
    Q, q = quotient_complex(A.complex, ideal, prefer_from)
    ops = {}
    for n in range(2, A.top_arity() + 1):
        for k in range(A.operad.dim(n)):
            per = {}
            for d in range(n, A.max_degree + 1):
                tb, _ = Q.space.tensor_basis(n, d)
                secs = {e: _section(q.comp(e)) for e in range(1, d + 1)}
                cols = []
                for t in tb:
                    lift = tuple((e, secs[e][j]) for e, j in t)
                    img = q.apply(A.gamma_basis(n, k, lift))
                    cols.append({r: c for (_, r), c in img.items()})
                per[d] = Matrix(Q.dim(d), len(cols), cols)
            ops[(n, k)] = per
    Qa = PAlgebra(A.operad, Q, ops, "quotient")
    return Qa, AlgebraMorphism(A, Qa, q)


@dataclass
class AlgebraPushout:
    algebra: object
    jB: object
    jC: object
    free: object        # P(B (+) C)
    quotient: object    # P(B (+) C) -> pushout
    sums: tuple         # direct sum data of B (+) C


def algebra_pushout(f, g, keep_left=False):
    """B amalgamated with C over A: P(B (+) C) modulo the structure relations and f(a) - g(a)."""
    A, B, C = f.source, f.target, g.target
    P = B.operad
    D = max(B.max_degree, C.max_degree)
    W, iB, iC, pB, pC = direct_sum(B.complex, C.complex)
    F = FreeAlgebra(P, W, D)
    eta = F.eta
    gens = {d: [] for d in range(1, D + 1)}
    for X, inc in ((B, iB), (C, iC)):
        emb = eta @ inc
        for n in range(2, X.top_arity() + 1):
            for k in range(P.dim(n)):
                for t in _tensors(X.space, n, X.max_degree):
                    rel = F.gamma_apply(n, {k: 1}, emb.apply_tensor(t))
                    vec_add(rel, emb.apply(X.gamma_basis(n, k, t)), -1)
                    d = sum(b[0] for b in t)
                    gens[d].append({r: c for (_, r), c in rel.items()})
    for d in range(1, min(A.max_degree, D) + 1):
        for a in range(A.complex.dim(d)):
            rel = (eta @ iB).apply(f.map.apply_basis((d, a)))
            vec_add(rel, (eta @ iC).apply(g.map.apply_basis((d, a))), -1)
            gens[d].append({r: c for (_, r), c in rel.items()})
    ideal = ideal_closure(F, gens)
    # the generators of B come first in the free basis
    prefer = {d: B.complex.dim(d) for d in range(1, D + 1)} if keep_left else None
    Q, q = algebra_quotient(F, ideal, prefer)
    jB = AlgebraMorphism(B, Q, q.map @ eta @ iB)
    jC = AlgebraMorphism(C, Q, q.map @ eta @ iC)
    return AlgebraPushout(Q, jB, jC, F, q, (W, iB, iC, pB, pC))


def pushout_induced(po, u, v):
    """The map from the pushout to T restricting to u on B and v on C."""
    W, iB, iC, pB, pC = po.sums
    h = free_extension(po.free, u.target, u.map @ pB + v.map @ pC)
    F, Q, q = po.free, po.algebra, po.quotient
    comps = {}
    for d in range(1, Q.max_degree + 1):
        J = q.comp(d)
        rows = h.comp(d).row_dicts()
        sols, _ = solve_many(J.transpose(), rows)
        if any(s is None for s in sols):
            raise NoSolution("maps do not agree on the pushout in degree %d" % d, d)
        comps[d] = Matrix.from_row_dicts(sols, Q.complex.dim(d))
    return AlgebraMorphism(Q, u.target, ChainMap(Q.complex, u.target.complex, comps, check=False))


# model structure -----------------------------------------------------------


def classify_algebra_morphism(f, family=None, seed=0, squares_per_member=2):
    """Weak equivalences and fibrations are created by the forgetful functor.

    Cofibrations are reported against a finite family of acyclic fibrations
    (``cofibration_wrt``) together with the cell-attachment certificate.
    """
    top = max(f.source.max_degree, f.target.max_degree)
    out = {
        "weak_equivalence": is_quasi_iso(f.map),
        "fibration": all(is_surjective(f.comp(n)) for n in range(1, top + 1)),
        "cell_attachment": f.cell_attachment is not None
        and all(is_injective(f.cell_attachment.comp(n)) for n in range(1, top + 1)),
        "cofibration_wrt": None,
    }
    if family is not None:
        out["cofibration_wrt"] = not llp_failures(f, family, seed, squares_per_member)
    return out


def llp_failures(f, family, seed=0, squares_per_member=2):
    rng = random.Random(seed)
    bad = []
    for idx, p in enumerate(family):
        for _ in range(squares_per_member):
            try:
                b = solve_algebra_morphism(f.target, p.target, rng=rng)
                a = solve_algebra_morphism(f.source, p.source, post=[(p, b @ f)], rng=rng)
            except NoSolution:
                continue
            try:
                h = solve_algebra_morphism(f.target, p.source, pre=[(f, a)], post=[(p, b)])
            except NoSolution as e:
                bad.append((idx, e.degree))
                continue
            if check_algebra_morphism(h):
                bad.append((idx, None))
    return bad


def sample_acyclic_fibrations(P, max_degree=3, seed=0, size=4):
    """Free maps P(W (+) K) -> P(W) killing an acyclic K, and P(K) -> 0."""
    from .complexes import cone_of_identity, sphere
    from .model import random_complex
    rng = random.Random(seed)
    out = []
    while len(out) < size:
        dims = {n: 0 for n in range(1, max_degree + 1)}
        dims[rng.randint(1, max_degree)] += 1
        W = random_complex(dims, rng, max_degree)
        K, _ = cone_of_identity(sphere(rng.randint(1, max_degree - 1), max_degree - 1))
        S, iW, iK, pW, pK = direct_sum(W, K)
        F1, F2 = FreeAlgebra(P, S, max_degree), FreeAlgebra(P, W, max_degree)
        out.append(free_map(F1, F2, pW))
        if len(out) < size:
            Z = FreeAlgebra(P, zero_complex(max_degree), max_degree)
            FK = FreeAlgebra(P, K, max_degree)
            out.append(AlgebraMorphism(FK, Z, zero_map(FK.complex, Z.complex)))
    return out


def check_prop_3_5(f):
    """For f = P(j) with j injective: f is injective, and a weak equivalence when j is."""
    j = f.cell_attachment
    if j is None:
        raise ValueError("not a cell attachment produced by free_map")
    top = max(f.source.max_degree, f.target.max_degree)
    j_inj = all(is_injective(j.comp(n)) for n in range(1, max(j.source.max_degree,
                                                                j.target.max_degree) + 1))
    j_weq = is_quasi_iso(j)
    out = {
        "chain_cofibration": j_inj,
        "injective": all(is_injective(f.comp(n)) for n in range(1, top + 1)),
        "acyclic_attachment": j_weq,
        "weak_equivalence": is_quasi_iso(f.map) if j_weq else None,
    }
    out["holds"] = (not j_inj or out["injective"]) and (not j_weq or out["weak_equivalence"])
    return out
