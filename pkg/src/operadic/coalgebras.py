"""Coalgebras over an operad P in bounded positively graded chain complexes.

A coalgebra stores, for every arity 2 <= n <= min(max arity, max degree) and
every basis element p of P(n), the degree-wise matrices of rho_p: C -> C^(x)n.
The conventions checked by ``check_coalgebra`` are

  * rho_{p.s} = L(s^-1) rho_p                       (equivariance)
  * rho_{p o_i q} = (id .. rho_q (slot i) .. id) rho_p  (coassociativity)

and rho_p commutes with the differentials.  The cofree coalgebra P*(V) is
realized as the invariant model of the Schur functor of the dual module:
an arity-N element is an equivariant map f: P(N) -> V^(x)N and
rho_p(f)(q_1, .., q_n) = f(gamma(p; q_1, .., q_n)).
"""

from collections import Counter
from fractions import Fraction
from itertools import product as iproduct

from .linalg import (
    Matrix, vec_add, kernel, solve_many, independent_pivot_rows, inverse, hstack,
    image_basis, rref,
)
from .complexes import (
    ChainComplex, ChainMap, GradedSpace, direct_sum, subcomplex, quotient_complex,
    koszul_permute, tensor_degree, identity_map, zero_complex, zero_map,
)
from .operads import Violation, BadOperad
from .schur import SchurValue, orbit_rep
from . import perms


class IllFormed(ValueError):
    pass


class NotCoreflexive(ValueError):
    pass


def _unit_vec(k):
    return {k: Fraction(1)}


class PCoalgebra:
    def __init__(self, operad, complex, coops=None, name=None):
        self.operad = operad
        self.complex = complex
        self.name = name
        self.coops = {}
        coops = coops or {}
        for (n, k), per in coops.items():
            if n < 2 or n > self.top_arity():
                if any(not m.is_zero() for m in per.values()):
                    raise IllFormed("cooperation of arity %d out of range" % n)
                continue
            if not 0 <= k < operad.dim(n):
                raise IllFormed("cooperation index %d outside P(%d)" % (k, n))
            mats = {}
            for d, m in per.items():
                if d < 1 or d > complex.max_degree:
                    if not m.is_zero():
                        raise IllFormed("cooperation in degree %d out of range" % d)
                    continue
                rows = len(complex.space.tensor_basis(n, d)[0])
                if m.shape != (rows, complex.dim(d)):
                    raise IllFormed("rho_(%d,%d) in degree %d has shape %s, expected %s"
                                    % (n, k, d, m.shape, (rows, complex.dim(d))))
                if not m.is_zero():
                    mats[d] = m
            if mats:
                self.coops[(n, k)] = mats

    @property
    def space(self):
        return self.complex.space

    @property
    def max_degree(self):
        return self.complex.max_degree

    def top_arity(self):
        return min(self.operad.max_arity, self.complex.max_degree)

    def rho(self, n, k, d):
        m = self.coops.get((n, k), {}).get(d)
        if m is None:
            rows = len(self.space.tensor_basis(n, d)[0])
            return Matrix.zeros(rows, self.complex.dim(d))
        return m

    def rho_basis(self, n, k, b):
        """rho_{e_k}(b) as {tensor: coeff}."""
        m = self.coops.get((n, k), {}).get(b[0])
        if m is None:
            return {}
        tb = self.space.tensor_basis(n, b[0])[0]
        return {tb[r]: v for r, v in m.cols[b[1]].items()}

    def rho_apply(self, n, p, x):
        """rho_p(x) for sparse p in P(n) and x = {basis element: coeff}."""
        out = {}
        for k, a in p.items():
            for b, c in x.items():
                vec_add(out, self.rho_basis(n, k, b), a * c)
        return out

    def dims(self):
        return self.complex.dims()

    def __repr__(self):
        return "PCoalgebra(%s, dims=%r)" % (self.operad.name, self.dims())


def zero_coalgebra(P, max_degree=1):
    return PCoalgebra(P, zero_complex(max_degree))


def tensor_map(f, y):
    """f^(x)n applied to {tensor: coeff}."""
    out = {}
    for t, c in y.items():
        vec_add(out, f.apply_tensor(t), c)
    return out


def apply_in_slot(y, slot, fn):
    """Replace factor ``slot`` of every tensor in y by fn(factor) = {tensor: coeff}."""
    out = {}
    for t, c in y.items():
        for t2, c2 in fn(t[slot]).items():
            key = t[:slot] + t2 + t[slot + 1:]
            out[key] = out.get(key, 0) + c * c2
    return {k: v for k, v in out.items() if v}


def act_tensor(y, s):
    """L(s) on {tensor: coeff}: factor i moves to slot s(i)."""
    out = {}
    for t, c in y.items():
        sign, t2 = koszul_permute(t, s)
        out[t2] = out.get(t2, 0) + sign * c
    return {k: v for k, v in out.items() if v}


# checks ---------------------------------------------------------------


def check_coalgebra(A):
    """All violated coalgebra identities with witnesses (empty means valid)."""
    P, C = A.operad, A.complex
    out = []
    if C.square_defect() is not None:
        out.append(Violation("d o d", ()))
    top = A.top_arity()
    for n in range(2, top + 1):
        for k in range(P.dim(n)):
            # compatibility with d
            for d in range(2, C.max_degree + 1):
                lhs = C.tensor_diff_matrix(n, d) @ A.rho(n, k, d)
                rhs = A.rho(n, k, d - 1) @ C.diff(d)
                if lhs != rhs:
                    out.append(Violation("differential", (n, k, d)))
            # equivariance on generators
            for a in range(n - 1):
                s = perms.adjacent(a, n)
                ps = P.module.gens[n][a].cols[k]
                for b in C.space.basis():
                    if b[0] < n:
                        continue
                    lhs = A.rho_apply(n, ps, {b: 1})
                    rhs = act_tensor(A.rho_basis(n, k, b), perms.inverse(s))
                    if lhs != rhs:
                        out.append(Violation("equivariance", (n, k, a, b)))
    # coassociativity
    for m in range(2, top + 1):
        for n in range(2, top + 2 - m):
            for a in range(P.dim(m)):
                for b in range(P.dim(n)):
                    for i in range(1, m + 1):
                        comp = P.compose(m, n, i, _unit_vec(a), _unit_vec(b))
                        for x in C.space.basis():
                            if x[0] < m + n - 1:
                                continue
                            lhs = A.rho_apply(m + n - 1, comp, {x: 1})
                            rhs = apply_in_slot(A.rho_basis(m, a, x), i - 1,
                                                lambda y, b=b: A.rho_basis(n, b, y))
                            if lhs != rhs:
                                out.append(Violation("coassociativity", (m, a, i, n, b, x)))
    return out


class CoalgebraMorphism:
    def __init__(self, source, target, map):
        self.source = source
        self.target = target
        self.map = map

    def comp(self, n):
        return self.map.comp(n)

    def apply(self, x):
        return self.map.apply(x)

    def __matmul__(self, other):
        return CoalgebraMorphism(other.source, self.target, self.map @ other.map)

    def __eq__(self, other):
        return isinstance(other, CoalgebraMorphism) and self.map == other.map

    __hash__ = None

    def __repr__(self):
        return "CoalgebraMorphism(%r -> %r)" % (self.source.dims(), self.target.dims())


def check_morphism(f):
    out = []
    if f.map.commutation_defect() is not None:
        out.append(Violation("chain map", (f.map.commutation_defect(),)))
    A, B = f.source, f.target
    top = min(A.top_arity(), B.top_arity())
    for n in range(2, top + 1):
        for k in range(A.operad.dim(n)):
            for b in A.space.basis():
                if b[0] < n:
                    continue
                lhs = tensor_map(f.map, A.rho_basis(n, k, b))
                rhs = B.rho_apply(n, {k: 1}, f.map.apply_basis(b))
                if lhs != rhs:
                    out.append(Violation("cooperation", (n, k, b)))
    return out


def identity_morphism(A):
    return CoalgebraMorphism(A, A, identity_map(A.complex))


# cofree ---------------------------------------------------------------


def _splits(t0, sizes):
    """Ordered tuples of sorted sub-multisets of t0 with the given sizes."""
    if not sizes:
        if not t0:
            yield ()
        return
    k = sizes[0]
    cnt = Counter(t0)
    keys = sorted(cnt)

    def choose(pos, left, acc):
        if left == 0:
            yield tuple(acc)
            return
        if pos == len(keys):
            return
        key = keys[pos]
        for c in range(min(cnt[key], left), -1, -1):
            yield from choose(pos + 1, left - c, acc + [key] * c)

    for first in choose(0, k, []):
        rest = list(t0)
        for x in first:
            rest.remove(x)
        for tail in _splits(tuple(rest), sizes[1:]):
            yield (first,) + tail


def _compositions(N, n):
    if n == 1:
        yield (N,)
        return
    for k in range(1, N - n + 2):
        for rest in _compositions(N - k, n - 1):
            yield (k,) + rest


class Cofree(PCoalgebra):
    """P*(V) truncated at max_degree, with the projection pi onto V."""

    def __init__(self, P, V, max_degree=None):
        if P.dim(1) != 1:
            raise BadOperad("P(1) must be one-dimensional")
        D = max_degree or V.max_degree
        self.V = V
        self.schur = SchurValue(P.module.dual(), V, D)
        complex = self.schur.inv_complex
        self.operad = P
        self.complex = complex
        self._gamma = {}
        coops = self._build_coops()
        PCoalgebra.__init__(self, P, complex, coops, name="%s*(V)" % (P.name or "P"))
        u = P.unit[0]
        comps = {}
        for d in range(1, D + 1):
            cols = []
            for (n, t0, j) in self.schur.entries[d]:
                cols.append({t0[0][1]: u} if n == 1 else {})
            comps[d] = Matrix(V.dim(d), len(cols), cols)
        self.pi = ChainMap(complex, V, comps, check=False)

    def gamma(self, n, a, ks, bs):
        key = (n, a, ks, bs)
        hit = self._gamma.get(key)
        if hit is None:
            hit = self.operad.total(n, _unit_vec(a), [(k, _unit_vec(b)) for k, b in zip(ks, bs)])
            self._gamma[key] = hit
        return hit

    def _build_coops(self):
        P, S = self.operad, self.schur
        space = S.space
        D = S.max_degree
        coops = {}
        for n in range(2, min(P.max_arity, D) + 1):
            for a in range(P.dim(n)):
                per = {}
                for d in range(n, D + 1):
                    tb, tidx = space.tensor_basis(n, d)
                    cols = []
                    for k, (N, t0, j) in enumerate(S.entries[d]):
                        cols.append(self._coop_column(n, a, (d, k), N, t0, tidx)
                                    if N >= n else {})
                    per[d] = Matrix(len(tb), len(cols), cols)
                coops[(n, a)] = per
        return coops

    def _coop_column(self, n, a, f, N, t0, tidx):
        S = self.schur
        col = {}
        for ks in _compositions(N, n):
            for parts in _splits(t0, ks):
                fds = [S.fix(k, p) for k, p in zip(ks, parts)]
                if any(fd.rank == 0 for fd in fds):
                    continue
                t = tuple(x for p in parts for x in p)
                comp = S.component(f, t)
                if not comp:
                    continue
                vals = {}
                for bs in iproduct(*[range(len(fd.pivots)) for fd in fds]):
                    g = self.gamma(n, a, ks, tuple(fd.pivots[b] for fd, b in zip(fds, bs)))
                    v = sum((comp.get(r, 0) * c for r, c in g.items()), Fraction(0))
                    if v:
                        vals[bs] = v
                if not vals:
                    continue
                # change to the fixed-space bases factor by factor
                for js in iproduct(*[range(fd.rank) for fd in fds]):
                    total = Fraction(0)
                    for bs, v in vals.items():
                        w = v
                        for fd, j, b in zip(fds, js, bs):
                            x = fd.pivot_inv[j, b]
                            if not x:
                                w = 0
                                break
                            w *= x
                        total += w
                    if total:
                        key = tuple(S.index[(k, p, j)] for k, p, j in zip(ks, parts, js))
                        col[tidx[key]] = col.get(tidx[key], 0) + total
        return {k: v for k, v in col.items() if v}


def cofree(P, V, max_degree=None):
    F = Cofree(P, V, max_degree)
    return F, F.pi


def cofree_lift(X, g, F):
    """The coalgebra morphism X -> F = P*(V) whose projection to V is g."""
    P, S = F.operad, F.schur
    u = P.unit[0]
    D = F.max_degree
    comps = {}
    for d in range(1, X.max_degree + 1):
        cols = []
        for b in X.space.basis(d):
            col = {}
            if d <= D:
                for v, c in g.apply_basis(b).items():
                    vec_add(col, S.inv_coords(1, (v,), {0: c / u}))
                for N in range(2, min(P.max_arity, d, X.top_arity()) + 1):
                    vals = {}
                    for r in range(P.dim(N)):
                        y = tensor_map(g, X.rho_basis(N, r, b))
                        for t, c in y.items():
                            if list(t) == sorted(t):
                                vals.setdefault(t, {})[r] = c
                    for t0, vec in vals.items():
                        vec_add(col, S.inv_coords(N, t0, vec))
            cols.append(col)
        comps[d] = Matrix(F.complex.dim(d), len(cols), cols)
    return CoalgebraMorphism(X, F, ChainMap(X.complex, F.complex, comps, check=False))


def cofree_map(F1, F2, h):
    """P*(h): P*(V1) -> P*(V2) for a chain map h: V1 -> V2."""
    return cofree_lift(F1, h @ F1.pi, F2)


def structure_map(A, F=None):
    """The coaction A -> P*(A) (lift of the identity)."""
    if F is None:
        F = Cofree(A.operad, A.complex, A.max_degree)
    return cofree_lift(A, identity_map(A.complex), F), F


def comonad_coproduct(F, FF=None):
    """Delta: P*(V) -> P*(P*(V)), the lift of the identity of P*(V)."""
    return structure_map(F, FF)


# sub-objects ----------------------------------------------------------


class Embedding:
    """Coordinates on a subspace given degreewise by independent columns."""

    def __init__(self, basis):
        self.basis = basis
        self.piv = {}
        for d, B in basis.items():
            if B.ncols:
                rows = independent_pivot_rows(B)
                self.piv[d] = (rows, inverse(B.select_rows(rows)))
            else:
                self.piv[d] = ([], Matrix.zeros(0, 0))
        self._pos = {d: {r: k for k, r in enumerate(p[0])} for d, p in self.piv.items()}

    def coords(self, d, vec):
        rows, inv = self.piv.get(d, ([], None))
        if not rows:
            return {}
        pos = self._pos[d]
        return inv.apply({pos[r]: v for r, v in vec.items() if r in pos})

    def tensor_coords(self, y):
        """Coordinates of a tensor in the sub-tensor power, or None if outside it."""
        out = {}
        for t, c in y.items():
            acc = {(): c}
            for (d, i) in t:
                pos = self._pos.get(d, {})
                if i not in pos:
                    acc = {}
                    break
                inv = self.piv[d][1]
                nxt = {}
                for pre, a in acc.items():
                    for k in range(inv.nrows):
                        x = inv[k, pos[i]]
                        if x:
                            key = pre + ((d, k),)
                            nxt[key] = nxt.get(key, 0) + a * x
                acc = nxt
            for k, v in acc.items():
                out[k] = out.get(k, 0) + v
        out = {k: v for k, v in out.items() if v}
        # verify by mapping back
        back = {}
        for t, c in out.items():
            acc = {(): c}
            for (d, k) in t:
                nxt = {}
                for pre, a in acc.items():
                    for r, v in self.basis[d].cols[k].items():
                        key = pre + ((d, r),)
                        nxt[key] = nxt.get(key, 0) + a * v
                acc = nxt
            for k2, v in acc.items():
                back[k2] = back.get(k2, 0) + v
        back = {k: v for k, v in back.items() if v}
        if back != {k: v for k, v in y.items() if v}:
            return None
        return out


def sub_coalgebra(A, basis, name=None, truncated=None):
    """The sub-coalgebra spanned by ``basis[d]`` (columns in A_d) with its inclusion.

    Raises IllFormed if the span is not closed under d or the cooperations.
    """
    D = A.max_degree
    basis = {d: basis.get(d, Matrix.zeros(A.complex.dim(d), 0)) for d in range(1, D + 1)}
    try:
        K, inc = subcomplex(A.complex, basis)
    except Exception as e:
        raise IllFormed(str(e))
    if truncated is not None:
        K.truncated = truncated
    emb = Embedding(basis)
    coops = {}
    for n in range(2, A.top_arity() + 1):
        for k in range(A.operad.dim(n)):
            per = {}
            for d in range(n, D + 1):
                tb, tidx = K.space.tensor_basis(n, d)
                cols = []
                for c in basis[d].cols:
                    y = A.rho_apply(n, {k: 1}, {(d, r): v for r, v in c.items()})
                    tc = emb.tensor_coords(y)
                    if tc is None:
                        raise IllFormed("span not closed under rho_(%d,%d) in degree %d" % (n, k, d))
                    cols.append({tidx[t]: v for t, v in tc.items()})
                per[d] = Matrix(len(tb), len(cols), cols)
            coops[(n, k)] = per
    Kc = PCoalgebra(A.operad, K, coops, name)
    return Kc, CoalgebraMorphism(Kc, A, inc)


def equalizer(d0, d1, s0=None):
    """ker(d0 - d1) as a sub-coalgebra of the common source, with its inclusion."""
    A = d0.source
    if s0 is not None:
        for d in range(1, A.max_degree + 1):
            I = Matrix.identity(A.complex.dim(d))
            if s0.comp(d) @ d0.comp(d) != I or s0.comp(d) @ d1.comp(d) != I:
                raise NotCoreflexive("s0 is not a common retraction in degree %d" % d)
    basis = {d: kernel(d0.comp(d) - d1.comp(d)) for d in range(1, A.max_degree + 1)}
    return sub_coalgebra(A, basis, "eq")


def finite_subcoalgebra(C, x):
    """Smallest sub-coalgebra containing the homogeneous element x = (degree, {index: coeff}).

    Saturates under d and under the tensor-factor spans of every rho_p(y).
    """
    deg, vec = x
    D = C.max_degree
    if not 1 <= deg <= D or any(not 0 <= i < C.complex.dim(deg) for i in vec):
        raise ValueError("element outside degree %d of the coalgebra" % deg)
    span = {d: [] for d in range(1, D + 1)}
    piv = {d: {} for d in range(1, D + 1)}
    queue = []

    def add(d, v):
        v = {k: Fraction(c) for k, c in v.items() if c}
        if not v:
            return
        p, pivots, _ = rref(list(piv[d].values()) + [v], C.complex.dim(d))
        if len(pivots) > len(piv[d]):
            piv[d] = p
            span[d].append(v)
            queue.append((d, v))

    add(deg, vec)
    while queue:
        d, v = queue.pop()
        if d >= 2:
            add(d - 1, C.complex.diff(d).apply(v))
        for n in range(2, min(C.top_arity(), d) + 1):
            for k in range(C.operad.dim(n)):
                y = C.rho_apply(n, {k: 1}, {(d, i): c for i, c in v.items()})
                for slot in range(n):
                    for dd, w in _factor_span(y, slot):
                        add(dd, w)
    basis = {d: Matrix(C.complex.dim(d), len(span[d]), span[d]) for d in range(1, D + 1)}
    # closed in the untruncated coalgebra too, so homology is exact in every degree
    return sub_coalgebra(C, basis, "sub", truncated=False)


def _factor_span(y, slot):
    """Spanning vectors of the column space of y viewed as (factor slot) x (other factors)."""
    groups = {}
    for t, c in y.items():
        rest = t[:slot] + t[slot + 1:]
        d, i = t[slot]
        groups.setdefault((d, rest), {})
        groups[(d, rest)][i] = groups[(d, rest)].get(i, 0) + c
    return [(d, v) for (d, _), v in groups.items()]


# products -------------------------------------------------------------


def direct_sum_coalgebra(B, C):
    """B (+) C with componentwise cooperations; returns (S, inB, inC)."""
    S, ib, ic, pb, pc = direct_sum(B.complex, C.complex)
    coops = {}
    for n in range(2, min(B.operad.max_arity, S.max_degree) + 1):
        for k in range(B.operad.dim(n)):
            per = {}
            for d in range(n, S.max_degree + 1):
                tb, tidx = S.space.tensor_basis(n, d)
                cols = []
                for X, inc in ((B, ib), (C, ic)):
                    for b in X.space.basis(d) if d <= X.max_degree else []:
                        y = tensor_map(inc, X.rho_basis(n, k, b))
                        cols.append({tidx[t]: v for t, v in y.items()})
                per[d] = Matrix(len(tb), len(cols), cols)
            coops[(n, k)] = per
    Sc = PCoalgebra(B.operad, S, coops, "sum")
    return Sc, CoalgebraMorphism(B, Sc, ib), CoalgebraMorphism(C, Sc, ic)


def product(R, S, max_degree=None):
    """R x S as the equalizer of d0 = P*(rho_R (+) rho_S) and d1 inside P*(R (+) S).

    Returns (product coalgebra, projection to R, projection to S).
    """
    P = R.operad
    D = max_degree or max(R.max_degree, S.max_degree)
    W, iR, iS, pR, pS = direct_sum(R.complex, S.complex)
    F = Cofree(P, W, D)
    FR = Cofree(P, R.complex, D)
    FS = Cofree(P, S.complex, D)
    rhoR, _ = structure_map(R, FR)
    rhoS, _ = structure_map(S, FS)
    T, jR, jS, qR, qS = direct_sum(FR.complex, FS.complex)
    G = Cofree(P, T, D)
    # d0 = P*(rho_R (+) rho_S) on P*(R (+) S)
    rho_sum = jR @ rhoR.map @ pR + jS @ rhoS.map @ pS
    d0 = cofree_map(F, G, rho_sum)
    # d1 = lift of P*(pr_R) (+) P*(pr_S)
    h = jR @ cofree_map(F, FR, pR).map + jS @ cofree_map(F, FS, pS).map
    d1 = cofree_lift(F, h, G)
    # s0 = P*(eps_R (+) eps_S) where eps is the projection P*(X) -> X
    eps = iR @ FR.pi @ qR + iS @ FS.pi @ qS
    s0 = cofree_map(G, F, eps)
    E, inc = equalizer(d0, d1, s0.map)
    prR = CoalgebraMorphism(E, R, pR @ F.pi @ inc.map)
    prS = CoalgebraMorphism(E, S, pS @ F.pi @ inc.map)
    # kept for pairing maps into the product without a solve
    E.factors = (R, S, prR, prS, F, iR, iS, inc)
    return E, prR, prS


def pairing(u, v, E):
    """The morphism (u, v): X -> R x S into a coalgebra built by ``product``."""
    R, S, prR, prS, F, iR, iS, inc = E.factors
    from .envelope import _factor_through
    lifted = cofree_lift(u.source, iR @ _cm(u) + iS @ _cm(v), F)
    return CoalgebraMorphism(u.source, E, _factor_through(inc.map, lifted.map))


def _cm(f):
    return f.map if hasattr(f, "map") else f


def pairing_into_product(u, v, prod):
    """The unique morphism X -> R x S with the given projections (raises if none)."""
    from .solver import solve_coalgebra_morphism
    E, prR, prS = prod
    X = u.source
    conds = [(prR, u), (prS, v)]
    return solve_coalgebra_morphism(X, E, post=conds)


# pushouts -------------------------------------------------------------


def pushout(f, g, keep_left=False):
    """B (+)_A C = (B (+) C)/<f(a) - g(a)> with the induced cooperations.

    With keep_left the basis of B survives in the quotient, so jB is a basis
    inclusion whenever g is injective.  Returns (Q, jB, jC).
    """
    A, B, C = f.source, f.target, g.target
    Ssum, inB, inC = direct_sum_coalgebra(B, C)
    S = Ssum.complex
    D = S.max_degree
    rel = {}
    for d in range(1, D + 1):
        cols = []
        for b in A.space.basis(d) if d <= A.max_degree else []:
            v = inB.map.apply(f.map.apply_basis(b))
            vec_add(v, inC.map.apply(g.map.apply_basis(b)), -1)
            cols.append({i: c for (_, i), c in v.items()})
        rel[d] = Matrix(S.dim(d), len(cols), cols)
    prefer = {d: B.complex.dim(d) for d in range(1, D + 1)} if keep_left else None
    Qc, q = quotient_complex(S, rel, prefer)
    coops = {}
    for n in range(2, min(A.operad.max_arity, D) + 1):
        for k in range(A.operad.dim(n)):
            # descent: rho of every relation must vanish in the quotient
            for d in range(n, D + 1):
                for c in rel[d].cols:
                    y = Ssum.rho_apply(n, {k: 1}, {(d, i): v for i, v in c.items()})
                    if tensor_map(q, y):
                        raise IllFormed("cooperation (%d,%d) does not descend in degree %d"
                                        % (n, k, d))
            per = {}
            for d in range(n, D + 1):
                tb, tidx = Qc.space.tensor_basis(n, d)
                sec = _section(q.comp(d))
                cols = []
                for j in range(Qc.dim(d)):
                    src = sec[j]
                    y = tensor_map(q, Ssum.rho_basis(n, k, (d, src)))
                    cols.append({tidx[t]: v for t, v in y.items()})
                per[d] = Matrix(len(tb), len(cols), cols)
            coops[(n, k)] = per
    Q = PCoalgebra(A.operad, Qc, coops, "pushout")
    jB = CoalgebraMorphism(B, Q, q @ inB.map)
    jC = CoalgebraMorphism(C, Q, q @ inC.map)
    return Q, jB, jC


def _section(qm):
    """For the quotient maps built by quotient_complex: kept index for each target row."""
    out = {}
    for i, c in enumerate(qm.cols):
        if len(c) == 1:
            (r, v), = c.items()
            if v == 1 and r not in out:
                out[r] = i
    return out
