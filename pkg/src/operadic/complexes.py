"""Bounded, positively graded chain complexes over Q and their model structure.

A basis element of a graded space is addressed as ``(degree, index)``.  Degree
0 is always empty.  A complex whose top degree is the truncation of a larger
object carries ``truncated=True``; its homology is then only reported below
the top degree, where it is exact.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct

from .linalg import (
    Matrix, Inconsistent, kernel, solve_many, rref, vec_add, hstack, vstack,
    block_diag, is_injective, is_surjective,
)


class NotAComplex(ValueError):
    pass


class NotAChainMap(ValueError):
    pass


class NoLift(ValueError):
    def __init__(self, message, degree=None):
        super().__init__(message)
        self.degree = degree


class GradedSpace:
    __slots__ = ("max_degree", "labels", "_flat", "_tcache")

    def __init__(self, max_degree, labels):
        if max_degree < 1:
            raise ValueError("max_degree must be positive")
        labs = {}
        for d, ls in labels.items():
            d = int(d)
            if d < 1 or d > max_degree:
                if ls:
                    raise ValueError("degree %d outside 1..%d" % (d, max_degree))
                continue
            ls = tuple(str(x) for x in ls)
            if len(set(ls)) != len(ls):
                raise ValueError("duplicate labels in degree %d" % d)
            labs[d] = ls
        for d in range(1, max_degree + 1):
            labs.setdefault(d, ())
        self.max_degree = max_degree
        self.labels = labs
        self._flat = None
        self._tcache = {}

    @classmethod
    def from_dims(cls, max_degree, dims, prefix="e"):
        return cls(max_degree, {d: ["%s%d_%d" % (prefix, d, i) for i in range(n)]
                                for d, n in dims.items()})

    def dim(self, d):
        return len(self.labels.get(d, ()))

    def dims(self):
        return {d: self.dim(d) for d in range(1, self.max_degree + 1)}

    def total_dim(self):
        return sum(self.dims().values())

    def basis(self, d=None):
        if d is not None:
            return [(d, i) for i in range(self.dim(d))]
        if self._flat is None:
            self._flat = [(d, i) for d in range(1, self.max_degree + 1)
                          for i in range(self.dim(d))]
        return self._flat

    def label(self, b):
        return self.labels[b[0]][b[1]]

    def tensor_basis(self, n, d):
        """Basis of the degree-d part of the n-fold tensor power, lexicographic."""
        key = (n, d)
        hit = self._tcache.get(key)
        if hit is not None:
            return hit
        out = []

        def rec(prefix, remaining, slots):
            if slots == 0:
                if remaining == 0:
                    out.append(tuple(prefix))
                return
            # each later factor needs degree >= 1
            for deg in range(1, remaining - (slots - 1) + 1):
                for i in range(self.dim(deg)):
                    prefix.append((deg, i))
                    rec(prefix, remaining - deg, slots - 1)
                    prefix.pop()

        if n >= 1:
            rec([], d, n)
        out.sort()
        index = {t: k for k, t in enumerate(out)}
        self._tcache[key] = (out, index)
        return out, index

    def __eq__(self, other):
        return isinstance(other, GradedSpace) and self.labels_tuple() == other.labels_tuple()

    def labels_tuple(self):
        return tuple((d, self.labels[d]) for d in range(1, self.max_degree + 1) if self.labels[d])

    def __hash__(self):
        return hash(self.labels_tuple())

    def __repr__(self):
        return "GradedSpace(%d, %r)" % (self.max_degree, self.dims())


def tensor_degree(t):
    return sum(b[0] for b in t)


def koszul_permute(t, perm):
    """Move factor i of tensor t to position perm[i]; return (sign, new tensor)."""
    n = len(t)
    out = [None] * n
    for i, p in enumerate(perm):
        out[p] = t[i]
    sign = 1
    for i in range(n):
        for j in range(i + 1, n):
            if perm[i] > perm[j] and (t[i][0] * t[j][0]) % 2:
                sign = -sign
    return sign, tuple(out)


class ChainComplex:
    """A positively graded complex; ``d[n]`` is the matrix C_n -> C_{n-1} for n >= 2."""

    __slots__ = ("space", "d", "truncated")

    def __init__(self, space, d=None, truncated=False, check=True):
        self.space = space
        D = space.max_degree
        mats = {}
        d = d or {}
        for n in range(2, D + 1):
            m = d.get(n)
            if m is None:
                m = Matrix.zeros(space.dim(n - 1), space.dim(n))
            if m.shape != (space.dim(n - 1), space.dim(n)):
                raise ValueError("d_%d has shape %s, expected %s"
                                 % (n, m.shape, (space.dim(n - 1), space.dim(n))))
            mats[n] = m
        self.d = mats
        self.truncated = truncated
        if check:
            bad = self.square_defect()
            if bad is not None:
                raise NotAComplex("d_%d o d_%d != 0" % (bad - 1, bad))

    @property
    def max_degree(self):
        return self.space.max_degree

    def dim(self, n):
        return self.space.dim(n)

    def dims(self):
        return self.space.dims()

    def diff(self, n):
        """Matrix C_n -> C_{n-1}; zero outside 2..D."""
        if 2 <= n <= self.max_degree:
            return self.d[n]
        return Matrix.zeros(self.dim(n - 1) if n >= 2 else 0, self.dim(n))

    def square_defect(self):
        for n in range(3, self.max_degree + 1):
            if not (self.d[n - 1] @ self.d[n]).is_zero():
                return n
        return None

    def d_basis(self, b):
        """Differential of a basis element as {basis element: coeff}."""
        n, i = b
        if n < 2:
            return {}
        return {(n - 1, r): v for r, v in self.d[n].cols[i].items()}

    def d_tensor(self, t):
        """Differential of a tensor of basis elements, Koszul signs included."""
        out = {}
        before = 0
        for k, b in enumerate(t):
            sign = -1 if before % 2 else 1
            for b2, v in self.d_basis(b).items():
                t2 = t[:k] + (b2,) + t[k + 1:]
                out[t2] = out.get(t2, 0) + sign * v
            before += b[0]
        return {k: v for k, v in out.items() if v}

    def tensor_diff_matrix(self, n, d):
        """Matrix of the differential (C^{(x)n})_d -> (C^{(x)n})_{d-1}."""
        src, _ = self.space.tensor_basis(n, d)
        tgt, tidx = self.space.tensor_basis(n, d - 1)
        cols = []
        for t in src:
            cols.append({tidx[k]: v for k, v in self.d_tensor(t).items()})
        return Matrix(len(tgt), len(src), cols)

    def __eq__(self, other):
        return (isinstance(other, ChainComplex) and self.space == other.space
                and self.d == other.d)

    def __hash__(self):
        return hash((self.space, tuple(sorted(self.d.items()))))

    def __repr__(self):
        return "ChainComplex(dims=%r%s)" % (self.dims(), ", truncated" if self.truncated else "")

    def exact_top(self):
        """Highest degree where homology is exactly that of the represented object."""
        return self.max_degree - 1 if self.truncated else self.max_degree


def zero_complex(max_degree=1):
    return ChainComplex(GradedSpace(max_degree, {}))


def sphere(n, max_degree=None, label="x"):
    D = max_degree or n
    return ChainComplex(GradedSpace(D, {n: [label]}))


def complex_from_dims(dims, d=None, max_degree=None, prefix="e", truncated=False):
    D = max_degree or max([k for k, v in dims.items() if v] or [1])
    return ChainComplex(GradedSpace.from_dims(D, dims, prefix), d or {}, truncated)


class ChainMap:
    """A degree-preserving linear map; ``comps[n]`` is T_n x S_n."""

    __slots__ = ("source", "target", "comps")

    def __init__(self, source, target, comps=None, check=True):
        self.source = source
        self.target = target
        top = max(source.max_degree, target.max_degree)
        out = {}
        comps = comps or {}
        for n in range(1, top + 1):
            m = comps.get(n)
            shape = (target.dim(n), source.dim(n))
            if m is None:
                m = Matrix.zeros(*shape)
            if m.shape != shape:
                raise ValueError("component %d has shape %s, expected %s" % (n, m.shape, shape))
            out[n] = m
        self.comps = out
        if check:
            bad = self.commutation_defect()
            if bad is not None:
                raise NotAChainMap("d o f_%d != f_%d o d" % (bad, bad - 1))

    def comp(self, n):
        m = self.comps.get(n)
        if m is None:
            return Matrix.zeros(self.target.dim(n), self.source.dim(n))
        return m

    def commutation_defect(self):
        top = max(self.source.max_degree, self.target.max_degree)
        for n in range(2, top + 1):
            lhs = self.target.diff(n) @ self.comp(n)
            rhs = self.comp(n - 1) @ self.source.diff(n)
            if lhs != rhs:
                return n
        return None

    def apply_basis(self, b):
        n, i = b
        return {(n, r): v for r, v in self.comp(n).cols[i].items()}

    def apply(self, vec):
        """Apply to a sparse vector {basis element: coeff}."""
        out = {}
        for b, a in vec.items():
            vec_add(out, self.apply_basis(b), a)
        return out

    def apply_tensor(self, t):
        """f^{(x)n} on a basis tensor (degree 0 map, no signs)."""
        acc = {(): Fraction(1)}
        for b in t:
            img = self.apply_basis(b)
            nxt = {}
            for pre, c in acc.items():
                for b2, v in img.items():
                    key = pre + (b2,)
                    nxt[key] = nxt.get(key, 0) + c * v
            acc = {k: v for k, v in nxt.items() if v}
            if not acc:
                return {}
        return acc

    def __matmul__(self, other):
        top = max(self.source.max_degree, self.target.max_degree,
                  other.source.max_degree, other.target.max_degree)
        return ChainMap(other.source, self.target,
                        {n: self.comp(n) @ other.comp(n) for n in range(1, top + 1)},
                        check=False)

    def __add__(self, other):
        return ChainMap(self.source, self.target,
                        {n: self.comp(n) + other.comp(n) for n in self.comps}, check=False)

    def __sub__(self, other):
        return ChainMap(self.source, self.target,
                        {n: self.comp(n) - other.comp(n) for n in self.comps}, check=False)

    def __eq__(self, other):
        if not isinstance(other, ChainMap):
            return NotImplemented
        top = max(self.source.max_degree, self.target.max_degree,
                  other.source.max_degree, other.target.max_degree)
        return all(self.comp(n) == other.comp(n) for n in range(1, top + 1))

    __hash__ = None

    def is_zero(self):
        return all(m.is_zero() for m in self.comps.values())

    def __repr__(self):
        return "ChainMap(%r -> %r)" % (self.source.dims(), self.target.dims())


def identity_map(C):
    return ChainMap(C, C, {n: Matrix.identity(C.dim(n)) for n in range(1, C.max_degree + 1)},
                    check=False)


def zero_map(S, T):
    return ChainMap(S, T, check=False)


# homology -------------------------------------------------------------


@dataclass
class HomologyReport:
    betti: dict
    representatives: dict = field(default_factory=dict)

    def is_zero(self):
        return not any(self.betti.values())


def homology(C):
    """Betti numbers and representative cycles in every exact degree."""
    if C.square_defect() is not None:
        raise NotAComplex("d o d != 0")
    betti, reps = {}, {}
    for n in range(1, C.exact_top() + 1):
        Z = kernel(C.diff(n)) if n >= 2 else Matrix.identity(C.dim(n))
        B = C.diff(n + 1) if n + 1 <= C.max_degree else Matrix.zeros(C.dim(n), 0)
        rb = B.rank()
        betti[n] = Z.ncols - rb
        # extend a basis of B by kernel vectors
        rows = [dict(c) for c in B.cols]
        piv, pivots, _ = rref(rows, C.dim(n))
        chosen = []
        for c in Z.cols:
            before = len(piv)
            trial = dict(piv)
            p2, pv2, _ = rref(list(trial.values()) + [dict(c)], C.dim(n))
            if len(pv2) > before:
                piv = p2
                chosen.append(dict(c))
        reps[n] = chosen
    return HomologyReport(betti, reps)


def homology_map(f, n):
    """Matrix of H_n(f) in the representative bases of source and target."""
    hs, ht = homology(f.source), homology(f.target)
    return _homology_map(f, n, hs, ht)


def _homology_map(f, n, hs, ht):
    T = f.target
    B = T.diff(n + 1) if n + 1 <= T.max_degree else Matrix.zeros(T.dim(n), 0)
    reps = ht.representatives.get(n, [])
    basis = hstack([B, Matrix(T.dim(n), len(reps), reps)], T.dim(n))
    rhs = [f.comp(n).apply(c) for c in hs.representatives.get(n, [])]
    sols, _ = solve_many(basis, rhs)
    cols = []
    for s in sols:
        if s is None:
            raise NotAChainMap("image of a cycle is not a cycle")
        cols.append({j - B.ncols: v for j, v in s.items() if j >= B.ncols})
    return Matrix(len(reps), len(rhs), cols)


def is_quasi_iso(f, top=None):
    hs, ht = homology(f.source), homology(f.target)
    if top is None:
        top = min(f.source.exact_top(), f.target.exact_top())
    for n in range(1, top + 1):
        if hs.betti.get(n, 0) != ht.betti.get(n, 0):
            return False
        m = _homology_map(f, n, hs, ht)
        if m.nrows and m.rank() != m.nrows:
            return False
    return True


def classify_chain_map(f):
    top = max(f.source.max_degree, f.target.max_degree)
    return {
        "weak_equivalence": is_quasi_iso(f),
        "fibration": all(is_surjective(f.comp(n)) for n in range(1, top + 1)),
        "cofibration": all(is_injective(f.comp(n)) for n in range(1, top + 1)),
    }


# constructions --------------------------------------------------------


def cone_of_identity(X):
    """V_n = X_{n-1} (+) X_n with d(x', x) = (-dx', x' + dx); acyclic, X embeds.

    The top degree grows by one so that V is acyclic without truncation.
    """
    D = X.max_degree + 1
    labels = {}
    for n in range(1, D + 1):
        labels[n] = (["s(%s)" % l for l in X.space.labels.get(n - 1, ())]
                     + list(X.space.labels.get(n, ())))
    space = GradedSpace(D, labels)
    d = {}
    for n in range(2, D + 1):
        a, b = X.dim(n - 1), X.dim(n)        # V_n = X_{n-1} + X_n
        a2, b2 = X.dim(n - 2), X.dim(n - 1)  # V_{n-1} = X_{n-2} + X_{n-1}
        dx1 = X.diff(n - 1)                  # X_{n-1} -> X_{n-2}
        dx = X.diff(n) if n <= X.max_degree else Matrix.zeros(b2, b)
        cols = []
        for j in range(a):   # x' in X_{n-1}
            col = {r: -v for r, v in dx1.cols[j].items()}
            col[a2 + j] = Fraction(1)
            cols.append(col)
        for j in range(b):   # x in X_n
            cols.append({a2 + r: v for r, v in dx.cols[j].items()})
        d[n] = Matrix(a2 + b2, a + b, cols)
    V = ChainComplex(space, d)
    emb = {n: Matrix(V.dim(n), X.dim(n), [{X.dim(n - 1) + i: Fraction(1)} for i in range(X.dim(n))])
           for n in range(1, X.max_degree + 1)}
    return V, ChainMap(X, V, emb)


def direct_sum(A, B):
    """A (+) B with inclusions and projections."""
    D = max(A.max_degree, B.max_degree)
    labels = {}
    for n in range(1, D + 1):
        la = ["%s" % l for l in A.space.labels.get(n, ())]
        lb = ["%s" % l for l in B.space.labels.get(n, ())]
        if set(la) & set(lb):
            la = ["L." + l for l in la]
            lb = ["R." + l for l in lb]
        labels[n] = la + lb
    S = ChainComplex(GradedSpace(D, labels),
                     {n: block_diag([A.diff(n), B.diff(n)]) for n in range(2, D + 1)},
                     truncated=A.truncated or B.truncated, check=False)
    ia, ib, pa, pb = {}, {}, {}, {}
    for n in range(1, D + 1):
        a, b = A.dim(n), B.dim(n)
        ia[n] = Matrix(a + b, a, [{i: Fraction(1)} for i in range(a)])
        ib[n] = Matrix(a + b, b, [{a + i: Fraction(1)} for i in range(b)])
        pa[n] = ia[n].transpose()
        pb[n] = ib[n].transpose()
    return (S, ChainMap(A, S, ia, check=False), ChainMap(B, S, ib, check=False),
            ChainMap(S, A, pa, check=False), ChainMap(S, B, pb, check=False))


def subcomplex(C, basis, check=True):
    """Subcomplex spanned by the columns of ``basis[n]`` (C_n x k_n matrices).

    Returns (K, inclusion).  Raises NotAComplex if d does not preserve the span.
    """
    D = C.max_degree
    labels = {n: ["k%d_%d" % (n, i) for i in range(basis[n].ncols)] if n in basis else []
              for n in range(1, D + 1)}
    d = {}
    for n in range(2, D + 1):
        Bn = basis.get(n, Matrix.zeros(C.dim(n), 0))
        Bm = basis.get(n - 1, Matrix.zeros(C.dim(n - 1), 0))
        img = C.diff(n) @ Bn
        sols, _ = solve_many(Bm, [c for c in img.cols])
        if any(s is None for s in sols):
            raise NotAComplex("span is not closed under d in degree %d" % n)
        d[n] = Matrix(Bm.ncols, Bn.ncols, sols)
    K = ChainComplex(GradedSpace(D, labels), d, truncated=C.truncated, check=check)
    inc = ChainMap(K, C, {n: basis.get(n, Matrix.zeros(C.dim(n), 0)) for n in range(1, D + 1)},
                   check=False)
    return K, inc


def quotient_complex(C, rel, prefer_from=None):
    """C / span(rel[n]) with the quotient map.  Basis = complementary standard vectors.

    With ``prefer_from = {n: k}`` the killed basis vectors are taken among
    indices >= k whenever possible, so the first k basis vectors survive.
    """
    D = C.max_degree
    qmaps, secs, labels = {}, {}, {}
    for n in range(1, D + 1):
        R = rel.get(n, Matrix.zeros(C.dim(n), 0))
        dim = C.dim(n)
        k0 = (prefer_from or {}).get(n, 0)
        # rotate columns so that rref picks pivots from the preferred block first
        rot = lambda i: (i - k0) % dim if dim else i
        unrot = lambda i: (i + k0) % dim if dim else i
        rpiv, _, _ = rref([{rot(i): v for i, v in c.items()} for c in R.cols], dim)
        piv = {unrot(p): {unrot(i): v for i, v in row.items()} for p, row in rpiv.items()}
        keep = [i for i in range(C.dim(n)) if i not in piv]
        pos = {i: k for k, i in enumerate(keep)}
        cols = []
        for i in range(C.dim(n)):
            if i in pos:
                cols.append({pos[i]: Fraction(1)})
            else:
                # reduced pivot rows vanish on other pivots, so only kept indices remain
                cols.append({pos[j]: -v for j, v in piv[i].items() if j != i})
        qmaps[n] = Matrix(len(keep), C.dim(n), cols)
        secs[n] = Matrix(C.dim(n), len(keep), [{i: Fraction(1)} for i in keep])
        labels[n] = [C.space.labels[n][i] for i in keep]
    d = {n: qmaps[n - 1] @ C.diff(n) @ secs[n] for n in range(2, D + 1)}
    Q = ChainComplex(GradedSpace(D, labels), d, truncated=C.truncated)
    q = ChainMap(C, Q, qmaps)
    return Q, q


# lifting --------------------------------------------------------------


def chain_lift(i, p, a, b):
    """Solve h: B -> X with h i = a, p h = b, h a chain map (all degrees jointly).

    Raises NoLift naming the first degree where the system is inconsistent.
    """
    A, B = i.source, i.target
    X, Y = p.source, p.target
    if (p @ a) != (b @ i):
        raise ValueError("square does not commute")
    top = max(B.max_degree, X.max_degree)
    # unknowns: h_n entries, column-major per degree
    offs, size = {}, 0
    for n in range(1, top + 1):
        offs[n] = size
        size += X.dim(n) * B.dim(n)

    def var(n, r, c):
        return offs[n] + c * X.dim(n) + r

    rows, rhs, tags = [], [], []
    for n in range(1, top + 1):
        xn, bn, an = X.dim(n), B.dim(n), A.dim(n)
        # h_n i_n = a_n
        iN, aN = i.comp(n), a.comp(n)
        for c in range(an):
            for r in range(xn):
                row = {}
                for k, v in iN.cols[c].items():
                    row[var(n, r, k)] = v
                rows.append(row)
                rhs.append(aN[r, c])
                tags.append(n)
        # p_n h_n = b_n
        pN, bN = p.comp(n), b.comp(n)
        prow = pN.row_dicts()
        for c in range(bn):
            for r in range(Y.dim(n)):
                row = {var(n, k, c): v for k, v in prow[r].items()}
                rows.append(row)
                rhs.append(bN[r, c])
                tags.append(n)
        # d h_n = h_{n-1} d
        if n >= 2:
            dX = X.diff(n).row_dicts()
            dB = B.diff(n)
            for c in range(bn):
                for r in range(X.dim(n - 1)):
                    row = {var(n, k, c): v for k, v in dX[r].items()}
                    for k, v in dB.cols[c].items():
                        key = var(n - 1, r, k)
                        row[key] = row.get(key, 0) - v
                    rows.append(row)
                    rhs.append(Fraction(0))
                    tags.append(n)
    M = Matrix.from_row_dicts(rows, size)
    sols, _ = solve_many(M, [{k: v for k, v in enumerate(rhs) if v}])
    if sols[0] is None:
        # locate the blocking degree by solving growing prefixes
        for n in range(1, top + 1):
            keep = [k for k, t in enumerate(tags) if t <= n]
            Mn = Matrix.from_row_dicts([rows[k] for k in keep], size)
            s, _ = solve_many(Mn, [{j: rhs[k] for j, k in enumerate(keep) if rhs[k]}])
            if s[0] is None:
                raise NoLift("no chain lift: inconsistent in degree %d" % n, n)
        raise NoLift("no chain lift")
    x = sols[0]
    comps = {}
    for n in range(1, top + 1):
        cols = [{} for _ in range(B.dim(n))]
        for c in range(B.dim(n)):
            for r in range(X.dim(n)):
                v = x.get(var(n, r, c))
                if v:
                    cols[c][r] = v
        comps[n] = Matrix(X.dim(n), B.dim(n), cols)
    h = ChainMap(B, X, comps)
    assert h @ i == a and p @ h == b
    return h


def chain_maps_space(S, T, vanish_on=None):
    """Basis of all chain maps S -> T, each given as {degree: Matrix}.

    With ``vanish_on = i: A -> S`` only maps g with g i = 0 are returned.
    """
    top = max(S.max_degree, T.max_degree)
    offs, size = {}, 0
    for n in range(1, top + 1):
        offs[n] = size
        size += T.dim(n) * S.dim(n)
    rows = []
    for n in range(2, top + 1):
        dT = T.diff(n).row_dicts()
        dS = S.diff(n)
        for c in range(S.dim(n)):
            for r in range(T.dim(n - 1)):
                row = {offs[n] + c * T.dim(n) + k: v for k, v in dT[r].items()}
                for k, v in dS.cols[c].items():
                    key = offs[n - 1] + k * T.dim(n - 1) + r
                    row[key] = row.get(key, 0) - v
                rows.append(row)
    if vanish_on is not None:
        for n in range(1, top + 1):
            im = vanish_on.comp(n)
            for c in range(im.ncols):
                for r in range(T.dim(n)):
                    rows.append({offs[n] + k * T.dim(n) + r: v for k, v in im.cols[c].items()})
    K = kernel(Matrix.from_row_dicts(rows, size))
    out = []
    for vec in K.cols:
        comps = {}
        for n in range(1, top + 1):
            cols = [{} for _ in range(S.dim(n))]
            for c in range(S.dim(n)):
                for r in range(T.dim(n)):
                    v = vec.get(offs[n] + c * T.dim(n) + r)
                    if v:
                        cols[c][r] = v
            comps[n] = Matrix(T.dim(n), S.dim(n), cols)
        out.append(comps)
    return out


def random_chain_map(S, T, rng, spread=2, vanish_on=None):
    """A pseudo-random chain map with small integer coordinates in the chain-map basis."""
    top = max(S.max_degree, T.max_degree)
    acc = {n: Matrix.zeros(T.dim(n), S.dim(n)) for n in range(1, top + 1)}
    for comps in chain_maps_space(S, T, vanish_on):
        a = rng.randint(-spread, spread)
        if a:
            acc = {n: acc[n] + comps[n].scale(a) for n in acc}
    return ChainMap(S, T, acc)
