"""Degree-by-degree solver for structure-preserving maps.

A coalgebra (or algebra) morphism h is determined degree by degree: once
h is known below degree d, every constraint on h_d is affine,

    L_d h_d(x) = R_d(x)    for each basis vector x,

plus prescribed values h_d(u) = a(u) on some vectors u.  One elimination of
L_d with all right-hand sides at once gives h_d.  Free variables are set to
zero unless an rng is given, in which case small random kernel combinations
are added (used to sample morphisms).

Constraints in degree d are quadratic in the lower components, so a zero
choice can block a later degree.  When that happens the solve is repeated
with a linear look-ahead over all higher degrees, then with a bounded search
over shifts of the lowest free degree (see _with_lookahead).  Failure after
the search means no lift was found, not that none exists.
"""

from fractions import Fraction

from .linalg import Matrix, vstack, solve_many, kernel, inverse, hstack, rref, vec_add
from .complexes import ChainMap


class NoSolution(ValueError):
    def __init__(self, message, degree=None):
        super().__init__(message)
        self.degree = degree


class StratifiedResult:
    def __init__(self, comps, free):
        self.comps = comps
        self.free = free      # degree -> number of free parameters met

    @property
    def unique(self):
        return not any(self.free.values())


def stratified_solve(src_dims, tgt_dims, top, lhs, rhs, fixed, rng=None, lookahead=None):
    """Solve for comps[d] (tgt_dim(d) x src_dim(d)) for d = 1..top.

    lhs(d) -> Matrix with tgt_dims(d) columns; rhs(d, comps, k) -> sparse
    vector over the rows of lhs(d) for the k-th source basis vector (affine
    part may depend on lower comps); fixed(d, comps) -> list of (u, value) sparse
    vectors fixing h_d(u) = value (it may read the lower comps).
    lookahead(d, comps, L, R, pairs) -> h_d replaces the per-degree choice.
    """
    comps = {}
    free = {}
    for d in range(1, top + 1):
        ns, nt = src_dims(d), tgt_dims(d)
        if ns == 0:
            comps[d] = Matrix(nt, 0)
            free[d] = 0
            continue
        L = lhs(d)
        R = [rhs(d, comps, k) for k in range(ns)]
        pairs = fixed(d, comps)
        # independent prescribed vectors, consistency of the dependent ones
        U = Matrix(ns, len(pairs), [u for u, _ in pairs])
        Vals = Matrix(nt, len(pairs), [v for _, v in pairs])
        if pairs:
            rel = kernel(U)
            if not (Vals @ rel).is_zero():
                raise NoSolution("prescribed values are inconsistent in degree %d" % d, d)
        indep = []
        seen = {}
        for j, (u, _) in enumerate(pairs):
            p2, pv2, _ = rref(list(seen.values()) + [dict(u)], ns)
            if len(pv2) > len(seen):
                seen = p2
                indep.append(j)
        used = set(seen)
        comp_cols = [k for k in range(ns) if k not in used]
        # check the prescribed values against the constraints
        for j in indep:
            u, val = pairs[j]
            target = {}
            for k, c in u.items():
                vec_add(target, R[k], c)
            if L.apply(val) != target:
                raise NoSolution("prescribed values violate the constraints in degree %d" % d, d)
        sols, ker = solve_many(L, [R[k] for k in comp_cols])
        for k, s in zip(comp_cols, sols):
            if s is None:
                raise NoSolution("no solution in degree %d" % d, d)
        free[d] = ker.ncols * len(comp_cols)
        if lookahead is not None:
            comps[d] = lookahead(d, comps, L, R, pairs)
            continue
        if rng is not None and ker.ncols:
            sols = [_jitter(s, ker, rng) for s in sols]
        basis_cols = [pairs[j][0] for j in indep] + [{k: Fraction(1)} for k in comp_cols]
        value_cols = [pairs[j][1] for j in indep] + sols
        B = Matrix(ns, ns, basis_cols)
        comps[d] = Matrix(nt, ns, value_cols) @ inverse(B)
    return StratifiedResult(comps, free)


class LinearLookahead:
    """Joint solve of degree d with the linear constraints of degrees d+1..top.

    pre and post are lists of (i, a) and (p, b) chain maps.  With an rng the
    joint solution is jittered along its kernel, so random choices in degree d
    respect the linear constraints above it.
    """

    def __init__(self, S, T, top, pre, post, rng=None, shift=None):
        self.S, self.T, self.top = S, T, top
        self.pre, self.post = pre, post
        self.rng = rng
        self.shift = shift or {}     # degree -> coefficients on kernel directions
        self.directions = {}         # degree -> kernel directions met, as h_d matrices

    def __call__(self, d, comps, L, R, pairs):
        S, T = self.S, self.T
        index, n = {}, 0
        for e in range(d, self.top + 1):
            index[e] = n
            n += T.dim(e) * S.dim(e)

        def var(e, r, c):
            return index[e] + c * T.dim(e) + r

        rows, rhs = [], []

        def add(row, val):
            row = {k: v for k, v in row.items() if v}
            if row or val:
                rows.append(row)
                rhs.append(val)

        for c in range(S.dim(d)):
            for q, lrow in enumerate(L.row_dicts()):
                add({var(d, k, c): v for k, v in lrow.items()}, R[c].get(q, 0))
        for u, val in pairs:
            for r in range(T.dim(d)):
                add({var(d, r, j): x for j, x in u.items()}, val.get(r, 0))
        nd, local = T.dim(d) * S.dim(d), len(rows)
        for e in range(d + 1, self.top + 1):
            Td, Sd = T.diff(e), S.diff(e)
            for c in range(S.dim(e)):
                for r in range(T.dim(e - 1)):
                    row = {var(e, k, c): col.get(r, 0) for k, col in enumerate(Td.cols)}
                    for j, x in Sd.cols[c].items():
                        row[var(e - 1, r, j)] = row.get(var(e - 1, r, j), 0) - x
                    add(row, 0)
            for i, a in self.pre:
                for w in range(i.comp(e).ncols):
                    for r in range(T.dim(e)):
                        add({var(e, r, j): x for j, x in i.comp(e).cols[w].items()},
                            a.comp(e).cols[w].get(r, 0))
            for p, b in self.post:
                P = p.comp(e)
                for c in range(S.dim(e)):
                    for r, prow in enumerate(P.row_dicts()):
                        add({var(e, k, c): v for k, v in prow.items()}, b.comp(e).cols[c].get(r, 0))
        # shifted candidates start from the degree-d constraints alone
        (x0,), ker0 = solve_many(Matrix.from_row_dicts(rows[:local], nd),
                                 [{r: v for r, v in enumerate(rhs[:local]) if v}])
        self.directions[d] = ker0.cols
        if d in self.shift and x0 is not None:
            x = dict(x0)
            for c, k in zip(self.shift[d], ker0.cols):
                if c:
                    vec_add(x, k, c)
        else:
            M = Matrix.from_row_dicts(rows, n)
            sols, ker = solve_many(M, [{r: v for r, v in enumerate(rhs) if v}])
            if sols[0] is None:
                raise NoSolution("no solution in degree %d" % d, d)
            x = sols[0]
            if self.rng is not None and ker.ncols:
                x = _jitter(x, ker, self.rng)
        cols = [{r: x[var(d, r, c)] for r in range(T.dim(d)) if x.get(var(d, r, c))}
                for c in range(S.dim(d))]
        return Matrix(T.dim(d), S.dim(d), cols)


SEARCH_SCALARS = (1, -1, 2, -2, Fraction(1, 2), Fraction(-1, 2), 3, -3)
SEARCH_DIRECTIONS = 12


def _shifts(n):
    for j in range(n):
        for t in SEARCH_SCALARS:
            yield [t if k == j else 0 for k in range(n)]
    for j in range(n):
        for k in range(j + 1, n):
            for s in (1, -1):
                for t in (1, -1):
                    v = [0] * n
                    v[j], v[k] = s, t
                    yield v


def _with_lookahead(solve, C, T, top, pre, post, rng):
    """Greedy solve, then the linear look-ahead, then a bounded search.

    Constraints are quadratic in lower components, so a linear choice in
    degree d can block degree d + 1 although another choice extends.  The
    search shifts the lowest degree below the failure that has freedom
    along a few kernel directions and solves again.
    """
    if rng is not None:
        return solve(LinearLookahead(C, T, top, pre, post, rng))
    try:
        return solve(None)
    except NoSolution:
        pass
    la = LinearLookahead(C, T, top, pre, post)
    try:
        return solve(la)
    except NoSolution as e:
        failure = e
    free = [d for d in sorted(la.directions) if la.directions[d] and
            (failure.degree is None or d < failure.degree)]
    if not free:
        raise failure
    d = free[0]
    n = min(len(la.directions[d]), SEARCH_DIRECTIONS)
    for v in _shifts(n):
        try:
            return solve(LinearLookahead(C, T, top, pre, post, shift={d: v}))
        except NoSolution:
            continue
    raise failure


def _jitter(s, ker, rng):
    out = dict(s)
    for c in ker.cols:
        a = rng.randint(-2, 2)
        if a:
            vec_add(out, c, a)
    return out


def solve_coalgebra_morphism(X, Y, pre=(), post=(), rng=None, result=False):
    """A coalgebra morphism h: X -> Y with h i = a for (i, a) in pre and p h = b for (p, b) in post.

    ``pre`` maps and ``post`` maps are CoalgebraMorphism or ChainMap objects.
    Raises NoSolution naming the degree where no extension exists.
    """
    from .coalgebras import CoalgebraMorphism, tensor_map
    P = X.operad
    C, T = X.complex, Y.complex
    top = X.max_degree
    pre = [(_cm(i), _cm(a)) for i, a in pre]
    post = [(_cm(p), _cm(b)) for p, b in post]
    ops = [(n, k) for n in range(2, min(P.max_arity, top) + 1) for k in range(P.dim(n))]

    def lhs(d):
        blocks = [T.diff(d)] if d >= 2 else []
        for n, k in ops:
            if n <= d:
                blocks.append(Y.rho(n, k, d) if d <= Y.max_degree else Matrix(0, 0))
        for p, _ in post:
            blocks.append(p.comp(d))
        blocks = [b for b in blocks if b.nrows]
        if not blocks:
            return Matrix(0, T.dim(d))
        return vstack(blocks)

    def rhs(d, comps, k):
        x = (d, k)
        out = {}
        off = 0
        h = ChainMap(C, T, {e: comps[e] for e in comps}, check=False)
        if d >= 2 and T.dim(d - 1):
            dx = C.d_basis(x)
            for (e, i), c in dx.items():
                for r, v in comps[e].cols[i].items():
                    out[off + r] = out.get(off + r, 0) + c * v
            off += T.dim(d - 1)
        for n, kk in ops:
            if n > d:
                continue
            rows = len(T.space.tensor_basis(n, d)[0])
            if not rows:
                continue
            _, tidx = T.space.tensor_basis(n, d)
            y = tensor_map(h, X.rho_basis(n, kk, x))
            for t, v in y.items():
                out[off + tidx[t]] = out.get(off + tidx[t], 0) + v
            off += rows
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
        return pairs

    res = _with_lookahead(lambda la: stratified_solve(C.dim, T.dim, top, lhs, rhs, fixed, rng, la),
                          C, T, top, pre, post, rng)
    h = CoalgebraMorphism(X, Y, ChainMap(C, T, res.comps, check=False))
    if result:
        return h, res
    return h


def _cm(f):
    return f.map if hasattr(f, "map") else f
