"""Sigma-modules, operads given by partial compositions, and their duals.

Conventions.  Sigma_n acts on the right of M(n); ``gens[n][a]`` is the matrix
of mu -> mu . s_a where s_a swaps a and a+1 (0-based).  Partial compositions
are indexed 1-based as usual: ``comps[(m, n, i)]`` is the matrix of
P(m) (x) P(n) -> P(m+n-1), mu (x) nu -> mu o_i nu, with column a*dim P(n) + b.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct

from .linalg import Matrix, vec_add, solve_many, independent_pivot_rows
from . import perms


class BadOperad(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    kind: str
    witness: tuple

    def __str__(self):
        return "%s at %r" % (self.kind, self.witness)


class SigmaModule:
    def __init__(self, max_arity, dims, gens, labels=None):
        self.max_arity = max_arity
        self.dims = {n: int(dims.get(n, 0)) for n in range(1, max_arity + 1)}
        self.gens = {}
        for n in range(1, max_arity + 1):
            g = list(gens.get(n, []))
            if self.dims[n] and len(g) != n - 1:
                raise BadOperad("arity %d needs %d transposition matrices" % (n, n - 1))
            if not self.dims[n]:
                g = [Matrix.zeros(0, 0)] * (n - 1)
            for T in g:
                if T.shape != (self.dims[n], self.dims[n]):
                    raise BadOperad("transposition matrix in arity %d has wrong shape" % n)
            self.gens[n] = g
        self.labels = labels or {n: ["%d.%d" % (n, k) for k in range(self.dims[n])]
                                 for n in range(1, max_arity + 1)}
        self._rep = {}

    def dim(self, n):
        return self.dims.get(n, 0)

    def rep(self, n, s):
        """Matrix of mu -> mu . s."""
        key = (n, s)
        hit = self._rep.get(key)
        if hit is None:
            hit = Matrix.identity(self.dim(n))
            for a in perms.word(s):
                hit = self.gens[n][a] @ hit
            self._rep[key] = hit
        return hit

    def act(self, n, vec, s):
        return self.rep(n, s).apply(vec)

    def presentation_violations(self):
        out = []
        for n in range(2, self.max_arity + 1):
            g = self.gens[n]
            I = Matrix.identity(self.dim(n))
            for a in range(n - 1):
                if g[a] @ g[a] != I:
                    out.append(Violation("involution", (n, a)))
                if a + 1 < n - 1:
                    x = g[a] @ g[a + 1]
                    if x @ x @ x != I:
                        out.append(Violation("braid", (n, a)))
                for b in range(a + 2, n - 1):
                    if g[a] @ g[b] != g[b] @ g[a]:
                        out.append(Violation("commutation", (n, a, b)))
        return out

    def dual(self):
        return SigmaModule(self.max_arity, self.dims,
                           {n: [T.transpose() for T in g] for n, g in self.gens.items()},
                           {n: ["%s*" % l for l in ls] for n, ls in self.labels.items()})


class Operad:
    """An operad with P(0) = 0 and P(1) spanned by the unit."""

    kind = "operad"

    def __init__(self, module, unit, comps, name=None, check=True):
        self.module = module
        self.name = name
        N = module.max_arity
        if module.dim(1) != 1:
            raise BadOperad("P(1) must be one-dimensional")
        unit = {k: Fraction(v) for k, v in dict(unit).items() if v}
        if set(unit) != {0}:
            raise BadOperad("unit must be a nonzero vector of P(1)")
        self.unit = unit
        c = unit[0]
        table = {}
        for (m, n, i), M in comps.items():
            if not (1 <= i <= m and m + n - 1 <= N):
                raise BadOperad("composition %r out of range" % ((m, n, i),))
            shape = (module.dim(m + n - 1), module.dim(m) * module.dim(n))
            if M.shape != shape:
                raise BadOperad("composition %r has shape %s, expected %s" % ((m, n, i), M.shape, shape))
            table[(m, n, i)] = M
        # unit compositions are forced: (c e) o_1 mu = mu and mu o_i (c e) = mu
        for n in range(1, N + 1):
            d = module.dim(n)
            table.setdefault((1, n, 1), Matrix.identity(d).scale(1 / c))
            for i in range(1, n + 1):
                table.setdefault((n, 1, i), Matrix.identity(d).scale(1 / c))
        for m in range(2, N + 1):
            for n in range(2, N + 2 - m):
                for i in range(1, m + 1):
                    if (m, n, i) not in table:
                        if module.dim(m) and module.dim(n) and module.dim(m + n - 1):
                            raise BadOperad("missing composition %d,%d,%d" % (m, n, i))
                        table[(m, n, i)] = Matrix.zeros(module.dim(m + n - 1),
                                                        module.dim(m) * module.dim(n))
        self.comps = table
        if check:
            bad = check_operad_axioms(self)
            if bad:
                raise BadOperad("operad axioms fail: %s" % bad[0])

    @property
    def max_arity(self):
        return self.module.max_arity

    def dim(self, n):
        return self.module.dim(n)

    def rep(self, n, s):
        return self.module.rep(n, s)

    def compose(self, m, n, i, x, y):
        """x o_i y for sparse vectors x in P(m), y in P(n)."""
        if m + n - 1 > self.max_arity:
            return {}
        M = self.comps[(m, n, i)]
        dn = self.dim(n)
        out = {}
        for a, u in x.items():
            for b, v in y.items():
                vec_add(out, M.cols[a * dn + b], u * v)
        return out

    def total(self, n, x, qs):
        """gamma(x; q_1..q_n) for x in P(n) and qs = [(arity, vector)], inserting right to left."""
        cur, arity = x, n
        for i in range(n, 0, -1):
            k, y = qs[i - 1]
            if arity + k - 1 > self.max_arity:
                return {}
            cur = self.compose(arity, k, i, cur, y)
            arity += k - 1
            if not cur:
                return {}
        return cur

    def labels(self, n):
        return self.module.labels[n]

    def truncate(self, N):
        """The quotient by all arities above N (again an operad)."""
        N = min(N, self.max_arity)
        mod = SigmaModule(N, {n: self.dim(n) for n in range(1, N + 1)},
                          {n: self.module.gens[n] for n in range(1, N + 1)},
                          {n: self.module.labels[n] for n in range(1, N + 1)})
        comps = {k: v for k, v in self.comps.items() if k[0] + k[1] - 1 <= N}
        return Operad(mod, self.unit, comps, self.name, check=False)

    def __repr__(self):
        return "Operad(%s, dims=%r)" % (self.name or "?", self.module.dims)


class Cooperad:
    """Dual of an operad: decomposition tables are transposes of compositions."""

    kind = "cooperad"

    def __init__(self, module, counit, decomps, name=None):
        self.module = module
        self.counit = counit
        self.decomps = decomps
        self.name = name

    @property
    def max_arity(self):
        return self.module.max_arity

    def dim(self, n):
        return self.module.dim(n)


def dualize(P):
    """Operad -> cooperad and back; tables are transposed, so this is an involution."""
    if isinstance(P, Operad):
        return Cooperad(P.module.dual(), dict(P.unit),
                        {k: v.transpose() for k, v in P.comps.items()},
                        (P.name + "*") if P.name else None)
    mod = P.module.dual()
    name = P.name[:-1] if P.name and P.name.endswith("*") else P.name
    return Operad(mod, P.counit, {k: v.transpose() for k, v in P.decomps.items()}, name)


# axioms ---------------------------------------------------------------


def _basis(d):
    return [{k: Fraction(1)} for k in range(d)]


def check_operad_axioms(P):
    """Every violated identity with a witness; an empty list means P is an operad."""
    out = list(P.module.presentation_violations())
    N = P.max_arity
    e = P.unit
    # unit
    for n in range(1, N + 1):
        for b, x in enumerate(_basis(P.dim(n))):
            if P.compose(1, n, 1, e, x) != x:
                out.append(Violation("left unit", (n, b)))
            for i in range(1, n + 1):
                if P.compose(n, 1, i, x, e) != x:
                    out.append(Violation("right unit", (n, i, b)))
    arities = [n for n in range(2, N + 1) if P.dim(n)]
    # sequential and parallel associativity
    for l in arities:
        for m in arities:
            for n in arities:
                if l + m + n - 2 > N:
                    continue
                for a, b, c in iproduct(range(P.dim(l)), range(P.dim(m)), range(P.dim(n))):
                    x, y, z = {a: Fraction(1)}, {b: Fraction(1)}, {c: Fraction(1)}
                    for i in range(1, l + 1):
                        xy = P.compose(l, m, i, x, y)
                        for j in range(1, m + 1):
                            lhs = P.compose(l + m - 1, n, i - 1 + j, xy, z)
                            rhs = P.compose(l, m + n - 1, i, x, P.compose(m, n, j, y, z))
                            if lhs != rhs:
                                out.append(Violation("sequential associativity",
                                                     (l, a, i, m, b, j, n, c)))
                        for k in range(i + 1, l + 1):
                            lhs = P.compose(l + m - 1, n, k - 1 + m, xy, z)
                            rhs = P.compose(l + n - 1, m, i, P.compose(l, n, k, x, z), y)
                            if lhs != rhs:
                                out.append(Violation("parallel associativity",
                                                     (l, a, i, m, b, k, n, c)))
    # equivariance on generators
    for m in arities:
        for n in arities:
            if m + n - 1 > N:
                continue
            for a, b in iproduct(range(P.dim(m)), range(P.dim(n))):
                x, y = {a: Fraction(1)}, {b: Fraction(1)}
                for i in range(1, m + 1):
                    for g in range(n - 1):
                        s = perms.adjacent(g, n)
                        lhs = P.compose(m, n, i, x, P.module.act(n, y, s))
                        rhs = P.module.act(m + n - 1, P.compose(m, n, i, x, y),
                                           perms.insert(m, i - 1, s))
                        if lhs != rhs:
                            out.append(Violation("inner equivariance", (m, a, i, n, b, g)))
                    for g in range(m - 1):
                        s = perms.adjacent(g, m)
                        lhs = P.compose(m, n, i, P.module.act(m, x, s), y)
                        rhs = P.module.act(m + n - 1, P.compose(m, n, s[i - 1] + 1, x, y),
                                           outer_block(s, m, n, i))
                        if lhs != rhs:
                            out.append(Violation("outer equivariance", (m, a, i, n, b, g)))
    return out


def outer_block(s, m, n, i):
    """Block permutation relating (mu.s) o_i nu to (mu o_{s(i)} nu)."""
    sizes = [1] * m
    sizes[s[i - 1]] = n
    return perms.inverse(perms.block(perms.inverse(s), sizes))


# built-ins ------------------------------------------------------------


def _as_compose(u, v, i):
    """Substitute word v for the letter i (0-based) of word u."""
    m = len(v)
    out = []
    for x in u:
        if x == i:
            out.extend(i + y for y in v)
        elif x > i:
            out.append(x + m - 1)
        else:
            out.append(x)
    return tuple(out)


def builtin_as(N=4):
    basis = {n: perms.all_perms(n) for n in range(1, N + 1)}
    index = {n: {w: k for k, w in enumerate(b)} for n, b in basis.items()}
    gens = {}
    for n in range(1, N + 1):
        g = []
        for a in range(n - 1):
            t = perms.adjacent(a, n)
            g.append(Matrix(len(basis[n]), len(basis[n]),
                            [{index[n][perms.compose(t, w)]: Fraction(1)} for w in basis[n]]))
        gens[n] = g
    comps = {}
    for m in range(1, N + 1):
        for n in range(1, N + 2 - m):
            for i in range(1, m + 1):
                cols = [{index[m + n - 1][_as_compose(u, v, i - 1)]: Fraction(1)}
                        for u in basis[m] for v in basis[n]]
                comps[(m, n, i)] = Matrix(len(basis[m + n - 1]), len(cols), cols)
    labels = {n: ["".join("x%d" % (k + 1) for k in w) for w in basis[n]] for n in basis}
    mod = SigmaModule(N, {n: len(b) for n, b in basis.items()}, gens, labels)
    return Operad(mod, {0: 1}, comps, "As", check=False)


def builtin_com(N=4):
    one = Matrix.identity(1)
    gens = {n: [one] * (n - 1) for n in range(1, N + 1)}
    comps = {(m, n, i): one for m in range(1, N + 1) for n in range(1, N + 2 - m)
             for i in range(1, m + 1)}
    labels = {n: ["x1..x%d" % n] for n in range(1, N + 1)}
    mod = SigmaModule(N, {n: 1 for n in range(1, N + 1)}, gens, labels)
    return Operad(mod, {0: 1}, comps, "Com", check=False)


def builtin_lie3():
    """Lie up to arity 3, realized inside As by commutators."""
    A = builtin_as(3)
    idx = {n: {w: k for k, w in enumerate(perms.all_perms(n))} for n in (1, 2, 3)}

    def word(*ws):
        v = {}
        for c, w in ws:
            vec_add(v, {idx[len(w)][w]: Fraction(1)}, c)
        return v

    br = word((1, (0, 1)), (-1, (1, 0)))
    # [[x1,x2],x3] and [[x1,x3],x2]
    b1 = A.compose(2, 2, 1, br, br)
    b2 = A.module.act(3, b1, (0, 2, 1))
    emb = {1: Matrix(1, 1, [{0: Fraction(1)}]), 2: Matrix(2, 1, [br]), 3: Matrix(6, 2, [b1, b2])}
    rows = {n: independent_pivot_rows(emb[n]) for n in emb}

    def coords(n, v):
        sols, _ = solve_many(emb[n], [v])
        if sols[0] is None:
            raise BadOperad("Lie subspace not closed")
        return sols[0]

    gens = {}
    for n in (1, 2, 3):
        g = []
        for a in range(n - 1):
            t = perms.adjacent(a, n)
            g.append(Matrix(emb[n].ncols, emb[n].ncols,
                            [coords(n, A.module.act(n, c, t)) for c in emb[n].cols]))
        gens[n] = g
    comps = {}
    for m in (1, 2, 3):
        for n in range(1, 4 - m + 1):
            for i in range(1, m + 1):
                cols = [coords(m + n - 1, A.compose(m, n, i, x, y))
                        for x in emb[m].cols for y in emb[n].cols]
                comps[(m, n, i)] = Matrix(emb[m + n - 1].ncols, len(cols), cols)
    labels = {1: ["x1"], 2: ["[x1,x2]"], 3: ["[[x1,x2],x3]", "[[x1,x3],x2]"]}
    mod = SigmaModule(3, {1: 1, 2: 1, 3: 2}, gens, labels)
    return Operad(mod, {0: 1}, comps, "Lie3", check=False)


def builtin_operad(name, max_arity=4):
    key = name.lower()
    if key == "as":
        return builtin_as(max_arity)
    if key == "com":
        return builtin_com(max_arity)
    if key in ("lie3", "lie"):
        return builtin_lie3()
    raise KeyError("unknown operad %r" % name)
