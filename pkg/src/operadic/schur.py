"""Evaluation of a Sigma-module on a chain complex: M(C) = (+)_n M(n) (x)_{Sigma_n} C^(x)n.

Sigma_n acts on the left of M(n) (x) C^(x)n by s.(m (x) t) = m.s^-1 (x) L(s) t, where
L(s) moves tensor factor i to slot s(i) with the Koszul sign.  Basis tensors
fall into orbits with a sorted representative t0 whose stabilizer permutes
equal factors, each swap contributing (-1)^deg.  For every orbit the summand is
the twisted fixed space Fix(t0) = {m : eps(s) m.s = m for s in Stab(t0)}, with basis
m_1..m_r.  Basis element (n, t0, j) stands for

  * the class [m_j (x) t0] in the coinvariant model, and
  * the invariant vector v_j whose t0-component is m_j in the invariant model.

The two models are identified by the norm map, which sends [m_j (x) t0] to
|Stab(t0)|/n! * v_j.
"""

from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import factorial

from .linalg import (
    Matrix, kernel, vstack, hstack, image_basis, inverse, vec_add, independent_pivot_rows,
)
from .complexes import ChainComplex, GradedSpace, koszul_permute, tensor_degree
from . import perms


def orbit_rep(t):
    """(t0, tau, s) with t0 sorted and t = s * L(tau) t0."""
    t0 = tuple(sorted(t))
    slots = {}
    for pos, b in enumerate(t):
        slots.setdefault(b, []).append(pos)
    used = {}
    tau = []
    for b in t0:
        k = used.get(b, 0)
        tau.append(slots[b][k])
        used[b] = k + 1
    tau = tuple(tau)
    sign, t2 = koszul_permute(t0, tau)
    assert t2 == t
    return t0, tau, sign


def stab_key(t0):
    """Generators of the stabilizer of a sorted tensor with their signs."""
    return tuple((a, -1 if t0[a][0] % 2 else 1)
                 for a in range(len(t0) - 1) if t0[a] == t0[a + 1])


def stab_order(t0):
    out, run = 1, 1
    for a in range(1, len(t0) + 1):
        if a < len(t0) and t0[a] == t0[a - 1]:
            run += 1
        else:
            out *= factorial(run)
            run = 1
    return out


class FixData:
    """Twisted fixed space of a stabilizer inside M(n) with coordinate maps."""

    __slots__ = ("basis", "proj", "pivots", "pivot_inv", "rank")

    def __init__(self, M, n, key):
        d = M.dim(n)
        I = Matrix.identity(d)
        if key:
            rels = [M.gens[n][a].scale(e) - I for a, e in key]
            fix = kernel(vstack(rels))
            relb = image_basis(hstack(rels))
        else:
            fix = I
            relb = Matrix.zeros(d, 0)
        self.basis = fix
        self.rank = fix.ncols
        if fix.ncols:
            full = inverse(hstack([fix, relb]))
            self.proj = full.select_rows(list(range(fix.ncols)))
            self.pivots = independent_pivot_rows(fix)
            self.pivot_inv = inverse(fix.select_rows(self.pivots))
        else:
            self.proj = Matrix.zeros(0, d)
            self.pivots = []
            self.pivot_inv = Matrix.zeros(0, 0)


class SchurValue:
    """M(C) truncated at ``max_degree``.

    ``complex`` carries the coinvariant differential and ``inv_complex`` the
    invariant one; both live on the same graded space.
    """

    def __init__(self, M, C, max_degree=None):
        self.M = M
        self.C = C
        top = M.max_arity * C.max_degree
        D = max_degree if max_degree is not None else top
        self.max_degree = max(D, 1)
        self._fix = {}
        self.entries = {}   # degree -> list of (n, t0, j)
        self.index = {}     # (n, t0, j) -> (degree, idx)
        labels = {}
        for d in range(1, self.max_degree + 1):
            ent = []
            for n in range(1, min(M.max_arity, d) + 1):
                if not M.dim(n):
                    continue
                tb, _ = C.space.tensor_basis(n, d)
                for t in tb:
                    if list(t) != sorted(t):
                        continue
                    fd = self.fix(n, t)
                    for j in range(fd.rank):
                        ent.append((n, t, j))
            for k, e in enumerate(ent):
                self.index[e] = (d, k)
            self.entries[d] = ent
            labels[d] = [self._label(e) for e in ent]
        # nonzero parts above the cut make the result a truncation
        truncated = any(self._nonempty_degree(d) for d in range(self.max_degree + 1, top + 1))
        self.space = GradedSpace(self.max_degree, labels)
        self.truncated = truncated or C.truncated
        self._complex = None
        self._inv_complex = None

    def _nonempty_degree(self, d):
        for n in range(1, min(self.M.max_arity, d) + 1):
            if not self.M.dim(n):
                continue
            tb, _ = self.C.space.tensor_basis(n, d)
            for t in tb:
                if list(t) == sorted(t) and self.fix(n, t).rank:
                    return True
        return False

    def _label(self, e):
        n, t0, j = e
        return "%d.%d[%s]" % (n, j, ",".join(self.C.space.label(b) for b in t0))

    def fix(self, n, t0):
        key = (n, stab_key(t0))
        hit = self._fix.get(key)
        if hit is None:
            hit = FixData(self.M, n, key[1])
            self._fix[key] = hit
        return hit

    def dims(self):
        return self.space.dims()

    def arity_of(self, b):
        return self.entries[b[0]][b[1]][0]

    # coinvariant model -------------------------------------------------

    def project(self, n, m, t):
        """Coordinates of the class [m (x) t]; m is a sparse vector of M(n)."""
        d = tensor_degree(t)
        if d > self.max_degree or n > self.M.max_arity:
            return {}
        t0, tau, s = orbit_rep(t)
        fd = self.fix(n, t0)
        if not fd.rank:
            return {}
        v = self.M.rep(n, tau).apply(m)
        out = {}
        for j, c in fd.proj.apply(v).items():
            out[self.index[(n, t0, j)][1]] = s * c
        return out

    def coinv_diff(self, d):
        src = self.entries.get(d, [])
        tgt = self.entries.get(d - 1, [])
        cols = []
        for (n, t0, j) in src:
            m = self.fix(n, t0).basis.cols[j]
            col = {}
            for t, c in self.C.d_tensor(t0).items():
                vec_add(col, self.project(n, m, t), c)
            cols.append(col)
        return Matrix(len(tgt), len(src), cols)

    @property
    def complex(self):
        if self._complex is None:
            self._complex = ChainComplex(
                self.space, {d: self.coinv_diff(d) for d in range(2, self.max_degree + 1)},
                truncated=self.truncated)
        return self._complex

    # invariant model ---------------------------------------------------

    def component(self, b, t):
        """The t-component (a vector of M(n)) of the invariant basis vector b."""
        n, t0, j = self.entries[b[0]][b[1]]
        if len(t) != n:
            return {}
        r0, tau, s = orbit_rep(t)
        if r0 != t0:
            return {}
        m = self.fix(n, t0).basis.cols[j]
        v = self.M.rep(n, perms.inverse(tau)).apply(m)
        return {k: s * x for k, x in v.items()} if s != 1 else v

    def inv_coords(self, n, t0, vec):
        """Coordinates of an invariant element from its t0-component."""
        fd = self.fix(n, t0)
        return {self.index[(n, t0, j)][1]: c for j, c in fd.proj.apply(vec).items()}

    @property
    def inv_complex(self):
        if self._inv_complex is None:
            d = {}
            for k in range(2, self.max_degree + 1):
                A = self.coinv_diff(k)
                hs = [stab_order(e[1]) for e in self.entries[k]]
                ht = [stab_order(e[1]) for e in self.entries[k - 1]]
                cols = [{r: v * ht[r] / hs[c] for r, v in col.items()}
                        for c, col in enumerate(A.cols)]
                d[k] = Matrix(A.nrows, A.ncols, cols)
            self._inv_complex = ChainComplex(self.space, d, truncated=self.truncated)
        return self._inv_complex

    # norm map ----------------------------------------------------------

    def norm_map(self, n, d):
        """(N, p) between coinvariants of arity n, degree d and M(n) (x) (C^(x)n)_d.

        The full space is indexed by b * T + k for M-basis b and tensor k.
        """
        tb, tidx = self.C.space.tensor_basis(n, d)
        T = len(tb)
        full = self.M.dim(n) * T
        own = [(k, e) for k, e in enumerate(self.entries.get(d, [])) if e[0] == n]
        group = perms.all_perms(n)
        fact = Fraction(1, factorial(n))
        Ncols = []
        for _, (n_, t0, j) in own:
            m = self.fix(n, t0).basis.cols[j]
            col = {}
            for s in group:
                sign, t = koszul_permute(t0, s)
                mv = self.M.rep(n, perms.inverse(s)).apply(m)
                ti = tidx[t]
                for b, x in mv.items():
                    vec_add(col, {b * T + ti: x}, sign * fact)
            Ncols.append(col)
        pos = {k: r for r, (k, _) in enumerate(own)}
        pcols = []
        for b in range(self.M.dim(n)):
            for t in tb:
                proj = self.project(n, {b: Fraction(1)}, t)
                pcols.append({pos[k]: v for k, v in proj.items()})
        return Matrix(full, len(own), Ncols), Matrix(len(own), full, pcols)


def schur_evaluate(M, C, max_degree=None):
    return SchurValue(M, C, max_degree)
