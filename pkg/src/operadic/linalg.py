"""Exact linear algebra over the rationals.

Matrices are stored column-sparse: each column is a dict mapping row index to
a nonzero Fraction.  Elimination works on sparse rows and keeps the echelon
form fully reduced, so every result is canonical for a fixed input order.
"""

from fractions import Fraction


class Inconsistent(ValueError):
    """Raised when a linear system has no solution."""


def parse_scalar(value):
    """Accept an int, a Fraction or a string "p/q" and return a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("booleans are not scalars")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty scalar")
        if "/" in text:
            num, den = text.split("/", 1)
            den = int(den)
            if den <= 0:
                raise ValueError("denominator must be positive: %r" % value)
            return Fraction(int(num), den)
        return Fraction(int(text))
    raise ValueError("not a scalar: %r" % (value,))


def format_scalar(x):
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return "%d/%d" % (x.numerator, x.denominator)


def _clean(d):
    return {k: v for k, v in d.items() if v}


def vec_add(target, other, coeff=1):
    """In-place target += coeff * other for sparse dict vectors."""
    if not coeff:
        return target
    for k, v in other.items():
        s = target.get(k, 0) + coeff * v
        if s:
            target[k] = s
        else:
            target.pop(k, None)
    return target


def vec_scale(vec, coeff):
    if not coeff:
        return {}
    return {k: coeff * v for k, v in vec.items()}


class Matrix:
    """A rational matrix with column-sparse storage.

    ``cols[j]`` is the image of the j-th basis vector of the domain.
    """

    __slots__ = ("nrows", "ncols", "cols", "_hash")

    def __init__(self, nrows, ncols, cols=None):
        self.nrows = nrows
        self.ncols = ncols
        if cols is None:
            cols = [{} for _ in range(ncols)]
        if len(cols) != ncols:
            raise ValueError("expected %d columns, got %d" % (ncols, len(cols)))
        out = []
        for c in cols:
            c = {int(i): Fraction(v) for i, v in c.items() if v}
            for i in c:
                if not 0 <= i < nrows:
                    raise ValueError("row index %d out of range %d" % (i, nrows))
            out.append(c)
        self.cols = tuple(out)
        self._hash = None

    # construction -----------------------------------------------------

    @classmethod
    def zeros(cls, nrows, ncols):
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n):
        return cls(n, n, [{i: Fraction(1)} for i in range(n)])

    @classmethod
    def from_rows(cls, rows, ncols=None):
        rows = [list(r) for r in rows]
        nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        cols = [{} for _ in range(ncols)]
        for i, r in enumerate(rows):
            if len(r) != ncols:
                raise ValueError("ragged matrix: row %d has %d entries, expected %d" % (i, len(r), ncols))
            for j, v in enumerate(r):
                v = parse_scalar(v)
                if v:
                    cols[j][i] = v
        return cls(nrows, ncols, cols)

    @classmethod
    def from_row_dicts(cls, rows, ncols):
        cols = [{} for _ in range(ncols)]
        for i, r in enumerate(rows):
            for j, v in r.items():
                if v:
                    cols[j][i] = v
        return cls(len(rows), ncols, cols)

    # access -----------------------------------------------------------

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.cols[j].get(i, Fraction(0))

    def column(self, j):
        return dict(self.cols[j])

    def row_dicts(self):
        rows = [{} for _ in range(self.nrows)]
        for j, c in enumerate(self.cols):
            for i, v in c.items():
                rows[i][j] = v
        return rows

    def to_rows(self):
        rows = [[Fraction(0)] * self.ncols for _ in range(self.nrows)]
        for j, c in enumerate(self.cols):
            for i, v in c.items():
                rows[i][j] = v
        return rows

    def apply(self, vec):
        """Apply to a sparse vector given as {column index: coeff}."""
        out = {}
        for j, a in vec.items():
            if a:
                vec_add(out, self.cols[j], a)
        return out

    def is_zero(self):
        return not any(self.cols)

    # algebra ----------------------------------------------------------

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch %s @ %s" % (self.shape, other.shape))
        return Matrix(self.nrows, other.ncols, [self.apply(c) for c in other.cols])

    def __add__(self, other):
        self._same_shape(other)
        return Matrix(self.nrows, self.ncols,
                      [vec_add(dict(a), b) for a, b in zip(self.cols, other.cols)])

    def __sub__(self, other):
        self._same_shape(other)
        return Matrix(self.nrows, self.ncols,
                      [vec_add(dict(a), b, -1) for a, b in zip(self.cols, other.cols)])

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        return Matrix(self.nrows, self.ncols, [vec_scale(col, Fraction(c)) for col in self.cols])

    def transpose(self):
        return Matrix(self.ncols, self.nrows, self.row_dicts())

    T = property(transpose)

    def _same_shape(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch %s vs %s" % (self.shape, other.shape))

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.cols == other.cols

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nrows, self.ncols,
                               tuple(tuple(sorted(c.items())) for c in self.cols)))
        return self._hash

    def __repr__(self):
        return "Matrix(%d, %d, %r)" % (self.nrows, self.ncols,
                                       [[format_scalar(x) for x in r] for r in self.to_rows()])

    def select_columns(self, idx):
        return Matrix(self.nrows, len(idx), [self.cols[j] for j in idx])

    def select_rows(self, idx):
        pos = {i: k for k, i in enumerate(idx)}
        return Matrix(len(idx), self.ncols,
                      [{pos[i]: v for i, v in c.items() if i in pos} for c in self.cols])

    def rank(self):
        return len(rref(self.row_dicts(), self.ncols)[1])


def hstack(mats, nrows=None):
    if not mats:
        return Matrix(nrows or 0, 0)
    nrows = mats[0].nrows
    cols = []
    for m in mats:
        if m.nrows != nrows:
            raise ValueError("hstack row mismatch")
        cols.extend(m.cols)
    return Matrix(nrows, len(cols), cols)


def vstack(mats, ncols=None):
    if not mats:
        return Matrix(0, ncols or 0)
    ncols = mats[0].ncols
    cols = [{} for _ in range(ncols)]
    offset = 0
    for m in mats:
        if m.ncols != ncols:
            raise ValueError("vstack column mismatch")
        for j, c in enumerate(m.cols):
            for i, v in c.items():
                cols[j][i + offset] = v
        offset += m.nrows
    return Matrix(offset, ncols, cols)


def block_diag(mats):
    nrows = sum(m.nrows for m in mats)
    cols = []
    offset = 0
    for m in mats:
        for c in m.cols:
            cols.append({i + offset: v for i, v in c.items()})
        offset += m.nrows
    return Matrix(nrows, len(cols), cols)


# elimination ----------------------------------------------------------


def rref(rows, pivot_limit):
    """Reduced row echelon form of sparse rows.

    Pivots are only taken in columns < pivot_limit; columns beyond act as an
    augmented block.  Returns (pivot_rows, pivots, residual_rows): pivot_rows
    maps pivot column -> normalized row, pivots is the sorted pivot list and
    residual_rows are rows whose left block vanished but augmented part did not.
    """
    piv = {}
    residual = []
    for r in rows:
        r = {k: Fraction(v) for k, v in r.items() if v}
        for c in [c for c in r if c in piv]:
            f = r.get(c)
            if f:
                vec_add(r, piv[c], -f)
        lead = None
        for c in r:
            if c < pivot_limit and (lead is None or c < lead):
                lead = c
        if lead is None:
            if r:
                residual.append(r)
            continue
        inv = 1 / r[lead]
        r = {k: v * inv for k, v in r.items()}
        for c, pr in piv.items():
            f = pr.get(lead)
            if f:
                vec_add(pr, r, -f)
        piv[lead] = r
    return piv, sorted(piv), residual


def rank(m):
    return m.rank()


def kernel(m):
    """Basis of the kernel of ``m`` as the columns of a Matrix (ncols x k)."""
    piv, pivots, _ = rref(m.row_dicts(), m.ncols)
    pset = set(pivots)
    cols = []
    for f in range(m.ncols):
        if f in pset:
            continue
        v = {f: Fraction(1)}
        for p in pivots:
            a = piv[p].get(f)
            if a:
                v[p] = -a
        cols.append(v)
    return Matrix(m.ncols, len(cols), cols)


def image_basis(m):
    """Independent columns of ``m`` spanning its image (lowest column indices)."""
    piv, pivots, _ = rref(m.transpose().row_dicts(), m.nrows)
    # column space basis: reduced rows of the transpose
    cols = [piv[p] for p in pivots]
    return Matrix(m.nrows, len(cols), cols)


def pivot_columns(m):
    """Indices of a maximal set of independent columns, chosen greedily left to right."""
    piv, pivots, _ = rref(m.row_dicts(), m.ncols)
    return pivots


def solve_many(m, rhs_list):
    """Solve m x = b for every b in rhs_list (sparse dicts over rows).

    Returns (solutions, kernel): solutions[k] is a sparse dict or None when
    the k-th system is inconsistent; free variables are set to zero.
    """
    n = m.ncols
    rows = m.row_dicts()
    aug = [dict(r) for r in rows]
    for k, b in enumerate(rhs_list):
        for i, v in b.items():
            if v:
                aug[i][n + k] = Fraction(v)
    piv, pivots, residual = rref(aug, n)
    bad = set()
    for r in residual:
        for c in r:
            bad.add(c - n)
    sols = []
    for k in range(len(rhs_list)):
        if k in bad:
            sols.append(None)
            continue
        x = {}
        for p in pivots:
            v = piv[p].get(n + k)
            if v:
                x[p] = v
        sols.append(x)
    pset = set(pivots)
    kcols = []
    for f in range(n):
        if f in pset:
            continue
        v = {f: Fraction(1)}
        for p in pivots:
            a = piv[p].get(f)
            if a:
                v[p] = -a
        kcols.append(v)
    return sols, Matrix(n, len(kcols), kcols)


def solve_affine(m, target):
    """Return (particular solution, kernel basis) or raise Inconsistent.

    ``target`` is a sparse dict or a dense sequence over the rows of ``m``.
    """
    if not isinstance(target, dict):
        target = {i: parse_scalar(v) for i, v in enumerate(target) if parse_scalar(v)}
    sols, ker = solve_many(m, [target])
    if sols[0] is None:
        raise Inconsistent("target is not in the image")
    return sols[0], ker


def inverse(m):
    if m.nrows != m.ncols:
        raise ValueError("not square")
    n = m.nrows
    sols, ker = solve_many(m, [{i: Fraction(1)} for i in range(n)])
    if ker.ncols or any(s is None for s in sols):
        raise ValueError("singular matrix")
    return Matrix(n, n, sols)


def is_injective(m):
    return m.rank() == m.ncols


def is_surjective(m):
    return m.rank() == m.nrows


def column_space_contains(basis, vec):
    """True if the sparse vector lies in the span of the columns of ``basis``."""
    sols, _ = solve_many(basis, [vec])
    return sols[0] is not None


def independent_pivot_rows(m):
    """Row indices such that the selected rows of ``m`` form an invertible block."""
    return pivot_columns(m.transpose())


def kron(a, b):
    """Kronecker product; column (i, j) sits at index i * b.ncols + j."""
    cols = []
    for ca in a.cols:
        for cb in b.cols:
            col = {}
            for r, x in ca.items():
                for s, y in cb.items():
                    col[r * b.nrows + s] = x * y
            cols.append(col)
    return Matrix(a.nrows * b.nrows, a.ncols * b.ncols, cols)
