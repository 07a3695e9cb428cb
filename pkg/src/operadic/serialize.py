"""JSON formats for complexes, maps, operads, (co)algebras, bialgebras and laws.

Scalars are strings "p/q" in lowest terms (integers and "0" allowed on
input).  Matrices are lists of rows.  Every loader reports the JSON path of
the first offending value.

Objects may be given inline or, inside a document with a top-level
"objects" table, by name; a name always resolves to the same object.
Coalgebra and algebra blocks may also be {"construct": "cofree" | "free",
"operad": ref, "V": complex, "max_degree": D}.
"""

import json
from fractions import Fraction

from .linalg import Matrix, parse_scalar, format_scalar
from .complexes import ChainComplex, ChainMap, GradedSpace, NotAComplex, NotAChainMap
from .operads import BadOperad, Operad, SigmaModule, builtin_operad, check_operad_axioms
from .coalgebras import Cofree, CoalgebraMorphism, IllFormed, PCoalgebra, check_coalgebra
from .algebras import (
    AlgebraMorphism, FreeAlgebra, IllFormedAlgebra, PAlgebra, check_algebra,
)
from .bialgebras import (
    BialgebraMorphism, Ladder, MixedDistributiveLaw, PQBialgebra, builtin_law, check_bialgebra,
)


class ParseError(ValueError):
    def __init__(self, path, reason, file=None):
        self.path = path
        self.reason = reason
        self.file = file
        super().__init__(self._text())

    def _text(self):
        where = "%s: " % self.file if self.file else ""
        return "%s%s: %s" % (where, self.path, self.reason)

    def in_file(self, file):
        return ParseError(self.path, self.reason, file)


def _child(path, key):
    return "%s[%d]" % (path, key) if isinstance(key, int) else "%s.%s" % (path, key)


def _need(obj, key, path, kind=None):
    if not isinstance(obj, dict):
        raise ParseError(path, "expected an object")
    if key not in obj:
        raise ParseError(path, "missing field %r" % key)
    val = obj[key]
    if kind is not None and not isinstance(val, kind) or isinstance(val, bool) and kind is int:
        raise ParseError(_child(path, key), "expected %s" % _kind_name(kind))
    return val


def _kind_name(kind):
    return {int: "an integer", dict: "an object", list: "an array", str: "a string"}.get(
        kind, str(kind))


def _int_key(k, path):
    try:
        return int(k)
    except ValueError:
        raise ParseError(path, "key %r is not an integer" % k)


def _int_tuple(k, n, path):
    parts = k.split(",")
    if len(parts) != n:
        raise ParseError(path, "key %r needs %d comma-separated integers" % (k, n))
    return tuple(_int_key(p, path) for p in parts)


# scalars and matrices -----------------------------------------------------------


def scalar_from_json(v, path):
    try:
        x = parse_scalar(v)
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(path, "bad scalar: %s" % e)
    if isinstance(v, str) and "/" in v and format_scalar(x) != v.strip():
        raise ParseError(path, "scalar %r is not in lowest terms" % v)
    return x


def matrix_to_json(m):
    return [[format_scalar(x) for x in row] for row in m.to_rows()]


def matrix_from_json(rows, nrows, ncols, path):
    if not isinstance(rows, list):
        raise ParseError(path, "expected a list of rows")
    if len(rows) != nrows:
        raise ParseError(path, "expected %d rows, got %d" % (nrows, len(rows)))
    cols = [{} for _ in range(ncols)]
    for i, r in enumerate(rows):
        rp = _child(path, i)
        if not isinstance(r, list):
            raise ParseError(rp, "expected a row")
        if len(r) != ncols:
            raise ParseError(rp, "expected %d entries, got %d" % (ncols, len(r)))
        for j, v in enumerate(r):
            x = scalar_from_json(v, _child(rp, j))
            if x:
                cols[j][i] = x
    return Matrix(nrows, ncols, cols)


def vector_to_json(vec, n):
    return [format_scalar(vec.get(i, 0)) for i in range(n)]


def vector_from_json(v, n, path):
    if not isinstance(v, list) or len(v) != n:
        raise ParseError(path, "expected a vector of length %d" % n)
    out = {}
    for i, x in enumerate(v):
        x = scalar_from_json(x, _child(path, i))
        if x:
            out[i] = x
    return out


# complexes and chain maps --------------------------------------------------------


def complex_to_json(C):
    D = C.max_degree
    out = {
        "max_degree": D,
        "dims": {str(d): C.dim(d) for d in range(1, D + 1)},
        "labels": {str(d): list(C.space.labels[d]) for d in range(1, D + 1) if C.dim(d)},
        "d": {str(n): matrix_to_json(C.d[n]) for n in range(2, D + 1)
              if C.dim(n) and C.dim(n - 1)},
    }
    if C.truncated:
        out["truncated"] = True
    return out


def complex_from_json(data, path="$"):
    D = _need(data, "max_degree", path, int)
    if D < 1:
        raise ParseError(_child(path, "max_degree"), "must be at least 1")
    dims_raw = _need(data, "dims", path, dict)
    dims = {}
    for k, v in dims_raw.items():
        kp = _child(_child(path, "dims"), k)
        d = _int_key(k, kp)
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise ParseError(kp, "expected a non-negative integer")
        if v and not 1 <= d <= D:
            raise ParseError(kp, "degree outside 1..%d" % D)
        dims[d] = v
    labels_raw = data.get("labels", {})
    if not isinstance(labels_raw, dict):
        raise ParseError(_child(path, "labels"), "expected an object")
    labels = {}
    for d in range(1, D + 1):
        n = dims.get(d, 0)
        ls = labels_raw.get(str(d))
        if ls is None:
            ls = ["e%d_%d" % (d, i) for i in range(n)]
        lp = _child(_child(path, "labels"), str(d))
        if not isinstance(ls, list) or len(ls) != n:
            raise ParseError(lp, "expected %d labels" % n)
        if len(set(map(str, ls))) != n:
            raise ParseError(lp, "duplicate labels")
        labels[d] = ls
    space = GradedSpace(D, labels)
    d_raw = data.get("d", {})
    if not isinstance(d_raw, dict):
        raise ParseError(_child(path, "d"), "expected an object")
    mats = {}
    for k, rows in d_raw.items():
        kp = _child(_child(path, "d"), k)
        n = _int_key(k, kp)
        if not 2 <= n <= D:
            raise ParseError(kp, "differential index outside 2..%d" % D)
        mats[n] = matrix_from_json(rows, space.dim(n - 1), space.dim(n), kp)
    truncated = data.get("truncated", False)
    if not isinstance(truncated, bool):
        raise ParseError(_child(path, "truncated"), "expected a boolean")
    try:
        return ChainComplex(space, mats, truncated=truncated)
    except NotAComplex as e:
        raise ParseError(_child(path, "d"), str(e))


def map_to_json(f):
    top = max(f.source.max_degree, f.target.max_degree)
    return {str(n): matrix_to_json(f.comp(n)) for n in range(1, top + 1)
            if f.source.dim(n) and f.target.dim(n)}


def map_from_json(data, S, T, path, check=True):
    if not isinstance(data, dict):
        raise ParseError(path, "expected an object of per-degree matrices")
    comps = {}
    for k, rows in data.items():
        kp = _child(path, k)
        n = _int_key(k, kp)
        if not 1 <= n <= max(S.max_degree, T.max_degree):
            raise ParseError(kp, "degree out of range")
        comps[n] = matrix_from_json(rows, T.dim(n), S.dim(n), kp)
    try:
        return ChainMap(S, T, comps, check=check)
    except NotAChainMap as e:
        raise ParseError(path, str(e))


# operads ----------------------------------------------------------------------


def operad_to_json(P):
    N = P.max_arity
    return {
        "name": P.name,
        "max_arity": N,
        "dims": [P.dim(n) for n in range(1, N + 1)],
        "transpositions": {str(n): [matrix_to_json(T) for T in P.module.gens[n]]
                           for n in range(2, N + 1) if P.dim(n)},
        "unit": vector_to_json(P.unit, 1),
        "compositions": {"%d,%d,%d" % k: matrix_to_json(M) for k, M in sorted(P.comps.items())
                         if k[0] >= 2 and k[1] >= 2 and not M.is_zero()},
    }


def operad_from_json(data, path="$", check=True):
    """An operad from a file block, a builtin name, or {"builtin": name, "max_arity": N}."""
    if isinstance(data, str):
        data = {"builtin": data}
    if isinstance(data, dict) and "builtin" in data:
        name = _need(data, "builtin", path, str)
        N = data.get("max_arity", 4)
        if not isinstance(N, int) or isinstance(N, bool) or N < 1:
            raise ParseError(_child(path, "max_arity"), "expected a positive integer")
        try:
            return builtin_operad(name, N)
        except KeyError as e:
            raise ParseError(_child(path, "builtin"), str(e))
    N = _need(data, "max_arity", path, int)
    dims_raw = _need(data, "dims", path, list)
    if len(dims_raw) != N or any(not isinstance(x, int) or x < 0 for x in dims_raw):
        raise ParseError(_child(path, "dims"), "expected %d non-negative integers" % N)
    dims = {n: dims_raw[n - 1] for n in range(1, N + 1)}
    tr = _need(data, "transpositions", path, dict)
    gens = {}
    for k, mats in tr.items():
        kp = _child(_child(path, "transpositions"), k)
        n = _int_key(k, kp)
        if not 2 <= n <= N or not isinstance(mats, list) or len(mats) != n - 1:
            raise ParseError(kp, "arity %s needs %d transposition matrices" % (k, n - 1))
        gens[n] = [matrix_from_json(m, dims[n], dims[n], _child(kp, a)) for a, m in enumerate(mats)]
    unit = vector_from_json(_need(data, "unit", path), dims.get(1, 0), _child(path, "unit"))
    comps = {}
    for k, rows in _need(data, "compositions", path, dict).items():
        kp = _child(_child(path, "compositions"), k)
        m, n, i = _int_tuple(k, 3, kp)
        if not (1 <= m <= N and 1 <= n <= N and 1 <= i <= m and m + n - 1 <= N):
            raise ParseError(kp, "composition index out of range")
        comps[(m, n, i)] = matrix_from_json(rows, dims[m + n - 1], dims[m] * dims[n], kp)
    try:
        mod = SigmaModule(N, dims, gens)
        P = Operad(mod, unit, comps, data.get("name"), check=False)
    except BadOperad as e:
        raise ParseError(path, str(e))
    if check:
        bad = mod.presentation_violations() or check_operad_axioms(P)
        if bad:
            raise ParseError(path, "operad axioms fail: %s" % bad[0])
    return P


def operad_ref_to_json(P):
    if P.name in ("As", "Com") or (P.name or "").startswith("Lie"):
        return {"builtin": P.name, "max_arity": P.max_arity}
    return operad_to_json(P)


# coalgebras and algebras -----------------------------------------------------------


def _structure_to_json(table):
    return {"%d,%d" % key: {str(d): matrix_to_json(m) for d, m in sorted(per.items())}
            for key, per in sorted(table.items())}


def _structure_from_json(data, C, P, path, cooperations):
    if not isinstance(data, dict):
        raise ParseError(path, "expected an object")
    out = {}
    for key, per in data.items():
        kp = _child(path, key)
        n, k = _int_tuple(key, 2, kp)
        if not 2 <= n <= P.max_arity or not 0 <= k < P.dim(n):
            raise ParseError(kp, "no basis element %d of P(%d)" % (k, n))
        if not isinstance(per, dict):
            raise ParseError(kp, "expected per-degree matrices")
        mats = {}
        for dk, rows in per.items():
            dp = _child(kp, dk)
            d = _int_key(dk, dp)
            if not 1 <= d <= C.max_degree:
                raise ParseError(dp, "degree out of range")
            t = len(C.space.tensor_basis(n, d)[0])
            shape = (t, C.dim(d)) if cooperations else (C.dim(d), t)
            mats[d] = matrix_from_json(rows, shape[0], shape[1], dp)
        out[(n, k)] = mats
    return out


def coalgebra_to_json(A):
    out = complex_to_json(A.complex)
    out["operad"] = operad_ref_to_json(A.operad)
    out["cooperations"] = _structure_to_json(A.coops)
    return out


def algebra_to_json(A):
    out = complex_to_json(A.complex)
    out["operad"] = operad_ref_to_json(A.operad)
    out["operations"] = _structure_to_json(A.ops)
    return out


def _construct(data, path, kind):
    P = operad_from_json(_need(data, "operad", path), _child(path, "operad"))
    V = complex_from_json(_need(data, "V", path, dict), _child(path, "V"))
    D = data.get("max_degree", V.max_degree)
    if not isinstance(D, int) or D < 1:
        raise ParseError(_child(path, "max_degree"), "expected a positive integer")
    return Cofree(P, V, D) if kind == "cofree" else FreeAlgebra(P, V, D)


def coalgebra_from_json(data, path="$", validate=True):
    if isinstance(data, dict) and data.get("construct") == "cofree":
        return _construct(data, path, "cofree")
    P = operad_from_json(_need(data, "operad", path), _child(path, "operad"))
    C = complex_from_json(data, path)
    coops = _structure_from_json(data.get("cooperations", {}), C, P,
                                 _child(path, "cooperations"), True)
    try:
        A = PCoalgebra(P, C, coops, data.get("name"))
    except IllFormed as e:
        raise ParseError(_child(path, "cooperations"), str(e))
    if validate:
        bad = check_coalgebra(A)
        if bad:
            raise ParseError(_child(path, "cooperations"), "not a coalgebra: %s" % bad[0])
    return A


def algebra_from_json(data, path="$", validate=True):
    if isinstance(data, dict) and data.get("construct") == "free":
        return _construct(data, path, "free")
    P = operad_from_json(_need(data, "operad", path), _child(path, "operad"))
    C = complex_from_json(data, path)
    ops = _structure_from_json(data.get("operations", {}), C, P, _child(path, "operations"), False)
    try:
        A = PAlgebra(P, C, ops, data.get("name"))
    except IllFormedAlgebra as e:
        raise ParseError(_child(path, "operations"), str(e))
    if validate:
        bad = check_algebra(A)
        if bad:
            raise ParseError(_child(path, "operations"), "not an algebra: %s" % bad[0])
    return A


# laws and bialgebras ----------------------------------------------------------------


def law_to_json(law):
    rules = {}
    for (n, p, m, q), lads in sorted(law.rules.items()):
        rules["%d:%d,%d:%d" % (n, p, m, q)] = [
            {"coeff": format_scalar(l.coeff), "sigma": list(l.sigma),
             "coops": [list(c) for c in l.coops], "ops": [list(o) for o in l.ops]}
            for l in lads]
    return {"P": operad_ref_to_json(law.P), "Q": operad_ref_to_json(law.Q),
            "max_arity": law.max_arity, "name": law.name, "rules": rules}


def _pairs(v, path):
    if not isinstance(v, list):
        raise ParseError(path, "expected a list of [arity, index] pairs")
    out = []
    for i, x in enumerate(v):
        if (not isinstance(x, list) or len(x) != 2
                or not all(isinstance(y, int) and not isinstance(y, bool) for y in x)):
            raise ParseError(_child(path, i), "expected [arity, index]")
        out.append(tuple(x))
    return tuple(out)


def law_from_json(data, path="$"):
    if isinstance(data, str):
        data = {"builtin": data}
    if isinstance(data, dict) and "builtin" in data:
        name = _need(data, "builtin", path, str)
        try:
            return builtin_law(name, data.get("max_arity", 3))
        except KeyError as e:
            raise ParseError(_child(path, "builtin"), str(e))
    P = operad_from_json(_need(data, "P", path), _child(path, "P"))
    Q = operad_from_json(_need(data, "Q", path), _child(path, "Q"))
    N = data.get("max_arity", 3)
    rules = {}
    for key, lads in _need(data, "rules", path, dict).items():
        kp = _child(_child(path, "rules"), key)
        try:
            left, right = key.split(",")
            n, p = (int(x) for x in left.split(":"))
            m, q = (int(x) for x in right.split(":"))
        except ValueError:
            raise ParseError(kp, "key must look like 'n:p,m:q'")
        if not (0 <= p < P.dim(n) and 0 <= q < Q.dim(m)):
            raise ParseError(kp, "rule indices outside P(%d) or Q(%d)" % (n, m))
        if not isinstance(lads, list):
            raise ParseError(kp, "expected a list of terms")
        out = []
        for i, l in enumerate(lads):
            lp = _child(kp, i)
            sigma = _need(l, "sigma", lp, list)
            if not all(isinstance(s, int) for s in sigma):
                raise ParseError(_child(lp, "sigma"), "expected a permutation")
            lad = Ladder(scalar_from_json(_need(l, "coeff", lp), _child(lp, "coeff")),
                         _pairs(_need(l, "coops", lp), _child(lp, "coops")),
                         tuple(sigma), _pairs(_need(l, "ops", lp), _child(lp, "ops")))
            if not lad.bookkeeping_ok(n, m):
                raise ParseError(lp, "arities, sigma and pieces do not match")
            out.append(lad)
        rules[(n, p, m, q)] = out
    return MixedDistributiveLaw(P, Q, rules, N, data.get("name"))


def law_ref_to_json(law):
    if law.name in ("biassociative", "bicommutative"):
        return {"builtin": law.name, "max_arity": law.max_arity}
    return law_to_json(law)


def bialgebra_to_json(B):
    out = complex_to_json(B.complex)
    out["law"] = law_ref_to_json(B.law)
    out["operations"] = _structure_to_json(B.algebra.ops)
    out["cooperations"] = _structure_to_json(B.coalgebra.coops)
    return out


def bialgebra_from_json(data, path="$", validate=True):
    law = law_from_json(_need(data, "law", path), _child(path, "law"))
    C = complex_from_json(data, path)
    ops = _structure_from_json(data.get("operations", {}), C, law.P,
                               _child(path, "operations"), False)
    coops = _structure_from_json(data.get("cooperations", {}), C, law.Q,
                                 _child(path, "cooperations"), True)
    try:
        B = PQBialgebra(PAlgebra(law.P, C, ops), PCoalgebra(law.Q, C, coops), law)
    except (IllFormed, IllFormedAlgebra) as e:
        raise ParseError(path, str(e))
    if validate:
        bad = check_bialgebra(B)
        if bad:
            raise ParseError(path, "not a bialgebra: %s" % bad[0])
    return B


# morphisms and documents ----------------------------------------------------------------


_OBJECT_LOADERS = {
    "chain": lambda d, p: complex_from_json(d, p),
    "coalgebra": coalgebra_from_json,
    "algebra": algebra_from_json,
    "bialgebra": bialgebra_from_json,
}

_OBJECT_WRITERS = {
    "chain": complex_to_json,
    "coalgebra": coalgebra_to_json,
    "algebra": algebra_to_json,
    "bialgebra": bialgebra_to_json,
}

_MORPHISMS = {
    "coalgebra": CoalgebraMorphism,
    "algebra": AlgebraMorphism,
    "bialgebra": BialgebraMorphism,
}


def _complex_of(X):
    return X if isinstance(X, ChainComplex) else X.complex


class Document:
    """A parsed file with a named object table; names resolve to shared objects."""

    def __init__(self, data, path="$"):
        if not isinstance(data, dict):
            raise ParseError(path, "expected an object")
        self.data = data
        self.path = path
        self.kind = data.get("kind", "coalgebra")
        if self.kind not in _OBJECT_LOADERS:
            raise ParseError(_child(path, "kind"), "unknown kind %r" % self.kind)
        self.table = data.get("objects", {})
        if not isinstance(self.table, dict):
            raise ParseError(_child(path, "objects"), "expected an object")
        self._cache = {}

    def object(self, ref, path):
        if isinstance(ref, str):
            if ref not in self.table:
                raise ParseError(path, "unknown object %r" % ref)
            if ref not in self._cache:
                self._cache[ref] = _OBJECT_LOADERS[self.kind](
                    self.table[ref], _child(_child(self.path, "objects"), ref))
            return self._cache[ref]
        return _OBJECT_LOADERS[self.kind](ref, path)

    def morphism(self, data, path):
        S = self.object(_need(data, "source", path), _child(path, "source"))
        T = self.object(_need(data, "target", path), _child(path, "target"))
        m = map_from_json(_need(data, "map", path), _complex_of(S), _complex_of(T),
                          _child(path, "map"))
        if self.kind == "chain":
            return m
        return _MORPHISMS[self.kind](S, T, m)


def morphism_to_json(f, kind):
    if kind == "chain":
        return {"kind": "chain", "source": complex_to_json(f.source),
                "target": complex_to_json(f.target), "map": map_to_json(f)}
    w = _OBJECT_WRITERS[kind]
    return {"kind": kind, "source": w(f.source), "target": w(f.target), "map": map_to_json(f.map)}


def morphism_from_json(data, path="$"):
    doc = Document(data, path)
    return doc.kind, doc.morphism(data, path)


def lifting_from_json(data, path="$"):
    """A square file: {"kind", "objects", "i", "p", "a", "b"} with shared object names."""
    doc = Document(data, path)
    return {k: doc.morphism(_need(data, k, path, dict), _child(path, k)) for k in "ipab"}


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False) + "\n"
