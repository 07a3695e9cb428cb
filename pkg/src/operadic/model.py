"""Model-structure computations for conilpotent P-coalgebras.

Weak equivalences and cofibrations are detected on underlying complexes.
Fibrations are only semi-decidable, so they are reported relative to a finite
family of test maps (``fibration_wrt``).
"""

import random
from dataclasses import dataclass, field

from .linalg import Matrix, is_injective, kernel, solve_many
from .complexes import (
    ChainMap, NoLift, chain_lift, complex_from_dims, cone_of_identity, homology,
    is_quasi_iso, random_chain_map, zero_complex, zero_map,
)
from .coalgebras import (
    Cofree, CoalgebraMorphism, PCoalgebra, check_morphism, cofree_lift, direct_sum_coalgebra,
    finite_subcoalgebra, identity_morphism, pairing, product, pushout, sub_coalgebra,
    zero_coalgebra, IllFormed,
)
from .solver import NoSolution, solve_coalgebra_morphism


class NoLiftFound(ValueError):
    """The greedy strategy failed; this does not prove that no lift exists."""

    def __init__(self, message, degree=None):
        super().__init__(message)
        self.degree = degree


class StageBudgetExhausted(RuntimeError):
    def __init__(self, message, remaining=()):
        super().__init__(message)
        self.remaining = list(remaining)


class SquareError(ValueError):
    pass


def _top(*objs):
    return max(o.max_degree for o in objs)


def _eq(f, g, top):
    return all(f.comp(n) == g.comp(n) for n in range(1, top + 1))


def is_injective_morphism(f):
    top = max(f.source.max_degree, f.target.max_degree)
    return all(is_injective(f.comp(n)) for n in range(1, top + 1))


# lifting ---------------------------------------------------------------


@dataclass
class LiftingProblem:
    i: object   # A -> B
    p: object   # X -> Y
    a: object   # A -> X
    b: object   # B -> Y

    def __post_init__(self):
        top = _top(self.i.source, self.i.target, self.p.source, self.p.target)
        if not _eq((self.p @ self.a).map, (self.b @ self.i).map, top):
            raise SquareError("square does not commute")


@dataclass
class LiftCertificate:
    h: object
    strategy: str


def _verify_lift(pr, h):
    top = _top(pr.i.source, pr.i.target, pr.p.source, pr.p.target)
    if not _eq((h @ pr.i).map, pr.a.map, top) or not _eq((pr.p @ h).map, pr.b.map, top):
        raise AssertionError("lift fails a triangle")
    if h.map.commutation_defect() is not None or check_morphism(h):
        raise AssertionError("lift is not a coalgebra morphism")


def _adjunction_applies(pr):
    X = pr.p.source
    data = getattr(X, "factors", None)
    if data is None:
        return False
    R, S, prR, prS = data[:4]
    if pr.p.target is not R or not _eq(pr.p.map, prR.map, X.max_degree):
        return False
    if not isinstance(S, Cofree) or not homology(S.V).is_zero():
        return False
    return is_injective_morphism(pr.i)


def _lift_by_adjunction(pr):
    """X = R x P*(V) with V acyclic and p the projection to R.

    The P*(V)-component of h corresponds to a chain map k: B -> V with
    k i = pi pr_S a, which exists because i is injective and V -> 0 is an
    acyclic fibration of complexes.
    """
    X = pr.p.source
    R, S, prR, prS = X.factors[:4]
    V = S.V
    B = pr.i.target
    Z = zero_complex(V.max_degree)
    k = chain_lift(pr.i.map, zero_map(V, Z), S.pi @ prS.map @ pr.a.map, zero_map(B.complex, Z))
    v = cofree_lift(B, k, S)
    return pairing(pr.b, v, X)


def solve_lifting(pr, strategy="auto"):
    """A diagonal h: B -> X with h i = a and p h = b, verified exactly.

    Raises NoLiftFound when the degree-by-degree search fails.
    """
    if strategy in ("auto", "adjunction") and _adjunction_applies(pr):
        h = _lift_by_adjunction(pr)
        used = "adjunction"
    elif strategy == "adjunction":
        raise NoLiftFound("square is not of the adjunction shape")
    else:
        try:
            h = solve_coalgebra_morphism(pr.i.target, pr.p.source,
                                         pre=[(pr.i, pr.a)], post=[(pr.p, pr.b)])
        except NoSolution as e:
            raise NoLiftFound(str(e), e.degree)
        used = "stratified"
    _verify_lift(pr, h)
    return LiftCertificate(h, used)


def random_morphism(X, Y, rng):
    """A pseudo-random coalgebra morphism X -> Y (the zero map if nothing else is found)."""
    if isinstance(Y, Cofree):
        g = random_chain_map(X.complex, Y.V, rng)
        return cofree_lift(X, g, Y)
    try:
        return solve_coalgebra_morphism(X, Y, rng=rng)
    except NoSolution:
        return CoalgebraMorphism(X, Y, zero_map(X.complex, Y.complex))


def random_extension(i, c, Y, rng):
    """A pseudo-random coalgebra morphism b: B -> Y with b i = c.

    For cofree Y this is a chain-level extension problem.  Otherwise the
    randomized degree-by-degree solve may pick values that cannot be extended,
    so the deterministic solve is tried next.  Raises NoSolution.
    """
    B = i.target
    if isinstance(Y, Cofree) and is_injective_morphism(i):
        Z = zero_complex(Y.V.max_degree)
        try:
            k0 = chain_lift(i.map, zero_map(Y.V, Z), Y.pi @ c.map, zero_map(B.complex, Z))
        except NoLift as e:
            raise NoSolution(str(e), e.degree)
        k = k0 + random_chain_map(B.complex, Y.V, rng, vanish_on=i.map)
        return cofree_lift(B, k, Y)
    try:
        return solve_coalgebra_morphism(B, Y, pre=[(i, c)], rng=rng)
    except NoSolution:
        return solve_coalgebra_morphism(B, Y, pre=[(i, c)])


def sample_squares(i, p, rng, count):
    """Up to ``count`` commuting squares from i: A -> B to p: X -> Y.

    a is drawn at random and b extends p a along i; draws with no such b are skipped.
    """
    out = []
    for _ in range(count):
        a = random_morphism(i.source, p.source, rng)
        try:
            b = random_extension(i, p @ a, p.target, rng)
        except NoSolution:
            continue
        out.append(LiftingProblem(i, p, a, b))
    return out


# classification --------------------------------------------------------


@dataclass
class GeneratingFamily:
    members: list
    acyclic: bool
    bounds: dict = field(default_factory=dict)
    seed: int = 0

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def rlp_failures(f, family, seed=0, squares_per_member=2):
    """Sampled squares against f (per family member) that admit no verified lift."""
    rng = random.Random(seed)
    bad = []
    for idx, i in enumerate(family):
        for sq in sample_squares(i, f, rng, squares_per_member):
            try:
                solve_lifting(sq)
            except NoLiftFound as e:
                bad.append((idx, e.degree))
    return bad


def classify_coalgebra_morphism(f, family=None, seed=0, squares_per_member=2):
    top = max(f.source.max_degree, f.target.max_degree)
    out = {
        "weak_equivalence": is_quasi_iso(f.map),
        "cofibration": all(is_injective(f.comp(n)) for n in range(1, top + 1)),
        "fibration_wrt": None,
    }
    if family is not None:
        out["fibration_wrt"] = not rlp_failures(f, family, seed, squares_per_member)
    return out


# factorizations ------------------------------------------------------------


@dataclass
class Factorization:
    middle: object
    j: object
    q: object
    certificates: dict = field(default_factory=dict)
    log: list = field(default_factory=list)


def factorize_cof_trivfib(f, max_degree=None):
    """f = q j with j a cofibration and q an acyclic fibration.

    The middle object is C x P*(V) for V = cone(U(D)); j = (f, lift of D -> V)
    and q is the projection.
    """
    Dm, C = f.source, f.target
    P = C.operad
    top = max_degree or max(Dm.max_degree, C.max_degree)
    V, e = cone_of_identity(Dm.complex)
    FV = Cofree(P, V, top)
    X, prC, prV = product(C, FV, top)
    j = pairing(f, cofree_lift(Dm, e, FV), X)
    q = prC
    if not _eq((q @ j).map, f.map, top):
        raise AssertionError("q o j != f")
    cert = {"j_injective": is_injective_morphism(j), "q_weak_equivalence": is_quasi_iso(q.map),
            "j_morphism": not check_morphism(j), "q_morphism": not check_morphism(q)}
    return Factorization(X, j, q, cert)


# small object argument -------------------------------------------------


def _sum_many(P, objs, top):
    S = zero_coalgebra(P, top)
    incs = []
    for A in objs:
        S2, i1, i2 = direct_sum_coalgebra(S, A)
        incs = [i1 @ g for g in incs] + [i2]
        S = S2
    return S, incs


def _copower_map(P, pairs, target, top):
    """The map (+)_k A_k -> target induced by pairs (A_k, f_k)."""
    S, incs = _sum_many(P, [A for A, _ in pairs], top)
    comps = {}
    for n in range(1, top + 1):
        m = Matrix.zeros(target.complex.dim(n), S.complex.dim(n))
        for (A, fk), inc in zip(pairs, incs):
            m = m + fk.comp(n) @ inc.comp(n).transpose()
        comps[n] = m
    return S, incs, CoalgebraMorphism(S, target, ChainMap(S.complex, target.complex, comps,
                                                          check=False))


def _sum_of_maps(P, maps, top):
    """(+) i_k : (+) A_k -> (+) B_k."""
    SA, incA = _sum_many(P, [i.source for i in maps], top)
    SB, incB = _sum_many(P, [i.target for i in maps], top)
    comps = {}
    for n in range(1, top + 1):
        m = Matrix.zeros(SB.complex.dim(n), SA.complex.dim(n))
        for i, ia, ib in zip(maps, incA, incB):
            m = m + ib.comp(n) @ i.comp(n) @ ia.comp(n).transpose()
        comps[n] = m
    return SA, SB, incB, CoalgebraMorphism(SA, SB, ChainMap(SA.complex, SB.complex, comps,
                                                            check=False))


def _batch_seeds(seed, batch, per_member):
    # batches never repeat, so a run only stops once squares it has not
    # attached along lift
    return [seed + 7919 * (batch * per_member + s) for s in range(per_member)]


def _stage_squares(family, fk, seeds):
    squares = []
    for idx, i in enumerate(family):
        for s in seeds:
            rng = random.Random(s * 1000003 + idx)
            for sq in sample_squares(i, fk, rng, 1):
                squares.append((idx, sq))
    return squares


def _same(x, y, top):
    return x.source is y.source and _eq(x.map, y.map, top)


def factorize_smallobject(f, family, max_stages=32, seed=0, squares_per_member=2, confirm=4):
    """Finite-stage small object argument: f = f_inf o i_inf.

    Each stage samples commuting squares from every family member to the
    current map, in up to ``confirm`` fresh batches, and attaches a copy of
    the member's target along every square without a lift in the first
    failing batch.  Attached squares keep their canonical lift, pushed
    forward along later stages.  The run stops when ``confirm`` consecutive
    batches lift.
    """
    P = f.source.operad
    top = max(f.source.max_degree, f.target.max_degree)
    Y = f.target
    X0 = f.source
    Xk, fk = X0, f
    ik = identity_morphism(X0)
    known = []          # (member index, square, lift into Xk)
    log = []
    batch = 0
    for stage in range(max_stages + 1):
        pending, checked, tries = [], 0, 0
        while not pending and tries < confirm:
            tries += 1
            squares = _stage_squares(family, fk, _batch_seeds(seed, batch, squares_per_member))
            batch += 1
            checked += len(squares)
            for idx, sq in squares:
                if any(k == idx and _same(sq.a, s.a, top) and _same(sq.b, s.b, top)
                       for k, s, _ in known):
                    continue
                if any(k == idx and _same(sq.a, s.a, top) and _same(sq.b, s.b, top)
                       for k, s in pending):
                    continue
                try:
                    solve_lifting(sq)
                except NoLiftFound:
                    pending.append((idx, sq))
        if not pending:
            for _, sq, h in known:
                _verify_lift(sq, h)
            cert = {"stages": stage, "i_injective": is_injective_morphism(ik),
                    "i_weak_equivalence": is_quasi_iso(ik.map) if family.acyclic else None,
                    "rlp_squares": checked}
            return Factorization(Xk, ik, fk, cert, log)
        if stage == max_stages:
            raise StageBudgetExhausted("%d unlifted squares after %d stages"
                                       % (len(pending), max_stages),
                                       [(idx, sq) for idx, sq in pending])
        maps = [family.members[idx] for idx, _ in pending]
        SA, SB, incB, isum = _sum_of_maps(P, maps, top)
        _, _, amap = _copower_map(P, [(family.members[idx].source, sq.a) for idx, sq in pending],
                                  Xk, top)
        Q, jX, jB = pushout(amap, isum, keep_left=True)
        # the induced map Q -> Y from fk and the b's
        bsum = _copower_map(P, [(family.members[idx].target, sq.b) for idx, sq in pending],
                            Y, top)[2]
        fnext = _induced_from_pushout(Q, jX, jB, fk, bsum, top)
        step = {"stage": stage + 1, "attached": len(pending), "dims": Q.dims(),
                "injective": is_injective_morphism(jX)}
        if family.acyclic:
            step["weak_equivalence"] = is_quasi_iso(jX.map)
        if not step["injective"] or (family.acyclic and not step["weak_equivalence"]):
            raise AssertionError("stage %d map fails certification" % (stage + 1))
        log.append(step)
        known = [(k, LiftingProblem(s.i, fnext, jX @ s.a, s.b), jX @ h) for k, s, h in known]
        for (idx, sq), inc in zip(pending, incB):
            h = jB @ inc
            known.append((idx, LiftingProblem(sq.i, fnext, jX @ sq.a, sq.b), h))
        Xk, fk, ik = Q, fnext, jX @ ik
    raise AssertionError("unreachable")


def _induced_from_pushout(Q, jX, jB, fX, fB, top):
    """The unique map Q -> Y restricting to fX and fB (solved from the surjection X (+) B -> Q)."""
    comps = {}
    for n in range(1, top + 1):
        J = Matrix(Q.complex.dim(n), jX.comp(n).ncols + jB.comp(n).ncols,
                   jX.comp(n).cols + jB.comp(n).cols)
        Fm = fX.comp(n).cols + fB.comp(n).cols
        # solve g J = F row by row: J^T g^T = F^T
        JT = J.transpose()
        rows = Matrix(fX.target.complex.dim(n), len(Fm), Fm).row_dicts()
        sols, _ = solve_many(JT, rows)
        if any(s is None for s in sols):
            raise AssertionError("maps do not agree on the pushout in degree %d" % n)
        comps[n] = Matrix.from_row_dicts(sols, Q.complex.dim(n))
    g = CoalgebraMorphism(Q, fX.target, ChainMap(Q.complex, fX.target.complex, comps, check=False))
    if check_morphism(g):
        raise AssertionError("induced map is not a coalgebra morphism")
    return g


# generating families ---------------------------------------------------


def _primitive(P, dims, d, top):
    C = complex_from_dims(dims, d, max_degree=top)
    return PCoalgebra(P, C, name="primitive")


def _random_complex(rng, max_dim, top):
    """A small random complex with total dimension <= max_dim."""
    total = rng.randint(1, max_dim)
    dims = {n: 0 for n in range(1, top + 1)}
    for _ in range(total):
        dims[rng.randint(1, top)] += 1
    return random_complex(dims, rng, top)


def random_complex(dims, rng, top):
    """Random differential on the given dims, built one degree at a time."""
    d = {}
    for n in range(2, top + 1):
        a, b = dims.get(n - 1, 0), dims.get(n, 0)
        if not a or not b:
            continue
        prev = d.get(n - 1)
        # columns of d_n must lie in ker d_{n-1}
        K = kernel(prev) if prev is not None else Matrix.identity(a)
        cols = []
        for _ in range(b):
            col = {}
            for c in K.cols:
                w = rng.randint(-1, 1)
                for r, v in c.items():
                    col[r] = col.get(r, 0) + w * v
            cols.append({r: v for r, v in col.items() if v})
        d[n] = Matrix(a, b, cols)
    return complex_from_dims(dims, d, max_degree=top)


def _shape_primitive(P, rng, max_dim, top):
    C = _random_complex(rng, max_dim, top)
    B = PCoalgebra(P, C, name="primitive")
    return CoalgebraMorphism(zero_coalgebra(P, top), B, zero_map(zero_complex(top), C))


def _shape_cone(P, rng, max_dim, top):
    half = max(1, max_dim // 2)
    W = _random_complex(rng, half, max(1, top - 1))
    V, _ = cone_of_identity(W)
    rest = max_dim - sum(V.dims().values())
    if rest >= 1 and rng.random() < 0.5:
        A = PCoalgebra(P, _random_complex(rng, rest, top), name="primitive")
    else:
        A = zero_coalgebra(P, top)
    S, iA, _ = direct_sum_coalgebra(A, PCoalgebra(P, V, name="cone"))
    return iA


def _shape_finite_sub(P, rng, max_dim, top):
    V = _random_complex(rng, 2, min(2, top))
    F = Cofree(P, V, top)
    cands = [b for b in F.space.basis() if b[0] <= top]
    if not cands:
        return None
    d, k = rng.choice(cands)
    vec = {k: 1}
    other = [b for b in F.space.basis(d) if b[1] != k]
    if other and rng.random() < 0.5:
        vec[rng.choice(other)[1]] = rng.choice([-1, 1])
    K, inc = finite_subcoalgebra(F, (d, vec))
    if sum(K.dims().values()) > max_dim:
        return None
    if rng.random() < 0.5 and d >= 2:
        # a smaller closed piece inside K: the part generated by the boundary or a lower degree
        sub = [b for b in K.space.basis() if b[0] < d]
        if sub:
            e, j = rng.choice(sub)
            vec2 = {r: v for r, v in inc.comp(e).cols[j].items()}
            K2, inc2 = finite_subcoalgebra(F, (e, vec2))
            return _inclusion_between(K2, inc2, K, inc)
    Z = zero_coalgebra(P, top)
    return CoalgebraMorphism(Z, K, zero_map(Z.complex, K.complex))


def _inclusion_between(K2, inc2, K, inc):
    from .envelope import _factor_through
    return CoalgebraMorphism(K2, K, _factor_through(inc.map, inc2.map))


def sample_generating_family(P, max_dim=4, max_degree=3, acyclic=False, seed=0, size=8):
    """A deterministic finite family of injections between finite-dimensional coalgebras."""
    rng = random.Random(seed)
    top = max_degree
    members = []
    # with one basis vector the only injections are 0 -> (1-dim primitive)
    shapes = [_shape_primitive] if max_dim <= 1 else [_shape_primitive, _shape_cone,
                                                      _shape_finite_sub]
    attempts = 0
    while len(members) < size and attempts < 50 * size:
        attempts += 1
        i = rng.choice(shapes)(P, rng, max_dim, top)
        if i is None or sum(i.target.dims().values()) > max_dim:
            continue
        if acyclic and not is_quasi_iso(i.map):
            continue
        if not is_injective_morphism(i):
            continue
        members.append(i)
    return GeneratingFamily(members, acyclic, {"max_dim": max_dim, "max_degree": max_degree,
                                               "size": size}, seed)
