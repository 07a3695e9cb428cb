"""Mixed distributive laws and (P, Q)-bialgebras.

A law is a finite rule table.  For basis elements p of P(n) and q of Q(m)
the rule rewrites rho_q(gamma_p(x_1..x_n)) as a sum of ladders

  coeff * (gamma_(o_1) (x) .. (x) gamma_(o_m)) o L(sigma) o (rho_(c_1)(x_1) (x) .. (x) rho_(c_n)(x_n))

where c_i = (arity k_i, index) cuts x_i into k_i pieces (arity 1 keeps x_i),
L(sigma) reorders all pieces with the Koszul sign, and the pieces are then
grouped left to right by the arities of o_1..o_m and multiplied.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product as iproduct

from .linalg import Matrix, vec_add, is_injective
from .complexes import ChainMap, direct_sum, is_quasi_iso, zero_complex, zero_map
from .coalgebras import (
    CoalgebraMorphism, PCoalgebra, act_tensor, apply_in_slot, check_coalgebra, check_morphism,
    direct_sum_coalgebra, tensor_map, zero_coalgebra, _section,
)
from .algebras import (
    AlgebraMorphism, FreeAlgebra, PAlgebra, algebra_pushout, check_algebra,
    check_algebra_morphism, free_extension, _tensors,
)
from .operads import Violation, builtin_operad
from . import perms


class LawInconsistent(ValueError):
    pass


@dataclass(frozen=True)
class Ladder:
    coeff: Fraction
    coops: tuple     # per input: (arity, index in Q)
    sigma: tuple     # permutation of all pieces
    ops: tuple       # per output: (arity, index in P)

    def bookkeeping_ok(self, n, m):
        pieces = sum(a for a, _ in self.coops)
        return (len(self.coops) == n and len(self.ops) == m and len(self.sigma) == pieces
                and sum(a for a, _ in self.ops) == pieces
                and sorted(self.sigma) == list(range(pieces))
                and all(a >= 1 for a, _ in self.coops + self.ops))


@dataclass
class MixedDistributiveLaw:
    P: object
    Q: object
    rules: dict               # (n, p, m, q) -> [Ladder]
    max_arity: int = 3
    name: str = None

    def rule(self, n, p, m, q):
        if m == 1:
            # the counit of Q: rho is the identity
            return [Ladder(Fraction(1) / self.Q.unit[0], tuple((1, 0) for _ in range(n)),
                           perms.identity(n), ((n, p),))]
        if n == 1:
            return [Ladder(Fraction(1) / self.P.unit[0], ((m, q),), perms.identity(m),
                           tuple((1, 0) for _ in range(m)))]
        return self.rules.get((n, p, m, q), [])

    def arities(self):
        return [(n, m) for n in range(2, self.max_arity + 1) for m in range(2, self.max_arity + 1)]


# evaluation ------------------------------------------------------------------


def _tensor_product(parts):
    """Product of {tensor: coeff} dicts, concatenating tensors."""
    acc = {(): Fraction(1)}
    for y in parts:
        nxt = {}
        for t, c in acc.items():
            for u, v in y.items():
                key = t + u
                nxt[key] = nxt.get(key, 0) + c * v
        acc = {k: v for k, v in nxt.items() if v}
        if not acc:
            return {}
    return acc


def eval_ladder(lad, inputs, piece, op):
    """Value of one ladder; inputs are basis elements, piece(c, x) -> {tensor: coeff} and
    op(o, t) -> {element: coeff}."""
    parts = []
    for c, x in zip(lad.coops, inputs):
        y = piece(c, x)
        if not y:
            return {}
        parts.append(y)
    y = _tensor_product(parts)
    y = act_tensor(y, lad.sigma)
    out = {}
    for t, c in y.items():
        pos, groups = 0, []
        for a, k in lad.ops:
            groups.append({(b,): v for b, v in op((a, k), t[pos:pos + a]).items()})
            pos += a
        for u, v in _tensor_product(groups).items():
            out[u] = out.get(u, 0) + c * v
    return {k: v for k, v in out.items() if v}


def eval_rule(law, n, pvec, m, q, inputs, piece, op):
    memo = {}

    def cached(c, x):
        key = (c, x)
        if key not in memo:
            memo[key] = piece(c, x)
        return memo[key]

    out = {}
    for p, a in pvec.items():
        for lad in law.rule(n, p, m, q):
            vec_add(out, eval_ladder(lad, inputs, cached, op), a * lad.coeff)
    return out


def _bialgebra_piece(C):
    u = C.operad.unit[0]

    def piece(c, x):
        a, k = c
        if a == 1:
            return {(x,): Fraction(1) / u} if k == 0 else {}
        return C.rho_basis(a, k, x)
    return piece


def _algebra_op(A):
    def op(o, t):
        return A.gamma_basis(o[0], o[1], t)
    return op


# builtin laws ------------------------------------------------------------------


def _orbit_perm(M, n, b):
    """A permutation s with e_0 . s = e_b (None if e_b is not in the orbit of e_0)."""
    for s in perms.all_perms(n):
        if M.rep(n, s).apply({0: Fraction(1)}) == {b: Fraction(1)}:
            return s
    return None


def _hopf_standard(n, m):
    """Ladders of rho_std(gamma_std(x_1..x_n)) for a product whose iterated
    coproduct is multiplicative: input i goes to a nonempty set of outputs and
    every output receives at least one piece."""
    subsets = [S for r in range(1, m + 1) for S in combinations(range(m), r)]
    out = []
    for choice in iproduct(subsets, repeat=n):
        if set().union(*choice) != set(range(m)):
            continue
        members = [[i for i in range(n) if j in choice[i]] for j in range(m)]
        starts, acc = [], 0
        for grp in members:
            starts.append(acc)
            acc += len(grp)
        sigma = []
        for i in range(n):
            for j in choice[i]:
                sigma.append(starts[j] + members[j].index(i))
        out.append(Ladder(Fraction(1), tuple((len(S), 0) for S in choice), tuple(sigma),
                          tuple((len(g), 0) for g in members)))
    return out


def _transport(lad, s, t):
    """The ladder of L(t) o lad o L(s), rewritten in ladder form."""
    n = len(lad.coops)
    coops = tuple(lad.coops[s[i]] for i in range(n))
    B = perms.block(s, [a for a, _ in coops])
    sigma = perms.compose(lad.sigma, B)
    m = len(lad.ops)
    B2 = perms.block(t, [a for a, _ in lad.ops])
    sigma = perms.compose(B2, sigma)
    ops = [None] * m
    for j in range(m):
        ops[t[j]] = lad.ops[j]
    return Ladder(lad.coeff, coops, sigma, tuple(ops))


def hopf_law(P, Q, max_arity=3, name=None):
    """Rule table of the Hopf compatibility rho(x y) = rho(x) rho(y), for operads whose
    basis in each arity is one orbit of e_0 (As, Com)."""
    rules = {}
    for n in range(2, max_arity + 1):
        for m in range(2, max_arity + 1):
            base = _hopf_standard(n, m)
            for p in range(P.dim(n)):
                s = _orbit_perm(P.module, n, p)
                for q in range(Q.dim(m)):
                    s2 = _orbit_perm(Q.module, m, q)
                    if s is None or s2 is None:
                        raise ValueError("basis is not a single orbit")
                    # gamma_(e0.s) = gamma_0 L(s) and rho_(e0.s2) = L(s2^-1) rho_0
                    rules[(n, p, m, q)] = [_transport(l, s, perms.inverse(s2)) for l in base]
    return MixedDistributiveLaw(P, Q, rules, max_arity, name)


def builtin_law(name, max_arity=3):
    key = name.lower()
    if key == "biassociative":
        A = builtin_operad("As", max_arity)
        return hopf_law(A, A, max_arity, "biassociative")
    if key == "bicommutative":
        C = builtin_operad("Com", max_arity)
        return hopf_law(C, C, max_arity, "bicommutative")
    raise KeyError("unknown law %r" % name)


# bialgebras ---------------------------------------------------------------------


@dataclass
class PQBialgebra:
    algebra: object
    coalgebra: object
    law: object

    @property
    def complex(self):
        return self.algebra.complex

    @property
    def max_degree(self):
        return self.algebra.max_degree

    def dims(self):
        return self.algebra.dims()


def compatibility_violations(A, C, law):
    """Instances where rho_q(gamma_p(t)) differs from the law's expansion."""
    out = []
    piece, op = _bialgebra_piece(C), _algebra_op(A)
    D = A.max_degree
    for n in range(2, min(law.max_arity, A.top_arity()) + 1):
        for p in range(A.operad.dim(n)):
            for t in _tensors(A.space, n, D):
                prod = A.gamma_basis(n, p, t)
                for m in range(2, min(law.max_arity, C.top_arity()) + 1):
                    for q in range(C.operad.dim(m)):
                        lhs = C.rho_apply(m, {q: 1}, prod)
                        rhs = eval_rule(law, n, {p: 1}, m, q, t, piece, op)
                        if lhs != rhs:
                            out.append(Violation("compatibility", (n, p, m, q, t)))
    return out


def check_bialgebra(B):
    out = list(check_algebra(B.algebra)) + list(check_coalgebra(B.coalgebra))
    if B.algebra.complex != B.coalgebra.complex:
        out.append(Violation("underlying complexes differ", ()))
        return out
    return out + compatibility_violations(B.algebra, B.coalgebra, B.law)


def zero_bialgebra(law, max_degree=1):
    Z = zero_complex(max_degree)
    return PQBialgebra(PAlgebra(law.P, Z), PCoalgebra(law.Q, Z), law)


def lift_free_to_bialgebra(C, law, max_degree=None):
    """The Q-coalgebra structure on P(C) extending the one of C through the law.

    rho_q[m (x) t] is the law's expansion of rho_q(gamma_m(t)) with pieces taken in C.
    Raises LawInconsistent when two representatives of a class disagree.
    """
    P, Q = law.P, law.Q
    D = max_degree or C.max_degree
    F = FreeAlgebra(P, C.complex, D)
    eta = F.eta
    cpiece = _bialgebra_piece(C)

    def piece(c, x):
        return tensor_map(eta, cpiece(c, x))

    def op(o, t):
        return F.gamma_basis(o[0], o[1], t)

    def rho_gen(n, m, q, vec, t):
        # t is a tensor of generators (basis of C), vec in P(n)
        ins = t
        if n == 1:
            y = cpiece((m, q), t[0])
            return {k: v * vec.get(0, 0) / P.unit[0] for k, v in tensor_map(eta, y).items()}
        return eval_rule(law, n, vec, m, q, ins, piece, op)

    coops = {}
    top_m = min(Q.max_arity, law.max_arity, D)
    for m in range(2, top_m + 1):
        for q in range(Q.dim(m)):
            per = {}
            for d in range(m, D + 1):
                tb, tidx = F.space.tensor_basis(m, d)
                cols = []
                for k in range(F.complex.dim(d)):
                    n, vec, t0 = F.rep((d, k))
                    if n > law.max_arity:
                        raise LawInconsistent("law has no rules in arity %d" % n)
                    y = rho_gen(n, m, q, vec, t0)
                    cols.append({tidx[t]: v for t, v in y.items()})
                per[d] = Matrix(len(tb), len(cols), cols)
            coops[(m, q)] = per
    # well-definedness on coinvariants: f(e_p . s, t) = f(e_p, L(s) t)
    for n in range(2, min(P.max_arity, D) + 1):
        for m in range(2, top_m + 1):
            for q in range(Q.dim(m)):
                for t in _tensors(C.space, n, D):
                    for a in range(n - 1):
                        s = perms.adjacent(a, n)
                        for p in range(P.dim(n)):
                            lhs = rho_gen(n, m, q, P.module.gens[n][a].cols[p], t)
                            rhs = {}
                            for t2, c in act_tensor({t: 1}, s).items():
                                vec_add(rhs, rho_gen(n, m, q, {p: Fraction(1)}, t2), c)
                            if lhs != rhs:
                                raise LawInconsistent("expansion is not equivariant at %r"
                                                      % ((n, p, m, q, a, t),))
    coalg = PCoalgebra(Q, F.complex, coops, "lifted")
    B = PQBialgebra(F, coalg, law)
    B.generators = C
    B.eta = eta
    return B


# law axioms on probes ------------------------------------------------------------


def check_mixed_law(law, probes, max_degree=3):
    """Instantiate the four axioms of a mixed distributive law on probe Q-coalgebras.

    For a probe X the expansion defines cooperations Lambda_q on the free
    P-algebra P(X).  The axioms are checked as
      (i)   Lambda_(q o_i q') = Lambda_q' in slot i after Lambda_q, on products,
      (ii)  Lambda_q(gamma_(p o_i p')(x)) = law(p, q) with the input in slot i expanded by law(p', -),
      (iii) Lambda_q restricted to the generators equals rho_q of X,
      (iv)  the counit rule gives back gamma_p.
    Returns violations (empty when all hold).
    """
    out = []
    for ax, (n, p, m, q, k) in _bookkeeping(law):
        out.append(Violation("bookkeeping", (n, p, m, q, k)))
    for X in probes:
        out.extend(_probe(law, X, max_degree))
    return out


def _bookkeeping(law):
    for (n, p, m, q), lads in law.rules.items():
        for k, lad in enumerate(lads):
            if not lad.bookkeeping_ok(n, m):
                yield "bookkeeping", (n, p, m, q, k)


def _probe(law, X, D):
    P, Q = law.P, law.Q
    out = []
    F = FreeAlgebra(P, X.complex, D)
    eta = F.eta
    cpiece = _bialgebra_piece(X)

    def gen_piece(c, x):
        return tensor_map(eta, cpiece(c, x))

    def op(o, t):
        return F.gamma_basis(o[0], o[1], t)

    def Lam(m, q, z):
        """Lambda_q on a basis element z of P(X)."""
        if m == 1:
            return {(z,): Fraction(1) / Q.unit[0]} if q == 0 else {}
        n, vec, t0 = F.rep(z)
        if n == 1:
            y = cpiece((m, q), t0[0])
            return {k: v * vec.get(0, 0) / P.unit[0] for k, v in tensor_map(eta, y).items()}
        return eval_rule(law, n, vec, m, q, t0, gen_piece, op)

    def Lam_vec(m, q, vec):
        res = {}
        for z, c in vec.items():
            vec_add(res, Lam(m, q, z), c)
        return res

    def free_piece(c, z):
        return Lam(c[0], c[1], z)

    N = law.max_arity
    top = min(N, D)
    gens = lambda n: [t for t in _tensors(X.space, n, D)]
    etat = lambda t: tuple(next(iter(eta.apply_basis(b))) for b in t)
    # (iii) generators
    for m in range(2, top + 1):
        for q in range(Q.dim(m)):
            for b in X.space.basis():
                if b[0] > D:
                    continue
                z = {k: v for k, v in eta.apply_basis(b).items()}
                lhs = Lam_vec(m, q, z)
                rhs = tensor_map(eta, X.rho_basis(m, q, b))
                if lhs != rhs:
                    out.append(Violation("axiom iii", (m, q, b)))
    # (iv) counit
    for n in range(2, top + 1):
        for p in range(P.dim(n)):
            for t in gens(n):
                lhs = eval_rule(law, n, {p: 1}, 1, 0, t, gen_piece, op)
                rhs = {(z,): c for z, c in F.gamma_apply(n, {p: 1}, {etat(t): 1}).items()}
                if lhs != rhs:
                    out.append(Violation("axiom iv", (n, p, t)))
    # (i) coassociativity on products of generators
    for n in range(2, top + 1):
        for p in range(P.dim(n)):
            for t in gens(n):
                for m in range(2, top + 1):
                    for m2 in range(2, top + 2 - m):
                        for q in range(Q.dim(m)):
                            for q2 in range(Q.dim(m2)):
                                for i in range(1, m + 1):
                                    comp = Q.compose(m, m2, i, {q: 1}, {q2: 1})
                                    lhs = {}
                                    for r, c in comp.items():
                                        vec_add(lhs, eval_rule(law, n, {p: 1}, m + m2 - 1, r, t,
                                                               gen_piece, op), c)
                                    first = eval_rule(law, n, {p: 1}, m, q, t, gen_piece, op)
                                    rhs = apply_in_slot(first, i - 1,
                                                        lambda z, q2=q2: Lam(m2, q2, z))
                                    if lhs != rhs:
                                        out.append(Violation("axiom i", (n, p, m, q, i, m2, q2, t)))
    # (ii) compatibility with the composition of P
    for n in range(2, top + 1):
        for n2 in range(2, top + 2 - n):
            for p in range(P.dim(n)):
                for p2 in range(P.dim(n2)):
                    for i in range(1, n + 1):
                        comp = P.compose(n, n2, i, {p: 1}, {p2: 1})
                        for t in gens(n + n2 - 1):
                            inner = F.gamma_apply(n2, {p2: 1}, {etat(t[i - 1:i - 1 + n2]): 1})
                            outer_t = etat(t[:i - 1]), etat(t[i - 1 + n2:])
                            for m in range(2, top + 1):
                                for q in range(Q.dim(m)):
                                    lhs = eval_rule(law, n + n2 - 1, comp, m, q, t, gen_piece, op)
                                    rhs = {}
                                    for z, c in inner.items():
                                        ins = outer_t[0] + (z,) + outer_t[1]
                                        vec_add(rhs, eval_rule(law, n, {p: 1}, m, q, ins,
                                                               free_piece, op), c)
                                    if lhs != rhs:
                                        out.append(Violation("axiom ii",
                                                             (n, p, i, n2, p2, m, q, t)))
    return out


# morphisms and the transferred model structure -------------------------------------


@dataclass
class BialgebraMorphism:
    source: object
    target: object
    map: object

    def comp(self, n):
        return self.map.comp(n)

    def __matmul__(self, other):
        return BialgebraMorphism(other.source, self.target, self.map @ other.map)

    def underlying_coalgebra(self):
        return CoalgebraMorphism(self.source.coalgebra, self.target.coalgebra, self.map)

    def underlying_algebra(self):
        return AlgebraMorphism(self.source.algebra, self.target.algebra, self.map)


def check_bialgebra_morphism(f):
    return (check_algebra_morphism(f.underlying_algebra())
            + check_morphism(f.underlying_coalgebra()))


def free_bialgebra_extension(FB, X, h):
    """The bialgebra morphism P(C) -> X extending a coalgebra morphism h: C -> X."""
    g = free_extension(FB.algebra, X.algebra, h.map if hasattr(h, "map") else h)
    return BialgebraMorphism(FB, X, g.map)


def classify_bialgebra_morphism(f, family=None, seed=0, squares_per_member=2):
    """Weak equivalences are created on complexes; fibrations are tested on the
    underlying coalgebra map against a coalgebra family (their P-images)."""
    from .model import rlp_failures
    out = {"weak_equivalence": is_quasi_iso(f.map), "fibration_wrt": None}
    if family is not None:
        out["fibration_wrt"] = not rlp_failures(f.underlying_coalgebra(), family, seed,
                                                squares_per_member)
    return out


def descend_coalgebra(A, q, Qc, relations):
    """Cooperations of the coalgebra A passed to the quotient complex Qc along q.

    ``relations`` spans the kernel; raises ValueError if it is not a coideal.
    """
    from .linalg import Matrix as M
    D = Qc.max_degree
    Q = A.operad
    coops = {}
    for n in range(2, min(Q.max_arity, D) + 1):
        for k in range(Q.dim(n)):
            per = {}
            for d in range(n, D + 1):
                for c in relations[d].cols:
                    y = A.rho_apply(n, {k: 1}, {(d, i): v for i, v in c.items()})
                    if tensor_map(q, y):
                        raise ValueError("relations do not form a coideal in degree %d" % d)
                tb, tidx = Qc.space.tensor_basis(n, d)
                sec = _section(q.comp(d))
                cols = []
                for j in range(Qc.dim(d)):
                    y = tensor_map(q, A.rho_basis(n, k, (d, sec[j])))
                    cols.append({tidx[t]: v for t, v in y.items()})
                per[d] = M(len(tb), len(cols), cols)
            coops[(n, k)] = per
    return PCoalgebra(Q, Qc, coops, "quotient")


def bialgebra_pushout(a, i_free, law):
    """Pushout of a: P(A) -> X along P(i): P(A) -> P(B), taken as an algebra pushout.

    The coalgebra structure of the free algebra on X (+) P(B) comes from the law and
    descends to the quotient.  Returns (Q, jX, jB) as bialgebra morphisms.
    """
    X, PB = a.target, i_free.target
    po = algebra_pushout(a.underlying_algebra(), i_free.underlying_algebra(), keep_left=True)
    S, _, _ = direct_sum_coalgebra(X.coalgebra, PB.coalgebra)
    D = po.algebra.max_degree
    lifted = lift_free_to_bialgebra(S, law, D)
    if lifted.algebra.complex != po.free.complex:
        raise AssertionError("free algebra mismatch")
    from .linalg import kernel
    rel = {d: kernel(po.quotient.comp(d)) for d in range(1, D + 1)}
    coalg = descend_coalgebra(lifted.coalgebra, po.quotient.map, po.algebra.complex, rel)
    Q = PQBialgebra(po.algebra, coalg, law)
    jX = BialgebraMorphism(X, Q, po.jB.map)
    jB = BialgebraMorphism(PB, Q, po.jC.map)
    return Q, jX, jB, po


def factorize_bialgebra(f, family, law, max_stages=32, seed=0, squares_per_member=2,
                        confirm=4):
    """Finite-stage small object argument for bialgebras against P-images of a
    coalgebra family.

    Squares P(A) -> X, P(B) -> Y correspond to coalgebra squares A -> U(X),
    B -> U(Y); attachments are bialgebra pushouts along P(i).  Batches and
    stopping work as in the coalgebra run.
    """
    from .model import (
        Factorization, LiftingProblem, NoLiftFound, StageBudgetExhausted, _copower_map,
        _same, _batch_seeds, _stage_squares, _sum_of_maps, _verify_lift, solve_lifting,
    )
    from .algebras import pushout_induced
    P, Qop = law.P, law.Q
    top = max(f.source.max_degree, f.target.max_degree)
    Y = f.target
    Xk, fk = f.source, f
    ik = BialgebraMorphism(Xk, Xk, _identity(Xk.complex))
    known, log = [], []
    batch = 0
    for stage in range(max_stages + 1):
        U = fk.underlying_coalgebra()
        pending, checked, tries = [], 0, 0
        while not pending and tries < confirm:
            tries += 1
            squares = _stage_squares(family, U, _batch_seeds(seed, batch, squares_per_member))
            batch += 1
            checked += len(squares)
            for idx, sq in squares:
                if any(k == idx and _same(sq.a, s.a, top) and _same(sq.b, s.b, top)
                       for k, s, _ in known + [(k2, s2, None) for k2, s2 in pending]):
                    continue
                try:
                    cert = solve_lifting(sq)
                except NoLiftFound:
                    pending.append((idx, sq))
                    continue
                FB = lift_free_to_bialgebra(sq.i.target, law, top)
                hb = free_bialgebra_extension(FB, Xk, cert.h)
                if check_bialgebra_morphism(hb):
                    raise AssertionError("free extension of a lift is not a bialgebra morphism")
        if not pending:
            for _, sq, h in known:
                _verify_lift(sq, h)
            certs = {"stages": stage,
                     "i_injective": all(is_injective(ik.comp(n)) for n in range(1, top + 1)),
                     "rlp_squares": checked}
            return Factorization(Xk, ik, fk, certs, log)
        if stage == max_stages:
            raise StageBudgetExhausted("%d unlifted squares after %d stages"
                                       % (len(pending), max_stages), pending)
        maps = [family.members[idx] for idx, _ in pending]
        SA, SB, incB, isum = _sum_of_maps(Qop, maps, top)
        _, _, amap = _copower_map(Qop, [(family.members[idx].source, sq.a)
                                        for idx, sq in pending], Xk.coalgebra, top)
        _, _, bmap = _copower_map(Qop, [(family.members[idx].target, sq.b)
                                        for idx, sq in pending], Y.coalgebra, top)
        FA = lift_free_to_bialgebra(SA, law, top)
        FBs = lift_free_to_bialgebra(SB, law, top)
        a_ext = free_bialgebra_extension(FA, Xk, amap)
        i_ext = free_bialgebra_extension(FA, FBs, FBs.eta @ isum.map)
        b_ext = free_bialgebra_extension(FBs, Y, bmap)
        Q, jX, jB, po = bialgebra_pushout(a_ext, i_ext, law)
        g = pushout_induced(po, fk.underlying_algebra(), b_ext.underlying_algebra())
        fnext = BialgebraMorphism(Q, Y, g.map)
        for piece in (jX, jB, fnext):
            bad = check_bialgebra_morphism(piece)
            if bad:
                raise AssertionError("stage %d: %s" % (stage + 1, bad[0]))
        bad = check_bialgebra(Q)
        if bad:
            raise AssertionError("stage %d pushout is not a bialgebra: %s" % (stage + 1, bad[0]))
        step = {"stage": stage + 1, "attached": len(pending), "dims": Q.dims(),
                "injective": all(is_injective(jX.comp(n)) for n in range(1, top + 1))}
        if not step["injective"]:
            raise AssertionError("stage %d map is not injective" % (stage + 1))
        log.append(step)
        Unext = fnext.underlying_coalgebra()
        jXc = jX.underlying_coalgebra()
        known = [(k, LiftingProblem(s.i, Unext, jXc @ s.a, s.b), jXc @ h) for k, s, h in known]
        for (idx, sq), inc in zip(pending, incB):
            h = CoalgebraMorphism(sq.i.target, Q.coalgebra, jB.map @ FBs.eta @ inc.map)
            known.append((idx, LiftingProblem(sq.i, Unext, jXc @ sq.a, sq.b), h))
        Xk, fk, ik = Q, fnext, jX @ ik
    raise AssertionError("unreachable")


def _identity(C):
    from .complexes import identity_map
    return identity_map(C)
