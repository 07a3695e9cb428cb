"""Command-line front end.  Every verb reads JSON files and writes one JSON report.

Exit codes: 0 success, 1 a checked property failed (witness in the report),
2 input or usage error.
"""

import argparse
import hashlib
import json
import sys
from fractions import Fraction

from . import __version__
from .complexes import classify_chain_map, homology, sphere, complex_from_dims
from .operads import check_operad_axioms
from .coalgebras import (
    Cofree, PCoalgebra, check_coalgebra, equalizer, finite_subcoalgebra, product, pushout,
)
from .algebras import (
    FreeAlgebra, algebra_pushout, check_algebra, classify_algebra_morphism,
    sample_acyclic_fibrations,
)
from .bialgebras import check_bialgebra, check_mixed_law, classify_bialgebra_morphism, factorize_bialgebra
from .envelope import (
    ComparisonFailed, HypothesisFailed, check_cor_2_10, check_prop_2_8, enveloping_evaluate,
)
from .model import (
    LiftingProblem, NoLiftFound, SquareError, StageBudgetExhausted, classify_coalgebra_morphism,
    factorize_cof_trivfib, factorize_smallobject, sample_generating_family, solve_lifting,
)
from . import serialize as S
from .serialize import ParseError


class UsageError(ValueError):
    pass


class Failed(Exception):
    """A checked property failed; ``result`` carries the witness."""

    def __init__(self, result):
        super().__init__("check failed")
        self.result = result


def plain(x):
    """JSON-ready copy: tuples to lists, Fractions to "p/q", dict keys to strings."""
    if isinstance(x, Fraction):
        return S.format_scalar(x)
    if isinstance(x, dict):
        return {str(k): plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [plain(v) for v in x]
    if x is None or isinstance(x, (bool, int, str)):
        return x
    return str(x)


def _violations(vs):
    return [{"kind": v.kind, "witness": plain(v.witness)} for v in vs]


def _dims(X):
    return {str(d): n for d, n in X.dims().items()}


class Runner:
    def __init__(self, args):
        self.args = args
        self.inputs = []

    def load(self, path, loader):
        try:
            with open(path, "rb") as fh:
                raw = fh.read()
        except OSError as e:
            raise ParseError("$", "cannot read file: %s" % e.strerror, path)
        self.inputs.append({"path": path, "sha256": hashlib.sha256(raw).hexdigest()})
        try:
            data = json.loads(raw.decode("utf-8"))
        except UnicodeDecodeError:
            raise ParseError("$", "not UTF-8", path)
        except json.JSONDecodeError as e:
            raise ParseError("$", "invalid JSON at line %d column %d: %s"
                             % (e.lineno, e.colno, e.msg), path)
        try:
            return loader(data)
        except ParseError as e:
            raise e.in_file(path)

    def seed(self):
        if self.args.seed is None:
            raise UsageError("--seed is required for sampled families")
        return self.args.seed

    def bound(self, *objs):
        return min(self.args.max_degree, max(o.max_degree for o in objs))


# verbs --------------------------------------------------------------------------------


def cmd_homology(r):
    C = r.load(r.args.file, S.complex_from_json)
    h = homology(C)
    return {"dims": _dims(C), "exact_top": C.exact_top(),
            "betti": {str(d): b for d, b in h.betti.items()}, "acyclic": h.is_zero()}


def _family(r, Pop, top, acyclic):
    a = r.args
    fam = sample_generating_family(Pop, max_dim=a.family_max_dim, max_degree=top,
                                   acyclic=acyclic, seed=r.seed(), size=a.family_size)
    return fam, _manifest(fam)


def _manifest(fam):
    return {"seed": fam.seed, "acyclic": fam.acyclic, "bounds": plain(fam.bounds),
            "members": [{"source_dims": _dims(i.source), "target_dims": _dims(i.target)}
                        for i in fam.members]}


def cmd_classify(r):
    kind, f = r.load(r.args.file, S.morphism_from_json)
    out = {"kind": kind}
    if kind == "chain":
        out["classification"] = classify_chain_map(f)
        return out
    top = max(f.source.max_degree, f.target.max_degree)
    sampled = r.args.seed is not None
    if kind == "coalgebra":
        fam = None
        if sampled:
            fam, out["family"] = _family(r, f.source.operad, top, True)
        out["classification"] = classify_coalgebra_morphism(f, fam, seed=r.args.seed or 0)
    elif kind == "algebra":
        fam = None
        if sampled:
            fam = sample_acyclic_fibrations(f.source.operad, top, r.args.seed, r.args.family_size)
            out["family"] = {"seed": r.args.seed, "size": len(fam)}
        out["classification"] = classify_algebra_morphism(f, fam, seed=r.args.seed or 0)
    else:
        fam = None
        if sampled:
            fam, out["family"] = _family(r, f.source.law.Q, top, True)
        out["classification"] = classify_bialgebra_morphism(f, fam, seed=r.args.seed or 0)
    return out


def _probes(law, D):
    """Fixed probe coalgebras for the law axioms."""
    Q = law.Q
    out = [PCoalgebra(Q, sphere(1, D)), PCoalgebra(Q, sphere(2, D)),
           PCoalgebra(Q, complex_from_dims({1: 2}, max_degree=D))]
    out.append(Cofree(Q, sphere(1, D), D))
    return out


def cmd_check(r):
    what, path = r.args.what, r.args.file
    if what == "operad":
        P = r.load(path, lambda d: S.operad_from_json(d, check=False))
        bad = P.module.presentation_violations() + check_operad_axioms(P)
    elif what == "coalgebra":
        bad = check_coalgebra(r.load(path, lambda d: S.coalgebra_from_json(d, validate=False)))
    elif what == "algebra":
        bad = check_algebra(r.load(path, lambda d: S.algebra_from_json(d, validate=False)))
    elif what == "bialgebra":
        bad = check_bialgebra(r.load(path, lambda d: S.bialgebra_from_json(d, validate=False)))
    else:
        law = r.load(path, S.law_from_json)
        D = min(r.args.max_degree, 3)
        bad = check_mixed_law(law, _probes(law, D), D)
    out = {"what": what, "valid": not bad, "violations": _violations(bad)}
    if bad:
        raise Failed(out)
    return out


def _operad(r):
    return S.operad_from_json(r.args.operad, "--operad")


def cmd_cofree(r):
    V = r.load(r.args.file, S.complex_from_json)
    F = Cofree(_operad(r), V, r.args.max_degree)
    return {"dims": _dims(F), "coalgebra": S.coalgebra_to_json(F)}


def cmd_free(r):
    V = r.load(r.args.file, S.complex_from_json)
    F = FreeAlgebra(_operad(r), V, r.args.max_degree)
    return {"dims": _dims(F), "algebra": S.algebra_to_json(F), "eta": S.map_to_json(F.eta)}


def cmd_product(r):
    A = r.load(r.args.left, S.coalgebra_from_json)
    B = r.load(r.args.right, S.coalgebra_from_json)
    E, pA, pB = product(A, B, r.bound(A, B))
    return {"dims": _dims(E), "coalgebra": S.coalgebra_to_json(E),
            "projections": [S.map_to_json(pA.map), S.map_to_json(pB.map)]}


def cmd_equalizer(r):
    k0, f = r.load(r.args.left, S.morphism_from_json)
    k1, g = r.load(r.args.right, S.morphism_from_json)
    if k0 != "coalgebra" or k1 != "coalgebra":
        raise UsageError("equalizer needs two coalgebra morphisms")
    if f.source.dims() != g.source.dims() or f.target.dims() != g.target.dims():
        raise UsageError("morphisms are not parallel")
    E, inc = equalizer(f, g)
    return {"dims": _dims(E), "coalgebra": S.coalgebra_to_json(E),
            "inclusion": S.map_to_json(inc.map)}


def cmd_pushout(r):
    k0, f = r.load(r.args.left, S.morphism_from_json)
    k1, g = r.load(r.args.right, S.morphism_from_json)
    if k0 != k1 or k0 not in ("coalgebra", "algebra"):
        raise UsageError("pushout needs two coalgebra or two algebra morphisms")
    if f.source.dims() != g.source.dims():
        raise UsageError("morphisms do not share a source")
    if k0 == "coalgebra":
        Q, jB, jC = pushout(f, g)
        return {"dims": _dims(Q), "coalgebra": S.coalgebra_to_json(Q),
                "legs": [S.map_to_json(jB.map), S.map_to_json(jC.map)]}
    po = algebra_pushout(f, g)
    return {"dims": _dims(po.algebra), "algebra": S.algebra_to_json(po.algebra),
            "legs": [S.map_to_json(po.jB.map), S.map_to_json(po.jC.map)]}


def _element(text, A):
    try:
        deg, coords = text.split(":", 1)
        deg = int(deg)
        vals = [S.scalar_from_json(x, "--element") for x in coords.split(",")]
    except (ValueError, ParseError):
        raise UsageError("--element must look like 'degree:c0,c1,...'")
    if not 1 <= deg <= A.max_degree or len(vals) != A.complex.dim(deg):
        raise UsageError("--element needs %s coordinates in degree %d"
                         % (A.complex.dim(deg) if 1 <= deg <= A.max_degree else 0, deg))
    vec = {i: v for i, v in enumerate(vals) if v}
    if not vec:
        raise UsageError("--element must be nonzero")
    return deg, vec


def cmd_subcoalgebra(r):
    A = r.load(r.args.file, S.coalgebra_from_json)
    x = _element(r.args.element, A)
    K, inc = finite_subcoalgebra(A, x)
    top = max([d for d, n in K.dims().items() if n] or [0])
    return {"dims": _dims(K), "coalgebra": S.coalgebra_to_json(K),
            "inclusion": S.map_to_json(inc.map), "vanishes_above": top}


def _pair(r):
    A = r.load(r.args.coalgebra, S.coalgebra_from_json)
    C = r.load(r.args.complex, S.complex_from_json)
    return A, C, r.bound(A, C)


def cmd_envelope(r):
    A, C, D = _pair(r)
    ev = enveloping_evaluate(A, C, D)
    return {"dims": _dims(ev.U), "coalgebra": S.coalgebra_to_json(ev.U)}


def cmd_prop28(r):
    A, C, D = _pair(r)
    try:
        cert = check_prop_2_8(A, C, D)
    except ComparisonFailed as e:
        raise Failed({"isomorphism": False, "reason": str(e), "degree": e.degree})
    return {"isomorphism": True, "envelope_dims": plain(cert.envelope_dims),
            "product_dims": plain(cert.product_dims),
            "forward": S.map_to_json(cert.forward.map), "backward": S.map_to_json(cert.backward.map)}


def cmd_cor210(r):
    A, C, D = _pair(r)
    try:
        res = check_cor_2_10(A, C, D)
    except HypothesisFailed as e:
        raise UsageError(str(e))
    out = {"weak_equivalence": res["weak_equivalence"], "product_dims": plain(res["product_dims"]),
           "betti": plain(res["betti"])}
    if not res["weak_equivalence"]:
        raise Failed(out)
    return out


def cmd_lift(r):
    sq = r.load(r.args.file, S.lifting_from_json)
    if not all(hasattr(sq[k], "source") and hasattr(sq[k], "map") for k in sq):
        raise UsageError("lift needs coalgebra morphisms")
    try:
        pr = LiftingProblem(sq["i"], sq["p"], sq["a"], sq["b"])
    except SquareError as e:
        raise UsageError(str(e))
    try:
        cert = solve_lifting(pr, r.args.strategy)
    except NoLiftFound as e:
        raise Failed({"lifted": False, "reason": str(e), "degree": e.degree})
    return {"lifted": True, "strategy": cert.strategy, "h": S.map_to_json(cert.h.map)}


def _fact_report(fz):
    return {"middle_dims": _dims(fz.middle), "certificates": plain(fz.certificates),
            "log": plain(fz.log), "j": S.map_to_json(fz.j.map), "q": S.map_to_json(fz.q.map)}


def cmd_factorize(r):
    mode = r.args.mode
    kind, f = r.load(r.args.file, S.morphism_from_json)
    want = "bialgebra" if mode == "bialgebra" else "coalgebra"
    if kind != want:
        raise UsageError("factorize %s needs a %s morphism" % (mode, want))
    top = max(f.source.max_degree, f.target.max_degree)
    if mode == "cof-trivfib":
        fz = factorize_cof_trivfib(f, min(top, r.args.max_degree))
        out = _fact_report(fz)
        if not all(fz.certificates.values()):
            raise Failed(out)
        return out
    Pop = f.source.operad if mode == "smallobject" else f.source.law.Q
    fam, manifest = _family(r, Pop, top, r.args.acyclic)
    try:
        if mode == "smallobject":
            fz = factorize_smallobject(f, fam, r.args.max_stages, r.args.seed)
        else:
            fz = factorize_bialgebra(f, fam, f.source.law, r.args.max_stages, r.args.seed)
    except StageBudgetExhausted as e:
        raise Failed({"terminated": False, "reason": str(e), "unlifted": len(e.remaining),
                      "family": manifest})
    out = _fact_report(fz)
    out["family"] = manifest
    out["terminated"] = True
    bad = [k for k, v in fz.certificates.items() if v is False]
    if bad:
        raise Failed(out)
    return out


def cmd_sample_family(r):
    fam, manifest = _family(r, _operad(r), r.args.max_degree, r.args.acyclic)
    manifest["members"] = [S.morphism_to_json(i, "coalgebra") for i in fam.members]
    return manifest


VERBS = {
    "homology": cmd_homology, "classify": cmd_classify, "check": cmd_check,
    "cofree": cmd_cofree, "free": cmd_free, "product": cmd_product,
    "equalizer": cmd_equalizer, "pushout": cmd_pushout, "subcoalgebra": cmd_subcoalgebra,
    "envelope": cmd_envelope, "prop28": cmd_prop28, "cor210": cmd_cor210, "lift": cmd_lift,
    "factorize": cmd_factorize, "sample-family": cmd_sample_family,
}


def _uint64(text):
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-degree", type=_positive, default=4)
    common.add_argument("--max-stages", type=int, default=32)
    common.add_argument("--seed", type=_uint64, default=None)
    common.add_argument("--out", default=None)
    common.add_argument("--family-size", type=_positive, default=8)
    common.add_argument("--family-max-dim", type=_positive, default=4)
    common.add_argument("--acyclic", action="store_true")
    p = argparse.ArgumentParser(prog="operadic", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="verb", required=True)

    def add(name, *positional, **extra):
        sp = sub.add_parser(name, parents=[common])
        for arg in positional:
            if isinstance(arg, tuple):
                sp.add_argument(arg[0], choices=arg[1])
            else:
                sp.add_argument(arg)
        for flag, kw in extra.items():
            sp.add_argument("--" + flag.replace("_", "-"), **kw)
        return sp

    add("homology", "file")
    add("classify", "file")
    add("check", ("what", ["operad", "coalgebra", "algebra", "bialgebra", "law"]), "file")
    add("cofree", "file", operad={"default": "As"})
    add("free", "file", operad={"default": "As"})
    add("product", "left", "right")
    add("equalizer", "left", "right")
    add("pushout", "left", "right")
    add("subcoalgebra", "file", element={"required": True})
    add("envelope", "coalgebra", "complex")
    add("prop28", "coalgebra", "complex")
    add("cor210", "coalgebra", "complex")
    add("lift", "file", strategy={"default": "auto",
                                  "choices": ["auto", "adjunction", "stratified"]})
    add("factorize", ("mode", ["cof-trivfib", "smallobject", "bialgebra"]), "file")
    add("sample-family", operad={"default": "As"})
    return p


def _flags(args):
    return {k: v for k, v in sorted(vars(args).items())
            if k not in ("out", "verb", "file", "left", "right", "coalgebra", "complex")}


def run(argv):
    """(exit code, report dict)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return (e.code if isinstance(e.code, int) else 2), None, None
    r = Runner(args)
    report = {"tool": "operadic", "version": __version__, "verb": args.verb,
              "flags": _flags(args)}
    code = 0
    try:
        report["result"] = plain(VERBS[args.verb](r))
        report["status"] = "ok"
    except Failed as e:
        report["result"] = plain(e.result)
        report["status"] = "failed"
        code = 1
    except ParseError as e:
        report["status"] = "error"
        report["error"] = {"file": e.file, "path": e.path, "reason": e.reason}
        code = 2
    except UsageError as e:
        report["status"] = "error"
        report["error"] = {"reason": str(e)}
        code = 2
    report["inputs"] = r.inputs
    return code, report, args.out


def main(argv=None):
    code, report, path = run(sys.argv[1:] if argv is None else argv)
    if report is None:
        return code
    text = S.dumps(report)
    if code == 2:
        err = report["error"]
        where = ":".join(x for x in (err.get("file"), err.get("path")) if x)
        sys.stderr.write("error: %s%s\n" % (where + ": " if where else "", err["reason"]))
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
