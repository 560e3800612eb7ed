"""Command-line entry point.

Exit codes: 0 when every check passes, 1 when some check fails, 2 for
input or usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import formats
from .algebra import integrability_defect, jacobi_defect
from .errors import FlathermError, InputError, NotAComplexStructure, NotFlat, NotTwoStepSolvable, SpecInvalid
from .frames import basis_frame, bianchi_defect, standard_frame, structure_equation_defect
from .gensearch import (
    FlatSpec,
    KahlerFlatSpec,
    SearchConfig,
    build_flat,
    build_kaehler_flat,
    search_integrable,
)
from .hermitian import (
    admissible_frame,
    chern_connection_oracle,
    chern_torsion,
    decompose,
    kaehler_defect,
    lemma2_defect,
    proof_suite,
)
from .linalg import DEFAULT_TOL
from .riemannian import flatness_defect, milnor_decompose, milnor_verify
from .scalars import ZERO, is_exact, is_zero_defect, max_norm

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class Report:
    def __init__(self, command, tol):
        self.command = command
        self.tol = tol
        self.records = []
        self.data = {}
        self.lines = []
        self.final = None
        self.t0 = time.perf_counter()

    def check(self, name, defect, threshold=None, exact=None):
        threshold = self.tol if threshold is None else threshold
        if exact is None:
            exact = isinstance(defect, type(ZERO)) or isinstance(defect, int)
        verdict = "PASS" if is_zero_defect(defect, threshold) else "FAIL"
        self.records.append({
            "name": name,
            "mode": "exact" if exact else "float",
            "defect": str(defect) if exact else float(defect),
            "threshold": 0 if exact else threshold,
            "verdict": verdict,
        })
        return verdict == "PASS"

    def clause(self, cl, threshold):
        """Record a normal-form clause, which carries its own verdict.

        Structural clauses (dimension counts, spans, the smallest row norm of
        f) have no defect to compare against the threshold.
        """
        structural = cl.defect is None or cl.name == "f_rows_nonzero"
        exact = not structural and (isinstance(cl.defect, type(ZERO)) or isinstance(cl.defect, int))
        self.records.append({
            "name": f"milnor:{cl.name}",
            "mode": "exact" if exact else "float",
            "defect": None if structural else (str(cl.defect) if exact else float(cl.defect)),
            "threshold": None if structural else (0 if exact else threshold),
            "verdict": "PASS" if cl.passed else "FAIL",
        })

    @property
    def passed(self):
        return all(r["verdict"] == "PASS" for r in self.records)

    def to_dict(self):
        return {
            "command": self.command,
            "records": self.records,
            "summary": "PASS" if self.passed else "FAIL",
            "data": formats.jsonable(self.data),
            "wall_time": round(time.perf_counter() - self.t0, 6),
        }

    def render(self, as_json):
        if as_json:
            return json.dumps(self.to_dict(), sort_keys=True, indent=2)
        out = list(self.lines)
        for r in self.records:
            if r["threshold"] is None:
                thr, dfc = "structural", "-"
            else:
                thr = "exact" if r["mode"] == "exact" else f"< {r['threshold']:g}"
                dfc = r["defect"]
            out.append(f"{r['verdict']:4}  {r['name']:<32} defect={dfc}  threshold={thr}")
        verdict = "PASS" if self.passed else "FAIL"
        if self.final:
            out += [f"VERDICT: {verdict}", self.final]
        else:
            out.append(f"SUMMARY: {verdict}")
        return "\n".join(out)


def _global_options(parser, suppress):
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--json", action="store_true", default=default(False), help="structured JSON report")
    parser.add_argument("--tolerance", type=float, default=default(DEFAULT_TOL), help="float-mode threshold")
    parser.add_argument("--seed", type=int, default=default(0), help="seed for randomized steps")
    parser.add_argument("--exact", action="store_true", default=default(False),
                        help="require exact rational input")


def build_parser():
    p = argparse.ArgumentParser(prog="flatherm", description="Invariants of metric Lie algebras with complex structures.")
    _global_options(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="run selected checks on an algebra file")
    c.add_argument("file")
    for flag, hlp in (("--jacobi", "Jacobi identity"), ("--integrable", "integrability of J"),
                      ("--flat", "flatness of the metric"), ("--kahler", "vanishing Chern torsion"),
                      ("--lemma2", "admissible-frame constraint table"), ("--milnor", "flat normal form"),
                      ("--bianchi", "structure equation and Bianchi families")):
        c.add_argument(flag, action="store_true", help=hlp)

    f = sub.add_parser("frame", help="structure constants C, D in a frame")
    f.add_argument("file")
    f.add_argument("--vectors", help="comma separated basis indices x_k giving e_k = (x_k - iJx_k)/sqrt2")

    t = sub.add_parser("torsion", help="Chern torsion and its connection oracle")
    t.add_argument("file")
    t.add_argument("--vectors")

    d = sub.add_parser("decompose", help="Hermitian decomposition (and flat normal form with --milnor)")
    d.add_argument("file")
    d.add_argument("--milnor", action="store_true")

    g = sub.add_parser("generate", help="emit a flat or Kaehler flat algebra")
    kind = g.add_mutually_exclusive_group(required=True)
    kind.add_argument("--flat", action="store_true")
    kind.add_argument("--kahler-flat", action="store_true")
    g.add_argument("--spec", help="JSON file with the spec fields")
    for name in ("p", "dim-h", "dim-z", "q", "m", "t"):
        g.add_argument(f"--{name}", type=int)
    g.add_argument("--f", help="rows separated by ';', entries by ',' e.g. '1,0;0,2'")
    g.add_argument("--out", help="write the algebra here instead of stdout")

    s = sub.add_parser("search", help="search for integrable compatible J and record their torsion")
    s.add_argument("file")
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--threshold", type=float, default=1e-10, help="integrability threshold")
    s.add_argument("--torsion-threshold", type=float, default=1e-8)
    s.add_argument("--max-iters", type=int, default=500)
    s.add_argument("--method", choices=("lm", "gradient"), default="lm")

    ps = sub.add_parser("proof-suite", help="identities of the flat-implies-Kaehler argument")
    ps.add_argument("file")

    for sp in (c, f, t, d, g, s, ps):
        _global_options(sp, suppress=True)
    return p


def _load(args, need_j=False):
    L, g, J, meta = formats.load_algebra(args.file, exact=True if args.exact else None)
    if need_j and J is None:
        raise InputError("this command needs a complex structure 'J'", "J")
    return L, g, J, meta


def _require_complex(rep, L, J):
    try:
        d = integrability_defect(L, J, rep.tol)
    except NotAComplexStructure as exc:
        raise InputError(str(exc), "J") from exc
    return d


def cmd_check(args, rep):
    L, g, J, meta = _load(args)
    rep.data["name"] = meta["name"]
    chosen = [k for k in ("jacobi", "integrable", "flat", "kahler", "lemma2", "milnor", "bianchi") if getattr(args, k)]
    if not chosen:
        chosen = ["jacobi"] + (["integrable"] if J is not None else [])
    if "jacobi" in chosen:
        rep.check("jacobi", jacobi_defect(L))
    if "flat" in chosen:
        rep.check("flatness", flatness_defect(L, g))
    if "milnor" in chosen:
        try:
            F = milnor_decompose(L, g, seed=args.seed, tol=rep.tol)
        except NotFlat as exc:
            rep.check("milnor_normal_form", float("inf"))
            rep.lines.append(f"milnor: {exc}")
        else:
            for cl in milnor_verify(L, g, F, tol=max(rep.tol, 1e-8)).clauses:
                rep.clause(cl, max(rep.tol, 1e-8))
    needs_j = {"integrable", "kahler", "lemma2", "bianchi"} & set(chosen)
    if needs_j and J is None:
        raise InputError("checks " + ", ".join(sorted(needs_j)) + " need a complex structure 'J'", "J")
    integrable = True
    if needs_j:
        integ = _require_complex(rep, L, J)
        integrable = is_zero_defect(integ, rep.tol)
        if "integrable" in chosen or not integrable:
            rep.check("integrability", integ)
    if "kahler" in chosen and integrable:
        rep.check("kaehler", kaehler_defect(L, g, J, seed=args.seed, tol=rep.tol))
    if "bianchi" in chosen and integrable:
        F = standard_frame(L, g, J, rep.tol)
        rep.check("structure_equation", structure_equation_defect(F))
        for k, v in enumerate(bianchi_defect(F), start=1):
            rep.check(f"bianchi_family_{k}", v)
    if "lemma2" in chosen and integrable:
        try:
            AF = admissible_frame(L, g, J, seed=None, tol=rep.tol)
        except NotTwoStepSolvable as exc:
            raise InputError(f"lemma2 needs a 2-step solvable algebra: {exc}", "brackets") from exc
        rep.data.update(r=AF.r, s=AF.s, n=AF.n)
        rep.check("lemma2", lemma2_defect(AF))


def _frame_for(args, L, g, J, tol):
    if args.vectors:
        try:
            idx = [int(v) for v in args.vectors.split(",")]
        except ValueError as exc:
            raise InputError(f"bad --vectors list {args.vectors!r}", "--vectors") from exc
        if any(not 0 <= i < L.dim for i in idx):
            raise InputError(f"--vectors indices must lie in 0..{L.dim - 1}", "--vectors")
        return basis_frame(L, g, J, idx, tol)
    return standard_frame(L, g, J, tol)


def cmd_frame(args, rep):
    L, g, J, _ = _load(args, need_j=True)
    _require_complex(rep, L, J)
    F = _frame_for(args, L, g, J, rep.tol)
    rep.data.update(
        e=formats.array_to_json(F.e), C=formats.array_to_json(F.C), D=formats.array_to_json(F.D),
        gmat=formats.array_to_json(F.gmat),
    )
    rep.lines += _nonzero_lines("C", F.C) + _nonzero_lines("D", F.D)
    rep.check("structure_equation", structure_equation_defect(F))
    for k, v in enumerate(bianchi_defect(F), start=1):
        rep.check(f"bianchi_family_{k}", v)


def _fmt(v):
    return json.dumps(formats.jsonable(v), sort_keys=True)


def _nonzero_lines(label, A, tol=1e-14):
    out = []
    for idx in np.ndindex(A.shape):
        v = A[idx]
        if (v != 0) if is_exact(A) else abs(v) > tol:
            j, i, k = idx
            out.append(f"{label}^{j + 1}_{i + 1}{k + 1} = {_fmt(v)}")
    return out


def cmd_torsion(args, rep):
    L, g, J, _ = _load(args, need_j=True)
    integ = _require_complex(rep, L, J)
    if not rep.check("integrability", integ):
        return
    F = _frame_for(args, L, g, J, rep.tol)
    T = chern_torsion(F, rep.tol).T
    O = chern_connection_oracle(F).T
    rep.data["T"] = formats.array_to_json(T)
    rep.lines += _nonzero_lines("T", T)
    rep.check("formula_vs_oracle", max_norm(T - O), threshold=min(rep.tol, 1e-12))
    rep.check("kaehler", max_norm(T))


def _subspace_json(S):
    return {"dim": S.dim, "basis": formats.array_to_json(S.basis)}


def cmd_decompose(args, rep):
    L, g, J, _ = _load(args)
    if args.milnor:
        try:
            F = milnor_decompose(L, g, seed=args.seed, tol=rep.tol)
        except NotFlat as exc:
            raise_fail(rep, "flatness", str(exc))
            return
        rep.data["milnor"] = {
            "h": _subspace_json(F.h), "z": _subspace_json(F.z), "gprime": _subspace_json(F.gprime),
            "epsilon": formats.array_to_json(F.epsilon), "f": formats.array_to_json(F.f),
        }
        for cl in milnor_verify(L, g, F, tol=max(rep.tol, 1e-8)).clauses:
            rep.clause(cl, max(rep.tol, 1e-8))
        rep.lines.append(f"dim h={F.h.dim} dim z={F.z.dim} dim g'={F.gprime.dim} p={F.p}")
        if J is None:
            return
    if J is None:
        raise InputError("Hermitian decomposition needs a complex structure 'J'", "J")
    if not rep.check("integrability", _require_complex(rep, L, J)):
        return
    try:
        D = decompose(L, g, J, rep.tol)
    except NotTwoStepSolvable as exc:
        raise InputError(f"decompose needs a 2-step solvable algebra: {exc}", "brackets") from exc
    rep.data["hermitian"] = {
        "gprime": _subspace_json(D.gprime), "gprimeJ": _subspace_json(D.gprimeJ), "U": _subspace_json(D.U),
        "V": _subspace_json(D.V), "Vprime": _subspace_json(D.Vprime), "W": _subspace_json(D.W),
        "r": D.r, "s": D.s, "n": D.n,
    }
    rep.lines.append(
        f"dim g'={D.gprime.dim} dim g'_J={D.gprimeJ.dim} dim U={D.U.dim} dim V={D.V.dim} "
        f"dim V'={D.Vprime.dim} dim W={D.W.dim}  r={D.r} s={D.s} n={D.n}"
    )


def raise_fail(rep, name, message):
    rep.check(name, float("inf"))
    rep.lines.append(f"{name}: {message}")


def _parse_f(text):
    try:
        return tuple(tuple(row.split(",")) for row in text.split(";"))
    except AttributeError as exc:
        raise InputError("--f is required", "--f") from exc


def cmd_generate(args, rep):
    if args.spec:
        try:
            with open(args.spec) as fh:
                spec = json.load(fh)
        except OSError as exc:
            raise InputError(f"cannot read {args.spec}: {exc.strerror}", "--spec") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"{args.spec}: invalid JSON at line {exc.lineno}", "--spec") from exc
    else:
        spec = {k: getattr(args, k.replace("-", "_")) for k in ("p", "dim-h", "dim-z", "q", "m", "t")}
        spec = {k.replace("-", "_"): v for k, v in spec.items() if v is not None}
        if args.f is not None:
            spec["f"] = _parse_f(args.f)
    try:
        if args.flat:
            obj = FlatSpec(int(spec["p"]), int(spec["dim_h"]), int(spec.get("dim_z", 0)), tuple(map(tuple, spec["f"])))
            L, g = build_flat(obj)
            J, name = None, f"flat-p{obj.p}-h{obj.dim_h}-z{obj.dim_z}"
        else:
            obj = KahlerFlatSpec(int(spec["p"]), int(spec.get("q", 0)), int(spec.get("m", 0)), int(spec.get("t", 0)),
                                 tuple(map(tuple, spec["f"])))
            L, g, J = build_kaehler_flat(obj)
            name = f"kaehler-flat-p{obj.p}-q{obj.q}-m{obj.m}-t{obj.t}"
    except KeyError as exc:
        raise InputError(f"missing spec field {exc.args[0]}", str(exc.args[0])) from exc
    except SpecInvalid as exc:
        raise InputError(str(exc), "spec") from exc
    rep.check("flatness", flatness_defect(L, g))
    if J is not None:
        rep.check("integrability", integrability_defect(L, J))
    text = formats.dump_algebra(L, g, J, name)
    rep.data["algebra"] = formats.algebra_to_dict(L, g, J, name)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        rep.lines.append(f"wrote {args.out}")
    else:
        rep.lines.append(text.rstrip())


def cmd_search(args, rep):
    L, g, _, _ = _load(args)
    if L.dim % 2:
        raise InputError(f"search needs even dimension, got {L.dim}", "dim")
    cfg = SearchConfig(
        samples=args.samples, seed=args.seed, max_refine_iters=args.max_iters,
        integrability_threshold=args.threshold, torsion_threshold=args.torsion_threshold, method=args.method,
    )
    fd = flatness_defect(L, g)
    flat = is_zero_defect(fd, rep.tol)
    R = search_integrable(L, g, cfg)
    rep.data["search"] = R.to_dict()
    rep.data["flat"] = flat
    rep.check("manifold_retraction", R.max_manifold_defect, threshold=1e-12)
    if flat:
        # flat input: every integrable J must be Kaehler
        rep.check("non_kahler_integrable_count", R.non_kahler_integrable, threshold=0.5)
    for r in R.records:
        tors = "-" if r.torsion is None else f"{r.torsion:.3e}"
        rep.lines.append(
            f"sample {r.index:4d} initial={r.initial_defect:.3e} refined={r.refined_defect:.3e} "
            f"iters={r.iterations} torsion={tors}{'  ' + r.note if r.note else ''}"
        )
    rep.final = R.summary_line


def cmd_proof_suite(args, rep):
    L, g, J, _ = _load(args, need_j=True)
    if not rep.check("integrability", _require_complex(rep, L, J)):
        return
    try:
        P = proof_suite(L, g, J, seed=None, tol=rep.tol)
    except NotFlat as exc:
        raise_fail(rep, "flatness", str(exc))
        return
    except NotTwoStepSolvable as exc:
        raise InputError(str(exc), "brackets") from exc
    rep.data.update(r=P.r, s=P.s, exact=P.exact)
    thr = max(rep.tol, 1e-9)
    for name, v in P.defects.items():
        rep.check(name, v, threshold=thr)


COMMANDS = {
    "check": cmd_check, "frame": cmd_frame, "torsion": cmd_torsion, "decompose": cmd_decompose,
    "generate": cmd_generate, "search": cmd_search, "proof-suite": cmd_proof_suite,
}


def run(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    rep = Report(argv, args.tolerance)
    try:
        COMMANDS[args.command](args, rep)
    except InputError as exc:
        print(f"input error: {exc}", file=stderr)
        return EXIT_INPUT
    except FlathermError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    print(rep.render(args.json), file=stdout)
    return EXIT_PASS if rep.passed else EXIT_FAIL


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
