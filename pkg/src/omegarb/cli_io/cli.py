"""The ``omegarb`` command line.

Every command loads one problem file and prints one report, as JSON (default)
or text.  Exit codes: 0 pass, 1 mathematical failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback
from pathlib import Path

import numpy as np

from .. import cohomology as coh
from .. import deformation as dfm
from .. import linfty, oracle
from ..errors import (
    CoboundaryNotSquareZero, ComponentFormulaMismatch, DegreeCapExceeded, DimensionMismatch,
    EmbeddingMismatch, ExactnessFailure, FieldError, ImageExceedsKernel, InvalidDeformation,
    NotACoboundaryWitness, NotMaurerCartan, SchemaError, SemigroupNotAssociative, ShapeError,
    SlotMembershipViolation, SlotOutOfRange,
)
from ..structures import RelativeRBSystem
from . import report as R
from .schema import Problem, dump, from_document, load, pretty, to_document

MATH_ERRORS = (CoboundaryNotSquareZero, ComponentFormulaMismatch, EmbeddingMismatch, ExactnessFailure,
               ImageExceedsKernel, NotACoboundaryWitness, NotMaurerCartan)
INPUT_ERRORS = (SchemaError, ShapeError, SemigroupNotAssociative, FieldError, DimensionMismatch,
                DegreeCapExceeded, InvalidDeformation, SlotOutOfRange, SlotMembershipViolation,
                OSError, ValueError)


def _provenance(exc) -> str:
    """Innermost package module on the traceback, e.g. 'cohomology' or 'cli_io'."""
    mod = "cli_io"
    for frame, _ in traceback.walk_tb(exc.__traceback__):
        name = frame.f_globals.get("__name__", "")
        if name.startswith("omegarb."):
            parts = name.split(".")
            mod = parts[1]
    return mod


def _names(system) -> list:
    S = system.semigroup
    return list(S.names) if getattr(S, "names", None) else [str(i) for i in range(S.size)]


def _require_deformation(p: Problem):
    if p.deformation is None:
        raise ShapeError("the file has no deformation block")
    return p.deformation


def _default(p: Problem, command: str, key: str, given, fallback):
    if given is not None:
        return given
    return p.defaults().get(command, {}).get(key, fallback)


# ---------------------------------------------------------------------------
# commands


def cmd_validate(p: Problem, args) -> dict:
    rep = p.system.validate()
    d = rep.to_dict(p.field)
    kind = "relative" if p.relative else "absolute"
    summary = (f"{kind} system satisfies all {len(d['identities'])} identities" if rep.ok
               else f"{rep.failures} failing components")
    return {"status": "pass" if rep.ok else "fail", "summary": summary, "kind": kind, **d}


def _mc_residual(system, method):
    if isinstance(system, RelativeRBSystem):
        if method == "direct":
            return linfty.mc_residual_relative_direct(system)
        return linfty.mc_residual_relative(system)
    if method == "direct":
        return linfty.mc_residual_absolute_direct(system)
    return linfty.mc_residual_absolute(system, method)


def cmd_mc_residual(p: Problem, args) -> dict:
    res = _mc_residual(p.system, args.method)
    valid = p.system.validate().ok
    zero = res.is_zero()
    return {"status": "pass" if zero else "fail",
            "summary": ("Maurer-Cartan residual vanishes" if zero else "Maurer-Cartan residual is nonzero")
            + ("" if zero == valid else "; disagrees with the validator"),
            "method": args.method, "validator_ok": valid, "agrees": zero == valid,
            "residual": R.element_json(res, _names(p.system))}


def _named_element(system, name: str):
    if isinstance(system, RelativeRBSystem):
        ctx = linfty.WContext(system.semigroup, system.dim_a, system.dim_v, system.field)
        if name == "mc":
            return linfty.relative_mc_element(system)
        if name == "pi":
            return linfty.RelativeElement(ctx, 2, system.assact.pi())
        if name == "T":
            return linfty.RelativeElement(ctx, 2, None, system.T)
        raise ShapeError(f"unknown relative element {name!r}; use pi, T or mc")
    S, d, F = system.semigroup, system.dim, system.field
    if name == "mc":
        return linfty.absolute_mc_element(system)
    if name == "mu":
        return linfty.AbsoluteElement(S, d, 2, system.algebra.mu, None, F)
    if name == "T":
        return linfty.AbsoluteElement(S, d, 2, None, system.T, F)
    raise ShapeError(f"unknown absolute element {name!r}; use mu, T or mc")


def cmd_bracket(p: Problem, args) -> dict:
    xs = [_named_element(p.system, a) for a in args.elements]
    if p.relative:
        out = linfty.lprime(xs, p.system.weight)
        which = "l'"
    else:
        out = linfty.rho(xs, p.system.weight, args.method)
        which = "rho"
    label = f"{which}_{len(xs)}({', '.join(args.elements)})"
    return {"status": "pass", "summary": f"{label} is {'zero' if out.is_zero() else 'nonzero'}",
            "bracket": label, "result": R.element_json(out, _names(p.system))}


def cmd_cohomology(p: Problem, args) -> dict:
    kind = _default(p, "cohomology", "complex", args.complex, "relrba" if p.relative else "rba")
    N = int(_default(p, "cohomology", "max_degree", args.max_degree, 3))
    if kind in coh.RELATIVE_KINDS and not p.relative and not args.regular:
        raise ShapeError(f"complex {kind!r} needs a module block (or --regular to use A acting on itself)")
    if kind in coh.ABSOLUTE_KINDS and p.relative:
        raise ShapeError(f"complex {kind!r} needs an absolute system")
    cx = coh.Complex(kind, p.system, method=args.method)
    try:
        rows = coh.cohomology_dims(cx, max_degree=N, cap=args.cap)
    except CoboundaryNotSquareZero as exc:
        return {"status": "fail", "summary": str(exc), "complex": kind}
    table = [r.as_dict() for r in rows]
    dims = ", ".join(str(r.dim_h) for r in rows)
    return {"status": "pass", "summary": f"dim H^n for n=1..{N}: {dims}", "complex": kind,
            "max_degree": N, "table": table}


def cmd_les_check(p: Problem, args) -> dict:
    N = int(_default(p, "les-check", "max_degree", args.max_degree, 3))
    rel = True if args.relative else None
    rep = coh.les_check(p.system, max_degree=N, relative=rel, cap=args.cap)
    bad = [n.as_dict()["node"] for n in rep.nodes if not n.exact]
    summary = (f"exact at all {len(rep.nodes)} nodes through degree {N}" if rep.ok
               else f"exactness fails at {', '.join(bad)}")
    return {"status": "pass" if rep.ok else "fail", "summary": summary, "les": rep.as_dict()}


# deformation --------------------------------------------------------------


def _cochain_parts_json(c, system):
    f, th = c.parts()
    names = _names(system)
    out = {}
    if f is not None:
        out["f"] = (R.mixed_components(f, names) if hasattr(f, "blocks") else R.sparse_map(f, names))
    if th is not None:
        out["theta"] = R.sparse_map(th, names)
    return out


def cmd_deform_verify(p: Problem, args) -> dict:
    d = _require_deformation(p)
    rep = dfm.verify_deformation(d)
    summary = (f"deformation identities hold through order {d.order}" if rep.ok else
               f"first failure at order {rep.first_failure[0]}: {rep.first_failure[1]}")
    return {"status": "pass" if rep.ok else "fail", "summary": summary, **rep.as_dict(p.field)}


def cmd_deform_infinitesimal(p: Problem, args) -> dict:
    d = _require_deformation(p)
    n = args.order
    c = dfm.infinitesimal(d, n)
    ok, res = dfm.is_two_cocycle(c, d.base)
    return {"status": "pass", "summary": f"coefficient of t^{n} is {'zero' if c.is_zero() else 'nonzero'}"
            + f" and {'is' if ok else 'is not'} a 2-cocycle",
            "order": n, "cocycle": ok, "cochain": R.coords_json(c, p.field),
            "parts": _cochain_parts_json(c, d.base)}


def cmd_deform_cocycle(p: Problem, args) -> dict:
    d = _require_deformation(p)
    lower_zero = all(dfm.infinitesimal(d, i).is_zero() for i in range(1, args.order))
    c = dfm.infinitesimal(d, args.order)
    ok, res = dfm.is_two_cocycle(c, d.base)
    out = {"status": "pass" if ok else "fail", "order": args.order, "lower_orders_vanish": lower_zero,
           "summary": f"order-{args.order} coefficients {'form' if ok else 'do not form'} a 2-cocycle",
           "residual": R.coords_json(res, p.field)}
    if args.order > 1 and not lower_zero:
        out["note"] = "lower coefficients are nonzero; the cocycle condition is only guaranteed for the leading term"
    return out


def cmd_deform_equivalence(p: Problem, args) -> dict:
    d = _require_deformation(p)
    if p.isomorphism is None:
        raise ShapeError("/deformation/isomorphism: an isomorphism block is required")
    d2 = dfm.apply_formal_isomorphism(d, p.isomorphism)
    v1, v2 = dfm.verify_deformation(d), dfm.verify_deformation(d2)
    shift = dfm.equivalence_shift_check(d, d2, p.isomorphism)
    ok = shift.ok and (v1.ok == v2.ok)
    out = {"status": "pass" if ok else "fail",
           "summary": ("infinitesimals differ by the coboundary of psi_1" if shift.ok
                       else "infinitesimal shift does not match the coboundary of psi_1"),
           "source_verifies": v1.ok, "transported_verifies": v2.ok, "shift": shift.as_dict(p.field)}
    if args.out:
        dump(d.base, args.out, deformation=d2, name="transported")
        out["written"] = str(args.out)
    return out


def cmd_deform_gauge_step(p: Problem, args) -> dict:
    d = _require_deformation(p)
    at = args.at
    w = dfm.coboundary_witness(d, at)
    if w is None:
        return {"status": "fail", "at": at,
                "summary": f"order-{at} coefficients are not a coboundary; no gauge step exists"}
    psiA, psiV = w
    d2 = dfm.rigidity_gauge_step(d, psiA, psiV, at=at)
    cleared = dfm.infinitesimal(d2, at).is_zero()
    ver = dfm.verify_deformation(d2)
    names = _names(d.base)
    out = {"status": "pass" if cleared and ver.ok else "fail", "at": at,
           "summary": f"gauge step cleared order {at}" if cleared else f"order {at} survived the gauge step",
           "witness": {"psi": R.sparse_map(psiA, names)}, "cleared": cleared, "gauged_verifies": ver.ok}
    if psiV is not None:
        out["witness"]["psi_v"] = R.sparse_map(psiV, names)
    if d.relative:
        out["label"] = dfm.ENGINE_EXTENSION
    if args.out:
        dump(d.base, args.out, deformation=d2, name="gauged")
        out["written"] = str(args.out)
    return out


def cmd_deform_trivialize(p: Problem, args) -> dict:
    d = _require_deformation(p)
    rep = dfm.trivialize(d)
    if rep.trivialized:
        summary = f"trivialized in {rep.steps} gauge steps"
    else:
        summary = f"stuck at order {rep.stuck_at}: coefficients are not a coboundary"
    return {"status": "pass" if rep.trivialized else "fail", "summary": summary, "steps": rep.steps,
            "stuck_at": rep.stuck_at}


# oracle -------------------------------------------------------------------


def _parse_values(text):
    if text is None:
        return (-1, 0, 1)
    return tuple(int(x) for x in text.split(","))


def cmd_oracle_search(p: Problem, args) -> dict:
    system = p.system
    F = system.field
    modulus = getattr(F, "characteristic", None) or None
    values = _parse_values(args.values)
    if isinstance(system, RelativeRBSystem):
        found = oracle.search_relative_operators(system.assact, system.weight, values, args.cap, modulus)
    else:
        found = oracle.search_rb_operators(system.algebra, system.weight, values, args.cap, modulus)
    names = _names(system)
    ops = [R.sparse_map(s.T, names) for s in found]
    out = {"status": "pass", "summary": f"{len(found)} operators found", "count": len(found),
           "modulus": modulus, "values": list(range(modulus)) if modulus else list(values), "operators": ops}
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        stem = Path(args.file).stem
        written = []
        for i, s in enumerate(found):
            path = outdir / f"{stem}-{i:03d}.json"
            regular = (p.doc or {}).get("module") == "regular"
            doc = to_document(s, name=f"{stem}-{i:03d}")
            if regular:
                doc["module"] = "regular"
            path.write_text(pretty(doc) + "\n")
            written.append(str(path))
        out["written"] = written
    return out


def cmd_oracle_axioms(p: Problem, args) -> dict:
    brute = oracle.brute_axiom_check(p.system)
    rep = p.system.validate(limit=None)
    agree = (len(brute) == 0) == rep.ok and len(brute) == rep.failures
    return {"status": "pass" if agree else "fail",
            "summary": f"oracle finds {len(brute)} failing components; validator {'agrees' if agree else 'disagrees'}",
            "oracle_failures": len(brute), "validator_failures": rep.failures}


def cmd_oracle_random(args) -> dict:
    rng = np.random.default_rng(args.seed)
    if args.relative:
        s = oracle.random_relative_system(rng, valid=not args.invalid)
    else:
        s = oracle.random_absolute_system(rng, valid=not args.invalid)
    doc = to_document(s, name=f"random-{args.seed}", extra={"description": f"oracle random, seed {args.seed}"})
    if args.out:
        Path(args.out).write_text(pretty(doc) + "\n")
    return {"status": "pass", "summary": f"{'relative' if args.relative else 'absolute'} system from seed {args.seed}",
            "document": doc, **({"written": str(args.out)} if args.out else {})}


# ---------------------------------------------------------------------------
# argument parsing


def _common(p):
    p.add_argument("--format", choices=("json", "text"), default=argparse.SUPPRESS)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="omegarb", description=__doc__.splitlines()[0])
    ap.add_argument("--format", choices=("json", "text"), default="json")
    ap.add_argument("--seed", type=int, default=0, help="seed recorded in reports and used by randomized commands")
    sub = ap.add_subparsers(dest="command", required=True)

    def leaf(parent, name, fn, file=True, **kw):
        p = parent.add_parser(name, **kw)
        if file:
            p.add_argument("file")
        _common(p)
        p.set_defaults(fn=fn, needs_file=file)
        return p

    leaf(sub, "validate", cmd_validate, help="check every axiom of the system")
    p = leaf(sub, "mc-residual", cmd_mc_residual, help="Maurer-Cartan residual of (mu, T) or (pi, T)")
    p.add_argument("--method", choices=("embedding", "explicit", "direct"), default="embedding")
    p = leaf(sub, "bracket", cmd_bracket, help="evaluate a bracket on named elements")
    p.add_argument("elements", nargs="+", help="mu, T, mc (absolute) or pi, T, mc (relative)")
    p.add_argument("--method", choices=("embedding", "explicit"), default="embedding")
    p = leaf(sub, "cohomology", cmd_cohomology, help="cohomology dimension table")
    p.add_argument("--complex", choices=coh.KINDS, default=None)
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--cap", type=int, default=None, help="override the degree cap")
    p.add_argument("--method", choices=("bracket", "display"), default="bracket")
    p.add_argument("--regular", action="store_true",
                   help="allow relative complexes on an absolute file via the regular action")
    p = leaf(sub, "les-check", cmd_les_check, help="exactness of the long exact sequence")
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--relative", action="store_true", help="use the relative sequence on an absolute file")

    dp = sub.add_parser("deform", help="truncated deformations")
    dsub = dp.add_subparsers(dest="deform_command", required=True)
    leaf(dsub, "verify", cmd_deform_verify)
    p = leaf(dsub, "infinitesimal", cmd_deform_infinitesimal)
    p.add_argument("--order", type=int, default=1)
    p = leaf(dsub, "cocycle", cmd_deform_cocycle)
    p.add_argument("--order", type=int, default=1)
    p = leaf(dsub, "equivalence", cmd_deform_equivalence)
    p.add_argument("--out", default=None, help="write the transported deformation here")
    p = leaf(dsub, "gauge-step", cmd_deform_gauge_step)
    p.add_argument("--at", type=int, default=1)
    p.add_argument("--out", default=None, help="write the gauged deformation here")
    leaf(dsub, "trivialize", cmd_deform_trivialize)

    op = sub.add_parser("oracle", help="independent brute-force tools")
    osub = op.add_subparsers(dest="oracle_command", required=True)
    p = leaf(osub, "search", cmd_oracle_search, help="exhaustive operator search; T in the file is ignored")
    p.add_argument("--prime", type=int, default=None, help="search over GF(p) instead of the file's field")
    p.add_argument("--values", default=None, help="comma-separated integer entries, default -1,0,1")
    p.add_argument("--cap", type=int, default=200_000)
    p.add_argument("--out", default=None, help="directory for one fixture file per operator found")
    leaf(osub, "axioms", cmd_oracle_axioms, help="compare the validator with the brute-force checker")
    p = leaf(osub, "random", cmd_oracle_random, file=False, help="emit a seeded random problem file")
    p.add_argument("--relative", action="store_true")
    p.add_argument("--invalid", action="store_true")
    p.add_argument("--out", default=None)
    return ap


def _command_name(args) -> str:
    parts = [args.command]
    for k in ("deform_command", "oracle_command"):
        if getattr(args, k, None):
            parts.append(getattr(args, k))
    return " ".join(parts)


def _load_for(args) -> Problem:
    prime = getattr(args, "prime", None)
    if prime is None:
        return load(args.file)
    try:
        doc = json.loads(Path(args.file).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    doc["field"] = f"GF({prime})"
    return from_document(doc)


def run(args) -> dict:
    """Execute parsed arguments; always returns a report (errors included)."""
    name = _command_name(args)
    try:
        if args.needs_file:
            rep = args.fn(_load_for(args), args)
        else:
            rep = args.fn(args)
    except MATH_ERRORS as exc:
        rep = {"status": "fail", "summary": str(exc), "error": type(exc).__name__,
               "module": _provenance(exc), "message": str(exc)}
        if getattr(exc, "block", None) is not None:
            rep["block"] = [list(exc.block[0]), exc.block[1]]
    except INPUT_ERRORS as exc:
        rep = {"status": "error", "summary": "input error", "error": type(exc).__name__,
               "module": _provenance(exc), "message": str(exc)}
        if isinstance(exc, SchemaError):
            rep["pointer"] = exc.pointer or "/"
        if isinstance(exc, SemigroupNotAssociative):
            rep["triple"] = list(exc.triple)
    out = {"command": name, "status": rep.pop("status"), "summary": rep.pop("summary", ""),
           "seed": args.seed}
    if getattr(args, "file", None):
        out["file"] = str(args.file)
    out.update(rep)
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    rep = run(args)
    text = R.to_json(rep) if args.format == "json" else R.to_text(rep)
    sys.stdout.write(text + "\n")
    return R.STATUS_EXIT[rep["status"]]


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
