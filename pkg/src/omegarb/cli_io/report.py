"""Structured reports and their text rendering.

A report is a plain dict with at least ``command``, ``status`` (``pass``,
``fail`` or ``error``) and ``summary``.  Before output every integer is turned
into a decimal string, so no report carries a bare JSON number.  Embedded
problem documents (key ``document``) are left untouched so that they stay
schema-valid.
"""

from __future__ import annotations

import numpy as np

from ..omega_maps import MixedMultiMap, OmegaMultiMap
from .schema import pretty

STATUS_EXIT = {"pass": 0, "fail": 1, "error": 2}


def stringify(obj, _key=None):
    if _key == "document":
        return obj
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, float):  # never produced by the engine; refuse loudly
        raise TypeError(f"float {obj!r} in report")
    if isinstance(obj, dict):
        return {k: stringify(v, k) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [stringify(v) for v in obj]
    return obj


# ---------------------------------------------------------------------------
# maps and elements


def sparse_map(m: OmegaMultiMap, names) -> dict:
    """Nonzero Omega-components only, in the problem-file tensor layout."""
    n = m.arity
    out = {}
    for alphas in m.semigroup.tuples(n):
        block = m.data[alphas]
        if not np.any(block != 0):
            continue
        t = np.moveaxis(block, 0, -1)
        out[",".join(names[a] for a in alphas)] = np.vectorize(m.field.format, otypes=[object])(t).tolist()
    return out


def mixed_components(f: MixedMultiMap, names) -> list:
    """Nonzero blocks keyed as ["a,b", "I:1,2", "A"]."""
    out = []
    for I, tgt, block in f.blocks():
        for key, tensor in sparse_map(block, names).items():
            out.append({"key": [key, "I:" + ",".join(map(str, I)), tgt], "tensor": tensor})
    return out


def element_json(x, names) -> dict:
    """Serialize an Absolute/RelativeElement."""
    out = {"arity": x.n, "degree": x.n - 2, "zero": x.is_zero()}
    if x.f is None:
        return out
    if isinstance(x.f, MixedMultiMap):
        out["f"] = mixed_components(x.f, names)
    else:
        out["f"] = sparse_map(x.f, names)
    if x.theta is not None:
        out["theta"] = sparse_map(x.theta, names)
    return out


def coords_json(c, field) -> dict:
    """A cochain as its nonzero coordinates with basis labels."""
    sp = c.space
    nz = [int(i) for i in np.flatnonzero(c.coords != 0)]
    return {"degree": sp.n, "dim": sp.dim,
            "nonzero": [{"index": i, "basis": sp.basis_label(i), "value": field.format(c.coords[i])}
                        for i in nz]}


# ---------------------------------------------------------------------------
# output


def to_json(report: dict) -> str:
    return pretty(stringify(report))


def _table(rows, cols) -> list[str]:
    cells = [[str(r.get(c, "")) for c in cols] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(cols)]
    line = lambda vals: "  ".join(v.rjust(w) for v, w in zip(vals, widths))  # noqa: E731
    return [line(cols)] + [line(r) for r in cells]


def to_text(report: dict) -> str:
    lines = [f"[{report['status'].upper()}] {report['command']}: {report.get('summary', '')}"]
    if "table" in report:
        lines += _table(report["table"], ["n", "dim_C", "rank_d", "dim_ker", "dim_H"])
    if "les" in report:
        lines += _table(report["les"]["nodes"],
                        ["node", "dim_H", "dim_im_in", "dim_ker_out", "contained", "exact"])
    for w in report.get("witnesses", [])[:16]:
        lines.append(f"  witness {w['identity']} omegas={w['omegas']} basis={w['basis']} "
                     f"residual={w['residual']}")
    if report["status"] == "error":
        where = report.get("pointer")
        lines.append(f"  {report.get('error')} in {report.get('module')}"
                     + (f" at {where}" if where else "") + f": {report.get('message')}")
    return "\n".join(lines)
