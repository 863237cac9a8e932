"""Problem-file schema, loading and serialization.

A problem file describes one system (absolute, or relative when a ``module``
block is present) plus an optional truncated deformation.  Scalars are exact:
strings such as ``"3"`` or ``"-1/2"``, or JSON integers.  Floats are rejected.

Structure constants follow one rule for every map: ``m["a,b"][i][j]`` is the
coefficient vector (over the target basis) of the map applied to basis
vectors ``e_i, e_j`` at semigroup indices ``a, b``.
"""

from __future__ import annotations

import copy
import json
from pathlib import Path

import jsonschema
import numpy as np

from ..deformation import FormalIsomorphism, TruncatedDeformation
from ..errors import FieldError, SchemaError, ShapeError
from ..exactla import QQ, field_from_name
from ..omega_maps import FiniteSemigroup, OmegaMultiMap
from ..structures import AbsoluteRBSystem, AssAct, OmegaAlgebra, OmegaBimodule, RelativeRBSystem

_scalar = {"oneOf": [{"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*\d+)?\s*$"}, {"type": "integer"}]}
_tensor = {"oneOf": [_scalar, {"type": "array", "items": {"$ref": "#/$defs/tensor"}}]}
_map = {"type": "object", "additionalProperties": {"$ref": "#/$defs/tensor"}}
_series = {"type": "object", "patternProperties": {r"^[1-9]\d*$": {"$ref": "#/$defs/map"}},
           "additionalProperties": False}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "Omega-family Rota-Baxter problem file",
    "type": "object",
    "required": ["semigroup", "weight", "algebra", "T"],
    "additionalProperties": False,
    "$defs": {"scalar": _scalar, "tensor": _tensor, "map": _map, "series": _series},
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "field": {"type": "string", "pattern": r"^(QQ|GF\(\d+\))$"},
        "semigroup": {
            "type": "object",
            "required": ["table"],
            "additionalProperties": False,
            "properties": {
                "elements": {"type": "array", "items": {"type": "string", "pattern": r"^[^,\s]+$"},
                             "minItems": 1, "uniqueItems": True},
                "table": {"type": "array", "minItems": 1,
                          "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
            },
        },
        "weight": {"$ref": "#/$defs/scalar"},
        "algebra": {
            "type": "object",
            "required": ["dim", "mu"],
            "additionalProperties": False,
            "properties": {"dim": {"type": "integer", "minimum": 1}, "mu": {"$ref": "#/$defs/map"}},
        },
        "module": {
            "oneOf": [
                {"const": "regular"},
                {
                    "type": "object",
                    "required": ["dim", "mu_v", "l", "r"],
                    "additionalProperties": False,
                    "properties": {
                        "dim": {"type": "integer", "minimum": 1},
                        "mu_v": {"$ref": "#/$defs/map"},
                        "l": {"$ref": "#/$defs/map"},
                        "r": {"$ref": "#/$defs/map"},
                    },
                },
            ]
        },
        "T": {"$ref": "#/$defs/map"},
        "deformation": {
            "type": "object",
            "required": ["order"],
            "additionalProperties": False,
            "properties": {
                "order": {"type": "integer", "minimum": 0},
                "mu": {"$ref": "#/$defs/series"},
                "mu_v": {"$ref": "#/$defs/series"},
                "l": {"$ref": "#/$defs/series"},
                "r": {"$ref": "#/$defs/series"},
                "T": {"$ref": "#/$defs/series"},
                "isomorphism": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {"psi": {"$ref": "#/$defs/series"}, "psi_v": {"$ref": "#/$defs/series"}},
                },
            },
        },
        "commands": {"type": "object"},
    },
}


def _pointer(path) -> str:
    return "/" + "/".join(str(p).replace("~", "~0").replace("/", "~1") for p in path)


class Problem:
    """A loaded problem file: system, optional deformation, and source document."""

    def __init__(self, system, deformation=None, isomorphism=None, doc=None, elements=None):
        self.system = system
        self.deformation = deformation
        self.isomorphism = isomorphism
        self.doc = doc
        self.elements = elements

    @property
    def relative(self):
        return isinstance(self.system, RelativeRBSystem)

    @property
    def field(self):
        return self.system.field

    def defaults(self) -> dict:
        return dict((self.doc or {}).get("commands", {}))


# ---------------------------------------------------------------------------
# tensors


def _map_from_json(obj, S: FiniteSemigroup, names, target: int, sources: tuple, field, where: str):
    n = len(sources)
    shape = (S.size,) * n + (target,) + tuple(sources)
    data = np.zeros(shape, dtype=object)
    index = {nm: i for i, nm in enumerate(names)}
    for key, tensor in obj.items():
        parts = [p.strip() for p in key.split(",")] if n else []
        if len(parts) != n:
            raise ShapeError(f"{where}/{key}: key needs {n} semigroup elements")
        try:
            alphas = tuple(index[p] for p in parts)
        except KeyError as exc:
            raise ShapeError(f"{where}/{key}: unknown semigroup element {exc.args[0]!r}") from None
        arr = np.array(tensor, dtype=object)
        want = tuple(sources) + (target,)
        if arr.shape != want:
            raise ShapeError(f"{where}/{key}: tensor has shape {arr.shape}, expected {want}")
        try:
            conv = np.vectorize(field, otypes=[object])(arr) if arr.size else arr
        except FieldError as exc:
            raise FieldError(f"{where}/{key}: {exc}") from None
        data[alphas] = np.moveaxis(conv, -1, 0)
    return OmegaMultiMap(S, data, field)


def _map_to_json(m: OmegaMultiMap, names) -> dict:
    n = m.arity
    out = {}
    for alphas in m.semigroup.tuples(n):
        key = ",".join(names[a] for a in alphas)
        t = np.moveaxis(m.data[alphas], 0, -1)
        out[key] = np.vectorize(m.field.format, otypes=[object])(t).tolist() if t.size else t.tolist()
    return out


# ---------------------------------------------------------------------------
# load / dump


def validate_document(doc) -> None:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    e = jsonschema.exceptions.best_match(validator.iter_errors(doc))
    if e is not None:
        ptr = _pointer(e.absolute_path)
        raise SchemaError(e.message, pointer=ptr)


def from_document(doc: dict) -> Problem:
    validate_document(doc)
    field = field_from_name(doc.get("field", "QQ"))
    table = doc["semigroup"]["table"]
    k = len(table)
    for i, row in enumerate(table):
        if len(row) != k:
            raise ShapeError(f"/semigroup/table/{i}: row has {len(row)} entries, expected {k}")
        for j, x in enumerate(row):
            if x >= k:
                raise ShapeError(f"/semigroup/table/{i}/{j}: index {x} out of range")
    names = doc["semigroup"].get("elements") or [str(i) for i in range(k)]
    if len(names) != k:
        raise ShapeError(f"/semigroup/elements: {len(names)} names for {k} elements")
    S = FiniteSemigroup(table, names)
    d = doc["algebra"]["dim"]
    mu = _map_from_json(doc["algebra"]["mu"], S, names, d, (d, d), field, "/algebra/mu")
    alg = OmegaAlgebra(mu)
    weight = field(doc["weight"])
    mod = doc.get("module")
    if mod is None:
        T = _map_from_json(doc["T"], S, names, d, (d,), field, "/T")
        system = AbsoluteRBSystem(alg, weight, T)
    else:
        if mod == "regular":
            aa = AssAct.regular(alg)
        else:
            m = mod["dim"]
            mv = _map_from_json(mod["mu_v"], S, names, m, (m, m), field, "/module/mu_v")
            l = _map_from_json(mod["l"], S, names, m, (d, m), field, "/module/l")
            r = _map_from_json(mod["r"], S, names, m, (m, d), field, "/module/r")
            aa = AssAct(OmegaBimodule(alg, l, r), mv)
        T = _map_from_json(doc["T"], S, names, d, (aa.dim_v,), field, "/T")
        system = RelativeRBSystem(aa, weight, T)

    deformation = isomorphism = None
    if "deformation" in doc:
        db = doc["deformation"]
        N = db["order"]
        base_shapes = _shapes(system)
        coeffs = {}
        for name, (tgt, srcs) in base_shapes.items():
            if name not in db:
                continue
            lst = [None] * N
            for key, mj in db[name].items():
                i = int(key)
                if i > N:
                    raise ShapeError(f"/deformation/{name}/{key}: beyond order {N}")
                lst[i - 1] = _map_from_json(mj, S, names, tgt, srcs, field, f"/deformation/{name}/{key}")
            coeffs[name] = lst
        for name in ("mu_v", "l", "r"):
            if name in db and not isinstance(system, RelativeRBSystem):
                raise ShapeError(f"/deformation/{name}: relative coefficient on an absolute system")
        deformation = TruncatedDeformation(system, N, coeffs)
        if "isomorphism" in db:
            ib = db["isomorphism"]
            da = d
            dv = system.dim_v if isinstance(system, RelativeRBSystem) else None
            psi = _series_list(ib.get("psi", {}), S, names, da, field, N, "/deformation/isomorphism/psi")
            psi_v = None
            if dv is not None:
                psi_v = _series_list(ib.get("psi_v", {}), S, names, dv, field, N,
                                     "/deformation/isomorphism/psi_v")
            isomorphism = FormalIsomorphism(N, psi, psi_v)
    return Problem(system, deformation, isomorphism, doc, names)


def _series_list(obj, S, names, dim, field, N, where):
    lst = [None] * N
    for key, mj in obj.items():
        i = int(key)
        if i > N:
            raise ShapeError(f"{where}/{key}: beyond order {N}")
        lst[i - 1] = _map_from_json(mj, S, names, dim, (dim,), field, f"{where}/{key}")
    return lst


def _shapes(system) -> dict:
    if isinstance(system, AbsoluteRBSystem):
        d = system.dim
        return {"mu": (d, (d, d)), "T": (d, (d,))}
    d, m = system.dim_a, system.dim_v
    return {"mu": (d, (d, d)), "mu_v": (m, (m, m)), "l": (m, (d, m)), "r": (m, (m, d)), "T": (d, (m,))}


def loads(text: str) -> Problem:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    return from_document(doc)


def load(path) -> Problem:
    return loads(Path(path).read_text())


def to_document(problem_or_system, deformation=None, isomorphism=None, name=None, extra=None) -> dict:
    """Serialize a system (and optional deformation) to a schema-valid document."""
    if isinstance(problem_or_system, Problem):
        p = problem_or_system
        system, deformation, isomorphism = p.system, p.deformation, p.isomorphism
        extra = {k: v for k, v in (p.doc or {}).items() if k in ("name", "description", "commands")}
        regular = (p.doc or {}).get("module") == "regular"
    else:
        system = problem_or_system
        regular = False
    S = system.semigroup
    names = list(S.names) if getattr(S, "names", None) else [str(i) for i in range(S.size)]
    F = system.field
    doc: dict = {}
    if name:
        doc["name"] = name
    if extra:
        doc.update({k: copy.deepcopy(v) for k, v in extra.items() if k != "commands"})
    doc["field"] = "QQ" if F == QQ else f"GF({F.characteristic})"
    doc["semigroup"] = {"elements": names, "table": S.table.tolist()}
    doc["weight"] = F.format(system.weight)
    if isinstance(system, AbsoluteRBSystem):
        alg = system.algebra
    else:
        alg = system.assact.algebra
    doc["algebra"] = {"dim": alg.dim, "mu": _map_to_json(alg.mu, names)}
    if isinstance(system, RelativeRBSystem):
        if regular:
            doc["module"] = "regular"
        else:
            a = system.assact
            doc["module"] = {"dim": a.dim_v, "mu_v": _map_to_json(a.mu_v, names),
                             "l": _map_to_json(a.module.l, names), "r": _map_to_json(a.module.r, names)}
    doc["T"] = _map_to_json(system.T, names)
    if deformation is not None:
        db: dict = {"order": deformation.order}
        for nm in deformation.names:
            ser = {str(i): _map_to_json(m, names) for i, m in enumerate(deformation.coeffs[nm], start=1)
                   if not m.is_zero()}
            if ser:
                db[nm] = ser
        if isomorphism is not None:
            ib = {}
            for key, lst in (("psi", isomorphism.psi), ("psi_v", isomorphism.psi_v)):
                if lst:
                    ser = {str(i): _map_to_json(m, names) for i, m in enumerate(lst, start=1)
                           if m is not None and not m.is_zero()}
                    if ser:
                        ib[key] = ser
            db["isomorphism"] = ib
        doc["deformation"] = db
    if extra and "commands" in extra:
        doc["commands"] = copy.deepcopy(extra["commands"])
    validate_document(doc)
    return doc


def _has_dict(x) -> bool:
    return isinstance(x, dict) or (isinstance(x, list) and any(_has_dict(y) for y in x))


def pretty(obj, indent: int = 0) -> str:
    """JSON with dict nesting indented and dict-free arrays kept on one line."""
    pad = " " * (indent + 1)
    if isinstance(obj, dict) and obj:
        items = [f"{pad}{json.dumps(k)}: {pretty(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + " " * indent + "}"
    if isinstance(obj, list) and obj and _has_dict(obj):
        items = [pad + pretty(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + " " * indent + "]"
    return json.dumps(obj, ensure_ascii=False)


def dumps(problem_or_system, **kw) -> str:
    return pretty(to_document(problem_or_system, **kw))


def dump(problem_or_system, path, **kw) -> None:
    Path(path).write_text(dumps(problem_or_system, **kw) + "\n")


def canonical(doc: dict) -> dict:
    """Re-serialize through load so that two documents can be compared."""
    return to_document(from_document(doc))


__all__ = ["SCHEMA", "Problem", "load", "loads", "dump", "dumps", "to_document", "from_document",
           "validate_document", "canonical", "pretty"]
