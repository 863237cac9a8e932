"""Algebraic structures indexed by a finite semigroup, with validators.

Every structure stores its operations as :class:`OmegaMultiMap` objects.
Validators evaluate each defining identity as a residual map and report the
first few nonzero entries as witnesses.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Any

import numpy as np

from .errors import DimensionMismatch, ShapeError
from .exactla import QQ
from .omega_maps import FiniteSemigroup, MixedMultiMap, OmegaMultiMap, compose_at

WITNESS_LIMIT = 16


@dataclass
class Witness:
    identity: str
    omegas: tuple
    basis: tuple
    residual: list

    def to_dict(self, field=QQ):
        return {
            "identity": self.identity,
            "omegas": list(self.omegas),
            "basis": list(self.basis),
            "residual": [field.format(x) for x in self.residual],
        }


@dataclass
class ValidationReport:
    ok: bool
    witnesses: list = dc_field(default_factory=list)
    failures: int = 0
    identities: list = dc_field(default_factory=list)

    def to_dict(self, field=QQ):
        return {
            "ok": self.ok,
            "failures": self.failures,
            "identities": list(self.identities),
            "witnesses": [w.to_dict(field) for w in self.witnesses],
        }

    def merge(self, other: "ValidationReport", limit=WITNESS_LIMIT):
        ws = self.witnesses + other.witnesses
        if limit is not None:
            ws = ws[:limit]
        return ValidationReport(self.ok and other.ok, ws, self.failures + other.failures,
                                self.identities + other.identities)


def residual_witnesses(name: str, residual: OmegaMultiMap, limit=WITNESS_LIMIT) -> ValidationReport:
    n = residual.arity
    data = residual.data
    mask = np.any(data != 0, axis=n)
    hits = np.argwhere(mask)
    ws = []
    for h in hits[: (len(hits) if limit is None else limit)]:
        h = tuple(int(x) for x in h)
        vec = data[h[:n] + (slice(None),) + h[n:]]
        ws.append(Witness(name, h[:n], h[n:], list(vec.tolist())))
    return ValidationReport(len(hits) == 0, ws, len(hits), [name])


def _run(checks, limit):
    rep = ValidationReport(True)
    for name, res in checks:
        rep = rep.merge(residual_witnesses(name, res, limit), limit)
    return rep


def _check_map(f: OmegaMultiMap, target: int, sources: tuple, what: str):
    if f.target_dim != target or f.source_dims != tuple(sources):
        raise DimensionMismatch(
            f"{what} has shape {f.target_dim}<-{f.source_dims}, expected {target}<-{tuple(sources)}"
        )


@dataclass(frozen=True)
class OmegaAlgebra:
    mu: OmegaMultiMap

    def __post_init__(self):
        if self.mu.arity != 2:
            raise ShapeError("multiplication must have arity 2")
        d = self.mu.target_dim
        _check_map(self.mu, d, (d, d), "mu")

    @property
    def semigroup(self) -> FiniteSemigroup:
        return self.mu.semigroup

    @property
    def field(self):
        return self.mu.field

    @property
    def dim(self) -> int:
        return self.mu.target_dim

    def identities(self):
        mu = self.mu
        return [("associativity", compose_at(mu, mu, 1) - compose_at(mu, mu, 2))]

    def validate(self, limit=WITNESS_LIMIT) -> ValidationReport:
        return _run(self.identities(), limit)

    def regular_bimodule(self) -> "OmegaBimodule":
        return OmegaBimodule(self, self.mu, self.mu)


@dataclass(frozen=True)
class OmegaBimodule:
    algebra: OmegaAlgebra
    l: OmegaMultiMap
    r: OmegaMultiMap

    def __post_init__(self):
        d, m = self.algebra.dim, self.l.target_dim
        _check_map(self.l, m, (d, m), "left action")
        _check_map(self.r, m, (m, d), "right action")

    @property
    def dim(self):
        return self.l.target_dim

    def identities(self):
        mu, l, r = self.algebra.mu, self.l, self.r
        return [
            ("left action", compose_at(l, l, 2) - compose_at(l, mu, 1)),
            ("right action", compose_at(r, r, 1) - compose_at(r, mu, 2)),
            ("two-sided", compose_at(r, l, 1) - compose_at(l, r, 2)),
        ]

    def validate(self, limit=WITNESS_LIMIT):
        return _run(self.algebra.identities() + self.identities(), limit)


@dataclass(frozen=True)
class AssAct:
    """Algebra A acting on an algebra V through a compatible bimodule."""

    module: OmegaBimodule
    mu_v: OmegaMultiMap

    def __post_init__(self):
        m = self.module.dim
        _check_map(self.mu_v, m, (m, m), "mu_V")

    @property
    def algebra(self):
        return self.module.algebra

    @property
    def semigroup(self):
        return self.algebra.semigroup

    @property
    def field(self):
        return self.algebra.field

    @property
    def dim_a(self):
        return self.algebra.dim

    @property
    def dim_v(self):
        return self.module.dim

    @classmethod
    def regular(cls, algebra: OmegaAlgebra) -> "AssAct":
        return cls(algebra.regular_bimodule(), algebra.mu)

    def identities(self):
        l, r, mv = self.module.l, self.module.r, self.mu_v
        return [
            ("V associativity", compose_at(mv, mv, 1) - compose_at(mv, mv, 2)),
            ("(a.u)v = a.(uv)", compose_at(mv, l, 1) - compose_at(l, mv, 2)),
            ("(u.a)v = u(a.v)", compose_at(mv, r, 1) - compose_at(mv, l, 2)),
            ("(uv).a = u(v.a)", compose_at(r, mv, 1) - compose_at(mv, r, 2)),
        ]

    def validate(self, limit=WITNESS_LIMIT):
        return _run(self.algebra.identities() + self.module.identities() + self.identities(), limit)

    def pi(self) -> MixedMultiMap:
        """The semidirect-type product on W = A (+) V."""
        out = MixedMultiMap.zeros(self.semigroup, self.dim_a, self.dim_v, 2, self.field)
        out.set_block((1, 2), "A", self.algebra.mu)
        out.set_block((1,), "V", self.module.l)
        out.set_block((2,), "V", self.module.r)
        out.set_block((), "V", self.mu_v)
        return out


def _weight(field, weight):
    return field(weight)


@dataclass(frozen=True)
class RelativeRBSystem:
    assact: AssAct
    weight: Any
    T: OmegaMultiMap

    def __post_init__(self):
        object.__setattr__(self, "weight", self.assact.field(self.weight))
        _check_map(self.T, self.assact.dim_a, (self.assact.dim_v,), "operator T")

    @property
    def field(self):
        return self.assact.field

    @property
    def semigroup(self):
        return self.assact.semigroup

    @property
    def dim_a(self):
        return self.assact.dim_a

    @property
    def dim_v(self):
        return self.assact.dim_v

    def operator_residual(self) -> OmegaMultiMap:
        a = self.assact
        mu, l, r, mv, T = a.algebra.mu, a.module.l, a.module.r, a.mu_v, self.T
        lhs = compose_at(compose_at(mu, T, 1), T, 2)
        inner = compose_at(l, T, 1) + compose_at(r, T, 2) + mv.scale(self.weight)
        return lhs - compose_at(T, inner, 1)

    def validate(self, limit=WITNESS_LIMIT):
        rep = self.assact.validate(limit)
        return rep.merge(residual_witnesses("relative Rota-Baxter", self.operator_residual(), limit), limit)

    def T_w(self) -> MixedMultiMap:
        out = MixedMultiMap.zeros(self.semigroup, self.dim_a, self.dim_v, 1, self.field)
        out.set_block((), "A", self.T)
        return out

    def mu_v_w(self) -> MixedMultiMap:
        out = MixedMultiMap.zeros(self.semigroup, self.dim_a, self.dim_v, 2, self.field)
        out.set_block((), "V", self.assact.mu_v)
        return out


@dataclass(frozen=True)
class AbsoluteRBSystem:
    algebra: OmegaAlgebra
    weight: Any
    T: OmegaMultiMap

    def __post_init__(self):
        object.__setattr__(self, "weight", self.algebra.field(self.weight))
        d = self.algebra.dim
        _check_map(self.T, d, (d,), "operator T")

    @property
    def field(self):
        return self.algebra.field

    @property
    def semigroup(self):
        return self.algebra.semigroup

    @property
    def dim(self):
        return self.algebra.dim

    def operator_residual(self) -> OmegaMultiMap:
        mu, T = self.algebra.mu, self.T
        lhs = compose_at(compose_at(mu, T, 1), T, 2)
        inner = compose_at(mu, T, 1) + compose_at(mu, T, 2) + mu.scale(self.weight)
        return lhs - compose_at(T, inner, 1)

    def validate(self, limit=WITNESS_LIMIT):
        rep = self.algebra.validate(limit)
        return rep.merge(residual_witnesses("Rota-Baxter", self.operator_residual(), limit), limit)

    def to_relative(self) -> RelativeRBSystem:
        """The same operator viewed relative to the regular action of A on itself."""
        return RelativeRBSystem(AssAct.regular(self.algebra), self.weight, self.T)
