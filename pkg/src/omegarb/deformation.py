"""Truncated one-parameter formal deformations.

A deformation of order N stores coefficients 1..N of each structure map
(coefficient 0 is the base system).  Everything is checked exactly, order by
order, through the convolution form of the defining identities.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import exactla
from .cohomology import Cochain, Complex
from .errors import InvalidDeformation, NotACoboundaryWitness, ShapeError
from .omega_maps import MixedMultiMap, OmegaMultiMap, compose_at
from .structures import AbsoluteRBSystem, RelativeRBSystem, residual_witnesses

ABSOLUTE_NAMES = ("mu", "T")
RELATIVE_NAMES = ("mu", "mu_v", "l", "r", "T")
ENGINE_EXTENSION = "engine extension"


def _base_maps(system) -> dict:
    if isinstance(system, AbsoluteRBSystem):
        return {"mu": system.algebra.mu, "T": system.T}
    a = system.assact
    return {"mu": a.algebra.mu, "mu_v": a.mu_v, "l": a.module.l, "r": a.module.r, "T": system.T}


@dataclass
class TruncatedDeformation:
    base: object
    order: int
    coeffs: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.order < 0:
            raise InvalidDeformation("order must be non-negative")
        base = _base_maps(self.base)
        for name in self.coeffs:
            if name not in base:
                raise InvalidDeformation(f"unknown coefficient {name!r} for this system")
        for name, m0 in base.items():
            lst = list(self.coeffs.get(name, []))
            if len(lst) > self.order:
                raise InvalidDeformation(f"{name}: {len(lst)} coefficients for order {self.order}")
            lst += [None] * (self.order - len(lst))
            out = []
            for i, m in enumerate(lst, start=1):
                if m is None:
                    m = OmegaMultiMap.zeros(m0.semigroup, m0.target_dim, m0.source_dims, m0.field)
                if m.data.shape != m0.data.shape:
                    raise ShapeError(f"{name}_{i} has shape {m.data.shape}, expected {m0.data.shape}")
                out.append(m)
            self.coeffs[name] = out

    @property
    def relative(self) -> bool:
        return isinstance(self.base, RelativeRBSystem)

    @property
    def names(self):
        return RELATIVE_NAMES if self.relative else ABSOLUTE_NAMES

    @property
    def field(self):
        return self.base.field

    @property
    def weight(self):
        return self.base.weight

    def coeff(self, name: str, i: int) -> OmegaMultiMap:
        if i == 0:
            return _base_maps(self.base)[name]
        if i > self.order:
            m0 = _base_maps(self.base)[name]
            return OmegaMultiMap.zeros(m0.semigroup, m0.target_dim, m0.source_dims, m0.field)
        return self.coeffs[name][i - 1]

    def series(self, name: str) -> list:
        return [self.coeff(name, i) for i in range(self.order + 1)]

    @classmethod
    def constant(cls, base, order: int = 3) -> "TruncatedDeformation":
        return cls(base, order, {})

    @classmethod
    def from_series(cls, base, series: dict, order: int) -> "TruncatedDeformation":
        """Build from full series lists (index 0 must equal the base map)."""
        maps = _base_maps(base)
        coeffs = {}
        for name, s in series.items():
            if s and s[0] is not None and s[0] != maps[name]:
                raise InvalidDeformation(f"order-0 coefficient of {name} differs from the base")
            coeffs[name] = list(s[1:order + 1])
        return cls(base, order, coeffs)

    def truncate(self, order: int) -> "TruncatedDeformation":
        return TruncatedDeformation(self.base, order, {k: v[:order] for k, v in self.coeffs.items()})

    def is_constant(self) -> bool:
        return all(m.is_zero() for v in self.coeffs.values() for m in v)

    def system_at(self, n: int = 0):
        """The base system with coefficient n substituted (only n = 0 is a system in general)."""
        if n == 0:
            return self.base
        raise ValueError("only the order-0 truncation is a system")


# ---------------------------------------------------------------------------
# order-n identities


def _conv2(d, a, b, slot, n):
    acc = None
    for i in range(n + 1):
        t = compose_at(d.coeff(a, i), d.coeff(b, n - i), slot)
        acc = t if acc is None else acc + t
    return acc


def _conv_rb_lhs(d, n):
    acc = None
    for i in range(n + 1):
        for j in range(n + 1 - i):
            k = n - i - j
            t = compose_at(compose_at(d.coeff("mu", i), d.coeff("T", j), 1), d.coeff("T", k), 2)
            acc = t if acc is None else acc + t
    return acc


def _conv_rb_rhs(d, n, left, right, inner_w):
    """sum T_i o left_j o (T_k (x) id) + T_i o right_j o (id (x) T_k) + lambda sum T_i o inner_j."""
    acc = None
    for i in range(n + 1):
        for j in range(n + 1 - i):
            k = n - i - j
            Ti = d.coeff("T", i)
            t = compose_at(Ti, compose_at(d.coeff(left, j), d.coeff("T", k), 1), 1) + \
                compose_at(Ti, compose_at(d.coeff(right, j), d.coeff("T", k), 2), 1)
            acc = t if acc is None else acc + t
        if d.weight != 0:
            acc = acc + compose_at(d.coeff("T", i), d.coeff(inner_w, n - i), 1).scale(d.weight)
    return acc


def order_identities(d: TruncatedDeformation, n: int) -> list:
    """(name, residual) for every defining identity at the coefficient of t^n."""
    out = [("associativity", _conv2(d, "mu", "mu", 1, n) - _conv2(d, "mu", "mu", 2, n))]
    if d.relative:
        out += [
            ("left action", _conv2(d, "l", "l", 2, n) - _conv2(d, "l", "mu", 1, n)),
            ("right action", _conv2(d, "r", "r", 1, n) - _conv2(d, "r", "mu", 2, n)),
            ("two-sided", _conv2(d, "r", "l", 1, n) - _conv2(d, "l", "r", 2, n)),
            ("V associativity", _conv2(d, "mu_v", "mu_v", 1, n) - _conv2(d, "mu_v", "mu_v", 2, n)),
            ("(a.u)v = a.(uv)", _conv2(d, "mu_v", "l", 1, n) - _conv2(d, "l", "mu_v", 2, n)),
            ("(u.a)v = u(a.v)", _conv2(d, "mu_v", "r", 1, n) - _conv2(d, "mu_v", "l", 2, n)),
            ("(uv).a = u(v.a)", _conv2(d, "r", "mu_v", 1, n) - _conv2(d, "mu_v", "r", 2, n)),
            ("relative Rota-Baxter", _conv_rb_lhs(d, n) - _conv_rb_rhs(d, n, "l", "r", "mu_v")),
        ]
    else:
        out.append(("Rota-Baxter", _conv_rb_lhs(d, n) - _conv_rb_rhs(d, n, "mu", "mu", "mu")))
    return out


@dataclass
class DeformationReport:
    ok: bool
    order: int
    orders: list = dc_field(default_factory=list)  # per order: list of failing identity names
    first_failure: tuple | None = None  # (order, identity name, identity index)
    witnesses: list = dc_field(default_factory=list)
    label: str | None = None

    def as_dict(self, field=exactla.QQ):
        out = {
            "ok": self.ok,
            "order": self.order,
            "orders": [{"n": n, "failing": f} for n, f in enumerate(self.orders)],
            "first_failure": None if self.first_failure is None else {
                "order": self.first_failure[0], "identity": self.first_failure[1],
                "index": self.first_failure[2]},
            "witnesses": [w.to_dict(field) for w in self.witnesses],
        }
        if self.label:
            out["label"] = self.label
        return out


def verify_deformation(d: TruncatedDeformation, limit: int = 16) -> DeformationReport:
    rep = DeformationReport(True, d.order)
    for n in range(d.order + 1):
        failing = []
        for idx, (name, res) in enumerate(order_identities(d, n)):
            r = residual_witnesses(name, res, limit)
            if not r.ok:
                failing.append(name)
                if rep.first_failure is None:
                    rep.first_failure = (n, name, idx)
                    rep.witnesses = r.witnesses
        rep.orders.append(failing)
        if failing:
            rep.ok = False
    return rep


# ---------------------------------------------------------------------------
# infinitesimals and cocycles


def _complex_for(d_or_system):
    base = d_or_system.base if isinstance(d_or_system, TruncatedDeformation) else d_or_system
    return Complex("relrba" if isinstance(base, RelativeRBSystem) else "rba", base)


def pi_from_parts(system: RelativeRBSystem, mu, mu_v, l, r) -> MixedMultiMap:
    out = MixedMultiMap.zeros(system.semigroup, system.dim_a, system.dim_v, 2, system.field)
    out.set_block((1, 2), "A", mu)
    out.set_block((1,), "V", l)
    out.set_block((2,), "V", r)
    out.set_block((), "V", mu_v)
    return out


def infinitesimal(d: TruncatedDeformation, n: int = 1) -> Cochain:
    """Coefficients of t^n packed as a degree-2 cochain (n = 1 is the infinitesimal)."""
    if d.order < 1:
        raise InvalidDeformation("the infinitesimal needs order >= 1")
    cx = _complex_for(d)
    sp = cx.space(2)
    if d.relative:
        f = pi_from_parts(d.base, d.coeff("mu", n), d.coeff("mu_v", n), d.coeff("l", n), d.coeff("r", n))
    else:
        f = d.coeff("mu", n)
    return Cochain(sp, sp.pack(f, d.coeff("T", n)))


def is_two_cocycle(c: Cochain, system) -> tuple[bool, Cochain]:
    """(∂c == 0, ∂c) in the total complex of the system."""
    cx = _complex_for(system)
    if c.space != cx.space(2):
        raise ShapeError("cochain does not live in degree 2 of this system's complex")
    res = cx.apply(c)
    return res.is_zero(), res


# ---------------------------------------------------------------------------
# formal isomorphisms


@dataclass
class FormalIsomorphism:
    """psi_t = id + sum_i psi_i t^i on A (and on V in the relative case)."""

    order: int
    psi: list
    psi_v: list | None = None

    def __post_init__(self):
        for lst in (self.psi, self.psi_v):
            if lst is None:
                continue
            if len(lst) > self.order:
                raise InvalidDeformation("more coefficients than the order")
            for m in lst:
                if m is not None and m.arity != 1:
                    raise ShapeError("isomorphism coefficients must be linear")

    @classmethod
    def identity(cls, order: int) -> "FormalIsomorphism":
        return cls(order, [])

    @classmethod
    def single(cls, psi1, order: int, at: int = 1, psi_v=None) -> "FormalIsomorphism":
        """id + psi1 t^at (and id + psi_v t^at on V)."""
        pad = [None] * (at - 1)
        return cls(order, pad + [psi1], None if psi_v is None else pad + [psi_v])

    def series(self, which: str, template: OmegaMultiMap) -> list:
        lst = self.psi if which == "A" else self.psi_v
        dim = template.target_dim
        out = [OmegaMultiMap.identity(template.semigroup, dim, template.field)]
        for i in range(1, self.order + 1):
            m = lst[i - 1] if lst is not None and i - 1 < len(lst) else None
            out.append(m if m is not None else OmegaMultiMap.zeros(template.semigroup, dim, (dim,), template.field))
        return out


def _series_inverse(ps: list) -> list:
    inv = [ps[0]]
    for n in range(1, len(ps)):
        acc = None
        for i in range(1, n + 1):
            t = compose_at(ps[i], inv[n - i], 1)
            acc = t if acc is None else acc + t
        inv.append(-acc)
    return inv


def _series_compose(fs: list, gs: list, slot: int, N: int) -> list:
    out = []
    for n in range(N + 1):
        acc = None
        for i in range(n + 1):
            t = compose_at(fs[i], gs[n - i], slot)
            acc = t if acc is None else acc + t
        out.append(acc)
    return out


def _conjugate(out_inv, m, ins, N):
    s = _series_compose(out_inv, m, 1, N)
    for slot, p in enumerate(ins, start=1):
        s = _series_compose(s, p, slot, N)
    return s


def apply_formal_isomorphism(d: TruncatedDeformation, psi: FormalIsomorphism) -> TruncatedDeformation:
    """The transported deformation psi^{-1} o (structure) o (psi (x) psi), truncated at d.order."""
    N = d.order
    if psi.order < N:
        psi = FormalIsomorphism(N, psi.psi, psi.psi_v)
    base = _base_maps(d.base)
    pa = psi.series("A", base["T"] if not d.relative else base["mu"])[: N + 1]
    ia = _series_inverse(pa)
    if not d.relative:
        mu = _conjugate(ia, d.series("mu"), [pa, pa], N)
        T = _conjugate(ia, d.series("T"), [pa], N)
        return TruncatedDeformation.from_series(d.base, {"mu": mu, "T": T}, N)
    if psi.psi_v is None:
        raise InvalidDeformation("relative isomorphisms need a V-component")
    pv = psi.series("V", base["mu_v"])[: N + 1]
    iv = _series_inverse(pv)
    series = {
        "mu": _conjugate(ia, d.series("mu"), [pa, pa], N),
        "mu_v": _conjugate(iv, d.series("mu_v"), [pv, pv], N),
        "l": _conjugate(iv, d.series("l"), [pa, pv], N),
        "r": _conjugate(iv, d.series("r"), [pv, pa], N),
        "T": _conjugate(ia, d.series("T"), [pv], N),
    }
    return TruncatedDeformation.from_series(d.base, series, N)


def _psi_cochain(system, psi1, psi1_v=None) -> Cochain:
    cx = _complex_for(system)
    sp = cx.space(1)
    if isinstance(system, RelativeRBSystem):
        f = MixedMultiMap.zeros(system.semigroup, system.dim_a, system.dim_v, 1, system.field)
        f.set_block((1,), "A", psi1)
        f.set_block((), "V", psi1_v)
        return Cochain(sp, sp.pack(f, None))
    return Cochain(sp, sp.pack(psi1, None))


def _psi_parts(c: Cochain):
    f, _ = c.parts()
    if isinstance(f, MixedMultiMap):
        return f.block((1,), "A"), f.block((), "V")
    return f, None


@dataclass
class ShiftReport:
    ok: bool
    residual: Cochain
    expected: Cochain
    observed: Cochain
    label: str | None = None

    def as_dict(self, field=exactla.QQ):
        out = {
            "ok": self.ok,
            "observed": [field.format(x) for x in self.observed.coords],
            "expected": [field.format(x) for x in self.expected.coords],
            "residual": [field.format(x) for x in self.residual.coords],
        }
        if self.label:
            out["label"] = self.label
        return out


def coboundary_of_psi(system, psi: FormalIsomorphism) -> Cochain:
    """Expected infinitesimal shift produced by psi_t = id + psi_1 t.

    Absolute: ∂_RBA(psi_1, 0).  Relative: ∂(-psi~_1, 0), where psi~_1 is
    psi_1 (+) psi_1^V viewed as a degree-1 cochain.
    """
    cx = _complex_for(system)
    base = _base_maps(system)
    p1 = psi.series("A", base["mu"])[1] if psi.order >= 1 else None
    if isinstance(system, RelativeRBSystem):
        v1 = psi.series("V", base["mu_v"])[1]
        return cx.apply(-_psi_cochain(system, p1, v1))
    return cx.apply(_psi_cochain(system, p1))


def equivalence_shift_check(d1: TruncatedDeformation, d2: TruncatedDeformation,
                            psi: FormalIsomorphism) -> ShiftReport:
    """infinitesimal(d2) - infinitesimal(d1) against the coboundary of psi_1."""
    obs = infinitesimal(d2) - infinitesimal(d1)
    exp = coboundary_of_psi(d1.base, psi)
    res = obs - exp
    return ShiftReport(res.is_zero(), res, exp, obs, ENGINE_EXTENSION if d1.relative else None)


def rigidity_gauge_step(d: TruncatedDeformation, psi1, psi1_v=None, at: int = 1,
                        check: bool = True) -> TruncatedDeformation:
    """Conjugate away the coefficient of t^at, assuming it equals ∂(psi_1, 0).

    Coefficients below ``at`` must already vanish.  Absolute: psi_t = id - psi_1 t^at.
    Relative (engine extension): psi_t = id + psi~_1 t^at, which shifts by -∂(psi~_1, 0).
    """
    if at < 1 or at > d.order:
        raise InvalidDeformation("gauge order outside the truncation")
    if check:
        for i in range(1, at):
            c = infinitesimal(d, i)
            if not c.is_zero():
                raise NotACoboundaryWitness(f"coefficient of t^{i} is not zero")
        target = infinitesimal(d, at)
        w = _psi_cochain(d.base, psi1, psi1_v)
        res = target - _complex_for(d).apply(w)
        if not res.is_zero():
            raise NotACoboundaryWitness(
                f"order-{at} coefficients differ from ∂(psi, 0) in {int(np.count_nonzero(res.coords != 0))} coordinates")
    if d.relative:
        psi = FormalIsomorphism.single(psi1, d.order, at, psi_v=psi1_v)
    else:
        psi = FormalIsomorphism.single(-psi1, d.order, at)
    return apply_formal_isomorphism(d, psi)


def coboundary_witness(d: TruncatedDeformation, at: int = 1):
    """Solve ∂(psi, 0) = coefficient of t^at; returns (psi_A, psi_V) or None."""
    cx = _complex_for(d)
    M = cx.differential(1)
    x = exactla.solve(M, infinitesimal(d, at).coords, d.field)
    if x is None:
        return None
    return _psi_parts(Cochain(cx.space(1), x))


@dataclass
class TrivializeReport:
    trivialized: bool
    steps: int
    deformation: TruncatedDeformation
    stuck_at: int | None = None


def trivialize(d: TruncatedDeformation) -> TrivializeReport:
    """Iterate gauge steps order by order up to d.order.

    Stops at the first order whose coefficients are not a coboundary.
    """
    cur = d
    steps = 0
    for at in range(1, d.order + 1):
        if infinitesimal(cur, at).is_zero():
            continue
        w = coboundary_witness(cur, at)
        if w is None:
            return TrivializeReport(False, steps, cur, at)
        cur = rigidity_gauge_step(cur, w[0], w[1], at=at, check=False)
        steps += 1
    return TrivializeReport(cur.is_constant(), steps, cur)


# ---------------------------------------------------------------------------
# generators used in tests and the CLI


def scaling_deformation(system, a=1, order: int = 3, scale_T: bool = False) -> TruncatedDeformation:
    """Rescale every product by (1 + a t); with weight 0 optionally T by (1 + a t) too."""
    F = system.field
    a = F(a)
    maps = _base_maps(system)
    coeffs = {}
    for name, m in maps.items():
        if name == "T":
            if scale_T:
                if system.weight != 0:
                    raise InvalidDeformation("rescaling T is a deformation only in weight 0")
                coeffs[name] = [m.scale(a)]
            continue
        coeffs[name] = [m.scale(a)]
    return TruncatedDeformation(system, order, coeffs)


def random_isomorphism(rng, system, order: int = 2, lo: int = -1, hi: int = 1) -> FormalIsomorphism:
    from .oracle import random_omega_map

    S = system.semigroup
    if isinstance(system, RelativeRBSystem):
        pa = [random_omega_map(rng, S, system.dim_a, (system.dim_a,), lo, hi) for _ in range(order)]
        pv = [random_omega_map(rng, S, system.dim_v, (system.dim_v,), lo, hi) for _ in range(order)]
        return FormalIsomorphism(order, pa, pv)
    pa = [random_omega_map(rng, S, system.dim, (system.dim,), lo, hi) for _ in range(order)]
    return FormalIsomorphism(order, pa)


def deformation_from_cochain(system, c: Cochain, order: int = 1) -> TruncatedDeformation:
    """Order-truncated deformation whose t^1 coefficients are read from a 2-cochain."""
    f, th = c.parts()
    if isinstance(system, RelativeRBSystem):
        coeffs = {"mu": [f.block((1, 2), "A")], "l": [f.block((1,), "V")],
                  "r": [f.block((2,), "V")], "mu_v": [f.block((), "V")], "T": [th]}
    else:
        coeffs = {"mu": [f], "T": [th]}
    return TruncatedDeformation(system, order, coeffs)


__all__ = [
    "TruncatedDeformation", "FormalIsomorphism", "DeformationReport", "ShiftReport",
    "verify_deformation", "order_identities", "infinitesimal", "is_two_cocycle",
    "apply_formal_isomorphism", "equivalence_shift_check", "rigidity_gauge_step",
    "coboundary_witness", "coboundary_of_psi", "trivialize", "scaling_deformation",
    "random_isomorphism", "deformation_from_cochain", "ENGINE_EXTENSION",
]
