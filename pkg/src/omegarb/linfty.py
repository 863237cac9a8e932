"""L-infinity[1] brackets controlling relative and absolute Rota-Baxter data.

Relative side: the graded space is s^{-1}L' (+) a, where L'(n) consists of
maps on W = A (+) V whose A-valued part only sees A-inputs and whose V-valued
part never does, and a(p) = Hom(V^{(x)p}, A).  Degrees: |s^{-1}f| = arity-2,
|theta| = arity-1.

Absolute side: s^{-1}M (+) h with M(n) = h(n) = Hom(A^{(x)n}, A), embedded in
the relative algebra of the regular action by copying f into every admissible
block.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from math import comb
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, EmbeddingMismatch, NotMaurerCartan, ShapeError
from .exactla import QQ
from .omega_maps import (
    MixedMultiMap,
    OmegaMultiMap,
    bracket_w,
    compose_at,
    embed_a_valued,
    gerstenhaber_bracket,
    koszul_sign,
    subsets,
)
from .structures import AbsoluteRBSystem, RelativeRBSystem

log = logging.getLogger(__name__)


def _sgn(e):
    return -1 if e % 2 else 1


# ---------------------------------------------------------------------------
# elements


@dataclass(frozen=True)
class WContext:
    semigroup: object
    dim_a: int
    dim_v: int
    field: object = QQ


class RelativeElement:
    """Homogeneous element (s^{-1}f, theta) with f of arity n, theta of arity n-1.

    Degree is n-2.  ``theta`` is None when n == 1.
    """

    __slots__ = ("ctx", "n", "f", "theta")

    def __init__(self, ctx: WContext, n: int, f: MixedMultiMap | None = None,
                 theta: OmegaMultiMap | None = None):
        self.ctx, self.n = ctx, n
        if n < 1:  # degree below -1: the space is zero
            self.f = self.theta = None
            return
        if f is None:
            f = MixedMultiMap.zeros(ctx.semigroup, ctx.dim_a, ctx.dim_v, n, ctx.field)
        if f.arity != n:
            raise ShapeError(f"f-part has arity {f.arity}, expected {n}")
        if n == 1:
            if theta is not None and not theta.is_zero():
                raise ShapeError("no arity-0 component in degree -1")
            theta = None
        elif theta is None:
            theta = OmegaMultiMap.zeros(ctx.semigroup, ctx.dim_a, (ctx.dim_v,) * (n - 1), ctx.field)
        elif theta.arity != n - 1:
            raise ShapeError(f"theta has arity {theta.arity}, expected {n - 1}")
        self.f, self.theta = f, theta

    @property
    def degree(self):
        return self.n - 2

    @classmethod
    def zero(cls, ctx, n):
        return cls(ctx, n)

    def pieces(self):
        """Nonzero homogeneous pieces as ('f', map) / ('a', map) pairs."""
        out = []
        if self.f is not None and not self.f.is_zero():
            out.append(("f", self.f))
        if self.theta is not None and not self.theta.is_zero():
            out.append(("a", self.theta))
        return out

    def _combine(self, other, op):
        if self.n != other.n:
            raise DimensionMismatch("elements have different degrees")
        if self.f is None:
            return self
        th = None if self.theta is None else op(self.theta, other.theta)
        return RelativeElement(self.ctx, self.n, op(self.f, other.f), th)

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        if self.f is None:
            return self
        th = None if self.theta is None else self.theta.scale(c)
        return RelativeElement(self.ctx, self.n, self.f.scale(c), th)

    def is_zero(self):
        return self.f is None or (self.f.is_zero() and (self.theta is None or self.theta.is_zero()))

    def __eq__(self, other):
        if not isinstance(other, RelativeElement):
            return NotImplemented
        return self.n == other.n and (self - other).is_zero()

    __hash__ = None

    def in_subalgebra(self):
        return self.f.in_subalgebra()

    def __repr__(self):
        return f"RelativeElement(n={self.n}, degree={self.degree})"


class AbsoluteElement:
    """Homogeneous (s^{-1}f, theta) with f: A^n -> A and theta: A^{n-1} -> A."""

    __slots__ = ("semigroup", "dim", "field", "n", "f", "theta")

    def __init__(self, semigroup, dim, n, f=None, theta=None, field=QQ):
        self.semigroup, self.dim, self.n, self.field = semigroup, dim, n, field
        if n < 1:
            self.f = self.theta = None
            return
        if f is None:
            f = OmegaMultiMap.zeros(semigroup, dim, (dim,) * n, field)
        if f.arity != n:
            raise ShapeError(f"f-part has arity {f.arity}, expected {n}")
        if n == 1:
            theta = None
        elif theta is None:
            theta = OmegaMultiMap.zeros(semigroup, dim, (dim,) * (n - 1), field)
        elif theta.arity != n - 1:
            raise ShapeError(f"theta has arity {theta.arity}, expected {n - 1}")
        self.f, self.theta = f, theta

    @property
    def degree(self):
        return self.n - 2

    def pieces(self):
        out = []
        if self.f is not None and not self.f.is_zero():
            out.append(("f", self.f))
        if self.theta is not None and not self.theta.is_zero():
            out.append(("a", self.theta))
        return out

    def _combine(self, other, op):
        if self.n != other.n:
            raise DimensionMismatch("elements have different degrees")
        if self.f is None:
            return self
        th = None if self.theta is None else op(self.theta, other.theta)
        return AbsoluteElement(self.semigroup, self.dim, self.n, op(self.f, other.f), th, self.field)

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        if self.f is None:
            return self
        th = None if self.theta is None else self.theta.scale(c)
        return AbsoluteElement(self.semigroup, self.dim, self.n, self.f.scale(c), th, self.field)

    def is_zero(self):
        return self.f is None or (self.f.is_zero() and (self.theta is None or self.theta.is_zero()))

    def __eq__(self, other):
        if not isinstance(other, AbsoluteElement):
            return NotImplemented
        return self.n == other.n and (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        return f"AbsoluteElement(n={self.n}, degree={self.degree})"


def relative_mc_element(system: RelativeRBSystem) -> RelativeElement:
    ctx = WContext(system.semigroup, system.dim_a, system.dim_v, system.field)
    return RelativeElement(ctx, 2, system.assact.pi(), system.T)


def absolute_mc_element(system: AbsoluteRBSystem) -> AbsoluteElement:
    return AbsoluteElement(system.semigroup, system.dim, 2, system.algebra.mu, system.T, system.field)


# ---------------------------------------------------------------------------
# relative brackets


def _piece_degree(kind, m):
    return m.arity - 2 if kind == "f" else m.arity - 1


def nested_projection(f: MixedMultiMap, thetas: Sequence[OmegaMultiMap]) -> OmegaMultiMap:
    """P[...[f, theta_1]..., theta_k]: A-valued block with V-inputs only."""
    x = f
    for th in thetas:
        x = bracket_w(x, embed_a_valued(th, f.dim_a, f.dim_v))
    return x.block((), "A")


def _lprime_pieces(pieces, weight, ctx):
    """l'_k on homogeneous pieces.  Returns ('f', map) / ('a', map) / None."""
    k = len(pieces)
    if k < 2:
        return None
    fpos = [j for j, (kind, _) in enumerate(pieces) if kind == "f"]
    if k == 2 and len(fpos) == 2:
        f, g = pieces[0][1], pieces[1][1]
        b = bracket_w(f, g)
        return ("f", b.scale(_sgn(f.arity - 1)))
    if len(fpos) != 1:
        return None
    j = fpos[0]
    f = pieces[j][1]
    deg_f = f.arity - 2
    sign = _sgn(deg_f * sum(_piece_degree(*pieces[t]) for t in range(j)))
    thetas = [m for t, (kind, m) in enumerate(pieces) if t != j]
    e = f.arity - (k - 1)
    if e < 0:
        log.debug("weight exponent %d < 0 for arity %d with %d operators; term is zero", e, f.arity, k - 1)
        return None
    coeff = sign * (ctx.field(weight) ** e if e else 1)
    if coeff == 0:
        return None
    return ("a", nested_projection(f, thetas).scale(coeff))


def _output_anchor(args):
    return sum(x.n - 2 for x in args) + 3


def lprime(args: Sequence[RelativeElement], weight) -> RelativeElement:
    """The bracket l'_k(x_1, ..., x_k), k = len(args), extended multilinearly."""
    if not args:
        raise ValueError("need at least one argument")
    ctx = args[0].ctx
    N = _output_anchor(args)
    out = RelativeElement(ctx, N)
    if len(args) == 1 or N < 1:
        return out
    fpart = out.f.data.copy()
    tpart = None if out.theta is None else out.theta.data.copy()
    for combo in itertools.product(*[x.pieces() for x in args]):
        r = _lprime_pieces(list(combo), weight, ctx)
        if r is None:
            continue
        kind, m = r
        if kind == "f":
            fpart = fpart + m.data
        else:
            tpart = tpart + m.data
    f = MixedMultiMap(ctx.semigroup, ctx.dim_a, ctx.dim_v, ctx.field.normalize(fpart), ctx.field)
    th = None if tpart is None else OmegaMultiMap(ctx.semigroup, ctx.field.normalize(tpart), ctx.field)
    return RelativeElement(ctx, N, f, th)


def mc_residual_relative(system: RelativeRBSystem) -> RelativeElement:
    """sum_k (1/k!) l'_k(alpha, ..., alpha) for alpha = (s^{-1}pi, T)."""
    alpha = relative_mc_element(system)
    field = system.field
    acc = None
    for k in range(2, 4):  # higher brackets of alpha vanish by arity
        term = lprime([alpha] * k, system.weight).scale(field.inv_factorial(k))
        acc = term if acc is None else acc + term
    return acc


def mc_residual_relative_direct(system: RelativeRBSystem) -> RelativeElement:
    """Closed form: (-1/2 [pi, pi], lambda P[pi, T] + 1/2 P[[pi, T], T])."""
    a = system.assact
    pi = a.pi()
    ctx = WContext(system.semigroup, system.dim_a, system.dim_v, system.field)
    fpart = bracket_w(pi, pi).scale(system.field(-1) * system.field.inv_factorial(2))
    mu, l, r, mv, T = a.algebra.mu, a.module.l, a.module.r, a.mu_v, system.T
    th = (compose_at(compose_at(mu, T, 1), T, 2)
          - compose_at(T, mv, 1).scale(system.weight)
          - compose_at(T, compose_at(l, T, 1), 1)
          - compose_at(T, compose_at(r, T, 2), 1))
    return RelativeElement(ctx, 3, fpart, th)


# ---------------------------------------------------------------------------
# absolute side


def embed(x: AbsoluteElement, ctx: WContext | None = None) -> RelativeElement:
    """iota: copy f into the full-A block (A-valued) and every other block (V-valued)."""
    d = x.dim
    ctx = ctx or WContext(x.semigroup, d, d, x.field)
    return RelativeElement(ctx, x.n, embed_map(x.f), x.theta)


def embed_map(f: OmegaMultiMap) -> MixedMultiMap:
    d = f.target_dim
    n = f.arity
    out = MixedMultiMap.zeros(f.semigroup, d, d, n, f.field)
    full = tuple(range(1, n + 1))
    for I in subsets(n):
        out.set_block(I, "A" if I == full else "V", f)
    return out


def project_map(ft: MixedMultiMap, check=True) -> OmegaMultiMap:
    n = ft.arity
    full = tuple(range(1, n + 1))
    f = ft.block(full, "A")
    if check:
        for I in subsets(n):
            if I != full and ft.block(I, "V") != f:
                raise EmbeddingMismatch(f"block {I} does not equal the A-valued part")
            if I != full and not ft.block(I, "A").is_zero():
                raise EmbeddingMismatch(f"unexpected A-valued block at {I}")
        if not ft.block(full, "V").is_zero():
            raise EmbeddingMismatch("unexpected V-valued block on all-A inputs")
    return OmegaMultiMap(f.semigroup, f.data.copy(), f.field)


def project(y: RelativeElement, check=True) -> AbsoluteElement:
    ctx = y.ctx
    return AbsoluteElement(ctx.semigroup, ctx.dim_a, y.n, project_map(y.f, check), y.theta, ctx.field)


def rho(args: Sequence[AbsoluteElement], weight, method: str = "embedding") -> AbsoluteElement:
    """The absolute bracket rho_k.  ``method='embedding'`` is the reference
    path p(l'_k(iota x_1, ..., iota x_k)); ``'explicit'`` expands the closed
    sum over permutations and insertion slots."""
    if method == "embedding":
        d = args[0].dim
        ctx = WContext(args[0].semigroup, d, d, args[0].field)
        return project(lprime([embed(x, ctx) for x in args], weight))
    if method == "explicit":
        return _rho_explicit(args, weight)
    raise ValueError("method must be 'embedding' or 'explicit'")


def _insert_many(f: OmegaMultiMap, placed: dict) -> OmegaMultiMap:
    """f o (id ... theta at slot q ... id) for a dict slot -> map; slots are
    slots of f, filled from the right so the numbering stays valid."""
    out = f
    for q in sorted(placed, reverse=True):
        out = compose_at(out, placed[q], q)
    return out


def _rho_explicit_pieces(pieces, weight, field):
    k = len(pieces)
    if k < 2:
        return None
    fpos = [j for j, (kind, _) in enumerate(pieces) if kind == "f"]
    if k == 2 and len(fpos) == 2:
        f, g = pieces[0][1], pieces[1][1]
        return ("f", gerstenhaber_bracket(f, g).scale(_sgn(f.arity - 1)))
    if len(fpos) != 1:
        return None
    j = fpos[0]
    f = pieces[j][1]
    n = f.arity
    deg_f = n - 1
    thetas = [m for t, (kind, m) in enumerate(pieces) if t != j]
    move = _sgn((n - 2) * sum(pieces[t][1].arity - 1 for t in range(j)))
    kk = len(thetas)
    if kk > n:
        return None
    degs = [t.arity - 1 for t in thetas]
    ps = [t.arity for t in thetas]
    acc = None

    def add(term, c):
        nonlocal acc
        x = term.data * c
        acc = x if acc is None else acc + x

    lam_pow = field(weight) ** (n - kk) if n - kk else 1
    for sigma in itertools.permutations(range(kk)):
        eps = koszul_sign(degs, sigma)
        th = [thetas[s] for s in sigma]
        pp = [ps[s] for s in sigma]
        dd = [degs[s] for s in sigma]
        if kk == n:
            e1 = sum(sum(pp[:i]) * dd[i] for i in range(1, n))
            add(_insert_many(f, {q + 1: th[q] for q in range(n)}), eps * _sgn(e1))
        if lam_pow == 0:
            continue
        for qs in itertools.combinations(range(1, n + 1), kk - 1):
            inner = _insert_many(f, {qs[i - 1]: th[i] for i in range(1, kk)})
            base = 1 + deg_f * dd[0]
            base += sum((qs[i - 1] + sum(pp[1:i]) - (i + 1) + 1) * dd[i] for i in range(1, kk))
            tail = deg_f + sum(dd[1:])
            for r in range(1, pp[0] + 1):
                add(compose_at(th[0], inner, r), eps * lam_pow * _sgn(base + (r - 1) * tail))
    if acc is None:
        return None
    return ("a", OmegaMultiMap(f.semigroup, field.normalize(acc * move), field))


def _rho_explicit(args, weight):
    x0 = args[0]
    field = x0.field
    N = sum(x.n - 2 for x in args) + 3
    out = AbsoluteElement(x0.semigroup, x0.dim, N, field=field)
    if len(args) == 1 or N < 1:
        return out
    fpart, tpart = out.f.data.copy(), None if out.theta is None else out.theta.data.copy()
    for combo in itertools.product(*[x.pieces() for x in args]):
        r = _rho_explicit_pieces(list(combo), weight, field)
        if r is None:
            continue
        if r[0] == "f":
            fpart = fpart + r[1].data
        else:
            tpart = tpart + r[1].data
    f = OmegaMultiMap(x0.semigroup, field.normalize(fpart), field)
    th = None if tpart is None else OmegaMultiMap(x0.semigroup, field.normalize(tpart), field)
    return AbsoluteElement(x0.semigroup, x0.dim, N, f, th, field)


def mc_residual_absolute(system: AbsoluteRBSystem, method="embedding") -> AbsoluteElement:
    alpha = absolute_mc_element(system)
    field = system.field
    acc = None
    for k in range(2, 4):
        term = rho([alpha] * k, system.weight, method).scale(field.inv_factorial(k))
        acc = term if acc is None else acc + term
    return acc


def mc_residual_absolute_direct(system: AbsoluteRBSystem) -> AbsoluteElement:
    mu, T, lam = system.algebra.mu, system.T, system.weight
    f = gerstenhaber_bracket(mu, mu).scale(system.field(-1) * system.field.inv_factorial(2))
    th = (compose_at(compose_at(mu, T, 1), T, 2)
          - compose_at(T, mu, 1).scale(lam)
          - compose_at(T, compose_at(mu, T, 1), 1)
          - compose_at(T, compose_at(mu, T, 2), 1))
    return AbsoluteElement(system.semigroup, system.dim, 3, f, th, system.field)


# ---------------------------------------------------------------------------
# twisting


def _split_by_degree(x):
    """Homogeneous element -> list of (degree, element with one piece)."""
    out = []
    if isinstance(x, RelativeElement):
        if not x.f.is_zero():
            out.append(RelativeElement(x.ctx, x.n, x.f, None))
        if x.theta is not None and not x.theta.is_zero():
            out.append(RelativeElement(x.ctx, x.n, None, x.theta))
    else:
        if not x.f.is_zero():
            out.append(AbsoluteElement(x.semigroup, x.dim, x.n, x.f, None, x.field))
        if x.theta is not None and not x.theta.is_zero():
            out.append(AbsoluteElement(x.semigroup, x.dim, x.n, None, x.theta, x.field))
    return out


def _max_f_arity(elements):
    return max([x.n for x in elements if not x.f.is_zero()] or [0])


def twisted_bracket(base, args: Sequence, weight, bracket=None, check_mc: bool = True):
    """l^alpha_k(x_1..x_k) = sum_i (1/i!) l_{k+i}(alpha^i, x_1..x_k).

    ``base`` is the degree-0 element alpha.  The sum is finite: a bracket
    with i copies of alpha vanishes once i exceeds 1 + (max f-arity) - k.
    """
    if isinstance(base, RelativeElement):
        bracket = bracket or lprime
        field = base.ctx.field
        if check_mc:
            res = lprime([base, base], weight).scale(field.inv_factorial(2)) + \
                lprime([base] * 3, weight).scale(field.inv_factorial(3))
            if not res.is_zero():
                raise NotMaurerCartan("base element is not Maurer-Cartan")
    else:
        bracket = bracket or rho
        field = base.field
        if check_mc:
            if not mc_residual_absolute(_as_system(base, weight)).is_zero():
                raise NotMaurerCartan("base element is not Maurer-Cartan")
    k = len(args)
    top = 1 + max(_max_f_arity(list(args) + [base]), 2) - k
    acc = None
    for i in range(0, max(top, 0) + 1):
        if k + i < 2:
            continue
        term = bracket([base] * i + list(args), weight).scale(field.inv_factorial(i))
        acc = term if acc is None else acc + term
    if acc is None:
        acc = bracket(list(args), weight)
    return acc


def _as_system(base: AbsoluteElement, weight):
    from .structures import OmegaAlgebra

    return AbsoluteRBSystem(OmegaAlgebra(base.f), weight, base.theta)


def twisted_mc_residual(base, alpha_hat, weight, check_mc: bool = True):
    """sum_k (1/k!) l^alpha_k(alpha_hat, ..., alpha_hat)."""
    field = base.ctx.field if isinstance(base, RelativeElement) else base.field
    acc = None
    for k in range(1, 4):
        term = twisted_bracket(base, [alpha_hat] * k, weight, check_mc=check_mc).scale(field.inv_factorial(k))
        check_mc = False
        acc = term if acc is None else acc + term
    return acc


def binomial_twisted_mc_residual(base, alpha_hat, weight):
    """Same quantity via the expansion of MC(alpha + alpha_hat) - MC(alpha),
    grouping the commuting degree-0 pieces with binomial coefficients."""
    br = lprime if isinstance(base, RelativeElement) else rho
    field = base.ctx.field if isinstance(base, RelativeElement) else base.field
    acc = None
    for n in range(2, 4):
        for j in range(1, n + 1):  # j copies of alpha_hat
            c = comb(n, j) * field.inv_factorial(n)
            term = br([base] * (n - j) + [alpha_hat] * j, weight).scale(c)
            acc = term if acc is None else acc + term
    return acc


def jacobiator(args: Sequence, weight, bracket=None):
    """Left side of the n-th generalized Jacobi identity (n = len(args)):

        sum_{i+j=n+1} sum_{unshuffles s} eps(s) l_j(l_i(x_s1..x_si), x_s(i+1)..x_sn)

    Vanishes identically in an L-infinity[1] algebra.
    """
    if bracket is None:
        bracket = lprime if isinstance(args[0], RelativeElement) else rho
    n = len(args)
    degs = [x.degree for x in args]
    acc = None
    for i in range(1, n + 1):
        for first in itertools.combinations(range(n), i):
            rest = [t for t in range(n) if t not in first]
            sigma = list(first) + rest
            eps = koszul_sign(degs, sigma)
            inner = bracket([args[t] for t in first], weight)
            term = bracket([inner] + [args[t] for t in rest], weight)
            term = term.scale(eps)
            acc = term if acc is None else acc + term
    return acc
