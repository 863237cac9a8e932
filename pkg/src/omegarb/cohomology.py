"""Cochain complexes, coboundary matrices, cohomology dimensions and the
long exact sequence checks.

Six complex kinds are supported:

    alg     Hochschild complex C^n_Alg(A) = Hom(A^n, A), differential [mu, -]
    rbo     operator complex C^n_RBO(T) = Hom(A^n, A)
    rba     C^1 = C^1_Alg, C^n = C^n_Alg + C^{n-1}_RBO
    assact  C^n = L'(n), differential delta_pi = [pi, -]
    relrbo  C^n = Hom(V^n, A), differential d_T
    relrba  C^n = L'(n) + Hom(V^{n-1}, A)

Coordinates follow the canonical basis: semigroup tuples in mixed-radix
order, then (for maps on A + V) slot subsets by size then lexicographically,
then row-major tensor entries; f-part before theta-part.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from functools import lru_cache

import numpy as np

from . import exactla
from .errors import (
    CoboundaryNotSquareZero,
    ComponentFormulaMismatch,
    DegreeCapExceeded,
    DimensionMismatch,
    ExactnessFailure,
    ShapeError,
)
from .exactla import SparseMatrix
from .linfty import (
    AbsoluteElement,
    RelativeElement,
    WContext,
    absolute_mc_element,
    embed_map,
    nested_projection,
    relative_mc_element,
    rho,
)
from .omega_maps import (
    MixedMultiMap,
    OmegaMultiMap,
    bracket_w,
    compose_at,
    embed_a_valued,
    gerstenhaber_bracket,
    mixed_bracket,
    subsets,
)
from .structures import AbsoluteRBSystem, AssAct, RelativeRBSystem

KINDS = ("alg", "rbo", "rba", "assact", "relrbo", "relrba")
ABSOLUTE_KINDS = ("alg", "rbo", "rba")
RELATIVE_KINDS = ("assact", "relrbo", "relrba")
MAX_DIM = 50_000
DEGREE_CAPS = {"absolute": 4, "relative": 3}


def cost_estimate(semigroup_size: int, dim: int, n: int) -> int:
    """Rough size |Omega|^n d^(n+1) of the degree-n cochain space."""
    return semigroup_size ** n * dim ** (n + 1)


def degree_cap(system) -> int:
    return DEGREE_CAPS["relative" if isinstance(system, RelativeRBSystem) else "absolute"]


def _check_cap(system, max_degree, cap):
    cap = degree_cap(system) if cap is None else cap
    if max_degree > cap:
        raise DegreeCapExceeded(f"max degree {max_degree} exceeds the cap {cap}; pass a larger cap "
                                "after checking the cost model |Omega|^n d^(n+1)")


def _sgn(e):
    return -1 if e % 2 else 1


# ---------------------------------------------------------------------------
# coordinates


@lru_cache(maxsize=None)
def _lprime_index(k: int, da: int, dv: int, n: int) -> np.ndarray:
    """Flat positions (into the dense W tensor) of the L'(n) coordinates."""
    w = da + dv
    shape = (k,) * n + (w,) * (n + 1)
    full = tuple(range(1, n + 1))
    ra = np.arange(da)
    rv = np.arange(da, w)
    out = []
    for alphas in itertools.product(range(k), repeat=n):
        for I in subsets(n):
            tgt = ra if I == full else rv
            slots = [ra if j in I else rv for j in range(1, n + 1)]
            grids = np.meshgrid(tgt, *slots, indexing="ij")
            idx = tuple(np.full(grids[0].shape, a) for a in alphas) + tuple(grids)
            out.append(np.ravel_multi_index(idx, shape).ravel())
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


@dataclass(frozen=True)
class CochainSpace:
    kind: str
    n: int
    semigroup: object
    dim_a: int
    dim_v: int
    field: object = exactla.QQ

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown complex kind {self.kind!r}")

    # segment sizes ----------------------------------------------------
    @property
    def k(self):
        return self.semigroup.size

    def _hom_dim(self, n, src, tgt):
        if n < 1:
            return 0
        return self.k ** n * tgt * src ** n

    def _lprime_dim(self, n):
        if n < 1:
            return 0
        return len(_lprime_index(self.k, self.dim_a, self.dim_v, n))

    @property
    def f_dim(self):
        n, d = self.n, self.dim_a
        if self.kind in ("alg", "rba"):
            return self._hom_dim(n, d, d)
        if self.kind in ("assact", "relrba"):
            return self._lprime_dim(n)
        return 0

    @property
    def theta_arity(self):
        if self.kind in ("rbo", "relrbo"):
            return self.n
        if self.kind in ("rba", "relrba"):
            return self.n - 1
        return 0

    @property
    def theta_dim(self):
        p = self.theta_arity
        if p < 1:
            return 0
        src = self.dim_v if self.kind.startswith("rel") else self.dim_a
        return self._hom_dim(p, src, self.dim_a)

    @property
    def dim(self):
        if self.n < 1:
            return 0
        return self.f_dim + self.theta_dim

    @property
    def has_f(self):
        return self.kind not in ("rbo", "relrbo")

    @property
    def has_theta(self):
        return self.theta_arity >= 1

    # conversions ------------------------------------------------------
    def zero_parts(self):
        S, d, m, F = self.semigroup, self.dim_a, self.dim_v, self.field
        f = th = None
        if self.has_f and self.n >= 1:
            if self.kind in ("alg", "rba"):
                f = OmegaMultiMap.zeros(S, d, (d,) * self.n, F)
            else:
                f = MixedMultiMap.zeros(S, d, m, self.n, F)
        if self.has_theta:
            src = m if self.kind.startswith("rel") else d
            th = OmegaMultiMap.zeros(S, d, (src,) * self.theta_arity, F)
        return f, th

    def unpack(self, coords):
        coords = np.asarray(coords, dtype=object)
        if coords.shape != (self.dim,):
            raise DimensionMismatch(f"expected {self.dim} coordinates, got {coords.shape}")
        f, th = self.zero_parts()
        fd = self.f_dim
        if f is not None:
            if isinstance(f, MixedMultiMap):
                idx = _lprime_index(self.k, self.dim_a, self.dim_v, self.n)
                f.data.flat[idx] = coords[:fd]
            else:
                f.data.flat[:] = coords[:fd]
        if th is not None:
            th.data.flat[:] = coords[fd:]
        return f, th

    def pack(self, f=None, th=None) -> np.ndarray:
        out = np.zeros(self.dim, dtype=object)
        fd = self.f_dim
        if f is not None and self.has_f:
            if isinstance(f, MixedMultiMap):
                if f.arity != self.n:
                    raise ShapeError("f-part has the wrong arity")
                idx = _lprime_index(self.k, self.dim_a, self.dim_v, self.n)
                out[:fd] = f.data.ravel()[idx]
            else:
                out[:fd] = f.data.ravel()
        if th is not None and self.has_theta:
            out[fd:] = th.data.ravel()
        return out

    def basis_label(self, j: int):
        """Human-readable description of coordinate j."""
        fd = self.f_dim
        if j < fd:
            if self.kind in ("alg", "rba"):
                d = self.dim_a
                shape = (self.k,) * self.n + (d,) * (self.n + 1)
                pos = np.unravel_index(j, shape)
                return ("f", pos[: self.n], pos[self.n:])
            idx = _lprime_index(self.k, self.dim_a, self.dim_v, self.n)[j]
            w = self.dim_a + self.dim_v
            pos = np.unravel_index(idx, (self.k,) * self.n + (w,) * (self.n + 1))
            return ("f", pos[: self.n], pos[self.n:])
        src = self.dim_v if self.kind.startswith("rel") else self.dim_a
        p = self.theta_arity
        pos = np.unravel_index(j - fd, (self.k,) * p + (self.dim_a,) + (src,) * p)
        return ("theta", pos[:p], pos[p:])


@dataclass
class Cochain:
    space: CochainSpace
    coords: np.ndarray

    def parts(self):
        return self.space.unpack(self.coords)

    def is_zero(self):
        return not np.any(np.asarray(self.coords, dtype=object) != 0)

    def __add__(self, other):
        return Cochain(self.space, self.space.field.normalize(self.coords + other.coords))

    def __sub__(self, other):
        return Cochain(self.space, self.space.field.normalize(self.coords - other.coords))

    def __neg__(self):
        return Cochain(self.space, self.space.field.normalize(-self.coords))

    def __eq__(self, other):
        return (isinstance(other, Cochain) and self.space == other.space
                and not np.any(self.coords != other.coords))

    __hash__ = None


# ---------------------------------------------------------------------------
# coboundary operators on parts


def delta_alg(f: OmegaMultiMap, mu: OmegaMultiMap, l=None, r=None) -> OmegaMultiMap:
    """Hochschild coboundary with values in a bimodule (regular if l, r omitted)."""
    n = f.arity
    if l is None and r is None:
        return gerstenhaber_bracket(mu, f)
    acc = compose_at(l, f, 2).scale(_sgn(n + 1)) + compose_at(r, f, 1)
    for i in range(1, n + 1):
        acc = acc + compose_at(f, mu, i).scale(_sgn(n - i + 1))
    return acc


def delta_alg_display(f: OmegaMultiMap, mu: OmegaMultiMap) -> OmegaMultiMap:
    n = f.arity
    acc = compose_at(mu, f, 1) + compose_at(mu, f, 2).scale(_sgn(n - 1))
    for i in range(1, n + 1):
        acc = acc + compose_at(f, mu, i).scale(_sgn(n - i + 1))
    return acc


def delta_pi(f: MixedMultiMap, assact: AssAct, method: str = "bracket", check: bool = False):
    """[pi, f] for f in L'(n).

    method: 'bracket' (dense bracket on W), 'mixed' (block four-sum) or
    'components' (closed component formulas).  With ``check=True`` the
    'mixed' and 'components' results are compared block by block.
    """
    pi = assact.pi()
    if method == "bracket":
        out = bracket_w(pi, f)
    elif method == "mixed":
        out = mixed_bracket(pi, f)
    elif method == "components":
        out = delta_pi_components(f, assact)
    else:
        raise ValueError(method)
    if check:
        a = mixed_bracket(pi, f) if method != "mixed" else out
        b = delta_pi_components(f, assact) if method != "components" else out
        if a != b:
            n1 = f.arity + 1
            for I in subsets(n1):
                for t in ("A", "V"):
                    if a.block(I, t) != b.block(I, t):
                        raise ComponentFormulaMismatch(
                            f"delta_pi paths disagree on block {I}, target {t}", block=(I, t))
    return out


def delta_pi_components(f: MixedMultiMap, assact: AssAct) -> MixedMultiMap:
    """delta_pi assembled block by block from the closed component formulas.

    Output blocks of arity N = n + 1 are dispatched on |I|: the all-A block,
    the empty block, singletons (n >= 2), the middle range, and the blocks
    missing exactly one slot.
    """
    n = f.arity
    N = n + 1
    mu, l, r, mv = assact.algebra.mu, assact.module.l, assact.module.r, assact.mu_v
    S, da, dv, F = assact.semigroup, assact.dim_a, assact.dim_v, assact.field
    out = MixedMultiMap.zeros(S, da, dv, N, F)
    full_n = tuple(range(1, n + 1))
    full_N = tuple(range(1, N + 1))
    fA = f.block(full_n, "A")

    def fV(I):
        I = tuple(sorted(I))
        if I == full_n:
            return None
        return f.block(I, "V")

    out.set_block(full_N, "A", gerstenhaber_bracket(mu, fA))
    out.set_block((), "V", gerstenhaber_bracket(mv, f.block((), "V")))

    def hat(q, size):
        return tuple(j for j in range(1, size + 1) if j != q)

    for I in subsets(N):
        k = len(I)
        if k == 0 or k == N:
            continue
        terms = []  # (coefficient, OmegaMultiMap)

        def add(c, m):
            if m is not None and c != 0:
                terms.append((c, m))

        def comp(outer, inner, slot):
            if outer is None or inner is None:
                return None
            return compose_at(outer, inner, slot)

        if k == n:  # I = [N] minus {q}
            q = next(j for j in full_N if j not in I)
            f_hq = fV(hat(q, n)) if q <= n else None
            f_hq1 = fV(hat(q - 1, n)) if q >= 2 else None
            for i in range(1, q - 1):
                add(_sgn(n - i + 1), comp(f_hq1, mu, i))
            for i in range(q + 1, n + 1):
                add(_sgn(n - i + 1), comp(f_hq, mu, i))
            if q != 1:
                add(_sgn(n - 1), comp(l, f_hq1, 2))
                add(_sgn(n - (q - 1) + 1), comp(f_hq1, l, q - 1))
            if q != N:
                add(1, comp(r, f_hq, 1))
                add(_sgn(n - q + 1), comp(f_hq, r, q))
            if q == N:
                add(1, compose_at(l, fA, 1))
            if q == 1:
                add(_sgn(n - 1), compose_at(r, fA, 2))
        elif k == 1:  # singleton {q}, n >= 2
            q = I[0]
            f0 = fV(())
            if q == 1:
                add(_sgn(n - 1), comp(l, f0, 2))
            if q <= n:
                add(_sgn(n - q + 1), comp(f0, l, q))
            if q == N:
                add(1, comp(r, f0, 1))
            if q >= 2:
                add(_sgn(n - (q - 1) + 1), comp(f0, r, q - 1))
            if q != N:
                add(1, comp(mv, fV((q,)), 1))
            if q != 1:
                add(_sgn(n - 1), comp(mv, fV((q - 1,)), 2))
                for i in range(1, q - 1):
                    add(_sgn(n - i + 1), comp(fV((q - 1,)), mv, i))
            if q != N:
                for i in range(q + 1, n + 1):
                    add(_sgn(n - i + 1), comp(fV((q,)), mv, i))
        else:  # 2 <= k <= n - 1
            qs = list(I)

            def shifted(keep_upto, drop_from):
                # q_1..q_keep_upto unchanged, q_{drop_from}.. shifted down by one
                return tuple(qs[:keep_upto]) + tuple(x - 1 for x in qs[drop_from:])

            for j in range(1, k):  # adjacent A slots merged by mu
                if qs[j] == qs[j - 1] + 1:
                    qj = qs[j - 1]
                    add(_sgn(n - qj + 1), comp(fV(shifted(j, j + 1)), mu, qj))
            if qs[0] == 1:
                add(_sgn(n - 1), comp(l, fV(tuple(x - 1 for x in qs[1:])), 2))
            for j in range(1, k + 1):  # l on slots (q_j, q_j + 1)
                qj = qs[j - 1]
                nxt = qs[j] if j < k else None
                if qj <= n and nxt != qj + 1:
                    add(_sgn(n - qj + 1), comp(fV(shifted(j - 1, j)), l, qj))
            if qs[-1] == N:
                add(1, comp(r, fV(tuple(qs[:-1])), 1))
            for j in range(1, k + 1):  # r on slots (q_j - 1, q_j)
                qj = qs[j - 1]
                prv = qs[j - 2] if j >= 2 else None
                if qj >= 2 and prv != qj - 1:
                    add(_sgn(n - (qj - 1) + 1), comp(fV(shifted(j - 1, j)), r, qj - 1))
            if qs[-1] != N:
                add(1, comp(mv, fV(tuple(qs)), 1))
            if qs[0] != 1:
                add(_sgn(n - 1), comp(mv, fV(tuple(x - 1 for x in qs)), 2))
            for i in range(1, qs[0] - 1):
                add(_sgn(n - i + 1), comp(fV(tuple(x - 1 for x in qs)), mv, i))
            for j in range(1, k):
                for i in range(qs[j - 1] + 1, qs[j] - 1):
                    add(_sgn(n - i + 1), comp(fV(shifted(j, j)), mv, i))
            for i in range(qs[-1] + 1, n + 1):
                add(_sgn(n - i + 1), comp(fV(tuple(qs)), mv, i))
        if terms:
            acc = None
            for c, m in terms:
                x = m.data * c
                acc = x if acc is None else acc + x
            out.set_block(I, "V", F.normalize(acc))
    return out


def _pi_T(system: RelativeRBSystem) -> MixedMultiMap:
    return bracket_w(system.assact.pi(), system.T_w())


def d_T(theta: OmegaMultiMap, system: RelativeRBSystem, pi_T=None) -> OmegaMultiMap:
    """lambda [mu_V, theta] + [[pi, T], theta], projected to Hom(V^., A)."""
    da, dv = system.dim_a, system.dim_v
    th = embed_a_valued(theta, da, dv)
    if pi_T is None:
        pi_T = _pi_T(system)
    acc = bracket_w(pi_T, th)
    if system.weight != 0:
        acc = acc + bracket_w(system.mu_v_w(), th).scale(system.weight)
    return acc.block((), "A")


def d_T_display(theta: OmegaMultiMap, system: RelativeRBSystem) -> OmegaMultiMap:
    """The closed formula; theta has arity n-1, the result arity n."""
    a = system.assact
    mu, l, r, mv, T, lam = a.algebra.mu, a.module.l, a.module.r, a.mu_v, system.T, system.weight
    n = theta.arity + 1
    acc = (compose_at(compose_at(mu, theta, 2), T, 1)
           - compose_at(T, compose_at(r, theta, 2), 1)).scale(_sgn(n))
    inner = compose_at(l, T, 1) + compose_at(r, T, 2) + mv.scale(lam)
    for i in range(1, n):
        acc = acc + compose_at(theta, inner, i).scale(_sgn(n - i))
    acc = acc + compose_at(compose_at(mu, theta, 1), T, n) - compose_at(T, compose_at(l, theta, 1), 1)
    return acc


def h_T(f: MixedMultiMap, system: RelativeRBSystem) -> OmegaMultiMap:
    """sum_k (1/k!) lambda^{n-k} P[...[f, T]..., T] (k copies of T)."""
    n = f.arity
    F = system.field
    lam = system.weight
    acc = None
    for k in range(1, n + 1):
        w = lam ** (n - k) if n - k else 1
        if w == 0:
            continue
        term = nested_projection(f, [system.T] * k).scale(w * F.inv_factorial(k))
        acc = term if acc is None else acc + term
    if acc is None:
        return OmegaMultiMap.zeros(system.semigroup, system.dim_a, (system.dim_v,) * n, F)
    return acc


def _insert_T(g: OmegaMultiMap, T: OmegaMultiMap, positions) -> OmegaMultiMap:
    for q in sorted(positions, reverse=True):
        g = compose_at(g, T, q)
    return g


def h_T_display(f: MixedMultiMap, system: RelativeRBSystem) -> OmegaMultiMap:
    n = f.arity
    T, lam = system.T, system.weight
    full = tuple(range(1, n + 1))
    acc = _insert_T(f.block(full, "A"), T, full)
    for I in subsets(n):
        if I == full:
            continue
        w = lam ** (n - len(I) - 1) if n - len(I) - 1 else 1
        if w == 0:
            continue
        acc = acc - compose_at(T, _insert_T(f.block(I, "V"), T, I), 1).scale(w)
    return acc


def partial_rbo(theta: OmegaMultiMap, system: AbsoluteRBSystem) -> OmegaMultiMap:
    """rho_2(s^{-1}mu, theta) + rho_3(s^{-1}mu, T, theta); theta of arity n-1."""
    d = system.dim
    S, F = system.semigroup, system.field
    mu_el = AbsoluteElement(S, d, 2, system.algebra.mu, None, F)
    T_el = AbsoluteElement(S, d, 2, None, system.T, F)
    th_el = AbsoluteElement(S, d, theta.arity + 1, None, theta, F)
    x = rho([mu_el, th_el], system.weight) + rho([mu_el, T_el, th_el], system.weight)
    return x.theta


def partial_rbo_display(theta: OmegaMultiMap, system: AbsoluteRBSystem) -> OmegaMultiMap:
    return d_T_display(theta, system.to_relative())


def phi(f: OmegaMultiMap, system: AbsoluteRBSystem) -> OmegaMultiMap:
    """sum_k (1/k!) rho_{k+1}(s^{-1}f, T, ..., T)."""
    d, n = system.dim, f.arity
    S, F = system.semigroup, system.field
    f_el = AbsoluteElement(S, d, n, f, None, F)
    T_el = AbsoluteElement(S, d, 2, None, system.T, F)
    acc = None
    for k in range(1, n + 1):
        x = rho([f_el] + [T_el] * k, system.weight)
        term = x.theta.scale(F.inv_factorial(k))
        acc = term if acc is None else acc + term
    return acc


def phi_display(f: OmegaMultiMap, system: AbsoluteRBSystem) -> OmegaMultiMap:
    """f o (T..T) minus the weighted sum of T o f o (T at some slots)."""
    n = f.arity
    T, lam = system.T, system.weight
    full = tuple(range(1, n + 1))
    acc = _insert_T(f, T, full)
    for k in range(n):
        w = lam ** (n - k - 1) if n - k - 1 else 1
        if w == 0:
            continue
        for pos in itertools.combinations(full, k):
            acc = acc - compose_at(T, _insert_T(f, T, pos), 1).scale(w)
    return acc


# ---------------------------------------------------------------------------
# complexes


def operator_matrix(fn, src: CochainSpace, tgt: CochainSpace) -> SparseMatrix:
    """Matrix of a linear map given on parts: ``fn(f, theta) -> (f', theta')``."""
    F = src.field
    cols = []
    for j in range(src.dim):
        e = np.zeros(src.dim, dtype=object)
        e[j] = 1
        g, t = fn(*src.unpack(e))
        v = tgt.pack(g, t)
        cols.append({int(i): F(v[i]) for i in np.flatnonzero(v != 0)})
    return SparseMatrix(tgt.dim, src.dim, cols)


def h_T_matrix(system: RelativeRBSystem, n: int, display: bool = False) -> SparseMatrix:
    """h_T : C^n_AssAct -> C^n_RelRBO."""
    src = Complex("assact", system).space(n)
    tgt = Complex("relrbo", system).space(n)
    op = h_T_display if display else h_T
    return operator_matrix(lambda f, th: (None, op(f, system)), src, tgt)


def phi_matrix(system: AbsoluteRBSystem, n: int, display: bool = False) -> SparseMatrix:
    """Phi : C^n_Alg -> C^n_RBO."""
    src = Complex("alg", system).space(n)
    tgt = Complex("rbo", system).space(n)
    op = phi_display if display else phi
    return operator_matrix(lambda f, th: (None, op(f, system)), src, tgt)


class Complex:
    """A cochain complex of one of the six kinds attached to a system.

    ``method`` selects how differentials are evaluated: 'bracket' uses the
    bracket / L-infinity definitions, 'display' the closed formulas.
    """

    def __init__(self, kind: str, system, method: str = "bracket", max_dim: int = MAX_DIM):
        if kind not in KINDS:
            raise ValueError(f"unknown complex kind {kind!r}; choose from {KINDS}")
        if kind in RELATIVE_KINDS and isinstance(system, AbsoluteRBSystem):
            system = system.to_relative()
        if kind in ABSOLUTE_KINDS and not isinstance(system, AbsoluteRBSystem):
            raise ShapeError(f"complex {kind!r} needs an absolute system")
        if kind in RELATIVE_KINDS and not isinstance(system, RelativeRBSystem):
            raise ShapeError(f"complex {kind!r} needs a relative system")
        self.kind, self.system, self.method, self.max_dim = kind, system, method, max_dim
        self._mats: dict[int, SparseMatrix] = {}
        self._pi_T = _pi_T(system) if kind in ("relrbo", "relrba") else None

    @property
    def field(self):
        return self.system.field

    def space(self, n: int) -> CochainSpace:
        s = self.system
        if isinstance(s, AbsoluteRBSystem):
            return CochainSpace(self.kind, n, s.semigroup, s.dim, s.dim, s.field)
        return CochainSpace(self.kind, n, s.semigroup, s.dim_a, s.dim_v, s.field)

    # differential on parts ---------------------------------------------
    def apply_parts(self, n: int, f, th):
        s, k, disp = self.system, self.kind, self.method == "display"
        if k == "alg":
            mu = s.algebra.mu
            return (delta_alg_display(f, mu) if disp else delta_alg(f, mu)), None
        if k == "rbo":
            return None, (partial_rbo_display(th, s) if disp else partial_rbo(th, s))
        if k == "rba":
            mu = s.algebra.mu
            df = delta_alg_display(f, mu) if disp else delta_alg(f, mu)
            ph = phi_display(f, s) if disp else phi(f, s)
            out_t = -ph
            if th is not None:
                out_t = out_t - (partial_rbo_display(th, s) if disp else partial_rbo(th, s))
            return df, out_t
        if k == "assact":
            return delta_pi(f, s.assact, "components" if disp else "bracket"), None
        if k == "relrbo":
            return None, (d_T_display(th, s) if disp else d_T(th, s, self._pi_T))
        # relrba
        df = -delta_pi(f, s.assact, "components" if disp else "bracket")
        out_t = h_T_display(f, s) if disp else h_T(f, s)
        if th is not None:
            out_t = out_t + (d_T_display(th, s) if disp else d_T(th, s, self._pi_T))
        return df, out_t

    def apply(self, c: Cochain) -> Cochain:
        n = c.space.n
        f, th = c.parts()
        g, t = self.apply_parts(n, f, th)
        tgt = self.space(n + 1)
        return Cochain(tgt, tgt.pack(g, t))

    def differential(self, n: int) -> SparseMatrix:
        """Matrix of C^n -> C^{n+1}; columns are images of basis cochains."""
        if n in self._mats:
            return self._mats[n]
        src, tgt = self.space(n), self.space(n + 1)
        if max(src.dim, tgt.dim) > self.max_dim:
            raise DegreeCapExceeded(
                f"{self.kind} degree {n}: dims {src.dim} -> {tgt.dim} exceed cap {self.max_dim}")
        M = operator_matrix(lambda f, th: self.apply_parts(n, f, th), src, tgt)
        self._mats[n] = M
        return M

    def check_square_zero(self, n: int):
        """Raise unless d^{n+1} d^n = 0 exactly."""
        prod = self.differential(n + 1).matmul(self.differential(n), self.field)
        if not prod.is_zero():
            raise CoboundaryNotSquareZero(f"{self.kind}: d^{n + 1} d^{n} has {prod.nnz} nonzero entries")
        return True


@dataclass
class CohomologyRow:
    n: int
    dim_c: int
    rank_d: int
    dim_ker: int
    dim_h: int

    def as_dict(self):
        return {"n": self.n, "dim_C": self.dim_c, "rank_d": self.rank_d,
                "dim_ker": self.dim_ker, "dim_H": self.dim_h}


def cohomology_dims(complex_or_system, kind: str | None = None, max_degree: int = 3,
                    check: bool = True, cap: int | None = None) -> list[CohomologyRow]:
    cx = complex_or_system if isinstance(complex_or_system, Complex) else Complex(kind, complex_or_system)
    _check_cap(cx.system, max_degree, cap)
    ranks = {0: 0}
    rows = []
    for n in range(1, max_degree + 1):
        M = cx.differential(n)
        ranks[n] = exactla.rank(M, cx.field)
        if check and n >= 2:
            cx.check_square_zero(n - 1)
        dim_c = cx.space(n).dim
        ker = dim_c - ranks[n]
        rows.append(CohomologyRow(n, dim_c, ranks[n], ker, exactla.quotient_dim(ker, ranks[n - 1])))
    return rows


# ---------------------------------------------------------------------------
# long exact sequence


@dataclass
class LESNode:
    name: str
    degree: int
    dim_h: int
    dim_image_in: int
    dim_kernel_out: int
    contained: bool

    @property
    def exact(self):
        return self.contained and self.dim_image_in == self.dim_kernel_out

    def as_dict(self):
        return {"node": f"H^{self.degree}_{self.name}", "dim_H": self.dim_h,
                "dim_im_in": self.dim_image_in, "dim_ker_out": self.dim_kernel_out,
                "contained": self.contained, "exact": self.exact}


@dataclass
class LESReport:
    relative: bool
    nodes: list = dc_field(default_factory=list)

    @property
    def ok(self):
        return all(n.exact for n in self.nodes)

    def as_dict(self):
        return {"ok": self.ok, "relative": self.relative, "nodes": [n.as_dict() for n in self.nodes]}


class _Node:
    """Cocycles Z and coboundaries B of one cohomology group, as column lists."""

    def __init__(self, cx: Complex, n: int, need_z: bool = True):
        self.cx, self.n = cx, n
        F = cx.field
        self.dim = cx.space(n).dim
        if n >= 2:
            self.B = [c for c in cx.differential(n - 1).cols if c]
        else:
            self.B = []
        self.Z = None
        if need_z:
            ker = exactla.kernel_basis(cx.differential(n), F)
            self.Z = [{int(i): v[i] for i in np.flatnonzero(v != 0)} for v in ker]

    @property
    def dim_h(self):
        F = self.cx.field
        return len(self.Z) - exactla.span_rank(self.B, F)


def _apply_map(fn, vecs):
    return [fn(v) for v in vecs]


def les_check(system, max_degree: int = 3, relative: bool | None = None,
              raise_on_failure: bool = False, cap: int | None = None) -> LESReport:
    """Exactness of ... -> H^n(total) -> H^n(f-part) -> H^n(operator) -> H^{n+1}(total) -> ...

    For an absolute system the sequence is built from C_RBO -> C_RBA -> C_Alg
    with connecting map f -> -Phi(f); for a relative system from
    C_RelRBO -> C_RelRBA -> C_AssAct with connecting map h_T.
    """
    if relative is None:
        relative = isinstance(system, RelativeRBSystem)
    if relative and isinstance(system, AbsoluteRBSystem):
        system = system.to_relative()
    _check_cap(system, max_degree, cap)
    if relative:
        names = ("RelRBA", "AssAct", "RelRBO")
        tot, fpart, op = (Complex(k, system) for k in ("relrba", "assact", "relrbo"))
    else:
        names = ("RBA", "Alg", "RBO")
        tot, fpart, op = (Complex(k, system) for k in ("rba", "alg", "rbo"))
    F = tot.field
    N = max_degree

    nodes = {}
    for n in range(1, N + 1):
        nodes[("T", n)] = _Node(tot, n)
        nodes[("F", n)] = _Node(fpart, n)
        nodes[("O", n)] = _Node(op, n)
    nodes[("T", N + 1)] = _Node(tot, N + 1, need_z=False)

    def inc(n):  # C^n_op -> C^{n+1}_tot, theta -> (0, theta)
        off = tot.space(n + 1).f_dim
        return lambda v: {i + off: x for i, x in v.items()}

    def proj(n):  # C^n_tot -> C^n_f
        fd = tot.space(n).f_dim
        return lambda v: {i: x for i, x in v.items() if i < fd}

    def conn(n):  # C^n_f -> C^n_op: theta-part of d(f, 0)
        sp_f, sp_t1 = fpart.space(n), tot.space(n + 1)
        M = tot.differential(n)
        fd1 = sp_t1.f_dim

        def fn(v):
            acc: dict = {}
            for j, x in v.items():
                for i, a in M.cols[j].items():
                    if i >= fd1:
                        acc[i - fd1] = acc.get(i - fd1, 0) + a * x
            return {i: F(x) for i, x in acc.items() if x != 0}
        del sp_f
        return fn

    # sequence: (node key, incoming map from previous node, outgoing map to next)
    seq = []
    for n in range(1, N + 1):
        seq.append((("T", n), names[0]))
        seq.append((("F", n), names[1]))
        seq.append((("O", n), names[2]))
    maps_out = {}
    for n in range(1, N + 1):
        maps_out[("T", n)] = (proj(n), ("F", n))
        maps_out[("F", n)] = (conn(n), ("O", n))
        maps_out[("O", n)] = (inc(n), ("T", n + 1))

    report = LESReport(relative)
    prev = None
    for key, name in seq:
        node = nodes[key]
        rB = exactla.span_rank(node.B, F)
        # image of incoming
        if prev is None:
            im = 0
            contained = True
        else:
            fn_in, _ = maps_out[prev]
            img = _apply_map(fn_in, nodes[prev].Z)
            im = exactla.span_rank(img + node.B, F) - rB
            fn_out, nxt = maps_out[key]
            comp = _apply_map(fn_out, img)
            rBn = exactla.span_rank(nodes[nxt].B, F)
            contained = exactla.span_rank(comp + nodes[nxt].B, F) == rBn
        fn_out, nxt = maps_out[key]
        outs = _apply_map(fn_out, node.Z)
        rBn = exactla.span_rank(nodes[nxt].B, F)
        rank_mod = exactla.span_rank(outs + nodes[nxt].B, F) - rBn
        pre = len(node.Z) - rank_mod
        ker = pre - rB
        nd = LESNode(name, key[1], len(node.Z) - rB, im, ker, contained)
        report.nodes.append(nd)
        if raise_on_failure and not nd.exact:
            raise ExactnessFailure(f"sequence not exact at H^{key[1]}_{name}: image {im}, kernel {ker}")
        prev = key
    return report


# ---------------------------------------------------------------------------
# conversions used by deformation and tests


def to_relative_element(space: CochainSpace, f, th) -> RelativeElement:
    ctx = WContext(space.semigroup, space.dim_a, space.dim_v, space.field)
    if f is None:
        f = MixedMultiMap.zeros(space.semigroup, space.dim_a, space.dim_v, space.n, space.field)
    return RelativeElement(ctx, space.n, f, th)


def iota_matrix(system: AbsoluteRBSystem, n: int) -> SparseMatrix:
    """Matrix of (f, theta) -> (iota f, theta) from C^n_RBA to C^n_RelRBA."""
    src = Complex("rba", system).space(n)
    rel = system.to_relative()
    tgt = Complex("relrba", rel).space(n)
    cols = []
    for j in range(src.dim):
        e = np.zeros(src.dim, dtype=object)
        e[j] = 1
        f, th = src.unpack(e)
        v = tgt.pack(embed_map(f), th)
        cols.append({int(i): v[i] for i in np.flatnonzero(v != 0)})
    return SparseMatrix(tgt.dim, src.dim, cols)


__all__ = [
    "CochainSpace", "Cochain", "Complex", "DEGREE_CAPS", "cost_estimate", "degree_cap", "CohomologyRow", "LESReport",
    "delta_alg", "delta_alg_display", "delta_pi", "delta_pi_components",
    "d_T", "d_T_display", "h_T", "h_T_display", "partial_rbo", "partial_rbo_display",
    "phi", "phi_display", "cohomology_dims", "operator_matrix", "h_T_matrix", "phi_matrix", "les_check", "iota_matrix", "to_relative_element",
    "absolute_mc_element", "relative_mc_element",
]
