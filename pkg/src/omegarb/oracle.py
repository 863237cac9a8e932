"""Independent brute-force checks and seeded instance generators.

Nothing in the checking half of this module calls ``compose_at``,
``gerstenhaber_bracket`` or the elimination kernels: identities are
evaluated with explicit loops over semigroup tuples and basis indices, and
ranks use a separate Fraction Gaussian elimination.  Agreement between these
paths and the main engine is what the test-suite checks.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .exactla import QQ
from .omega_maps import FiniteSemigroup, OmegaMultiMap
from .structures import (
    AbsoluteRBSystem,
    AssAct,
    OmegaAlgebra,
    OmegaBimodule,
    RelativeRBSystem,
)


# ---------------------------------------------------------------------------
# literal evaluation helpers


def _prod(S: FiniteSemigroup, alphas):
    t = S.table
    acc = alphas[0]
    for b in alphas[1:]:
        acc = int(t[acc][b])
    return acc


def _apply(f: OmegaMultiMap, alphas, vectors, field=QQ):
    """Evaluate f_{alphas}(v_1, ..., v_n) on explicit coordinate vectors."""
    comp = f.data[tuple(alphas)]
    out = [0] * f.target_dim
    dims = f.source_dims
    nz = [[(i, x) for i, x in enumerate(v) if x != 0] for v in vectors]
    for combo in itertools.product(*nz):
        idx = tuple(i for i, _ in combo)
        c = 1
        for _, x in combo:
            c = c * x
        for t in range(f.target_dim):
            e = comp[(t,) + idx]
            if e != 0:
                out[t] = out[t] + e * c
    del dims
    return [field(x) for x in out]


def _unit(dim, i):
    v = [0] * dim
    v[i] = 1
    return v


def _sub(u, v):
    return [a - b for a, b in zip(u, v)]


def _add(*vs):
    return [sum(xs) for xs in zip(*vs)]


def _scal(c, v):
    return [c * x for x in v]


def _nonzero(v):
    return any(x != 0 for x in v)


# ---------------------------------------------------------------------------
# axiom checks


def _identity_loop(name, S, arity, dims, evaluate, out):
    for alphas in itertools.product(range(S.size), repeat=arity):
        for basis in itertools.product(*[range(d) for d in dims]):
            r = evaluate(alphas, basis)
            if _nonzero(r):
                out.append((name, alphas, basis, tuple(r)))


def brute_axiom_check(system) -> list:
    """All failing (identity, omegas, basis, residual) tuples, in canonical order."""
    out: list = []
    if isinstance(system, AbsoluteRBSystem):
        _brute_algebra(system.algebra, out)
        _brute_abs_rb(system, out)
    elif isinstance(system, RelativeRBSystem):
        _brute_assact(system.assact, out)
        _brute_rel_rb(system, out)
    elif isinstance(system, AssAct):
        _brute_assact(system, out)
    elif isinstance(system, OmegaBimodule):
        _brute_algebra(system.algebra, out)
        _brute_bimodule(system, out)
    elif isinstance(system, OmegaAlgebra):
        _brute_algebra(system, out)
    else:
        raise TypeError(f"cannot check {type(system).__name__}")
    return out


def _brute_algebra(alg: OmegaAlgebra, out):
    S, mu, d = alg.semigroup, alg.mu, alg.dim
    P = lambda *a: _prod(S, a)  # noqa: E731

    def assoc(al, b):
        a1, a2, a3 = al
        x, y, z = (_unit(d, i) for i in b)
        left = _apply(mu, (P(a1, a2), a3), [_apply(mu, (a1, a2), [x, y]), z])
        right = _apply(mu, (a1, P(a2, a3)), [x, _apply(mu, (a2, a3), [y, z])])
        return _sub(left, right)

    _identity_loop("associativity", S, 3, (d, d, d), assoc, out)


def _brute_bimodule(bm: OmegaBimodule, out):
    S = bm.algebra.semigroup
    mu, l, r = bm.algebra.mu, bm.l, bm.r
    d, m = bm.algebra.dim, bm.dim
    P = lambda *a: _prod(S, a)  # noqa: E731

    def left(al, b):
        a1, a2, a3 = al
        x, y, v = _unit(d, b[0]), _unit(d, b[1]), _unit(m, b[2])
        lhs = _apply(l, (a1, P(a2, a3)), [x, _apply(l, (a2, a3), [y, v])])
        rhs = _apply(l, (P(a1, a2), a3), [_apply(mu, (a1, a2), [x, y]), v])
        return _sub(lhs, rhs)

    def right(al, b):
        a1, a2, a3 = al
        v, x, y = _unit(m, b[0]), _unit(d, b[1]), _unit(d, b[2])
        lhs = _apply(r, (P(a1, a2), a3), [_apply(r, (a1, a2), [v, x]), y])
        rhs = _apply(r, (a1, P(a2, a3)), [v, _apply(mu, (a2, a3), [x, y])])
        return _sub(lhs, rhs)

    def two(al, b):
        a1, a2, a3 = al
        x, v, y = _unit(d, b[0]), _unit(m, b[1]), _unit(d, b[2])
        lhs = _apply(r, (P(a1, a2), a3), [_apply(l, (a1, a2), [x, v]), y])
        rhs = _apply(l, (a1, P(a2, a3)), [x, _apply(r, (a2, a3), [v, y])])
        return _sub(lhs, rhs)

    _identity_loop("left action", S, 3, (d, d, m), left, out)
    _identity_loop("right action", S, 3, (m, d, d), right, out)
    _identity_loop("two-sided", S, 3, (d, m, d), two, out)


def _brute_assact(aa: AssAct, out):
    _brute_algebra(aa.algebra, out)
    _brute_bimodule(aa.module, out)
    S = aa.semigroup
    l, r, mv = aa.module.l, aa.module.r, aa.mu_v
    d, m = aa.dim_a, aa.dim_v
    P = lambda *a: _prod(S, a)  # noqa: E731

    def vassoc(al, b):
        a1, a2, a3 = al
        u, v, w = (_unit(m, i) for i in b)
        lhs = _apply(mv, (P(a1, a2), a3), [_apply(mv, (a1, a2), [u, v]), w])
        rhs = _apply(mv, (a1, P(a2, a3)), [u, _apply(mv, (a2, a3), [v, w])])
        return _sub(lhs, rhs)

    def c1(al, b):  # (a.u)v - a.(uv)
        a1, a2, a3 = al
        x, u, v = _unit(d, b[0]), _unit(m, b[1]), _unit(m, b[2])
        lhs = _apply(mv, (P(a1, a2), a3), [_apply(l, (a1, a2), [x, u]), v])
        rhs = _apply(l, (a1, P(a2, a3)), [x, _apply(mv, (a2, a3), [u, v])])
        return _sub(lhs, rhs)

    def c2(al, b):  # (u.a)v - u(a.v)
        a1, a2, a3 = al
        u, x, v = _unit(m, b[0]), _unit(d, b[1]), _unit(m, b[2])
        lhs = _apply(mv, (P(a1, a2), a3), [_apply(r, (a1, a2), [u, x]), v])
        rhs = _apply(mv, (a1, P(a2, a3)), [u, _apply(l, (a2, a3), [x, v])])
        return _sub(lhs, rhs)

    def c3(al, b):  # (uv).a - u(v.a)
        a1, a2, a3 = al
        u, v, x = _unit(m, b[0]), _unit(m, b[1]), _unit(d, b[2])
        lhs = _apply(r, (P(a1, a2), a3), [_apply(mv, (a1, a2), [u, v]), x])
        rhs = _apply(mv, (a1, P(a2, a3)), [u, _apply(r, (a2, a3), [v, x])])
        return _sub(lhs, rhs)

    _identity_loop("V associativity", S, 3, (m, m, m), vassoc, out)
    _identity_loop("(a.u)v = a.(uv)", S, 3, (d, m, m), c1, out)
    _identity_loop("(u.a)v = u(a.v)", S, 3, (m, d, m), c2, out)
    _identity_loop("(uv).a = u(v.a)", S, 3, (m, m, d), c3, out)


def _brute_abs_rb(sys_: AbsoluteRBSystem, out):
    S, mu, T, lam, d = sys_.semigroup, sys_.algebra.mu, sys_.T, sys_.weight, sys_.dim

    def rb(al, b):
        a1, a2 = al
        x, y = _unit(d, b[0]), _unit(d, b[1])
        Tx, Ty = _apply(T, (a1,), [x]), _apply(T, (a2,), [y])
        lhs = _apply(mu, (a1, a2), [Tx, Ty])
        inner = _add(_apply(mu, (a1, a2), [Tx, y]), _apply(mu, (a1, a2), [x, Ty]),
                     _scal(lam, _apply(mu, (a1, a2), [x, y])))
        return _sub(lhs, _apply(T, (_prod(S, (a1, a2)),), [inner]))

    _identity_loop("Rota-Baxter", S, 2, (d, d), rb, out)


def _brute_rel_rb(sys_: RelativeRBSystem, out):
    a = sys_.assact
    S, mu, l, r, mv, T, lam = a.semigroup, a.algebra.mu, a.module.l, a.module.r, a.mu_v, sys_.T, sys_.weight
    m = a.dim_v

    def rb(al, b):
        a1, a2 = al
        u, v = _unit(m, b[0]), _unit(m, b[1])
        Tu, Tv = _apply(T, (a1,), [u]), _apply(T, (a2,), [v])
        lhs = _apply(mu, (a1, a2), [Tu, Tv])
        inner = _add(_apply(l, (a1, a2), [Tu, v]), _apply(r, (a1, a2), [u, Tv]),
                     _scal(lam, _apply(mv, (a1, a2), [u, v])))
        return _sub(lhs, _apply(T, (_prod(S, (a1, a2)),), [inner]))

    _identity_loop("relative Rota-Baxter", S, 2, (m, m), rb, out)


# ---------------------------------------------------------------------------
# bracket by literal loops


def _brute_compose(f: OmegaMultiMap, g: OmegaMultiMap, i: int, alphas, basis):
    """(f o_i g)_{alphas}(e_basis) as a coordinate vector (1-based i)."""
    S = f.semigroup
    n, m = f.arity, g.arity
    inner_al = alphas[i - 1:i - 1 + m]
    outer_al = alphas[:i - 1] + (_prod(S, inner_al),) + alphas[i - 1 + m:]
    dims_g = g.source_dims
    dims_f = f.source_dims
    gv = _apply(g, inner_al, [_unit(dims_g[j], basis[i - 1 + j]) for j in range(m)])
    args = []
    for s in range(n):
        if s < i - 1:
            args.append(_unit(dims_f[s], basis[s]))
        elif s == i - 1:
            args.append(gv)
        else:
            args.append(_unit(dims_f[s], basis[s + m - 1]))
    return _apply(f, outer_al, args)


def brute_bracket(f: OmegaMultiMap, g: OmegaMultiMap) -> OmegaMultiMap:
    m, n = f.arity, g.arity
    d = f.target_dim
    S = f.semigroup
    N = m + n - 1
    data = np.zeros((S.size,) * N + (d,) * (N + 1), dtype=object)
    for alphas in itertools.product(range(S.size), repeat=N):
        for basis in itertools.product(range(d), repeat=N):
            acc = [0] * d
            for i in range(1, m + 1):
                s = -1 if ((i - 1) * (n - 1)) % 2 else 1
                acc = _add(acc, _scal(s, _brute_compose(f, g, i, alphas, basis)))
            s0 = -1 if ((m - 1) * (n - 1)) % 2 else 1
            for i in range(1, n + 1):
                s = -s0 * (-1 if ((i - 1) * (m - 1)) % 2 else 1)
                acc = _add(acc, _scal(s, _brute_compose(g, f, i, alphas, basis)))
            for t in range(d):
                data[alphas + (t,) + basis] = acc[t]
    return OmegaMultiMap(S, data, f.field)


# ---------------------------------------------------------------------------
# hand-assembled absolute complex


def fraction_rank(rows) -> int:
    """Rank by textbook Gaussian elimination over Fractions."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank][c]
        for r in range(len(m)):
            if r != rank and m[r][c] != 0:
                q = m[r][c] / p
                m[r] = [a - q * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


class _Cochain:
    """Plain nested-dict view of an A^n -> A cochain: {(alphas, basis): vector}."""

    def __init__(self, S, d, n, coords):
        self.S, self.d, self.n = S, d, n
        self.table = {}
        it = iter(coords)
        for al in itertools.product(range(S.size), repeat=n):
            comp = {}
            vals = [[0] * (d ** n) for _ in range(d)]
            for t in range(d):
                for j in range(d ** n):
                    vals[t][j] = next(it)
            for j, basis in enumerate(itertools.product(range(d), repeat=n)):
                comp[basis] = [vals[t][j] for t in range(d)]
            self.table[al] = comp

    def __call__(self, alphas, vectors):
        out = [0] * self.d
        comp = self.table[tuple(alphas)]
        nz = [[(i, x) for i, x in enumerate(v) if x != 0] for v in vectors]
        for combo in itertools.product(*nz):
            c = 1
            for _, x in combo:
                c *= x
            col = comp[tuple(i for i, _ in combo)]
            for t in range(self.d):
                out[t] += col[t] * c
        return out


def _flatten(S, d, n, fn):
    """Coordinates of the cochain (alphas, basis) -> vector in canonical order."""
    coords = []
    for al in itertools.product(range(S.size), repeat=n):
        vals = {basis: fn(al, [_unit(d, i) for i in basis])
                for basis in itertools.product(range(d), repeat=n)}
        for t in range(d):
            for basis in itertools.product(range(d), repeat=n):
                coords.append(vals[basis][t])
    return coords


def _brute_delta_alg(sys_, f: _Cochain):
    S, d, n = sys_.semigroup, sys_.dim, f.n
    mu = sys_.algebra.mu

    def ev(al, xs):
        acc = _scal(1, _apply(mu, (_prod(S, al[:n]), al[n]), [f(al[:n], xs[:n]), xs[n]]))
        s = -1 if (n - 1) % 2 else 1
        acc = _add(acc, _scal(s, _apply(mu, (al[0], _prod(S, al[1:])), [xs[0], f(al[1:], xs[1:])])))
        for i in range(1, n + 1):
            s = -1 if (n - i + 1) % 2 else 1
            merged = _apply(mu, (al[i - 1], al[i]), [xs[i - 1], xs[i]])
            al2 = al[:i - 1] + (_prod(S, al[i - 1:i + 1]),) + al[i + 1:]
            acc = _add(acc, _scal(s, f(al2, xs[:i - 1] + [merged] + xs[i + 1:])))
        return acc

    return _flatten(S, d, n + 1, ev)


def _brute_partial_rbo(sys_, th: _Cochain):
    """Displayed coboundary of the operator complex; theta has arity n-1."""
    S, d = sys_.semigroup, sys_.dim
    mu, T, lam = sys_.algebra.mu, sys_.T, sys_.weight
    n = th.n + 1
    P = lambda al: _prod(S, al)  # noqa: E731

    def Tm(al, x):
        return _apply(T, (al,), [x])

    def X(a1, a2, x, y):
        return _add(_apply(mu, (a1, a2), [Tm(a1, x), y]), _apply(mu, (a1, a2), [x, Tm(a2, y)]),
                    _scal(lam, _apply(mu, (a1, a2), [x, y])))

    def ev(al, xs):
        sgn = -1 if n % 2 else 1
        t1 = _apply(mu, (al[0], P(al[1:])), [Tm(al[0], xs[0]), th(al[1:], xs[1:])])
        t2 = Tm(P(al), _apply(mu, (al[0], P(al[1:])), [xs[0], th(al[1:], xs[1:])]))
        acc = _scal(sgn, _sub(t1, t2))
        for i in range(1, n):
            s = -1 if (n - i) % 2 else 1
            merged = X(al[i - 1], al[i], xs[i - 1], xs[i])
            al2 = al[:i - 1] + (P(al[i - 1:i + 1]),) + al[i + 1:]
            acc = _add(acc, _scal(s, th(al2, xs[:i - 1] + [merged] + xs[i + 1:])))
        t3 = _apply(mu, (P(al[:n - 1]), al[n - 1]), [th(al[:n - 1], xs[:n - 1]), Tm(al[n - 1], xs[n - 1])])
        t4 = Tm(P(al), _apply(mu, (P(al[:n - 1]), al[n - 1]), [th(al[:n - 1], xs[:n - 1]), xs[n - 1]]))
        return _add(acc, _sub(t3, t4))

    return _flatten(S, d, n, ev)


def _brute_phi(sys_, f: _Cochain):
    """f o (T..T) minus the weighted outer-T insertion sum."""
    S, d, n = sys_.semigroup, sys_.dim, f.n
    T, lam = sys_.T, sys_.weight

    def ev(al, xs):
        acc = f(al, [_apply(T, (al[j],), [xs[j]]) for j in range(n)])
        top = _prod(S, al)
        for k in range(n):
            w = lam ** (n - k - 1)
            if w == 0:
                continue
            for pos in itertools.combinations(range(n), k):
                ys = [_apply(T, (al[j],), [xs[j]]) if j in pos else xs[j] for j in range(n)]
                acc = _sub(acc, _scal(w, _apply(T, (top,), [f(al, ys)])))
        return acc

    return _flatten(S, d, n, ev)


def brute_rba_matrix(sys_: AbsoluteRBSystem, n: int):
    """Rows of the matrix of the degree-n coboundary C^n -> C^{n+1} (columns =
    basis cochains), assembled from the displayed formulas by literal loops."""
    S, d = sys_.semigroup, sys_.dim
    k = S.size
    dim_f = k ** n * d ** (n + 1)
    dim_t = k ** (n - 1) * d ** n if n >= 2 else 0
    cols = []
    for j in range(dim_f + dim_t):
        e = [0] * (dim_f + dim_t)
        e[j] = 1
        f = _Cochain(S, d, n, e[:dim_f])
        out_f = _brute_delta_alg(sys_, f)
        out_t = [-x for x in _brute_phi(sys_, f)]
        if n >= 2:
            th = _Cochain(S, d, n - 1, e[dim_f:])
            out_t = _sub(out_t, _brute_partial_rbo(sys_, th))
        cols.append(out_f + out_t)
    return [list(r) for r in zip(*cols)] if cols else []


def brute_rba_dims(sys_: AbsoluteRBSystem, max_degree: int = 3) -> list[int]:
    """dim H^n for n = 1..max_degree from hand-assembled matrices."""
    S, d = sys_.semigroup, sys_.dim
    k = S.size
    ranks = {0: 0}
    dims = {}
    for n in range(1, max_degree + 1):
        dims[n] = k ** n * d ** (n + 1) + (k ** (n - 1) * d ** n if n >= 2 else 0)
        ranks[n] = fraction_rank(brute_rba_matrix(sys_, n))
    return [dims[n] - ranks[n] - ranks[n - 1] for n in range(1, max_degree + 1)]


# ---------------------------------------------------------------------------
# fixtures and generators


def _cocycle_ok(S, c):
    t = S.table
    for a, b, g in itertools.product(range(S.size), repeat=3):
        if c[a][b] * c[int(t[a][b])][g] != c[b][g] * c[a][int(t[b][g])]:
            return False
    return True


@lru_cache(maxsize=None)
def scalar_cocycles(table: tuple, values=(-1, 0, 1, 2)) -> tuple:
    """All c: S x S -> values with c(a,b)c(ab,g) = c(b,g)c(a,bg)."""
    S = FiniteSemigroup(np.array(table))
    k = S.size
    out = []
    for flat in itertools.product(values, repeat=k * k):
        c = [list(flat[i * k:(i + 1) * k]) for i in range(k)]
        if _cocycle_ok(S, c):
            out.append(tuple(map(tuple, c)))
    return tuple(out)


BASE_ALGEBRAS = {
    # name: (dim, {(i, j): {t: coeff}})
    "k": (1, {(0, 0): {0: 1}}),
    "zero1": (1, {}),
    "kxk": (2, {(0, 0): {0: 1}, (1, 1): {1: 1}}),
    "dual": (2, {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}}),
    "nil2": (2, {(0, 0): {1: 1}}),
    "zero2": (2, {}),
}


def base_tensor(name):
    d, table = BASE_ALGEBRAS[name]
    t = np.zeros((d, d, d), dtype=object)
    for (i, j), vec in table.items():
        for k, c in vec.items():
            t[k, i, j] = c
    return t


def twisted_map(S, tensor, c, field=QQ):
    """Family f_{a,b} = c(a,b) * tensor."""
    tensor = np.asarray(tensor, dtype=object)
    data = np.zeros((S.size, S.size) + tensor.shape, dtype=object)
    for a, b in itertools.product(range(S.size), repeat=2):
        data[a, b] = tensor * c[a][b]
    return OmegaMultiMap(S, field.normalize(data), field)


def algebra(S, name="k", c=None, field=QQ) -> OmegaAlgebra:
    if c is None:
        c = [[1] * S.size for _ in range(S.size)]
    return OmegaAlgebra(twisted_map(S, base_tensor(name), c, field))


def k_example() -> AbsoluteRBSystem:
    """Trivial index set, A = k, multiplication, T = 0, weight 0."""
    S = FiniteSemigroup.trivial()
    return AbsoluteRBSystem(algebra(S, "k"), 0, OmegaMultiMap.zeros(S, 1, (1,)))


def zero_system() -> AbsoluteRBSystem:
    S = FiniteSemigroup.trivial()
    return AbsoluteRBSystem(algebra(S, "zero1"), 0, OmegaMultiMap.zeros(S, 1, (1,)))


def z2_family_example(variant: int = 0) -> AbsoluteRBSystem:
    """Index set Z/2 acting on A = k.

    variant 0: componentwise multiplication, T = 0, weight 0.
    variant 1: same algebra, T_w = -1 for all w, weight 1.
    variant 2: products twisted by the coboundary c(a,b) = phi(a)phi(b)/phi(ab)
               with phi = (1, 2), T_w = -phi(w), weight 1 (T of weight -1 conjugated).
    """
    S = FiniteSemigroup.cyclic(2)
    if variant == 0:
        return AbsoluteRBSystem(algebra(S, "k"), 0, OmegaMultiMap.zeros(S, 1, (1,)))
    if variant == 1:
        T = OmegaMultiMap(S, np.array([[[-1]], [[-1]]], dtype=object))
        return AbsoluteRBSystem(algebra(S, "k"), 1, T)
    if variant == 2:
        phi = [1, 2]
        c = [[Fraction(phi[a] * phi[b], phi[(a + b) % 2]) for b in range(2)] for a in range(2)]
        T = OmegaMultiMap(S, np.array([[[-1]], [[-1]]], dtype=object))
        return AbsoluteRBSystem(algebra(S, "k", c), 1, T)
    raise ValueError("variant must be 0, 1 or 2")


def _rb_candidates_ok(mu, Tc, lam, S):
    """Vectorised RB check for a stack of candidate operator families.

    mu: (k, k, d, d, d) int array; Tc: (C, k, d, d).  Plain numpy, no engine code.
    """
    k = S.size
    t = S.table
    ok = np.ones(Tc.shape[0], dtype=bool)
    for a in range(k):
        for b in range(k):
            M = mu[a, b]
            Ta, Tb, Tab = Tc[:, a], Tc[:, b], Tc[:, t[a, b]]
            lhs = np.einsum("tij,cix,cjy->ctxy", M, Ta, Tb)
            inner = (np.einsum("tij,cix->ctxj", M, Ta) + np.einsum("tij,cjy->ctiy", M, Tb)
                     + lam * M[None])
            rhs = np.einsum("cst,ctxy->csxy", Tab, inner)
            ok &= np.all((lhs - rhs).reshape(len(Tc), -1) == 0, axis=1)
    return ok


def search_rb_operators(alg: OmegaAlgebra, weight, values=(-1, 0, 1), cap: int = 200_000,
                        modulus: int | None = None) -> list:
    """Exhaustive search for operator families T with entries in ``values``.

    With ``modulus=p`` the identity is checked modulo p and values default to
    range(p).  Returns AbsoluteRBSystem objects (over QQ for integer search).
    """
    S, d = alg.semigroup, alg.dim
    if modulus is not None:
        values = tuple(range(modulus))
    nvar = S.size * d * d
    total = len(values) ** nvar
    if total > cap:
        raise ValueError(f"{total} candidates exceed the cap {cap}")
    mu = np.array(alg.mu.data.tolist(), dtype=object)
    if any(isinstance(x, Fraction) for x in mu.ravel()):
        mu_int = None
    else:
        mu_int = mu.astype(np.int64)
    lam = alg.field(weight)
    found = []
    vals = np.array(values, dtype=np.int64)
    grid = np.array(list(itertools.product(range(len(values)), repeat=nvar)), dtype=np.int64)
    batch = 4096
    for start in range(0, len(grid), batch):
        cand = vals[grid[start:start + batch]].reshape(-1, S.size, d, d)
        if mu_int is not None and not isinstance(lam, Fraction):
            if modulus is None:
                ok = _rb_candidates_ok(mu_int, cand, int(lam), S)
            else:
                ok = _rb_mod_ok(mu_int, cand, int(lam), S, modulus)
        else:
            ok = _rb_candidates_ok(mu, cand.astype(object), lam, S)
        for c in cand[ok]:
            T = OmegaMultiMap(S, np.array(c.tolist(), dtype=object), alg.field)
            found.append(AbsoluteRBSystem(alg, weight, T))
    return found


def _rb_mod_ok(mu, Tc, lam, S, p):
    k = S.size
    t = S.table
    ok = np.ones(Tc.shape[0], dtype=bool)
    for a in range(k):
        for b in range(k):
            M = mu[a, b]
            Ta, Tb, Tab = Tc[:, a], Tc[:, b], Tc[:, t[a, b]]
            lhs = np.einsum("tij,cix,cjy->ctxy", M, Ta, Tb)
            inner = (np.einsum("tij,cix->ctxj", M, Ta) + np.einsum("tij,cjy->ctiy", M, Tb)
                     + lam * M[None])
            rhs = np.einsum("cst,ctxy->csxy", Tab, inner)
            ok &= np.all(((lhs - rhs) % p).reshape(len(Tc), -1) == 0, axis=1)
    return ok


def search_relative_operators(aa: AssAct, weight, values=(-1, 0, 1), cap: int = 100_000,
                              modulus: int | None = None) -> list:
    """Exhaustive search for relative operators V -> A (plain numpy check).

    With ``modulus=p`` values default to range(p) and the identity is checked mod p.
    """
    S, d, m = aa.semigroup, aa.dim_a, aa.dim_v
    if modulus is not None:
        values = tuple(range(modulus))
    nvar = S.size * d * m
    total = len(values) ** nvar
    if total > cap:
        raise ValueError(f"{total} candidates exceed the cap {cap}")
    mu = np.array(aa.algebra.mu.data.tolist(), dtype=object)
    l = np.array(aa.module.l.data.tolist(), dtype=object)
    r = np.array(aa.module.r.data.tolist(), dtype=object)
    mv = np.array(aa.mu_v.data.tolist(), dtype=object)
    lam = aa.field(weight)
    vals = np.array(values, dtype=object)
    t = S.table
    found = []
    for flat in itertools.product(range(len(values)), repeat=nvar):
        c = vals[list(flat)].reshape(S.size, d, m)
        good = True
        for a in range(S.size):
            for b in range(S.size):
                lhs = np.einsum("tij,ix,jy->txy", mu[a, b], c[a], c[b])
                inner = (np.einsum("tij,ix->txj", l[a, b], c[a]) + np.einsum("tij,jy->tiy", r[a, b], c[b])
                         + lam * mv[a, b])
                rhs = np.einsum("st,txy->sxy", c[t[a, b]], inner)
                diff = lhs - rhs if modulus is None else (lhs - rhs) % modulus
                if np.any(diff != 0):
                    good = False
                    break
            if not good:
                break
        if good:
            found.append(RelativeRBSystem(aa, weight, OmegaMultiMap(S, c.copy(), aa.field)))
    return found


def twisted_assact(S, a_name, v_name, c, action="scalar", field=QQ) -> AssAct:
    """AssAct with every structure map multiplied by the cocycle c.

    action='scalar': A = k acting on the algebra V by scalars.
    action='regular': V = A with l = r = mu_V = mu (a_name must equal v_name).
    action='zero': l = r = 0.
    """
    A = base_tensor(a_name)
    V = base_tensor(v_name)
    d, m = A.shape[0], V.shape[0]
    if action == "scalar":
        if d != 1:
            raise ValueError("scalar action needs a one-dimensional A")
        l = np.zeros((m, 1, m), dtype=object)
        r = np.zeros((m, m, 1), dtype=object)
        for i in range(m):
            l[i, 0, i] = A[0, 0, 0]
            r[i, i, 0] = A[0, 0, 0]
    elif action == "regular":
        if a_name != v_name:
            raise ValueError("regular action needs V = A")
        l, r = A, A
    elif action == "zero":
        l = np.zeros((m, d, m), dtype=object)
        r = np.zeros((m, m, d), dtype=object)
    else:
        raise ValueError(action)
    alg = OmegaAlgebra(twisted_map(S, A, c, field))
    bm = OmegaBimodule(alg, twisted_map(S, l, c, field), twisted_map(S, r, c, field))
    return AssAct(bm, twisted_map(S, V, c, field))


SEMIGROUPS = {
    "trivial": [[0]],
    "Z2": [[0, 1], [1, 0]],
    "left-zero2": [[0, 0], [1, 1]],
    "semilattice2": [[0, 0], [0, 1]],
}


def semigroup(name) -> FiniteSemigroup:
    return FiniteSemigroup(SEMIGROUPS[name])


@lru_cache(maxsize=None)
def _abs_pool(sname, aname, weight, ci):
    S = semigroup(sname)
    cs = scalar_cocycles(tuple(map(tuple, S.table.tolist())))
    c = cs[ci]
    alg = algebra(S, aname, c)
    if alg.validate().ok is False:
        return ()
    vals = (-1, 0, 1) if alg.dim * alg.dim * S.size <= 8 else (0, 1)
    return tuple(search_rb_operators(alg, weight, values=vals))


def random_absolute_system(rng, valid: bool = True, max_dim: int = 2, weights=(0, 1, -1, 2)):
    """A seeded random absolute system from the fixture catalog.

    Valid systems come from exhaustive operator search on cocycle-twisted
    base algebras; invalid ones perturb a single entry of mu or T.
    """
    sname = rng.choice(["trivial", "Z2", "left-zero2", "semilattice2"])
    names = [n for n, (d, _) in BASE_ALGEBRAS.items() if d <= max_dim]
    aname = str(rng.choice(names))
    weight = int(rng.choice(weights))
    S = semigroup(sname)
    cs = scalar_cocycles(tuple(map(tuple, S.table.tolist())))
    nonzero = [i for i, c in enumerate(cs) if all(x != 0 for row in c for x in row)]
    ci = int(rng.choice(nonzero if nonzero and rng.random() < 0.8 else range(len(cs))))
    pool = _abs_pool(sname, aname, weight, ci)
    if not pool:
        return random_absolute_system(rng, valid, max_dim, weights)
    sys_ = pool[int(rng.integers(len(pool)))]
    if valid:
        return sys_
    return perturb_absolute(sys_, rng)


def perturb_absolute(sys_: AbsoluteRBSystem, rng) -> AbsoluteRBSystem:
    S = sys_.semigroup
    if rng.random() < 0.5:
        data = sys_.T.data.copy()
        idx = tuple(int(rng.integers(s)) for s in data.shape)
        data[idx] = data[idx] + int(rng.choice([-1, 1, 2]))
        return AbsoluteRBSystem(sys_.algebra, sys_.weight, OmegaMultiMap(S, data, sys_.field))
    data = sys_.algebra.mu.data.copy()
    idx = tuple(int(rng.integers(s)) for s in data.shape)
    data[idx] = data[idx] + int(rng.choice([-1, 1]))
    return AbsoluteRBSystem(OmegaAlgebra(OmegaMultiMap(S, data, sys_.field)), sys_.weight, sys_.T)


@lru_cache(maxsize=None)
def _rel_pool(sname, kind, weight, ci):
    S = semigroup(sname)
    cs = scalar_cocycles(tuple(map(tuple, S.table.tolist())))
    c = cs[ci]
    if kind == "scalar-dual":
        aa = twisted_assact(S, "k", "dual", c, "scalar")
    elif kind == "scalar-kxk":
        aa = twisted_assact(S, "k", "kxk", c, "scalar")
    elif kind == "scalar-k":
        aa = twisted_assact(S, "k", "k", c, "scalar")
    elif kind == "zero-action":
        aa = twisted_assact(S, "k", "nil2", c, "zero")
    elif kind == "regular-dual":
        aa = twisted_assact(S, "dual", "dual", c, "regular")
    else:
        raise ValueError(kind)
    if not aa.validate().ok:
        return ()
    nvar = S.size * aa.dim_a * aa.dim_v
    vals = (-1, 0, 1) if 3 ** nvar <= 6561 else (0, 1)
    return tuple(search_relative_operators(aa, weight, values=vals))


REL_KINDS = ("scalar-dual", "scalar-kxk", "scalar-k", "zero-action", "regular-dual")


def random_relative_system(rng, valid: bool = True, weights=(0, 1, -1), kinds=REL_KINDS):
    sname = str(rng.choice(["trivial", "Z2", "left-zero2", "semilattice2"]))
    kind = str(rng.choice(kinds))
    if kind == "regular-dual" and sname != "trivial":
        sname = "trivial"
    weight = int(rng.choice(weights))
    S = semigroup(sname)
    cs = scalar_cocycles(tuple(map(tuple, S.table.tolist())))
    nonzero = [i for i, c in enumerate(cs) if all(x != 0 for row in c for x in row)]
    ci = int(rng.choice(nonzero if nonzero and rng.random() < 0.8 else range(len(cs))))
    pool = _rel_pool(sname, kind, weight, ci)
    if not pool:
        return random_relative_system(rng, valid, weights, kinds)
    sys_ = pool[int(rng.integers(len(pool)))]
    return sys_ if valid else perturb_relative(sys_, rng)


def perturb_relative(sys_: RelativeRBSystem, rng) -> RelativeRBSystem:
    aa = sys_.assact
    S, field = aa.semigroup, aa.field
    which = rng.choice(["T", "mu", "l", "r", "muV"])

    def bump(m):
        data = m.data.copy()
        idx = tuple(int(rng.integers(s)) for s in data.shape)
        data[idx] = data[idx] + int(rng.choice([-1, 1]))
        return OmegaMultiMap(S, data, field)

    if which == "T":
        return RelativeRBSystem(aa, sys_.weight, bump(sys_.T))
    mu, l, r, mv = aa.algebra.mu, aa.module.l, aa.module.r, aa.mu_v
    if which == "mu":
        mu = bump(mu)
    elif which == "l":
        l = bump(l)
    elif which == "r":
        r = bump(r)
    else:
        mv = bump(mv)
    alg = OmegaAlgebra(mu)
    return RelativeRBSystem(AssAct(OmegaBimodule(alg, l, r), mv), sys_.weight, sys_.T)


def random_omega_map(rng, S, target, sources, lo=-2, hi=2, density=0.6, field=QQ):
    shape = (S.size,) * len(sources) + (target,) + tuple(sources)
    vals = rng.integers(lo, hi + 1, size=shape)
    mask = rng.random(shape) < density
    return OmegaMultiMap(S, np.array((vals * mask).tolist(), dtype=object).reshape(shape), field)
