"""Acceptance criteria, one test each.

Every test prints ``PASS``/``FAIL`` with its runtime and budget; the lines are
also repeated in the pytest terminal summary.  Run directly with
``python3 tests/test_acceptance.py`` to get just the ten lines.
"""

from __future__ import annotations

import itertools
import time

import numpy as np
import pytest

from omegarb import oracle
from omegarb.cohomology import (
    Complex, CochainSpace, cohomology_dims, delta_pi, h_T_matrix, les_check, phi_matrix,
)
from omegarb.deformation import (
    apply_formal_isomorphism, coboundary_witness, equivalence_shift_check, infinitesimal,
    is_two_cocycle, random_isomorphism, rigidity_gauge_step, scaling_deformation,
    TruncatedDeformation, verify_deformation,
)
from omegarb.linfty import (
    AbsoluteElement, RelativeElement, WContext, absolute_mc_element, embed, jacobiator, lprime,
    mc_residual_absolute, mc_residual_relative, project, rho, twisted_mc_residual,
)
from omegarb.omega_maps import FiniteSemigroup, MixedMultiMap, OmegaMultiMap, subsets
from omegarb.structures import AbsoluteRBSystem, OmegaAlgebra

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # pragma: no cover - direct execution outside pytest
    ACCEPTANCE_LINES = []

FROZEN_RBA = {"zero": [1, 2, 2], "k": [0, 1, 1], "z2_0": [0, 2, 4]}


def _report(num, title, budget, fn):
    t = time.perf_counter()
    ok, detail = fn()
    dt = time.perf_counter() - t
    within = dt < budget
    status = "PASS" if ok and within else "FAIL"
    extra = "" if within else " (over budget)"
    line = f"{status} criterion {num:2d}: {title}: {detail}; {dt:.1f}s / {budget}s{extra}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok, within, line


def _seeded(seed):
    return np.random.default_rng(seed)


# ---------------------------------------------------------------------------
# 1. MC <=> axioms


def crit_mc_axioms():
    rng = _seeded(101)
    n = agree = valid = 0
    for i in range(220):
        want_valid = bool(i % 2)
        if i % 4 < 2:
            s = oracle.random_absolute_system(rng, valid=want_valid)
            res = mc_residual_absolute(s)
        else:
            s = oracle.random_relative_system(rng, valid=want_valid)
            res = mc_residual_relative(s)
        ok = s.validate().ok
        valid += ok
        agree += res.is_zero() == ok
        n += 1
    return agree == n and 0 < valid < n, f"{agree}/{n} agree ({valid} valid, {n - valid} invalid)"


# ---------------------------------------------------------------------------
# 2. square zero


def _square_zero_systems():
    rng = _seeded(202)
    absolute = [oracle.k_example(), oracle.zero_system(), oracle.z2_family_example(0),
                oracle.z2_family_example(1)]
    heavy = 0  # d = 2 with |Omega| = 2 costs ~20 s on the bracket path; keep one
    while len(absolute) < 12:
        s = oracle.random_absolute_system(rng)
        big = s.dim * s.semigroup.size >= 4
        if big and heavy:
            continue
        heavy += big
        absolute.append(s)
    relative = [s.to_relative() for s in absolute if s.dim == 1]
    relative += [oracle.random_relative_system(rng, kinds=("scalar-k",)) for _ in range(6)]
    relative += [oracle.random_relative_system(rng, kinds=("zero-action", "scalar-kxk"))]
    return absolute, relative


def crit_square_zero():
    absolute, relative = _square_zero_systems()
    checks = 0
    for s in absolute:
        for kind in ("alg", "rbo", "rba"):
            cx = Complex(kind, s)
            for n in (1, 2):
                cx.check_square_zero(n)  # raises on failure
                checks += 1
    for s in relative:
        for kind in ("assact", "relrbo", "relrba"):
            cx = Complex(kind, s)
            for n in (1, 2):
                cx.check_square_zero(n)
                checks += 1
    nsys = len(absolute) + len(relative)
    return nsys >= 20, f"{checks} products d^(n+1) d^n = 0 (n <= 2) on {nsys} systems"


# ---------------------------------------------------------------------------
# 3. cochain maps


def crit_cochain_maps():
    rng = _seeded(303)
    rel = [oracle.k_example().to_relative(), oracle.z2_family_example(0).to_relative()]
    rel += [oracle.random_relative_system(rng, kinds=("scalar-k",)) for _ in range(4)]
    wide = oracle.random_relative_system(rng, kinds=("scalar-kxk",))
    count = 0
    for s, top in [(s, 3) for s in rel] + [(wide, 2)]:
        A, Rl = Complex("assact", s), Complex("relrbo", s)
        for n in range(1, top + 1):
            lhs = h_T_matrix(s, n + 1).matmul(A.differential(n), s.field)
            rhs = Rl.differential(n).matmul(h_T_matrix(s, n), s.field)
            if lhs.cols != rhs.cols:
                return False, f"h_T fails at degree {n}"
            count += 1
    absolute = [oracle.k_example(), oracle.zero_system(), oracle.z2_family_example(0),
                oracle.z2_family_example(1)] + [oracle.random_absolute_system(rng) for _ in range(4)]
    for s in absolute:
        Al, Rb = Complex("alg", s), Complex("rbo", s)
        # bracket-path Phi through degree 3; its closed form supplies degree 4,
        # after checking that the two agree at degree 3
        P = {m: phi_matrix(s, m) for m in (1, 2, 3)}
        if phi_matrix(s, 3, display=True).cols != P[3].cols:
            return False, "Phi closed form disagrees with the bracket path"
        P[4] = phi_matrix(s, 4, display=True)
        for n in (1, 2, 3):
            lhs = P[n + 1].matmul(Al.differential(n), s.field)
            rhs = Rb.differential(n).matmul(P[n], s.field)
            if lhs.cols != rhs.cols:
                return False, f"Phi fails at degree {n}"
            count += 1
    return True, f"{count} matrix identities (h_T and Phi, degrees <= 3)"


# ---------------------------------------------------------------------------
# 4. component formulas for delta_pi


def crit_components():
    rng = _seeded(404)
    systems = [oracle.k_example().to_relative(), oracle.z2_family_example(0).to_relative(),
               oracle.random_relative_system(rng, kinds=("scalar-k",)),
               oracle.random_relative_system(rng, kinds=("zero-action",)),
               oracle.random_relative_system(rng, kinds=("scalar-kxk",))]
    cols = 0
    for s in systems:
        for n in (1, 2, 3):
            sp = CochainSpace("assact", n, s.semigroup, s.dim_a, s.dim_v, s.field)
            for j in range(sp.dim):
                e = np.zeros(sp.dim, dtype=object)
                e[j] = 1
                f, _ = sp.unpack(e)
                delta_pi(f, s.assact, method="mixed", check=True)  # raises on mismatch
                cols += 1
    return True, f"{cols} basis cochains on {len(systems)} systems agree entrywise"


# ---------------------------------------------------------------------------
# 5. embedding consistency


def _rand_endo(rng, S, d, arity):
    shape = (S.size,) * arity + (d,) * (arity + 1)
    return OmegaMultiMap(S, np.array(rng.integers(-2, 3, size=shape).tolist(), dtype=object))


def _rand_abs_element(rng, S, d):
    kind = rng.choice(["f", "a", "both"])
    n = int(rng.integers(1, 4)) if kind == "f" else int(rng.integers(2, 4))
    f = _rand_endo(rng, S, d, n) if kind in ("f", "both") else None
    th = _rand_endo(rng, S, d, n - 1) if kind in ("a", "both") else None
    return AbsoluteElement(S, d, n, f, th)


def crit_embedding():
    rng = _seeded(505)
    cases = nonzero = 0
    for trial in range(60):
        S = FiniteSemigroup.cyclic(2) if trial % 2 else FiniteSemigroup.trivial()
        d = 1 + trial % 3 // 2
        k = 1 + trial % 4
        lam = int(rng.integers(-2, 3))
        if trial % 5 == 4:  # unstructured tuples, mostly zero brackets
            args = [_rand_abs_element(rng, S, d) for _ in range(k)]
        else:  # one f-piece and k - 1 operator pieces: the nonvanishing shape
            n = int(rng.integers(max(1, k - 1), 4))
            args = [AbsoluteElement(S, d, n, _rand_endo(rng, S, d, n))]
            args += [AbsoluteElement(S, d, 2, None, _rand_endo(rng, S, d, 1)) for _ in range(k - 1)]
            if k == 2 and rng.random() < 0.5:
                args[1] = AbsoluteElement(S, d, 2, _rand_endo(rng, S, d, 2), _rand_endo(rng, S, d, 1))
            perm = rng.permutation(k)
            args = [args[t] for t in perm]
        ctx = WContext(S, d, d)
        lifted = lprime([embed(x, ctx) for x in args], lam)
        if not lifted.in_subalgebra():
            return False, f"l'_{k} leaves the subalgebra (trial {trial})"
        ref = rho(args, lam, "explicit")
        if project(lifted) != ref:
            return False, f"p l'_{k} iota != rho_{k} (trial {trial})"
        cases += 1
        nonzero += not ref.is_zero()
    return nonzero > cases // 3, f"{cases} tuples, k = 1..4 ({nonzero} nonzero brackets), all equal to rho_k"


# ---------------------------------------------------------------------------
# 6. Jacobi identity


def _mixed(rng, S, da, dv, n):
    """Random element of the subalgebra: A-valued on all-A inputs, V-valued otherwise."""
    f = MixedMultiMap.zeros(S, da, dv, n)
    full = tuple(range(1, n + 1))
    for I in subsets(n):
        t = "A" if I == full else "V"
        shape = f.block(I, t).data.shape
        f.set_block(I, t, np.array(rng.integers(-1, 2, size=shape).tolist(), dtype=object))
    return f


def _piece(rng, ctx, kind, arity):
    S, da, dv = ctx.semigroup, ctx.dim_a, ctx.dim_v
    if kind == "f":
        return RelativeElement(ctx, arity, _mixed(rng, S, da, dv, arity))
    shape = (S.size,) * arity + (da,) + (dv,) * arity
    th = OmegaMultiMap(S, np.array(rng.integers(-1, 2, size=shape).tolist(), dtype=object))
    return RelativeElement(ctx, arity + 1, None, th)


# arity <= 3 for up to three inputs, <= 2 at four inputs (arity 3 there costs minutes)
PIECE_TYPES = [("f", 1), ("f", 2), ("f", 3), ("a", 1), ("a", 2), ("a", 3)]
SMALL_TYPES = [t for t in PIECE_TYPES if t[1] <= 2]


def crit_jacobi():
    rng = _seeded(606)
    S = FiniteSemigroup.cyclic(2)
    ctx = WContext(S, 1, 1)
    patterns = live = 0
    for N in range(1, 5):
        for pattern in itertools.combinations_with_replacement(PIECE_TYPES if N < 4 else SMALL_TYPES, N):
            args = [_piece(rng, ctx, k, a) for k, a in pattern]
            lam = int(rng.integers(-2, 3))
            if not jacobiator(args, lam).is_zero():
                return False, f"Jacobi fails on pattern {pattern}"
            patterns += 1
            live += N > 1 and not lprime(args, lam).is_zero()
    # a few mixed-dimension spot checks with dim V = 2
    ctx2 = WContext(S, 1, 2)
    for pattern in [(("f", 2), ("a", 1), ("a", 1)), (("f", 1), ("f", 2), ("a", 2)),
                    (("f", 2), ("f", 2), ("a", 1), ("a", 1))]:
        args = [_piece(rng, ctx2, k, a) for k, a in pattern]
        if not jacobiator(args, 1).is_zero():
            return False, f"Jacobi fails on pattern {pattern} (dim V = 2)"
        patterns += 1
    return live > 0, f"{patterns} argument patterns with 1..4 inputs ({live} with a nonzero top bracket)"


# ---------------------------------------------------------------------------
# 7. twisted control


def _family(sname, weight, dim):
    S = oracle.semigroup(sname)
    cs = oracle.scalar_cocycles(tuple(map(tuple, S.table.tolist())))
    out = []
    for aname, (d, _) in oracle.BASE_ALGEBRAS.items():
        if d != dim:
            continue
        for ci in range(len(cs)):
            out.extend(oracle._abs_pool(sname, aname, weight, ci))
    return out


def crit_twisted():
    rng = _seeded(707)
    pairs = agree = hits = 0
    families = {}
    while pairs < 60:
        sname = str(rng.choice(["trivial", "Z2"]))
        weight = int(rng.choice([0, 1]))
        dim = 1 if pairs % 3 else 2
        key = (sname, weight, dim)
        if key not in families:
            families[key] = _family(*key)
        fam = families[key]
        if len(fam) < 2:
            continue
        s1 = fam[int(rng.integers(len(fam)))]
        if pairs % 2:
            s2 = fam[int(rng.integers(len(fam)))]
            mu_hat = s2.algebra.mu - s1.algebra.mu
            T_hat = s2.T - s1.T
        else:
            S = s1.semigroup
            mu_hat = _rand_endo(rng, S, dim, 2).scale(int(rng.integers(0, 2)))
            T_hat = _rand_endo(rng, S, dim, 1)
        summed = AbsoluteRBSystem(OmegaAlgebra(s1.algebra.mu + mu_hat), weight, s1.T + T_hat)
        valid = summed.validate().ok
        base = absolute_mc_element(s1)
        hat = AbsoluteElement(s1.semigroup, dim, 2, mu_hat, T_hat)
        zero = twisted_mc_residual(base, hat, weight).is_zero()
        agree += zero == valid
        hits += valid
        pairs += 1
    return agree == pairs and 0 < hits < pairs, f"{agree}/{pairs} pairs agree ({hits} valid sums)"


# ---------------------------------------------------------------------------
# 8. deformations


def _deformation_cases(rng, count):
    out = []
    for i in range(count):
        rel = i % 3 == 2
        if rel:
            s = oracle.random_relative_system(rng, kinds=("scalar-k", "zero-action", "scalar-dual"))
        else:
            s = oracle.random_absolute_system(rng)
        a = int(rng.integers(-2, 3))
        d0 = scaling_deformation(s, a=a, order=2)
        psi = random_isomorphism(rng, s, order=2)
        out.append((s, d0, psi, apply_formal_isomorphism(d0, psi)))
    return out


def crit_deformation():
    rng = _seeded(808)
    cases = _deformation_cases(rng, 54)
    cocycles = shifts = gauges = 0
    for s, d0, psi, d in cases:
        for dd in (d0, d):
            if verify_deformation(dd.truncate(1)).ok and is_two_cocycle(infinitesimal(dd), s)[0]:
                cocycles += 1
        if equivalence_shift_check(d0, d, psi).ok:
            shifts += 1
        # gauge: start from a transported constant deformation so order 1 is a coboundary
        dc = apply_formal_isomorphism(TruncatedDeformation.constant(s, 2), psi)
        w = coboundary_witness(dc)
        if w is None:
            continue
        g = rigidity_gauge_step(dc, *w)
        if infinitesimal(g).is_zero() and is_two_cocycle(infinitesimal(g, 2), s)[0]:
            gauges += 1
    n = len(cases)
    ok = cocycles == 2 * n and shifts == n and gauges == n and n >= 50
    return ok, f"cocycle {cocycles}/{2 * n}, shift {shifts}/{n}, gauge {gauges}/{n}"


# ---------------------------------------------------------------------------
# 9. long exact sequence


def crit_les():
    systems = {"k": oracle.k_example(), "z2_0": oracle.z2_family_example(0),
               "z2_1": oracle.z2_family_example(1)}
    nodes = 0
    for name, s in systems.items():
        rep = les_check(s, max_degree=3)
        if not rep.ok:
            bad = [n.as_dict()["node"] for n in rep.nodes if not n.exact]
            return False, f"{name}: not exact at {bad}"
        nodes += len(rep.nodes)
    return True, f"{nodes} nodes exact through degree 3 on {', '.join(systems)}"


# ---------------------------------------------------------------------------
# 10. frozen dimension tables


def crit_frozen():
    systems = {"zero": oracle.zero_system(), "k": oracle.k_example(), "z2_0": oracle.z2_family_example(0)}
    got = {}
    for name, s in systems.items():
        engine = [r.dim_h for r in cohomology_dims(s, "rba", 3)]
        brute = oracle.brute_rba_dims(s, 3)
        if engine != brute:
            return False, f"{name}: engine {engine} vs oracle {brute}"
        got[name] = engine
    ok = got == FROZEN_RBA
    return ok, ", ".join(f"{k} {tuple(v)}" for k, v in got.items())


CRITERIA = [
    (1, "MC residual vanishes iff axioms hold", 30, crit_mc_axioms),
    (2, "square-zero differentials, all six complexes", 60, crit_square_zero),
    (3, "h_T and Phi are cochain maps", 60, crit_cochain_maps),
    (4, "delta_pi bracket vs component formulas", 60, crit_components),
    (5, "embedding consistency p l'_k iota = rho_k", 30, crit_embedding),
    (6, "generalized Jacobi identity for l'_k", 120, crit_jacobi),
    (7, "twisted MC controls deformations", 30, crit_twisted),
    (8, "deformation cocycle, shift and gauge claims", 60, crit_deformation),
    (9, "long exact sequence exactness", 60, crit_les),
    (10, "frozen cohomology tables", 30, crit_frozen),
]


@pytest.mark.parametrize("num,title,budget,fn", CRITERIA, ids=[f"criterion{c[0]}" for c in CRITERIA])
def test_criterion(num, title, budget, fn):
    ok, within, line = _report(num, title, budget, fn)
    assert ok, line
    assert within, line


if __name__ == "__main__":
    results = [_report(*c) for c in CRITERIA]
    raise SystemExit(0 if all(ok and w for ok, w, _ in results) else 1)
