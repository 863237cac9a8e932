from __future__ import annotations

import numpy as np
import pytest

from conftest import random_endo
from omegarb import oracle
from omegarb.cohomology import Complex, to_relative_element
from omegarb.errors import EmbeddingMismatch, NotMaurerCartan
from omegarb.linfty import (
    AbsoluteElement, RelativeElement, WContext, absolute_mc_element, embed, embed_map, jacobiator,
    lprime, mc_residual_absolute, mc_residual_absolute_direct, mc_residual_relative,
    mc_residual_relative_direct, project, project_map, relative_mc_element, rho, twisted_bracket,
    twisted_mc_residual,
)
from omegarb.omega_maps import MixedMultiMap, OmegaMultiMap
from omegarb.structures import RelativeRBSystem


def _random_rel_element(rng, ctx, n):
    x = RelativeElement(ctx, n)
    w = ctx.dim_a + ctx.dim_v
    full = tuple(range(1, n + 1))
    f = MixedMultiMap(ctx.semigroup, ctx.dim_a, ctx.dim_v,
                      np.array(rng.integers(-1, 2, size=x.f.data.shape).tolist(), dtype=object))
    for I, t, _ in list(f.blocks()):
        if (t == "A") != (I == full):
            f.set_block(I, t, 0)
    th = None
    if n > 1:
        th = OmegaMultiMap(ctx.semigroup, np.array(rng.integers(-1, 2, size=x.theta.data.shape).tolist(),
                                                   dtype=object))
    assert f.dim_w == w
    return RelativeElement(ctx, n, f, th)


def test_unary_bracket_vanishes(rng):
    s = oracle.random_relative_system(rng)
    ctx = WContext(s.semigroup, s.dim_a, s.dim_v, s.field)
    for n in (1, 2, 3):
        assert lprime([_random_rel_element(rng, ctx, n)], s.weight).is_zero()


def test_residual_zero_on_valid_systems(rng):
    for _ in range(8):
        r = oracle.random_relative_system(rng)
        assert mc_residual_relative(r).is_zero()
        a = oracle.random_absolute_system(rng)
        assert mc_residual_absolute(a).is_zero()
        assert mc_residual_absolute(a, "explicit").is_zero()


def test_perturbed_operator_shows_only_in_theta_part(rng):
    seen = 0
    while seen < 5:
        s = oracle.random_relative_system(rng)
        T = s.T.data.copy()
        T[(0,) * T.ndim] += 1
        bad = RelativeRBSystem(s.assact, s.weight, OmegaMultiMap(s.semigroup, T))
        if bad.validate().ok:
            continue
        res = mc_residual_relative(bad)
        assert res.f.is_zero()
        assert not res.theta.is_zero()
        seen += 1


def test_direct_forms_match(rng):
    for _ in range(10):
        r = oracle.random_relative_system(rng, valid=bool(rng.integers(2)))
        assert mc_residual_relative(r) == mc_residual_relative_direct(r)
        a = oracle.random_absolute_system(rng, valid=bool(rng.integers(2)))
        direct = mc_residual_absolute_direct(a)
        assert mc_residual_absolute(a) == direct
        assert mc_residual_absolute(a, "explicit") == direct


def test_embedding_round_trip(rng, z2):
    f = random_endo(rng, z2, 2, 3)
    assert project_map(embed_map(f)) == f
    x = AbsoluteElement(z2, 2, 3, f, random_endo(rng, z2, 2, 2))
    assert project(embed(x)) == x
    broken = embed_map(f)
    broken.data[(0, 0, 0, 3, 3, 3, 3)] += 1  # V-valued block on V inputs
    with pytest.raises(EmbeddingMismatch):
        project_map(broken)


@pytest.mark.parametrize("arities", [(2, 2), (1, 2), (2, 3), (2, 2, 2)])
def test_rho_methods_agree(rng, arities):
    S = oracle.semigroup("Z2")
    args = [AbsoluteElement(S, 1, n, random_endo(rng, S, 1, n),
                            random_endo(rng, S, 1, n - 1) if n > 1 else None) for n in arities]
    assert rho(args, 1, "embedding") == rho(args, 1, "explicit")


def test_twisting_by_zero_is_plain_bracket(rng):
    s = oracle.random_relative_system(rng)
    ctx = WContext(s.semigroup, s.dim_a, s.dim_v, s.field)
    zero = RelativeElement(ctx, 2)
    x, y = _random_rel_element(rng, ctx, 2), _random_rel_element(rng, ctx, 1)
    assert twisted_bracket(zero, [x, y], s.weight) == lprime([x, y], s.weight)
    assert twisted_bracket(zero, [x], s.weight).is_zero()


def test_twisting_requires_mc(rng):
    s = oracle.perturb_relative(oracle.random_relative_system(rng), rng)
    while s.validate().ok:
        s = oracle.perturb_relative(oracle.random_relative_system(rng), rng)
    base = relative_mc_element(s)
    with pytest.raises(NotMaurerCartan):
        twisted_bracket(base, [base], s.weight)


def test_twisted_mc_of_zero_perturbation(rng):
    s = oracle.random_absolute_system(rng)
    base = absolute_mc_element(s)
    zero = AbsoluteElement(s.semigroup, s.dim, 2)
    assert twisted_mc_residual(base, zero, s.weight).is_zero()


def _basis_parts(sp, step):
    for j in range(0, sp.dim, step):
        e = np.zeros(sp.dim, dtype=object)
        e[j] = 1
        yield sp.unpack(e)


@pytest.mark.parametrize("n", [1, 2])
def test_twisted_differential_matches_relative_complex(rng, n):
    s = oracle.random_relative_system(rng)
    cx = Complex("relrba", s)
    base = relative_mc_element(s)
    sp = cx.space(n)
    for f, th in _basis_parts(sp, max(1, sp.dim // 12)):
        got = twisted_bracket(base, [to_relative_element(sp, f, th)], s.weight)
        g, t = cx.apply_parts(n, f, th)
        assert got == to_relative_element(cx.space(n + 1), g, t)


@pytest.mark.parametrize("n", [1, 2])
def test_twisted_differential_matches_absolute_complex_up_to_sign(rng, n):
    s = oracle.random_absolute_system(rng)
    cx = Complex("rba", s)
    base = absolute_mc_element(s)
    sp = cx.space(n)
    for f, th in _basis_parts(sp, max(1, sp.dim // 12)):
        got = twisted_bracket(base, [AbsoluteElement(s.semigroup, s.dim, n, f, th)], s.weight)
        g, t = cx.apply_parts(n, f, th)
        assert got == AbsoluteElement(s.semigroup, s.dim, n + 1, g, t).scale(-1)


def test_jacobi_small(rng):
    s = oracle.random_relative_system(rng)
    ctx = WContext(s.semigroup, s.dim_a, s.dim_v, s.field)
    for ns in [(1, 2), (2, 2), (1, 1, 2), (2, 1, 1)]:
        xs = [_random_rel_element(rng, ctx, n) for n in ns]
        assert jacobiator(xs, s.weight).is_zero()


def test_degree_bookkeeping():
    S = oracle.semigroup("trivial")
    ctx = WContext(S, 1, 1)
    assert RelativeElement(ctx, 1).degree == -1
    assert RelativeElement(ctx, 1).theta is None
    assert RelativeElement(ctx, 0).is_zero()
    assert AbsoluteElement(S, 1, 3).theta.arity == 2
