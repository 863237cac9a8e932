from __future__ import annotations

import numpy as np
import pytest

from conftest import random_endo
from omegarb import oracle
from omegarb.deformation import (
    FormalIsomorphism, TruncatedDeformation, apply_formal_isomorphism, coboundary_witness,
    deformation_from_cochain, equivalence_shift_check, infinitesimal, is_two_cocycle,
    random_isomorphism, rigidity_gauge_step, scaling_deformation, trivialize, verify_deformation,
)
from omegarb.errors import InvalidDeformation, NotACoboundaryWitness, ShapeError
from omegarb.omega_maps import OmegaMultiMap
from omegarb.structures import AbsoluteRBSystem


def test_constant_deformation(k_example):
    d = TruncatedDeformation.constant(k_example, order=3)
    assert verify_deformation(d).ok
    assert infinitesimal(d).is_zero()
    assert d.is_constant()


def test_random_mu1_fails_at_first_order(rng):
    s = oracle.z2_family_example(0)
    failed = 0
    for _ in range(10):
        mu1 = random_endo(rng, s.semigroup, 1, 2)
        d = TruncatedDeformation(s, 1, {"mu": [mu1]})
        ok, _ = is_two_cocycle(infinitesimal(d), s)
        rep = verify_deformation(d)
        assert rep.ok == ok
        if not rep.ok:
            assert rep.first_failure[0] == 1
            assert rep.witnesses
            failed += 1
    assert failed


def test_scaling_deformations_are_cocycles(rng):
    for _ in range(6):
        s = oracle.random_relative_system(rng) if rng.integers(2) else oracle.random_absolute_system(rng)
        d = scaling_deformation(s, a=int(rng.integers(1, 3)), order=2)
        assert verify_deformation(d).ok
        assert is_two_cocycle(infinitesimal(d), s)[0]


def test_relative_l1_lives_in_one_block(rng):
    s = oracle.random_relative_system(rng)
    l1 = oracle.random_omega_map(rng, s.semigroup, s.dim_v, (s.dim_a, s.dim_v), density=1.0)
    d = TruncatedDeformation(s, 1, {"l": [l1]})
    f, th = infinitesimal(d).parts()
    assert th.is_zero()
    for I, t, block in f.blocks():
        if (I, t) == ((1,), "V"):
            assert block == l1
        else:
            assert block.is_zero()


def test_identity_isomorphism_changes_nothing(rng):
    s = oracle.random_absolute_system(rng)
    d = scaling_deformation(s, a=2, order=2)
    e = apply_formal_isomorphism(d, FormalIsomorphism.identity(2))
    for name in ("mu", "T"):
        assert e.series(name) == d.series(name)


def test_higher_psi_keeps_infinitesimal(rng):
    s = oracle.random_absolute_system(rng)
    d = scaling_deformation(s, a=1, order=3)
    psi2 = oracle.random_omega_map(rng, s.semigroup, s.dim, (s.dim,))
    e = apply_formal_isomorphism(d, FormalIsomorphism.single(psi2, 3, at=2))
    assert infinitesimal(e) == infinitesimal(d)
    assert verify_deformation(e).ok


@pytest.mark.parametrize("relative", [False, True])
def test_shift_by_coboundary(rng, relative):
    for _ in range(4):
        s = oracle.random_relative_system(rng) if relative else oracle.random_absolute_system(rng)
        d0 = scaling_deformation(s, a=1, order=2)
        psi = random_isomorphism(rng, s, order=2)
        d1 = apply_formal_isomorphism(d0, psi)
        assert verify_deformation(d1).ok
        assert equivalence_shift_check(d0, d1, psi).ok


def test_unrelated_pair_fails_shift(rng):
    s = oracle.z2_family_example(0)
    d0 = scaling_deformation(s, a=1, order=1)
    d1 = scaling_deformation(s, a=2, order=1)
    psi = FormalIsomorphism.identity(1)
    rep = equivalence_shift_check(d0, d1, psi)
    assert not rep.ok
    assert not rep.residual.is_zero()


def test_gauge_step_removes_first_order(rng):
    s = oracle.random_absolute_system(rng)
    psi = random_isomorphism(rng, s, order=2)
    d = apply_formal_isomorphism(TruncatedDeformation.constant(s, 2), psi)
    w = coboundary_witness(d, 1)
    assert w is not None
    g = rigidity_gauge_step(d, w[0], w[1], at=1)
    assert infinitesimal(g, 1).is_zero()
    assert verify_deformation(g).ok
    assert trivialize(d).trivialized


def test_gauge_step_rejects_wrong_witness(rng):
    s = oracle.k_example()
    d = scaling_deformation(s, a=1, order=1)
    with pytest.raises(NotACoboundaryWitness):
        rigidity_gauge_step(d, OmegaMultiMap.zeros(s.semigroup, 1, (1,)))


def test_weight_zero_operator_scaling_is_not_trivial():
    S = oracle.semigroup("trivial")
    s = AbsoluteRBSystem(oracle.algebra(S, "zero1"), 0, OmegaMultiMap.identity(S, 1))
    d = scaling_deformation(s, a=1, order=1, scale_T=True)
    assert verify_deformation(d).ok
    assert coboundary_witness(d, 1) is None
    rep = trivialize(d)
    assert not rep.trivialized and rep.stuck_at == 1
    with pytest.raises(InvalidDeformation):
        scaling_deformation(oracle.z2_family_example(1), scale_T=True)


def test_deformation_from_cochain_round_trip(rng):
    s = oracle.random_relative_system(rng)
    d = scaling_deformation(s, a=3, order=1)
    c = infinitesimal(d)
    assert infinitesimal(deformation_from_cochain(s, c)) == c


def test_bad_coefficients():
    s = oracle.k_example()
    with pytest.raises(InvalidDeformation):
        TruncatedDeformation(s, 1, {"l": [None]})
    with pytest.raises(InvalidDeformation):
        TruncatedDeformation(s, 1, {"mu": [None, None]})
    with pytest.raises(ShapeError):
        TruncatedDeformation(s, 1, {"T": [OmegaMultiMap.zeros(s.semigroup, 1, (1, 1))]})
    with pytest.raises(InvalidDeformation):
        TruncatedDeformation(s, -1)
    assert np.all(TruncatedDeformation(s, 2).coeff("mu", 5).data == 0)
