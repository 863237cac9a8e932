from __future__ import annotations

import numpy as np
import pytest

from conftest import random_endo
from omegarb import oracle
from omegarb.exactla import GF
from omegarb.omega_maps import gerstenhaber_bracket

# weight-1 operators on k x k over GF(2), trivial index set, as flattened 2x2 matrices
FROZEN_KXK_GF2_W1 = [
    (0, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0), (0, 0, 1, 1), (0, 1, 0, 0), (0, 1, 0, 1),
    (1, 0, 0, 0), (1, 0, 0, 1), (1, 0, 1, 0), (1, 0, 1, 1), (1, 1, 0, 0), (1, 1, 0, 1),
]


def _as_set(brute):
    return {(name, tuple(om), tuple(b), tuple(r)) for name, om, b, r in brute}


def _witness_set(rep):
    return {(w.identity, tuple(w.omegas), tuple(w.basis), tuple(w.residual)) for w in rep.witnesses}


def test_brute_check_agrees_with_validator():
    rng = np.random.default_rng(11)
    invalid = 0
    for i in range(100):
        valid = bool(i % 2)
        s = oracle.random_absolute_system(rng, valid) if i % 4 < 2 else oracle.random_relative_system(rng, valid)
        rep = s.validate(limit=None)
        assert _as_set(oracle.brute_axiom_check(s)) == _witness_set(rep)
        invalid += not rep.ok
    assert 30 <= invalid <= 50


def test_search_recovers_known_operators():
    for sname in ("trivial", "Z2"):
        S = oracle.semigroup(sname)
        alg = oracle.algebra(S, "k")
        for lam in (1, -1):
            Ts = [s.T.data.ravel().tolist() for s in oracle.search_rb_operators(alg, lam)]
            assert [0] * S.size in Ts
            assert [-lam] * S.size in Ts
            for s in oracle.search_rb_operators(alg, lam):
                assert s.validate().ok


def test_frozen_gf2_solutions():
    S = oracle.semigroup("trivial")
    alg = oracle.algebra(S, "kxk", field=GF(2))
    sols = oracle.search_rb_operators(alg, 1, modulus=2)
    assert sorted(tuple(s.T.data.ravel().tolist()) for s in sols) == FROZEN_KXK_GF2_W1


def test_search_cap():
    S = oracle.semigroup("Z2")
    with pytest.raises(ValueError):
        oracle.search_rb_operators(oracle.algebra(S, "kxk"), 0, cap=10)


def test_relative_search_matches_validator():
    aa = oracle.twisted_assact(oracle.semigroup("Z2"), "k", "kxk", [[1, 1], [1, 1]])
    sols = oracle.search_relative_operators(aa, 1)
    assert sols
    for s in sols:
        assert s.validate().ok
    mod = oracle.search_relative_operators(aa, 1, modulus=3)
    assert len(mod) >= 1


@pytest.mark.parametrize("m,n", [(2, 2), (1, 3), (3, 2)])
def test_brute_bracket(rng, m, n):
    S = oracle.semigroup("left-zero2")
    f, g = random_endo(rng, S, 1, m), random_endo(rng, S, 1, n)
    assert oracle.brute_bracket(f, g) == gerstenhaber_bracket(f, g)


def test_scalar_cocycles_are_cocycles():
    for name, table in oracle.SEMIGROUPS.items():
        S = oracle.semigroup(name)
        for c in oracle.scalar_cocycles(tuple(map(tuple, table))):
            assert oracle.algebra(S, "k", c).validate().ok


def test_brute_rba_dims_on_examples():
    assert oracle.brute_rba_dims(oracle.k_example(), 3) == [0, 1, 1]
    assert oracle.brute_rba_dims(oracle.zero_system(), 3) == [1, 2, 2]


def test_random_systems_are_seeded():
    a = oracle.random_relative_system(np.random.default_rng(4))
    b = oracle.random_relative_system(np.random.default_rng(4))
    assert a.T == b.T and a.assact.mu_v == b.assact.mu_v
