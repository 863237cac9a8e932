from __future__ import annotations

import numpy as np
import pytest

from conftest import random_endo
from omegarb import oracle
from omegarb.cohomology import (
    DEGREE_CAPS, Complex, CochainSpace, cohomology_dims, cost_estimate, delta_alg, delta_alg_display,
    h_T, h_T_display, iota_matrix, les_check, phi, phi_display,
)
from omegarb.errors import DegreeCapExceeded, ShapeError
from omegarb.omega_maps import MixedMultiMap, OmegaMultiMap, compose_at
from omegarb.structures import AbsoluteRBSystem


def test_delta_of_identity_is_mu(rng):
    for _ in range(4):
        s = oracle.random_absolute_system(rng)
        mu = s.algebra.mu
        idm = OmegaMultiMap.identity(s.semigroup, s.dim)
        assert delta_alg(idm, mu) == mu
        assert delta_alg_display(idm, mu) == mu


def test_h_T_in_arity_one(rng):
    s = oracle.random_relative_system(rng)
    w = s.dim_a + s.dim_v
    f = MixedMultiMap(s.semigroup, s.dim_a, s.dim_v,
                      np.array(rng.integers(-2, 3, size=(s.semigroup.size, w, w)).tolist(), dtype=object))
    want = compose_at(f.block((1,), "A"), s.T, 1) - compose_at(s.T, f.block((), "V"), 1)
    assert h_T(f, s) == want
    assert h_T_display(f, s) == want


@pytest.mark.parametrize("n", [1, 2, 3])
def test_phi_for_identity_operator_weight_zero(rng, n):
    S = oracle.semigroup("Z2")
    s = AbsoluteRBSystem(oracle.algebra(S, "kxk"), 0, OmegaMultiMap.identity(S, 2))
    f = random_endo(rng, S, 2, n)
    # only the terms with T in n-1 slots survive at weight zero
    assert phi(f, s) == f.scale(1 - n)
    assert phi_display(f, s) == f.scale(1 - n)


def _dims(kind, k, da, dv, n):
    hom = lambda p, src: k ** p * da * src ** p if p >= 1 else 0  # noqa: E731
    lp = k ** n * (da ** (n + 1) + dv * ((da + dv) ** n - da ** n))
    return {"alg": hom(n, da), "rbo": hom(n, da), "rba": hom(n, da) + hom(n - 1, da),
            "assact": lp, "relrbo": hom(n, dv), "relrba": lp + hom(n - 1, dv)}[kind]


@pytest.mark.parametrize("kind", ["alg", "rbo", "rba", "assact", "relrbo", "relrba"])
def test_cochain_space_dimensions(kind):
    for sname in ("trivial", "Z2"):
        S = oracle.semigroup(sname)
        for da, dv in ((1, 1), (2, 2), (1, 2)):
            if kind in ("alg", "rbo", "rba") and da != dv:
                continue
            for n in (1, 2, 3):
                assert CochainSpace(kind, n, S, da, dv).dim == _dims(kind, S.size, da, dv, n)
    assert cost_estimate(2, 2, 3) == 2 ** 3 * 2 ** 4


def test_pack_unpack_round_trip(rng):
    s = oracle.random_relative_system(rng)
    for kind in ("assact", "relrbo", "relrba"):
        sp = Complex(kind, s).space(2)
        v = np.array(rng.integers(-3, 4, size=sp.dim).tolist(), dtype=object)
        f, th = sp.unpack(v)
        assert not np.any(sp.pack(f, th) != v)
        if f is not None:
            assert f.in_subalgebra()


def test_zero_system_dims():
    z = oracle.zero_system()
    assert [r.dim_h for r in cohomology_dims(z, "rba", 3)] == [1, 2, 2]
    assert [r.dim_h for r in cohomology_dims(z, "alg", 3)] == [1, 1, 1]
    assert [r.dim_h for r in cohomology_dims(z, "relrba", 3)] == [2, 5, 9]


def test_frozen_examples():
    assert [r.dim_h for r in cohomology_dims(oracle.k_example(), "rba", 3)] == [0, 1, 1]
    assert [r.dim_h for r in cohomology_dims(oracle.z2_family_example(0), "rba", 3)] == [0, 2, 4]
    for v in (1, 2):
        assert [r.dim_h for r in cohomology_dims(oracle.z2_family_example(v), "rba", 3)] == [0, 0, 0]


@pytest.mark.parametrize("kind", ["alg", "rbo", "rba", "assact", "relrbo", "relrba"])
def test_display_matches_bracket(rng, kind):
    s = oracle.random_absolute_system(rng, max_dim=1)
    a, b = Complex(kind, s, "bracket"), Complex(kind, s, "display")
    for n in (1, 2):
        assert not np.any(a.differential(n).to_dense() != b.differential(n).to_dense())


def test_les_bookkeeping(rng):
    for s in (oracle.k_example(), oracle.z2_family_example(1), oracle.random_relative_system(rng)):
        rep = les_check(s, 2)
        assert rep.ok
        dims = {nd.as_dict()["node"]: nd.dim_h for nd in rep.nodes}
        names = ("RelRBA", "AssAct", "RelRBO") if rep.relative else ("RBA", "Alg", "RBO")
        h = lambda n, i: dims.get(f"H^{n}_{names[i]}", 0)  # noqa: E731
        for n in (1, 2):
            # H^n(total) sits between H^{n-1}(operator) and H^n(f-part)
            assert h(n, 0) <= h(n, 1) + h(n - 1, 2)


def test_degree_caps():
    s = oracle.k_example()
    with pytest.raises(DegreeCapExceeded):
        cohomology_dims(s, "rba", DEGREE_CAPS["absolute"] + 1)
    assert len(cohomology_dims(s, "rba", 5, cap=5)) == 5
    with pytest.raises(DegreeCapExceeded):
        les_check(s, 4, relative=True)


def test_kind_checks():
    rel = oracle.random_relative_system(np.random.default_rng(0))
    with pytest.raises(ShapeError):
        Complex("rba", rel)
    with pytest.raises(ValueError):
        Complex("hochschild", rel)


@pytest.mark.parametrize("n", [1, 2])
def test_iota_intertwines_up_to_sign(rng, n):
    for s in (oracle.zero_system(), oracle.random_absolute_system(rng)):
        A, R = Complex("rba", s), Complex("relrba", s)
        left = iota_matrix(s, n + 1).matmul(A.differential(n)).to_dense()
        right = R.differential(n).matmul(iota_matrix(s, n)).to_dense()
        assert not np.any(left + right != 0)


def test_square_zero_small(rng):
    for _ in range(3):
        s = oracle.random_relative_system(rng)
        for kind in ("assact", "relrbo", "relrba"):
            assert Complex(kind, s).check_square_zero(1)
