from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from omegarb import kernels
from omegarb.errors import FieldError, ImageExceedsKernel
from omegarb.exactla import (
    DENSE_LIMIT, GF, QQ, SparseMatrix, field_from_name, in_span, kernel_basis, quotient_dim, rank,
    solve, span_rank,
)


def test_rank_examples():
    assert rank(np.eye(2, dtype=int)) == 2
    assert rank(np.zeros((2, 2), dtype=int)) == 0
    assert rank([[1, 2], [2, 4]]) == 1


def test_kernel_examples():
    (v,) = kernel_basis([[1, -1]])
    assert list(v) == [1, 1]
    assert kernel_basis(np.eye(2, dtype=int)) == []
    assert len(kernel_basis(np.zeros((2, 3), dtype=int))) == 3


def test_quotient_dim_counts():
    assert quotient_dim(3, 1) == 2
    assert quotient_dim(0, 0) == 0
    assert quotient_dim(5, 5) == 0
    with pytest.raises(ImageExceedsKernel):
        quotient_dim(1, 2)


def test_rationals_reduced_and_formatted():
    assert QQ("6/4") == Fraction(3, 2)
    assert QQ.format(QQ("-6/4")) == "-3/2"
    assert QQ.format(QQ(4)) == "4"


def test_prime_field():
    F = GF(7)
    assert F(-1) == 6
    assert F("1/2") == 4
    assert F.format(F(10)) == "3"
    with pytest.raises(FieldError):
        GF(8)
    with pytest.raises(FieldError):
        F("1/7")
    assert field_from_name("GF(5)") == GF(5)
    assert field_from_name("QQ") == QQ


def test_rank_depends_on_field():
    m = [[1, 2], [3, 4]]  # det = -2
    assert rank(m) == 2
    assert rank(m, GF(2)) == 1


def test_solve_and_span():
    x = solve([[1, 1], [0, 1]], [3, 1])
    assert list(x) == [2, 1]
    assert solve([[1], [1]], [1, 2]) is None
    assert in_span([{0: 1, 1: 1}], {0: 2, 1: 2})
    assert not in_span([{0: 1}], {1: 1})
    assert span_rank([{0: 1}, {0: 2}, {1: QQ("1/3")}]) == 2


matrices = st.integers(1, 6).flatmap(
    lambda r: st.integers(1, 6).flatmap(
        lambda c: st.lists(st.lists(st.integers(-3, 3), min_size=c, max_size=c), min_size=r, max_size=r)))


@given(matrices)
def test_rank_nullity_and_transpose(m):
    a = np.array(m, dtype=object)
    r = rank(a)
    ker = kernel_basis(a)
    assert r + len(ker) == a.shape[1]
    assert rank(a.T) == r
    for v in ker:
        assert not np.any(a.dot(v) != 0)


@given(matrices, st.sampled_from([2, 3, 101]))
def test_prime_rank_bounded_by_rational_rank(m, p):
    assert rank(m, GF(p)) <= rank(m)


def test_sparse_path_matches_dense(rng):
    # above DENSE_LIMIT entries the sparse elimination is used
    n = int(DENSE_LIMIT ** 0.5) + 10
    a = np.zeros((n, n), dtype=object)
    for i in range(n):
        for j in rng.choice(n, size=3, replace=False):
            a[i, j] = int(rng.integers(-2, 3))
    a[:, -1] = a[:, 0] + a[:, 1]
    sm = SparseMatrix.from_dense(a)
    r = rank(sm)
    assert r == rank(sm.transpose())
    assert r == kernels.bareiss_rank([list(map(int, row)) for row in a], n)
    assert r < n


def test_sparse_matrix_ops():
    a = SparseMatrix.from_dense(np.array([[1, 2], [0, 0], [3, 4]], dtype=object))
    b = SparseMatrix.from_dense(np.array([[1, 0], [0, 1]], dtype=object))
    assert a.shape == (3, 2) and a.nnz == 4
    assert a.matmul(b).cols == a.cols
    assert not np.any(a.transpose().to_dense() != np.array([[1, 0, 3], [2, 0, 4]], dtype=object))
    assert list(a.apply([1, 1])) == [3, 0, 7]


def test_backends_agree(rng):
    from omegarb import _kernels_py

    for _ in range(20):
        a = rng.integers(-3, 4, size=(6, 7))
        rows = [list(map(int, r)) for r in a]
        assert kernels.bareiss_rank(rows, 7) == _kernels_py.bareiss_rank(rows, 7)
        assert kernels.rank_mod_p(a, 5) == _kernels_py.rank_mod_p(a, 5)
