"""Exact linear algebra over the rationals or a prime field.

Scalars over QQ are Python ``int`` or ``fractions.Fraction`` (integral values
are kept as ``int``); over GF(p) they are ints in ``range(p)``.  Matrices are
either 2-D numpy object arrays or :class:`SparseMatrix`.  Elimination is
fraction-free: rational rows are scaled to primitive integer rows and
reduced with integer arithmetic only (see ``kernels``).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial, gcd, isqrt
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import DimensionMismatch, FieldError, ImageExceedsKernel

DENSE_LIMIT = 10_000  # entries; above this, matrices are handled sparsely


# ---------------------------------------------------------------------------
# fields


def _norm_q(x):
    t = type(x)
    if t is int:
        return x
    if t is Fraction:
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, bool):
        return int(x)
    raise FieldError(f"not an exact rational: {x!r}")


_norm_q_vec = np.frompyfunc(_norm_q, 1, 1)


class RationalField:
    name = "QQ"
    characteristic = 0

    def __call__(self, x):
        if isinstance(x, str):
            try:
                return _norm_q(Fraction(x.strip()))
            except (ValueError, ZeroDivisionError) as exc:
                raise FieldError(f"cannot parse rational {x!r}") from exc
        if isinstance(x, float):
            raise FieldError("floats are not exact; pass a string such as '1/3'")
        return _norm_q(x)

    def normalize(self, arr):
        arr = np.asarray(arr, dtype=object)
        if arr.ndim == 0:
            return np.array(_norm_q(arr.item()), dtype=object)
        return _norm_q_vec(arr).astype(object) if arr.size else arr

    def format(self, x) -> str:
        x = _norm_q(x)
        return str(x)

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return _norm_q(Fraction(1) / x)

    def div(self, a, b):
        return _norm_q(Fraction(a) / b)

    def inv_factorial(self, k: int):
        return Fraction(1, factorial(k))

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    for q in range(3, isqrt(p) + 1, 2):
        if p % q == 0:
            return False
    return True


class PrimeField:
    characteristic: int

    def __init__(self, p: int):
        p = int(p)
        if not _is_prime(p) or p >= 2**31:
            raise FieldError(f"GF(p) needs a prime p < 2^31, got {p}")
        self.characteristic = p
        self.name = f"GF({p})"

    @property
    def p(self):
        return self.characteristic

    def __call__(self, x):
        p = self.characteristic
        if isinstance(x, str):
            try:
                x = Fraction(x.strip())
            except (ValueError, ZeroDivisionError) as exc:
                raise FieldError(f"cannot parse {x!r}") from exc
        if isinstance(x, float):
            raise FieldError("floats are not exact")
        if isinstance(x, Fraction):
            if x.denominator % p == 0:
                raise FieldError(f"denominator of {x} vanishes in {self.name}")
            return (x.numerator * pow(x.denominator, -1, p)) % p
        return int(x) % p

    def normalize(self, arr):
        arr = np.asarray(arr, dtype=object)
        if arr.ndim == 0:
            return np.array(self(arr.item()), dtype=object)
        if not arr.size:
            return arr
        return np.frompyfunc(self, 1, 1)(arr).astype(object)

    def format(self, x) -> str:
        return str(self(x))

    def inv(self, x):
        x = self(x)
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, -1, self.characteristic)

    def div(self, a, b):
        return (self(a) * self.inv(b)) % self.characteristic

    def inv_factorial(self, k: int):
        if k >= self.characteristic:
            raise FieldError(f"1/{k}! is undefined in {self.name}")
        return pow(factorial(k), -1, self.characteristic)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.characteristic == self.characteristic

    def __hash__(self):
        return hash(("GF", self.characteristic))

    def __repr__(self):
        return self.name


QQ = RationalField()


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    return PrimeField(p)


def field_from_name(name: str):
    name = name.strip()
    if name.upper() in ("QQ", "Q"):
        return QQ
    if name.upper().startswith("GF(") and name.endswith(")"):
        return GF(int(name[3:-1]))
    raise FieldError(f"unknown field {name!r}; use 'QQ' or 'GF(p)'")


# ---------------------------------------------------------------------------
# matrices


class SparseMatrix:
    """Column-major sparse matrix; ``cols[j]`` maps row index to nonzero value."""

    __slots__ = ("nrows", "ncols", "cols")

    def __init__(self, nrows: int, ncols: int, cols: list[dict] | None = None):
        self.nrows = int(nrows)
        self.ncols = int(ncols)
        self.cols = cols if cols is not None else [dict() for _ in range(ncols)]
        if len(self.cols) != self.ncols:
            raise DimensionMismatch("column count does not match ncols")

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @property
    def nnz(self):
        return sum(len(c) for c in self.cols)

    @classmethod
    def from_dense(cls, arr):
        arr = np.asarray(arr, dtype=object)
        if arr.ndim != 2:
            raise DimensionMismatch("expected a 2-D array")
        cols = []
        for j in range(arr.shape[1]):
            col = arr[:, j]
            cols.append({i: col[i] for i in np.flatnonzero(col != 0).tolist()})
        return cls(arr.shape[0], arr.shape[1], cols)

    @classmethod
    def from_columns(cls, nrows: int, vectors: Iterable) -> "SparseMatrix":
        cols = []
        for v in vectors:
            if isinstance(v, dict):
                cols.append({k: x for k, x in v.items() if x != 0})
            else:
                v = np.asarray(v, dtype=object)
                cols.append({i: v[i] for i in np.flatnonzero(v != 0).tolist()})
        return cls(nrows, len(cols), cols)

    def to_dense(self):
        out = np.zeros((self.nrows, self.ncols), dtype=object)
        for j, col in enumerate(self.cols):
            for i, v in col.items():
                out[i, j] = v
        return out

    def rows(self) -> list[dict]:
        out = [dict() for _ in range(self.nrows)]
        for j, col in enumerate(self.cols):
            for i, v in col.items():
                out[i][j] = v
        return out

    def transpose(self):
        return SparseMatrix(self.ncols, self.nrows, self.rows())

    T = property(transpose)

    def is_zero(self):
        return all(not c for c in self.cols)

    def matmul(self, other: "SparseMatrix", field=QQ) -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        left = self.cols
        out = []
        for col in other.cols:
            acc: dict = {}
            for k, b in col.items():
                for i, a in left[k].items():
                    acc[i] = acc.get(i, 0) + a * b
            out.append(_clean(acc, field))
        return SparseMatrix(self.nrows, other.ncols, out)

    __matmul__ = matmul

    def apply(self, vec, field=QQ):
        vec = np.asarray(vec, dtype=object)
        out = np.zeros(self.nrows, dtype=object)
        for j in np.flatnonzero(vec != 0).tolist():
            x = vec[j]
            for i, a in self.cols[j].items():
                out[i] += a * x
        return field.normalize(out)

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz})"


def _clean(acc: dict, field) -> dict:
    if field.characteristic:
        p = field.characteristic
        return {k: v % p for k, v in acc.items() if v % p}
    return {k: _norm_q(v) for k, v in acc.items() if v != 0}


def hstack(mats: Sequence[SparseMatrix]) -> SparseMatrix:
    if not mats:
        raise DimensionMismatch("nothing to stack")
    nrows = mats[0].nrows
    cols = []
    for m in mats:
        if m.nrows != nrows:
            raise DimensionMismatch("row counts differ in hstack")
        cols.extend(m.cols)
    return SparseMatrix(nrows, len(cols), cols)


def as_sparse(m) -> SparseMatrix:
    if isinstance(m, SparseMatrix):
        return m
    return SparseMatrix.from_dense(m)


def _integral_vector(vec: dict) -> dict:
    """Scale a rational vector to a primitive-ish integer vector (same span)."""
    den = 1
    for v in vec.values():
        if isinstance(v, Fraction) and v.denominator != 1:
            den = den * v.denominator // gcd(den, v.denominator)
    if den == 1:
        return {k: int(v) for k, v in vec.items() if v != 0}
    return {k: int(v * den) for k, v in vec.items() if v != 0}


def _vectors(m) -> tuple[list[dict], int]:
    """Column dicts of ``m`` and their length, whichever representation."""
    if isinstance(m, SparseMatrix):
        return m.cols, m.nrows
    arr = np.asarray(m, dtype=object)
    if arr.ndim != 2:
        raise DimensionMismatch("expected a matrix")
    s = SparseMatrix.from_dense(arr)
    return s.cols, s.nrows


def rank(m, field=QQ) -> int:
    """Exact rank.  Dense Bareiss below ``DENSE_LIMIT`` entries, sparse above."""
    if isinstance(m, SparseMatrix):
        nrows, ncols = m.shape
        dense = nrows * ncols <= DENSE_LIMIT and m.nnz * 4 > nrows * ncols
        if not dense:
            return span_rank(m.cols, field)
        m = m.to_dense()
    arr = np.asarray(m, dtype=object)
    if arr.ndim != 2:
        raise DimensionMismatch("expected a matrix")
    if arr.size == 0:
        return 0
    if arr.size > DENSE_LIMIT:
        return span_rank(SparseMatrix.from_dense(arr).cols, field)
    if field.characteristic:
        ints = np.array([[field(x) for x in row] for row in arr.tolist()], dtype=np.int64)
        return kernels.rank_mod_p(ints, field.characteristic)
    rows = [
        list(_integral_vector(dict(enumerate(row))).get(j, 0) for j in range(arr.shape[1]))
        for row in arr.tolist()
    ]
    return kernels.bareiss_rank(rows, arr.shape[1])


def span_rank(vectors: Iterable[dict], field=QQ) -> int:
    """Dimension of the span of sparse vectors (dicts index -> value)."""
    return len(_echelon(vectors, field))


def _echelon(vectors: Iterable[dict], field) -> dict:
    if field.characteristic:
        p = field.characteristic
        rows = [{k: field(v) for k, v in vec.items()} for vec in vectors]
        return kernels.sparse_echelon(rows, p)
    return kernels.sparse_echelon([_integral_vector(v) for v in vectors], 0)


def rref(m, field=QQ) -> tuple[list[dict], list[int]]:
    """Reduced row echelon form of ``m`` as sparse rows (pivot entries 1)."""
    if isinstance(m, SparseMatrix):
        rows = m.rows()
        ncols = m.ncols
    else:
        arr = np.asarray(m, dtype=object)
        if arr.ndim != 2:
            raise DimensionMismatch("expected a matrix")
        rows = [{j: x for j, x in enumerate(r) if x != 0} for r in arr.tolist()]
        ncols = arr.shape[1]
    return _rref_rows(rows, field), ncols


def _rref_rows(rows: list[dict], field) -> list[tuple[int, dict]]:
    ech = _echelon(rows, field)
    piv = sorted(ech)
    p = field.characteristic
    red: dict[int, dict] = {}
    for c in piv:
        r = ech[c]
        if p:
            red[c] = dict(r)
        else:
            lead = r[c]
            red[c] = {k: _norm_q(Fraction(v, lead)) for k, v in r.items()}
    for idx in range(len(piv) - 1, -1, -1):
        c = piv[idx]
        rc = red[c]
        for c2 in piv[:idx]:
            r2 = red[c2]
            a = r2.get(c)
            if not a:
                continue
            for k, v in rc.items():
                nv = r2.get(k, 0) - a * v
                if p:
                    nv %= p
                if nv:
                    r2[k] = nv if p else _norm_q(nv)
                else:
                    r2.pop(k, None)
    return [(c, red[c]) for c in piv]


def kernel_basis(m, field=QQ) -> list[np.ndarray]:
    """Basis of the right kernel ``{v : m v = 0}`` as object vectors."""
    if isinstance(m, SparseMatrix):
        rows, ncols = m.rows(), m.ncols
    else:
        arr = np.asarray(m, dtype=object)
        if arr.ndim != 2:
            raise DimensionMismatch("expected a matrix")
        rows = [{j: x for j, x in enumerate(r) if x != 0} for r in arr.tolist()]
        ncols = arr.shape[1]
    red = _rref_rows(rows, field)
    pivots = {c for c, _ in red}
    p = field.characteristic
    basis = []
    for free in range(ncols):
        if free in pivots:
            continue
        v = np.zeros(ncols, dtype=object)
        v[free] = 1
        for c, r in red:
            a = r.get(free)
            if a:
                v[c] = (-a) % p if p else -a
        basis.append(v)
    return basis


def solve(m, b, field=QQ):
    """One solution ``x`` of ``m x = b``, or ``None`` if inconsistent."""
    s = as_sparse(m)
    b = np.asarray(b, dtype=object)
    if b.shape != (s.nrows,):
        raise DimensionMismatch(f"right-hand side has shape {b.shape}, expected ({s.nrows},)")
    rows = s.rows()
    n = s.ncols
    for i, r in enumerate(rows):
        if b[i] != 0:
            r[n] = b[i]
    red = _rref_rows(rows, field)
    x = np.zeros(n, dtype=object)
    for c, r in red:
        if c == n:
            return None
        x[c] = r.get(n, 0)
    return field.normalize(x)


def in_span(vectors: Sequence[dict], target: dict, field=QQ) -> bool:
    base = span_rank(vectors, field)
    return span_rank(list(vectors) + [target], field) == base


def quotient_dim(z, b, field=QQ) -> int:
    """dim(Z / B), raising ImageExceedsKernel if B does not fit inside Z.

    With two integers this is ``z - b`` for counts (kernel dim, image dim).
    Otherwise ``z`` and ``b`` are matrices whose columns span the subspaces
    and containment is checked exactly.
    """
    if isinstance(z, (int, np.integer)) and isinstance(b, (int, np.integer)):
        if b > z or b < 0:
            raise ImageExceedsKernel(f"image dimension {b} exceeds kernel dimension {z}")
        return int(z - b)
    zc, zn = _vectors(z)
    bc, bn = _vectors(b)
    if zc and bc and zn != bn:
        raise DimensionMismatch("subspaces live in different ambient spaces")
    rz = span_rank(zc, field)
    rb = span_rank(bc, field)
    if span_rank(list(zc) + list(bc), field) != rz:
        raise ImageExceedsKernel("span of B is not contained in span of Z")
    return rz - rb


def format_vector(vec, field=QQ) -> list[str]:
    return [field.format(x) for x in np.asarray(vec, dtype=object).ravel().tolist()]
