"""Semigroup-indexed multilinear maps, partial compositions and brackets.

An ``OmegaMultiMap`` of arity n holds one tensor per n-tuple of semigroup
elements, stored densely as an object array of shape

    (k,)*n + (target_dim, source_dim_1, ..., source_dim_n)

with k the semigroup order.  Composition in slot i evaluates the inner map
on the sub-tuple of indices it consumes and the outer map on the tuple where
that sub-tuple is replaced by its product.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    SemigroupNotAssociative,
    ShapeError,
    SlotMembershipViolation,
    SlotOutOfRange,
)
from .exactla import QQ


class FiniteSemigroup:
    """Finite semigroup given by a multiplication table on ``range(k)``."""

    def __init__(self, table, names: Sequence[str] | None = None):
        t = np.asarray(table, dtype=np.int64)
        if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
            raise ShapeError("semigroup table must be a non-empty square array")
        k = t.shape[0]
        if t.min() < 0 or t.max() >= k:
            raise ShapeError("semigroup table entries must index elements")
        left = t[t, :]  # (a*b)*c  -> left[a, b, c] = t[t[a, b], c]
        right = t[:, t]  # a*(b*c) -> right[a, b, c] = t[a, t[b, c]]
        bad = np.argwhere(left != right)
        if bad.size:
            raise SemigroupNotAssociative(tuple(int(x) for x in bad[0]))
        self.table = t
        self.table.setflags(write=False)
        self.size = k
        self.names = list(names) if names is not None else [str(i) for i in range(k)]
        if len(self.names) != k:
            raise ShapeError("need one name per semigroup element")
        self._products: dict[int, np.ndarray] = {}

    @classmethod
    def trivial(cls):
        return cls([[0]], names=["e"])

    @classmethod
    def cyclic(cls, n: int):
        return cls([[(a + b) % n for b in range(n)] for a in range(n)])

    @classmethod
    def left_zero(cls, n: int):
        return cls([[a for _ in range(n)] for a in range(n)])

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def product(self, alphas: Sequence[int]) -> int:
        it = iter(alphas)
        acc = next(it)
        for b in it:
            acc = self.table[acc, b]
        return int(acc)

    def product_array(self, m: int) -> np.ndarray:
        """Array of shape ``(k,)*m`` holding the product of each m-tuple."""
        arr = self._products.get(m)
        if arr is None:
            if m < 1:
                raise ValueError("need m >= 1")
            arr = np.arange(self.size)
            for _ in range(m - 1):
                arr = self.table[arr[..., None], np.arange(self.size)]
            self._products[m] = arr
        return arr

    def tuples(self, n: int):
        return itertools.product(range(self.size), repeat=n)

    def is_commutative(self) -> bool:
        return bool((self.table == self.table.T).all())

    def __eq__(self, other):
        return isinstance(other, FiniteSemigroup) and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash(self.table.tobytes())

    def __repr__(self):
        return f"FiniteSemigroup(size={self.size})"


class OmegaMultiMap:
    """Family of multilinear maps indexed by tuples of semigroup elements."""

    __slots__ = ("semigroup", "data", "field")

    def __init__(self, semigroup: FiniteSemigroup, data, field=QQ):
        self.semigroup = semigroup
        self.field = field
        data = np.asarray(data, dtype=object)
        if data.ndim < 1:
            raise ShapeError("data needs at least a target axis")
        self.data = data
        n = self.arity
        if n < 0 or data.shape[:n] != (semigroup.size,) * n:
            raise ShapeError(
                f"leading axes {data.shape[:max(n, 0)]} do not match semigroup size {semigroup.size}"
            )

    # shape bookkeeping -------------------------------------------------
    @property
    def arity(self) -> int:
        return (self.data.ndim - 1) // 2

    @property
    def degree(self) -> int:
        return self.arity - 1

    @property
    def target_dim(self) -> int:
        return self.data.shape[self.arity]

    @property
    def source_dims(self) -> tuple[int, ...]:
        return tuple(self.data.shape[self.arity + 1:])

    # constructors ------------------------------------------------------
    @classmethod
    def zeros(cls, semigroup, target_dim: int, source_dims: Sequence[int], field=QQ):
        n = len(source_dims)
        shape = (semigroup.size,) * n + (target_dim,) + tuple(source_dims)
        return cls(semigroup, np.zeros(shape, dtype=object), field)

    @classmethod
    def constant(cls, semigroup, tensor, field=QQ):
        """Same tensor for every semigroup tuple."""
        tensor = field.normalize(np.asarray(tensor, dtype=object))
        n = tensor.ndim - 1
        data = np.broadcast_to(tensor, (semigroup.size,) * n + tensor.shape).copy()
        return cls(semigroup, data, field)

    @classmethod
    def identity(cls, semigroup, dim: int, field=QQ):
        eye = np.zeros((dim, dim), dtype=object)
        for i in range(dim):
            eye[i, i] = 1
        return cls.constant(semigroup, eye, field)

    @classmethod
    def from_components(cls, semigroup, components: dict, target_dim: int,
                        source_dims: Sequence[int], field=QQ):
        out = cls.zeros(semigroup, target_dim, source_dims, field)
        for alphas, tensor in components.items():
            alphas = tuple(alphas)
            if len(alphas) != out.arity:
                raise ShapeError(f"index tuple {alphas} has wrong length")
            t = np.asarray(tensor, dtype=object)
            if t.shape != out.data.shape[out.arity:]:
                raise ShapeError(f"component at {alphas} has shape {t.shape}")
            out.data[alphas] = field.normalize(t)
        return out

    # access ------------------------------------------------------------
    def component(self, alphas: Sequence[int]) -> np.ndarray:
        alphas = tuple(int(a) for a in alphas)
        if len(alphas) != self.arity:
            raise ShapeError(f"expected {self.arity} indices, got {len(alphas)}")
        return self.data[alphas]

    def components(self):
        for alphas in self.semigroup.tuples(self.arity):
            yield alphas, self.data[alphas]

    def copy(self):
        return OmegaMultiMap(self.semigroup, self.data.copy(), self.field)

    # arithmetic --------------------------------------------------------
    def _check_like(self, other):
        if not isinstance(other, OmegaMultiMap):
            return NotImplemented
        if self.data.shape != other.data.shape:
            raise DimensionMismatch(f"shapes {self.data.shape} and {other.data.shape} differ")
        return True

    def __add__(self, other):
        if self._check_like(other) is NotImplemented:
            return NotImplemented
        return OmegaMultiMap(self.semigroup, self.field.normalize(self.data + other.data), self.field)

    def __sub__(self, other):
        if self._check_like(other) is NotImplemented:
            return NotImplemented
        return OmegaMultiMap(self.semigroup, self.field.normalize(self.data - other.data), self.field)

    def __neg__(self):
        return OmegaMultiMap(self.semigroup, self.field.normalize(-self.data), self.field)

    def scale(self, c):
        c = self.field(c)
        return OmegaMultiMap(self.semigroup, self.field.normalize(self.data * c), self.field)

    def __rmul__(self, c):
        return self.scale(c)

    def is_zero(self) -> bool:
        return not np.any(self.data != 0)

    def __eq__(self, other):
        if not isinstance(other, OmegaMultiMap):
            return NotImplemented
        return self.data.shape == other.data.shape and not np.any(self.data != other.data)

    __hash__ = None  # mutable container

    def __repr__(self):
        return (f"OmegaMultiMap(arity={self.arity}, target={self.target_dim}, "
                f"sources={self.source_dims}, |Omega|={self.semigroup.size})")


def _einsum_compose(fdata, gdata, P, n, m, i):
    """Core of f o_i g on raw arrays (i is 1-based)."""
    f_exp = np.take(fdata, P, axis=i - 1)
    # axis labels
    w = n + m - 1  # output semigroup axes
    om = list(range(w))
    t = w
    s_f = list(range(w + 1, w + 1 + n))
    u = list(range(w + 1 + n, w + 1 + n + m))
    f_lab = om + [t] + s_f
    g_lab = om[i - 1:i - 1 + m] + [s_f[i - 1]] + u
    out = om + [t] + s_f[: i - 1] + u + s_f[i:]
    return np.einsum(f_exp, f_lab, gdata, g_lab, out)


def compose_at(f: OmegaMultiMap, g: OmegaMultiMap, i: int) -> OmegaMultiMap:
    """Partial composition ``f o_i g`` (slot ``i`` is 1-based)."""
    n, m = f.arity, g.arity
    if not 1 <= i <= n:
        raise SlotOutOfRange(f"slot {i} outside 1..{n}")
    if f.semigroup is not g.semigroup and f.semigroup != g.semigroup:
        raise DimensionMismatch("maps are indexed by different semigroups")
    if g.target_dim != f.source_dims[i - 1]:
        raise DimensionMismatch(
            f"inner target dim {g.target_dim} != outer slot-{i} dim {f.source_dims[i - 1]}"
        )
    if m == 0:
        raise ShapeError("inner map of arity 0 is not supported")
    P = f.semigroup.product_array(m)
    data = _einsum_compose(f.data, g.data, P, n, m, i)
    return OmegaMultiMap(f.semigroup, f.field.normalize(data), f.field)


def koszul_sign(degrees: Sequence[int], sigma: Sequence[int]) -> int:
    """Koszul sign of reordering x_1..x_n into x_sigma(1)..x_sigma(n).

    ``sigma`` is a 0-based one-line permutation; the sign satisfies
    x_1 ... x_n = sign * x_sigma(1) ... x_sigma(n) in the graded symmetric
    algebra.
    """
    n = len(sigma)
    if sorted(sigma) != list(range(n)) or len(degrees) != n:
        raise ValueError("sigma must be a permutation of range(len(degrees))")
    odd = 0
    for a in range(n):
        for b in range(a + 1, n):
            if sigma[a] > sigma[b]:
                odd += degrees[sigma[a]] * degrees[sigma[b]]
    return -1 if odd % 2 else 1


def _sgn(e: int) -> int:
    return -1 if e % 2 else 1


def gerstenhaber_bracket(f: OmegaMultiMap, g: OmegaMultiMap) -> OmegaMultiMap:
    """Graded commutator of the pre-Lie composition on endomorphism maps."""
    m, n = f.arity, g.arity
    dims = {f.target_dim, g.target_dim, *f.source_dims, *g.source_dims}
    if len(dims) != 1:
        raise DimensionMismatch("bracket needs maps on a single space")
    acc = None
    for i in range(1, m + 1):
        term = compose_at(f, g, i).data
        acc = term * _sgn((i - 1) * (n - 1)) if acc is None else acc + term * _sgn((i - 1) * (n - 1))
    s = _sgn((m - 1) * (n - 1))
    for i in range(1, n + 1):
        acc = acc - compose_at(g, f, i).data * (s * _sgn((i - 1) * (m - 1)))
    return OmegaMultiMap(f.semigroup, f.field.normalize(acc), f.field)


# ---------------------------------------------------------------------------
# subsets of slots


@lru_cache(maxsize=None)
def subsets(n: int) -> tuple[tuple[int, ...], ...]:
    """All subsets of {1..n}, by size then lexicographically (the order used
    for canonical coordinates)."""
    return tuple(c for k in range(n + 1) for c in itertools.combinations(range(1, n + 1), k))


def subset_rank(I: Sequence[int], n: int) -> int:
    return _subset_positions(n)[tuple(I)]


@lru_cache(maxsize=None)
def _subset_positions(n):
    return {I: j for j, I in enumerate(subsets(n))}


def splice(I: Sequence[int], J: Sequence[int], k: int, n: int, m: int) -> tuple[int, ...]:
    """Slots of A after inserting a map of arity m (A-slots J) into slot k
    of a map of arity n (A-slots I).  Slot k itself is dropped."""
    if not 1 <= k <= n:
        raise SlotOutOfRange(f"slot {k} outside 1..{n}")
    if any(not 1 <= p <= n for p in I) or any(not 1 <= q <= m for q in J):
        raise SlotOutOfRange("subset element out of range")
    out = [p for p in I if p < k]
    out += [k + q - 1 for q in J]
    out += [p + m - 1 for p in I if p > k]
    return tuple(sorted(out))


def subset_combinator(I, J, k: int, n: int, m: int, variant: str) -> tuple[int, ...]:
    """``variant='member'`` requires k in I, ``'gap'`` requires k not in I."""
    if variant == "member":
        if k not in I:
            raise SlotMembershipViolation(f"slot {k} is not in {tuple(I)}")
    elif variant == "gap":
        if k in I:
            raise SlotMembershipViolation(f"slot {k} is in {tuple(I)}")
    else:
        raise ValueError("variant must be 'member' or 'gap'")
    return splice(I, J, k, n, m)


# ---------------------------------------------------------------------------
# maps on W = A + V


class MixedMultiMap:
    """Multilinear map on W = A (+) V stored densely on W.

    Basis of W lists A first.  ``block(I, target)`` returns the component
    with A in the slots of I, V elsewhere, and values in ``target``
    ('A' or 'V').  Blocks are views into the dense tensor.
    """

    __slots__ = ("semigroup", "dim_a", "dim_v", "data", "field")

    def __init__(self, semigroup, dim_a: int, dim_v: int, data, field=QQ):
        self.semigroup = semigroup
        self.dim_a = int(dim_a)
        self.dim_v = int(dim_v)
        self.field = field
        self.data = np.asarray(data, dtype=object)
        w = self.dim_a + self.dim_v
        n = (self.data.ndim - 1) // 2
        if self.data.shape != (semigroup.size,) * n + (w,) * (n + 1):
            raise ShapeError(f"data shape {self.data.shape} is not a map on W of dim {w}")

    @property
    def arity(self):
        return (self.data.ndim - 1) // 2

    @property
    def degree(self):
        return self.arity - 1

    @property
    def dim_w(self):
        return self.dim_a + self.dim_v

    @classmethod
    def zeros(cls, semigroup, dim_a, dim_v, arity, field=QQ):
        w = dim_a + dim_v
        shape = (semigroup.size,) * arity + (w,) * (arity + 1)
        return cls(semigroup, dim_a, dim_v, np.zeros(shape, dtype=object), field)

    def as_omega(self) -> OmegaMultiMap:
        return OmegaMultiMap(self.semigroup, self.data, self.field)

    @classmethod
    def from_omega(cls, f: OmegaMultiMap, dim_a, dim_v):
        return cls(f.semigroup, dim_a, dim_v, f.data, f.field)

    def _range(self, which):
        if which == "A":
            return slice(0, self.dim_a)
        if which == "V":
            return slice(self.dim_a, self.dim_w)
        raise ValueError("target must be 'A' or 'V'")

    def _block_index(self, I, target):
        n = self.arity
        Iset = set(I)
        if any(not 1 <= p <= n for p in Iset):
            raise SlotOutOfRange(f"subset {tuple(I)} outside 1..{n}")
        return (slice(None),) * n + (self._range(target),) + tuple(
            self._range("A" if j in Iset else "V") for j in range(1, n + 1)
        )

    def block(self, I, target) -> OmegaMultiMap:
        return OmegaMultiMap(self.semigroup, self.data[self._block_index(I, target)], self.field)

    def set_block(self, I, target, value):
        arr = value.data if isinstance(value, OmegaMultiMap) else value
        self.data[self._block_index(I, target)] = arr

    def add_block(self, I, target, value):
        arr = value.data if isinstance(value, OmegaMultiMap) else value
        self.data[self._block_index(I, target)] += arr

    def blocks(self):
        n = self.arity
        for I in subsets(n):
            for t in ("A", "V"):
                yield I, t, self.block(I, t)

    def in_subalgebra(self) -> bool:
        """Membership in the subspace where A-valued parts only take all-A
        inputs and V-valued parts never do."""
        full = tuple(range(1, self.arity + 1))
        for I, t, b in self.blocks():
            if t == "A" and I != full and not b.is_zero():
                return False
            if t == "V" and I == full and not b.is_zero():
                return False
        return True

    def copy(self):
        return MixedMultiMap(self.semigroup, self.dim_a, self.dim_v, self.data.copy(), self.field)

    def _wrap(self, data):
        return MixedMultiMap(self.semigroup, self.dim_a, self.dim_v, self.field.normalize(data), self.field)

    def __add__(self, other):
        if self.data.shape != other.data.shape:
            raise DimensionMismatch("shapes differ")
        return self._wrap(self.data + other.data)

    def __sub__(self, other):
        if self.data.shape != other.data.shape:
            raise DimensionMismatch("shapes differ")
        return self._wrap(self.data - other.data)

    def __neg__(self):
        return self._wrap(-self.data)

    def scale(self, c):
        return self._wrap(self.data * self.field(c))

    def is_zero(self):
        return not np.any(self.data != 0)

    def __eq__(self, other):
        if not isinstance(other, MixedMultiMap):
            return NotImplemented
        return self.data.shape == other.data.shape and not np.any(self.data != other.data)

    __hash__ = None

    def __repr__(self):
        return f"MixedMultiMap(arity={self.arity}, dim_a={self.dim_a}, dim_v={self.dim_v})"


def bracket_w(f: MixedMultiMap, g: MixedMultiMap) -> MixedMultiMap:
    """Gerstenhaber bracket computed on the dense tensors over W."""
    if (f.dim_a, f.dim_v) != (g.dim_a, g.dim_v):
        raise DimensionMismatch("maps live on different W")
    b = gerstenhaber_bracket(f.as_omega(), g.as_omega())
    return MixedMultiMap(f.semigroup, f.dim_a, f.dim_v, b.data, f.field)


def mixed_bracket(f: MixedMultiMap, g: MixedMultiMap) -> MixedMultiMap:
    """Bracket assembled block by block from the four composition sums.

    Agrees with :func:`bracket_w` on all inputs; used as an independent
    path in tests and when only block data is trusted.
    """
    if (f.dim_a, f.dim_v) != (g.dim_a, g.dim_v):
        raise DimensionMismatch("maps live on different W")
    m, n = f.arity, g.arity
    out = MixedMultiMap.zeros(f.semigroup, f.dim_a, f.dim_v, m + n - 1, f.field)

    def pre_lie(x, y, mx, ny, coeff):
        # coeff * sum_k (-1)^{(k-1)(ny-1)} x o_k y, block by block
        for I1 in subsets(mx):
            for t1 in ("A", "V"):
                xb = x.block(I1, t1)
                if xb.is_zero():
                    continue
                for k in range(1, mx + 1):
                    s = coeff * _sgn((k - 1) * (ny - 1))
                    inner_t = "A" if k in I1 else "V"
                    for I2 in subsets(ny):
                        yb = y.block(I2, inner_t)
                        if yb.is_zero():
                            continue
                        I = splice(I1, I2, k, mx, ny)
                        out.add_block(I, t1, compose_at(xb, yb, k).data * s)

    pre_lie(f, g, m, n, 1)
    pre_lie(g, f, n, m, -_sgn((m - 1) * (n - 1)))
    out.data = f.field.normalize(out.data)
    return out


def embed_a_valued(theta: OmegaMultiMap, dim_a: int, dim_v: int) -> MixedMultiMap:
    """Place a map V^{(x)p} -> A as the block with no A-slots and A-values."""
    p = theta.arity
    if theta.target_dim != dim_a or any(d != dim_v for d in theta.source_dims):
        raise DimensionMismatch("theta must map V^p to A")
    out = MixedMultiMap.zeros(theta.semigroup, dim_a, dim_v, p, theta.field)
    out.set_block((), "A", theta)
    return out


def lift_endomorphism(f: OmegaMultiMap, dim_a: int, dim_v: int, I, target) -> MixedMultiMap:
    out = MixedMultiMap.zeros(f.semigroup, dim_a, dim_v, f.arity, f.field)
    out.set_block(I, target, f)
    return out


def direct_sum_linear(a: OmegaMultiMap, v: OmegaMultiMap) -> MixedMultiMap:
    """Block-diagonal arity-1 map a (+) v on W."""
    if a.arity != 1 or v.arity != 1:
        raise ShapeError("direct sum of linear maps only")
    out = MixedMultiMap.zeros(a.semigroup, a.target_dim, v.target_dim, 1, a.field)
    out.set_block((1,), "A", a)
    out.set_block((), "V", v)
    return out


def sum_maps(maps: Iterable):
    it = iter(maps)
    acc = next(it)
    for x in it:
        acc = acc + x
    return acc
