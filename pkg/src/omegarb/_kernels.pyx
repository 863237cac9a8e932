# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled elimination kernels (same API as ``_kernels_py``)."""

import numpy as np
cimport numpy as cnp
from math import gcd

cnp.import_array()

ctypedef long long i64


def bareiss_rank(rows, Py_ssize_t ncols):
    cdef list m = [list(src) for src in rows]
    cdef Py_ssize_t nrows = len(m)
    cdef Py_ssize_t rank = 0, c, r, j, piv
    cdef list row, prow
    cdef object p, a, prev = 1
    for c in range(ncols):
        if rank == nrows:
            break
        piv = -1
        for r in range(rank, nrows):
            if (<list>m[r])[c] != 0:
                piv = r
                break
        if piv < 0:
            continue
        if piv != rank:
            m[piv], m[rank] = m[rank], m[piv]
        prow = <list>m[rank]
        p = prow[c]
        for r in range(rank + 1, nrows):
            row = <list>m[r]
            a = row[c]
            if a == 0:
                for j in range(c + 1, ncols):
                    row[j] = (row[j] * p) // prev
            else:
                for j in range(c + 1, ncols):
                    row[j] = (row[j] * p - a * prow[j]) // prev
            row[c] = 0
        prev = p
        rank += 1
    return rank


cdef dict _reduce_content(dict row):
    cdef object g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        for k in row:
            row[k] //= g
    return row


def sparse_echelon(rows, i64 p=0):
    cdef dict pivots = {}
    cdef dict r, prow
    cdef object a, b, g, fa, fb, nv, k, v
    for src in rows:
        if p:
            r = {k: v % p for k, v in src.items() if v % p}
        else:
            r = {k: v for k, v in src.items() if v}
        while r:
            c = min(r)
            prow = pivots.get(c)
            if prow is None:
                if p:
                    inv = pow(r[c], p - 2, p)
                    r = {k: (v * inv) % p for k, v in r.items()}
                else:
                    r = _reduce_content(r)
                pivots[c] = r
                break
            a = r[c]
            if p:
                for k, v in prow.items():
                    nv = (r.get(k, 0) - a * v) % p
                    if nv:
                        r[k] = nv
                    else:
                        r.pop(k, None)
            else:
                b = prow[c]
                g = gcd(a, b)
                fa = b // g
                fb = a // g
                if fa != 1:
                    for k in r:
                        r[k] *= fa
                for k, v in prow.items():
                    nv = r.get(k, 0) - fb * v
                    if nv:
                        r[k] = nv
                    else:
                        r.pop(k, None)
                if r:
                    r = _reduce_content(r)
    return pivots


def rref_mod_p(mat, i64 p):
    cdef cnp.ndarray[i64, ndim=2] arr = np.array(mat, dtype=np.int64) % p
    cdef i64[:, ::1] a = arr
    cdef Py_ssize_t nrows = a.shape[0], ncols = a.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, piv
    cdef i64 inv, f, t
    pivots = []
    for c in range(ncols):
        if r == nrows:
            break
        piv = -1
        for i in range(r, nrows):
            if a[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(ncols):
                t = a[r, j]
                a[r, j] = a[piv, j]
                a[piv, j] = t
        inv = pow(int(a[r, c]), p - 2, p)
        for j in range(ncols):
            a[r, j] = (a[r, j] * inv) % p
        for i in range(nrows):
            if i != r and a[i, c] != 0:
                f = a[i, c]
                for j in range(ncols):
                    a[i, j] = (a[i, j] - f * a[r, j]) % p
                    if a[i, j] < 0:
                        a[i, j] += p
        pivots.append(c)
        r += 1
    return arr, pivots


def rank_mod_p(mat, i64 p):
    return len(rref_mod_p(mat, p)[1])
