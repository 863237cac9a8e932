"""Pure-Python elimination kernels.

Reference implementation of the routines in ``_kernels.pyx``.  Both modules
expose the same four functions; ``omegarb.kernels`` picks one at import.

Rows are lists of Python ints (dense) or dicts ``{col: int}`` (sparse).
Nothing here knows about fractions: callers clear denominators first.
"""

from __future__ import annotations

from math import gcd


def bareiss_rank(rows, ncols):
    """Rank of a dense integer matrix by fraction-free Bareiss elimination."""
    m = [list(r) for r in rows]
    nrows = len(m)
    rank = 0
    prev = 1
    for c in range(ncols):
        if rank == nrows:
            break
        piv = -1
        for r in range(rank, nrows):
            if m[r][c] != 0:
                piv = r
                break
        if piv < 0:
            continue
        if piv != rank:
            m[piv], m[rank] = m[rank], m[piv]
        prow = m[rank]
        p = prow[c]
        for r in range(rank + 1, nrows):
            row = m[r]
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


def _reduce_content(row):
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        for k in row:
            row[k] //= g
    return row


def sparse_echelon(rows, p=0):
    """Incremental echelon form of sparse rows.

    Returns ``{pivot_col: row}`` where each stored row has leading column
    ``pivot_col``.  With ``p > 0`` arithmetic is modulo ``p`` and pivots are
    scaled to 1; with ``p == 0`` rows stay integral and are kept primitive.
    """
    pivots = {}
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
                # prow[c] == 1
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


def rank_mod_p(mat, p):
    """Rank of a dense int64 numpy matrix modulo the prime ``p``."""
    return len(rref_mod_p(mat, p)[1])


def rref_mod_p(mat, p):
    """Reduced row echelon form modulo ``p``; returns ``(R, pivot_cols)``."""
    import numpy as np

    a = np.array(mat, dtype=np.int64) % p
    nrows, ncols = a.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        for i in range(nrows):
            if i != r and a[i, c]:
                a[i] = (a[i] - a[i, c] * a[r]) % p
        pivots.append(c)
        r += 1
    return a, pivots
