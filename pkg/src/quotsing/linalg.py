"""Exact integer/rational linear algebra on small dense blocks.

Every module piece in this package is a subspace of Q^n spanned by integer
row vectors, so the work reduces to rank, row-space and kernel computations
on integer matrices.  These go through FLINT's fraction-free routines.
"""

from __future__ import annotations

from math import gcd

import numpy as np
from flint import fmpz_mat


def to_mat(rows, ncols: int) -> fmpz_mat:
    if not rows:
        return fmpz_mat(0, ncols, [])
    return fmpz_mat(len(rows), ncols, [x for row in rows for x in row])


def rank(rows, ncols: int) -> int:
    if not rows or ncols == 0:
        return 0
    return to_mat(rows, ncols).rank()


def _primitive(row):
    g = 0
    for x in row:
        if x:
            g = gcd(g, x)
    if g == 0:
        return None
    lead = next(x for x in row if x)
    if lead < 0:
        g = -g
    return [x // g for x in row]


def row_basis(rows, ncols: int) -> list:
    """Canonical basis of the row space: reduced echelon rows, scaled primitive."""
    if not rows or ncols == 0:
        return []
    R, _den, rk = to_mat(rows, ncols).rref()
    out = []
    for k in range(rk):
        row = [int(R[k, c]) for c in range(ncols)]
        prim = _primitive(row)
        if prim is not None:
            out.append(prim)
    return out


def pivot_rows(rows, ncols: int) -> list:
    """Indices of the rows kept by greedy left-to-right independence."""
    if not rows or ncols == 0:
        return []
    T = to_mat(rows, ncols).transpose()
    R, _den, rk = T.rref()
    pivots = []
    nrows = len(rows)
    for k in range(rk):
        for c in range(nrows):
            if R[k, c] != 0:
                pivots.append(c)
                break
    return pivots


def left_kernel(rows, ncols: int) -> list:
    """Integer basis of {v : sum_i v_i rows[i] = 0}."""
    n = len(rows)
    if n == 0:
        return []
    if ncols == 0:
        return [[1 if k == j else 0 for k in range(n)] for j in range(n)]
    N, nullity = to_mat(rows, ncols).transpose().nullspace()
    out = []
    for c in range(nullity):
        v = _primitive([int(N[r, c]) for r in range(n)])
        out.append(v)
    return row_basis(out, n) if out else []


def combine(coeffs, rows, ncols: int) -> list:
    out = [0] * ncols
    for c, row in zip(coeffs, rows):
        if c:
            for k, x in enumerate(row):
                if x:
                    out[k] += c * x
    return out


def gram_rank(A) -> int:
    """Exact rank of an integer numpy matrix through its smaller Gram matrix.

    Over the rationals rank(A) = rank(A^T A) = rank(A A^T), and the Gram
    matrix is at most min(rows, cols) square.  The product is taken in
    float64 when every partial sum stays below 2^53 (so it is exact), in
    int64 below 2^62, and with Python integers beyond that.
    """
    if A.size == 0:
        return 0
    rows, cols = A.shape
    big = int(np.abs(A).max())
    if big == 0:
        return 0
    bound = big * big * max(rows, cols)
    M = A if cols <= rows else A.T
    if bound < 2**53:
        F = M.astype(np.float64)
        gram = (F.T @ F).astype(np.int64)
    elif bound < 2**62:
        gram = M.T @ M
    else:
        obj = M.astype(object)
        gram = obj.T @ obj
    n = gram.shape[0]
    return fmpz_mat(gram.tolist()).rank() if n else 0


def _intersect(U, V, n):
    if not U or not V:
        return []
    combos = left_kernel(U + V, n)
    return row_basis([combine(c[: len(U)], U, n) for c in combos], n)


def adapted_basis(subspaces, n: int):
    """A basis of Q^n in which every given subspace is spanned by basis vectors.

    Returns (basis, members) where members[j] lists the indices of the basis
    vectors spanning subspaces[j], or None when the greedy search finds no
    such basis.  Subspaces are lists of integer rows.
    """
    family = {}
    pending = [row_basis(list(S), n) for S in subspaces]
    while pending:
        S = pending.pop()
        key = tuple(map(tuple, S))
        if key in family:
            continue
        for T in list(family.values()):
            pending.append(_intersect(S, T, n))
        family[key] = S
    basis = []
    for S in sorted(family.values(), key=len):
        inside = [b for b in basis if rank(S + [b], n) == len(S)]
        for v in S:
            if len(inside) == len(S):
                break
            if rank(basis + [v], n) > len(basis):
                basis.append(v)
                inside.append(v)
    for k in range(n):
        e = [1 if j == k else 0 for j in range(n)]
        if rank(basis + [e], n) > len(basis):
            basis.append(e)
    members = []
    for S in subspaces:
        S = row_basis(list(S), n)
        inside = [i for i, b in enumerate(basis) if rank(S + [b], n) == len(S)]
        if len(inside) != len(S):
            return None
        members.append(inside)
    return basis, members
