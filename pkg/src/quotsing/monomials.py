"""Monomials of k[x_1..x_d] graded by degree and character."""

from __future__ import annotations

import itertools
from functools import lru_cache

from quotsing.weights import Character, WeightGroup


@lru_cache(maxsize=256)
def _count_table(G: WeightGroup, N: int) -> tuple:
    """counts[n][k] = number of degree-n monomials whose character has index k."""
    chars = G.characters()
    nchar = len(chars)
    shift = [[G.index(G.add(c, a)) for c in chars] for a in G.weights]
    # table over 0 variables: only the constant monomial
    table = [[0] * nchar for _ in range(N + 1)]
    table[0][G.index(G.zero)] = 1
    for j in range(G.d):
        step = shift[j]
        new = [[0] * nchar for _ in range(N + 1)]
        # new[n][c] = sum_{e>=0} table[n-e][c - e a_j] computed incrementally:
        # new[n] = table[n] + shift(new[n-1])
        for n in range(N + 1):
            row = list(table[n])
            if n > 0:
                prev = new[n - 1]
                for k in range(nchar):
                    if prev[k]:
                        row[step[k]] += prev[k]
            new[n] = row
        table = new
    return tuple(tuple(row) for row in table)


def count_monomials(G: WeightGroup, n: int, w: Character) -> int:
    if n < 0:
        return 0
    return _count_table(G, max(n, 8))[n][G.index(G.char(w))]


def count_table(G: WeightGroup, N: int) -> dict:
    """The full bigraded count {(n, w): count} for 0 <= n <= N."""
    table = _count_table(G, N)
    chars = G.characters()
    return {(n, c): table[n][k] for n in range(N + 1) for k, c in enumerate(chars)}


def exponents_of_degree(d: int, n: int) -> list:
    """All exponent vectors of length d and total degree n, lexicographically sorted."""
    if d == 0:
        return [()] if n == 0 else []
    out = []
    for first in range(n + 1):
        for rest in exponents_of_degree(d - 1, n - first):
            out.append((first,) + rest)
    return out


def monomial_basis(G: WeightGroup, n: int, w: Character) -> list:
    if n < 0:
        return []
    w = G.char(w)
    return [alpha for alpha in exponents_of_degree(G.d, n) if G.weight(alpha) == w]


def covariant_hilbert(G: WeightGroup, i: Character, N: int) -> list:
    table = _count_table(G, N)
    k = G.index(G.char(i))
    return [table[n][k] for n in range(N + 1)]


def _below(alpha):
    """Exponent vectors beta with 0 <= beta <= alpha componentwise."""
    return itertools.product(*(range(a + 1) for a in alpha))


@lru_cache(maxsize=64)
def invariant_generators(G: WeightGroup) -> tuple:
    """Minimal monomial generators of the invariant ring.

    Irreducible elements of the semigroup of weight-zero exponents; all of
    them have degree at most |G|.
    """
    zero = G.zero
    found = []
    for n in range(1, G.order + 1):
        for alpha in exponents_of_degree(G.d, n):
            if G.weight(alpha) != zero:
                continue
            reducible = False
            for beta in _below(alpha):
                if beta == alpha or not any(beta):
                    continue
                if G.weight(beta) == zero:
                    reducible = True
                    break
            if not reducible:
                found.append(alpha)
    return tuple(found)


def generator_degree_bound(G: WeightGroup) -> int:
    gens = invariant_generators(G)
    return max((sum(g) for g in gens), default=1)
