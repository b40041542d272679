from math import comb

from hypothesis import given, settings
from hypothesis import strategies as st

from quotsing.monomials import (
    count_monomials,
    count_table,
    covariant_hilbert,
    exponents_of_degree,
    invariant_generators,
    monomial_basis,
)
from quotsing.weights import parse_group, validate_group


def molien_counts(m, weights, N):
    """Independent oracle: series coefficients of
    (1/m) sum_t z^(-w t) prod_j (1 - z^(a_j t) q)^(-1)
    with z an m-th root of unity kept symbolic.

    Each factor 1/(1 - z^a q) is the series sum_e z^(a e) q^e.  Products live
    in Z[z]/(z^m - 1), stored as length-m coefficient lists, and the
    character average uses sum_t z^(k t) = m if k = 0 mod m, else 0.
    """
    one = [1] + [0] * (m - 1)
    series = [one] + [[0] * m for _ in range(N)]  # coefficient of q^n in Z[z]/(z^m-1)
    for a in weights:
        out = [[0] * m for _ in range(N + 1)]
        for n in range(N + 1):
            for e in range(n + 1):
                src = series[n - e]
                for k in range(m):
                    if src[k]:
                        out[n][(k + a * e) % m] += src[k]
        series = out
    table = {}
    for n in range(N + 1):
        for w in range(m):
            # (1/m) sum_t sum_k c_k z^((k - w) t): only k = w survives, with weight m
            total = sum(series[n][k] * (m if (k - w) % m == 0 else 0) for k in range(m))
            assert total % m == 0
            table[(n, w)] = total // m
    return table


def test_small_counts(z3, z5):
    assert count_monomials(z3, 0, 0) == 1
    assert count_monomials(z3, 1, 0) == 0
    assert count_monomials(z5, 2, 4) == 3


def test_bases(z3, z5):
    assert len(monomial_basis(z3, 3, 0)) == 10
    assert monomial_basis(z5, 1, 2) == [(0, 0, 1), (0, 1, 0)]
    assert monomial_basis(z5, 0, 3) == []


def test_basis_is_sorted_and_distinct(z5):
    for n in range(6):
        for w in range(5):
            basis = monomial_basis(z5, n, w)
            assert basis == sorted(set(basis))
            assert len(basis) == count_monomials(z5, n, w)


def test_covariant_hilbert(z3):
    assert covariant_hilbert(z3, 0, 4) == [1, 0, 0, 10, 0]
    assert covariant_hilbert(z3, 1, 4) == [0, 3, 0, 0, 15]
    totals = [sum(covariant_hilbert(z3, i, 6)[n] for i in range(3)) for n in range(7)]
    assert totals == [comb(n + 2, 2) for n in range(7)]


def test_molien_oracle_fixture_groups():
    for m, a in [(3, (1, 1, 1)), (5, (1, 2, 2)), (4, (1, 3)), (7, (1, 2, 4))]:
        G = validate_group([m], list(a))
        oracle = molien_counts(m, a, 10)
        for (n, w), value in oracle.items():
            assert count_monomials(G, n, w) == value, (m, a, n, w)


@st.composite
def cyclic_groups(draw):
    m = draw(st.integers(2, 8))
    d = draw(st.integers(1, 4))
    weights = [1] + draw(st.lists(st.integers(0, m - 1), min_size=d - 1, max_size=d - 1))
    return validate_group([m], weights)


@settings(max_examples=60, deadline=None)
@given(cyclic_groups(), st.integers(0, 9))
def test_character_sum_identity(G, N):
    table = count_table(G, N)
    for n in range(N + 1):
        assert sum(table[(n, c)] for c in G.characters()) == comb(n + G.d - 1, G.d - 1)


@settings(max_examples=40, deadline=None)
@given(cyclic_groups())
def test_negated_weights_negate_characters(G):
    m = G.invariant_factors[0]
    H = validate_group([m], [(-a[0]) % m for a in G.weights])
    for n in range(7):
        for w in range(m):
            assert count_monomials(H, n, w) == count_monomials(G, n, (-w) % m)


@settings(max_examples=30, deadline=None)
@given(cyclic_groups())
def test_molien_oracle_random(G):
    m = G.invariant_factors[0]
    oracle = molien_counts(m, [a[0] for a in G.weights], 7)
    for (n, w), value in oracle.items():
        assert count_monomials(G, n, w) == value


def test_exponent_enumeration_count():
    for d in range(1, 5):
        for n in range(6):
            assert len(exponents_of_degree(d, n)) == comb(n + d - 1, d - 1)


def test_invariant_generators_z3(z3):
    gens = invariant_generators(z3)
    assert len(gens) == 10 and all(sum(g) == 3 for g in gens)


def test_invariant_generators_z4():
    G = parse_group("m=4:a=1,3")
    assert set(invariant_generators(G)) == {(4, 0), (1, 1), (0, 4)}
