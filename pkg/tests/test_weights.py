import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quotsing.errors import BadGroupSpec, BadModulus, NonFaithful
from quotsing.weights import (
    acts_freely_off_origin,
    is_small,
    is_special_linear,
    parse_group,
    validate_group,
)


def test_fixture_groups_validate():
    assert validate_group([3], [1, 1, 1]).order == 3
    assert validate_group([5], [1, 2, 2], d=3).order == 5


def test_non_faithful_weights_rejected():
    with pytest.raises(NonFaithful):
        validate_group([4], [2, 2])


def test_bad_inputs():
    with pytest.raises(BadModulus):
        validate_group([1], [1, 1])
    with pytest.raises(BadGroupSpec):
        validate_group([3], [1, 1], d=3)
    with pytest.raises(BadGroupSpec):
        parse_group("m=three:a=1")


def test_compact_parsing_matches_raw():
    assert parse_group("m=5:a=1,2,2") == validate_group([5], [1, 2, 2])
    G = parse_group("m=2,2:a=1/0,0/1,1/1")
    assert G.order == 4 and G.d == 3
    assert parse_group("m=1:a=0,0").order == 1


@pytest.mark.parametrize(
    "spec, sl, small, free",
    [
        ("m=3:a=1,1,1", True, True, True),
        ("m=5:a=1,2,2", True, True, True),
        ("m=2:a=1,0", False, False, False),
        ("m=3:a=1,2", True, True, True),
        ("m=2:a=1,1,0", True, True, False),
    ],
)
def test_predicates(spec, sl, small, free):
    G = parse_group(spec)
    assert is_special_linear(G) is sl
    assert is_small(G) is small
    assert acts_freely_off_origin(G) is free


def test_is_small_brute_force_two_eigenvalues():
    # m=3, a=(1,2): both nontrivial elements move both coordinates
    G = parse_group("m=3:a=1,2")
    for g in G.elements():
        if g != G.zero:
            assert all(G.pairing(g, a) != 0 for a in G.weights)


@st.composite
def small_groups(draw):
    m = draw(st.integers(2, 9))
    d = draw(st.integers(1, 4))
    weights = draw(st.lists(st.integers(0, m - 1), min_size=d, max_size=d))
    try:
        return validate_group([m], weights)
    except NonFaithful:
        return validate_group([m], [1] + weights[1:])


@settings(max_examples=150, deadline=None)
@given(small_groups())
def test_special_linear_implies_small(G):
    if G.d >= 2 and is_special_linear(G):
        assert is_small(G)


@settings(max_examples=150, deadline=None)
@given(small_groups())
def test_isolated_implies_small(G):
    if G.d >= 2 and acts_freely_off_origin(G):
        assert is_small(G)


@settings(max_examples=80, deadline=None)
@given(small_groups(), st.randoms(use_true_random=False))
def test_predicates_invariant_under_column_permutation(G, rnd):
    cols = list(G.weights)
    rnd.shuffle(cols)
    H = validate_group(G.invariant_factors, cols)
    assert is_special_linear(H) == is_special_linear(G)
    assert is_small(H) == is_small(G)
    assert acts_freely_off_origin(H) == acts_freely_off_origin(G)


def test_characters_closed_under_group_law():
    G = parse_group("m=2,2:a=1/0,0/1,1/1")
    chars = set(G.characters())
    for a, b in itertools.product(chars, repeat=2):
        assert G.add(a, b) in chars
        assert G.add(a, G.neg(a)) == G.zero
