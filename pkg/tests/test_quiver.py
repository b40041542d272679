import json

import pytest

from quotsing.errors import UnknownFormat
from quotsing.quiver import (
    Quiver,
    emit,
    folded_quiver,
    mckay_quiver,
    stable_folded_quiver,
)
from quotsing.weights import parse_group

Z3_MCKAY_JSON = """{
  "arrows": [
    {"dst": 1, "label": "x1", "src": 0}, {"dst": 1, "label": "x2", "src": 0},
    {"dst": 1, "label": "x3", "src": 0}, {"dst": 2, "label": "x1", "src": 1},
    {"dst": 2, "label": "x2", "src": 1}, {"dst": 2, "label": "x3", "src": 1},
    {"dst": 0, "label": "x1", "src": 2}, {"dst": 0, "label": "x2", "src": 2},
    {"dst": 0, "label": "x3", "src": 2}
  ],
  "group": "m=3:a=1,1,1",
  "name": "mckay",
  "vertices": [0, 1, 2]
}"""


def test_z3_mckay_matches_checked_in_fixture(z3):
    expected = Quiver.from_json(Z3_MCKAY_JSON)
    assert mckay_quiver(z3).same_as(expected)


def test_z5_mckay_rule(z5):
    Q = mckay_quiver(z5)
    assert len(Q.vertices) == 5
    for s, t, lab in Q.arrows:
        step = 1 if lab == "x1" else 2
        assert t == (s + step) % 5


def test_trivial_group_two_loops():
    Q = mckay_quiver(parse_group("m=1:a=0,0"))
    assert len(Q.vertices) == 1
    assert len(Q.arrows) == 2 and all(s == t for s, t, _ in Q.arrows)


@pytest.mark.parametrize("spec", ["m=3:a=1,1,1", "m=5:a=1,2,2", "m=4:a=1,3", "m=2,2:a=1/0,0/1,1/1"])
def test_mckay_regular_degrees(spec):
    G = parse_group(spec)
    Q = mckay_quiver(G)
    for v in Q.vertices:
        assert Q.out_degree(v) == G.d and Q.in_degree(v) == G.d


@pytest.mark.parametrize("spec, nv, na, ns", [("m=3:a=1,1,1", 9, 18, 6), ("m=5:a=1,2,2", 15, 30, 12)])
def test_folded_counts(spec, nv, na, ns):
    G = parse_group(spec)
    F = folded_quiver(G)
    assert (len(F.vertices), len(F.arrows)) == (nv, na)
    assert len(F.arrows) == G.d * (G.d - 1) * G.order
    assert len(stable_folded_quiver(G).vertices) == ns == G.d * (G.order - 1)


@pytest.mark.parametrize("spec", ["m=3:a=1,1,1", "m=5:a=1,2,2", "m=4:a=1,3", "m=6:a=1,5"])
def test_stable_folded_is_full_subquiver(spec):
    G = parse_group(spec)
    F, S = folded_quiver(G), stable_folded_quiver(G)
    keep = set(S.vertices)
    assert keep == {v for v in F.vertices if v[1] != 0}
    assert S.arrow_multiset() == F.restrict(keep).arrow_multiset()


@pytest.mark.parametrize("m", [3, 4, 5, 6, 7])
def test_d2_stable_folded_splits_into_chain_and_opposite(m):
    G = parse_group(f"m={m}:a=1,{m - 1}")
    S = stable_folded_quiver(G)
    pairs = S.unlabeled_multiset()
    assert max(pairs.values()) == 1  # no multiple arrows
    x1 = {(s, t) for s, t, lab in S.arrows if lab == "x1"}
    x2 = {(s, t) for s, t, lab in S.arrows if lab == "x2"}
    # connected components: x1 arrows go (1,i) -> (2,i+1), x2 arrows (1,i) -> (2,i-1)
    assert len(x1) == len(x2) == m - 2
    # the two halves are opposite chains once the rows are exchanged
    swap = {((1, i), (2, (i + 1) % m)) for i in range(1, m - 1)}
    assert x1 == swap
    assert {(t[1], s[1]) for s, t in x2} == {(s[1], t[1]) for s, t in x1}


def test_json_round_trip_and_dot(z5):
    for Q in (mckay_quiver(z5), folded_quiver(z5), stable_folded_quiver(z5)):
        back = Quiver.from_json(emit(Q, "json"))
        assert back.same_as(Q) and emit(back, "json") == emit(Q, "json")
    one = Quiver([0], [], name="point")
    dot = emit(one, "dot")
    assert dot.count("->") == 0 and dot.count('"0";') == 1
    with pytest.raises(UnknownFormat):
        emit(one, "svg")


def test_json_is_sorted_and_stable(z3):
    text = emit(folded_quiver(z3), "json")
    assert text == json.dumps(json.loads(text), indent=2, sort_keys=True) + "\n"


def test_arrow_endpoints_validated():
    with pytest.raises(ValueError):
        Quiver([0], [(0, 1, "x1")])
