import json

import pytest

from quotsing.errors import NotIsolated
from quotsing.resolve import ExtEngine
from quotsing.tilt import (
    build_T,
    build_U,
    build_Utilde,
    cross_check_endomorphisms,
    in_region_a,
    in_region_b,
    koszul_complex,
    mcm_check,
    syzygy_dimension,
    vanishing_grid,
    verdict_from,
    verify_koszul_hom_exactness,
    verify_prop_SS,
)
from quotsing.weights import parse_group


@pytest.mark.parametrize("spec", ["m=3:a=1,1,1", "m=4:a=1,3", "m=5:a=1,2,2"])
def test_koszul_complex_square_zero_and_exact(spec):
    K = koszul_complex(parse_group(spec), window=7)
    assert K.square_zero_failures() == []
    assert K.homology_defects() == []


def test_koszul_first_differential(z3):
    K = koszul_complex(z3, window=4)
    # x^alpha (x) e_j  ->  x^alpha x_j
    assert K.apply(1, (1, 0, 2), (1,)) == [(((1, 1, 2), ()), 1)]
    # e_0 ^ e_1  ->  x_0 e_1 - x_1 e_0
    assert dict(K.apply(2, (0, 0, 0), (0, 1))) == {((1, 0, 0), (1,)): 1, ((0, 1, 0), (0,)): -1}


def test_koszul_euler_characteristic(z3):
    K = koszul_complex(z3, window=6)
    for n in range(7):
        for c in z3.characters():
            assert K.euler_characteristic(n, c) == 0


@pytest.mark.parametrize("spec", ["m=3:a=1,1,1", "m=4:a=1,3"])
def test_syzygy_dimension_is_rank_of_differential(spec):
    # the p-th syzygy of k in degree n is the image of delta_p there
    G = parse_group(spec)
    K = koszul_complex(G, window=6)
    for p in range(1, G.d + 1):
        for n in range(p, 7):
            assert syzygy_dimension(G.d, p, n) == sum(K.rank(p, n, c) for c in G.characters())


def test_candidate_shapes(z3, z4):
    U = build_U(z3)
    assert len(U.labels()) == 7
    assert U.labels()[0] == "R" and all(lab.startswith("U[") for lab in U.labels()[1:])
    assert len(build_T(z3).labels()) == 9
    assert len(build_Utilde(z3).labels()) == 9
    with pytest.raises(NotIsolated):
        build_U(parse_group("m=2:a=1,1,0"))


def test_summands_are_mcm(z3, z3_engine):
    for C in (build_U(z3), build_T(z3)):
        for label, (zero, ok) in mcm_check(C, z3_engine, twists=range(-6, 4)).items():
            assert zero and ok, label


def test_u_has_no_extra_free_summand(z3, z3_engine):
    # a free summand would have zero stable endomorphisms
    for label, M in build_U(z3).summands:
        if label != "R":
            assert z3_engine.stable_row(M, M, [0])[0][0] >= 1


def test_d2_T_and_U_stably_match(z4, z4_engine):
    T, U = build_T(z4), build_U(z4)
    t_total = sum(z4_engine.stable_row(A, B, [0])[0][0] for _, A in T.summands for _, B in T.summands)
    u_total = sum(z4_engine.stable_row(A, B, [0])[0][0] for _, A in U.summands for _, B in U.summands)
    assert t_total == u_total == 10


def test_verdicts_d2(z4, z4_engine):
    for C in (build_T(z4), build_U(z4)):
        report = vanishing_grid(C, range(-4, 5), engine=z4_engine)
        assert report.verdict == "TILTING" and report.conclusive


def test_verdict_rule():
    cell = lambda n, dim: {"n": n, "dim": dim}  # noqa: E731
    assert verdict_from([cell(0, 3), cell(1, 0), cell(-1, 0)]) == "TILTING"
    assert verdict_from([cell(0, 3), cell(-1, 2)]) == "SILTING"
    assert verdict_from([cell(1, 1), cell(-1, 0)]) == "NEITHER"


def test_report_json_without_timestamp_is_stable(z4, z4_engine):
    a = vanishing_grid(build_T(z4), range(-2, 3), engine=z4_engine).to_json(timestamp=False)
    b = vanishing_grid(build_T(z4), range(-2, 3), engine=ExtEngine(z4)).to_json(timestamp=False)
    assert a == b
    doc = json.loads(a)
    assert doc["verdict"] == "TILTING" and "runtime" not in doc


def test_regions():
    assert in_region_a(3, 1, 0) and not in_region_a(3, 0, 5)
    assert in_region_b(3, -1, 1) and not in_region_b(3, -1, 2)
    assert not in_region_a(3, -1, 2) and not in_region_b(3, -1, 2)
    assert not in_region_a(3, 0, 0) and not in_region_b(3, 0, 0)


def test_prop_ss_small_window_z3(z3, z3_engine):
    report = verify_prop_SS(z3, n_range=range(-1, 2), i_range=range(-3, 4), engine=z3_engine)
    assert report["violations"] == [] and report["inconclusive"] == []
    observed = {(c["n"], c["i"]) for c in report["observed_nonzero"]}
    assert (0, 0) in observed and (-1, 2) in observed


def test_koszul_hom_exactness_z3_near_zero(z3, z3_engine):
    report = verify_koszul_hom_exactness(z3, i_range=[-3, 0, 1], engine=z3_engine)
    assert report["exact"]
    by_i = {r["i"]: r for r in report["a"]}
    assert by_i[1]["surjective"] and not by_i[0]["surjective"]
    assert report["non_surjective_b"] == [-3]


def test_cross_check_z4_and_block_triangularity(z4, z4_engine):
    report = cross_check_endomorphisms(z4, engine=z4_engine)
    assert report["mismatches"] == []
    assert report["U_stable_total"] == 10
    level = lambda lab: int(lab[2:].split(",")[0])  # noqa: E731
    for cell in report["Utilde"]:
        if level(cell["source"]) < level(cell["target"]):
            assert cell["pipeline"] == 0
