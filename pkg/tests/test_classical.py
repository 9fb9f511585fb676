import itertools

import pytest

from spanshare.galois import Field, Matrix, det
from spanshare.classical import (
    ReconstructionError,
    ShareFormatError,
    build_reconstruction_plan,
    format_share_file,
    parse_share_file,
    reconstruct,
    share,
    verify_classical,
)
from spanshare.msp import MSP, compile_formula, msp_structure, shamir_msp
from spanshare.structures import mask_from_players, parse_formula, threshold_structure

GF5 = Field(5)
GF7 = Field(7)


def mask(*players, n):
    return mask_from_players(players, n)


@pytest.fixture
def shamir13():
    return shamir_msp(3, 1, GF5)


def test_share_examples(shamir13):
    assert share(shamir13, 3, (2,)).entries == (0, 2, 4)
    assert share(shamir13, 0, (0,)).entries == (0, 0, 0)
    with pytest.raises(ValueError):
        share(shamir13, 1, (1, 2))


def test_share_vector_views(shamir13):
    sv = share(shamir13, 3, (2,))
    assert sv.for_player(2) == ((1, 2),)
    assert sv.for_set(mask(2, 3, n=3)) == {1: 2, 2: 4}


def test_reconstruct_examples(shamir13):
    assert reconstruct(shamir13, mask(2, 3, n=3), {1: 2, 2: 4}) == 3

    sv = share(shamir13, 0, (0,))
    assert reconstruct(shamir13, mask(1, 2, 3, n=3), sv.for_set(0b111)) == 0

    with pytest.raises(ReconstructionError, match="cannot reconstruct"):
        reconstruct(shamir13, mask(1, n=3), {0: 0})

    with pytest.raises(ValueError, match="mismatch"):
        reconstruct(shamir13, mask(2, 3, n=3), {1: 2})


def test_round_trip_all_qualified_sets(shamir13):
    structure = msp_structure(shamir13)
    p = GF5.p
    for s in range(p):
        for a in itertools.product(range(p), repeat=shamir13.e - 1):
            sv = share(shamir13, s, a)
            for q in range(1 << shamir13.n):
                if not structure.is_member(q):
                    assert reconstruct(shamir13, q, sv.for_set(q)) == s


from conftest import lagrange_at_zero


@pytest.mark.parametrize("n,k,p", [(3, 1, 5), (5, 2, 7), (4, 1, 5), (5, 3, 7), (2, 1, 5)])
def test_reconstruct_matches_lagrange(n, k, p):
    field = Field(p)
    msp = shamir_msp(n, k, field)
    for s in range(0, p, 2):
        a = tuple((s + 1 + i) % p for i in range(k))
        sv = share(msp, s, a)
        for q_players in itertools.combinations(range(1, n + 1), k + 1):
            q = mask(*q_players, n=n)
            points = [(i, sv.entries[i - 1]) for i in q_players]
            expected = lagrange_at_zero(field, points)
            assert expected == s
            assert reconstruct(msp, q, sv.for_set(q)) == expected


def test_build_plan_example(shamir13):
    plan = build_reconstruction_plan(shamir13, mask(1, n=3))
    assert plan.v == (1, 4)
    assert plan.u1 == (3, 3)
    assert plan.u.data == ((3, 3), (1, 2))
    assert det(plan.u) != 0
    assert plan.a_rows == (1, 2)


def test_build_plan_errors(shamir13):
    with pytest.raises(ValueError, match="qualified"):
        build_reconstruction_plan(shamir13, mask(1, 2, n=3))
    orm = compile_formula(parse_formula("or(and(1,3),and(2,3))"), GF5)
    with pytest.raises(ValueError, match="dual"):
        build_reconstruction_plan(orm, mask(3, n=3))


def test_build_plan_empty_set(shamir13):
    plan = build_reconstruction_plan(shamir13, 0)
    assert plan.m == shamir13.d
    assert plan.u.rows == plan.u.cols == 3
    assert det(plan.u) != 0
    assert shamir13.matrix.take_rows(plan.a_rows).left_mul(plan.u1) == shamir13.eps


def plan_extracts_secret(msp, b_mask):
    plan = build_reconstruction_plan(msp, b_mask)
    p = msp.field.p
    for s in range(p):
        for a in itertools.product(range(p), repeat=msp.e - 1):
            dealt = msp.matrix.matvec((s,) + a)
            a_view = [dealt[i] for i in plan.a_rows]
            transformed = plan.u.matvec(a_view)
            assert transformed[0] == s


def erasable_sets(msp):
    structure = msp_structure(msp)
    dual = structure.dual()
    return [b for b in structure.members() if dual.is_member(b)]


def test_plan_soundness_all_erasable_sets(shamir13):
    for msp in [shamir13, compile_formula(parse_formula("or(and(1,3),and(2,3))"), GF5)]:
        for b in erasable_sets(msp):
            plan_extracts_secret(msp, b)


def test_plan_secrecy(shamir13):
    """The joint multiset of (U' A-shares, B-shares) is secret-independent."""
    from collections import Counter

    for msp in [shamir13, compile_formula(parse_formula("or(and(1,3),and(2,3))"), GF5)]:
        p = msp.field.p
        for b in erasable_sets(msp):
            plan = build_reconstruction_plan(msp, b)
            b_rows = msp.row_indices(b)
            dists = {}
            for s in range(p):
                counter = Counter()
                for a in itertools.product(range(p), repeat=msp.e - 1):
                    dealt = msp.matrix.matvec((s,) + a)
                    a_view = [dealt[i] for i in plan.a_rows]
                    transformed = plan.u.matvec(a_view)
                    counter[(transformed[1:], tuple(dealt[i] for i in b_rows))] += 1
                dists[s] = counter
            assert all(dists[s] == dists[0] for s in range(p))


def test_plan_independent_of_dealt_values(shamir13):
    p1 = build_reconstruction_plan(shamir13, mask(1, n=3))
    p2 = build_reconstruction_plan(shamir13, mask(1, n=3))
    assert p1 == p2


def test_verify_classical_passes(shamir13):
    assert verify_classical(shamir13).passed
    orm = compile_formula(parse_formula("or(and(1,3),and(2,3))"), GF5)
    assert verify_classical(orm).passed


def test_verify_classical_guard(shamir13):
    with pytest.raises(ValueError, match="guard"):
        verify_classical(shamir13, guard=10)


def test_verify_classical_detects_corruption(shamir13):
    # zero out the secret column; dealt shares no longer depend on s
    corrupted_matrix = Matrix.from_rows(GF5, [(0, r[1]) for r in shamir13.matrix.data], 2)
    corrupted = MSP._unchecked(GF5, corrupted_matrix, shamir13.psi, 3)
    report = verify_classical(corrupted, structure=threshold_structure(3, 1))
    assert not report.passed
    assert report.failures


def test_share_file_round_trip(shamir13):
    sv = share(shamir13, 3, (2,))
    text = format_share_file(sv, comment="seed 7")
    p, shares = parse_share_file(text)
    assert p == 5
    assert shares == {0: (1, 0), 1: (2, 2), 2: (3, 4)}
    q = mask(2, 3, n=3)
    collected = {i: v for i, (_, v) in shares.items() if i in shamir13.row_indices(q)}
    assert reconstruct(shamir13, q, collected) == 3


def test_share_file_errors():
    with pytest.raises(ShareFormatError):
        parse_share_file("share 1 1 2\n")
    with pytest.raises(ShareFormatError):
        parse_share_file("field 5\nshare 1 0 2\n")
    with pytest.raises(ShareFormatError):
        parse_share_file("field 5\nshare 1 1 2\nshare 1 1 3\n")
    with pytest.raises(ShareFormatError):
        parse_share_file("field 5\nbogus\n")
