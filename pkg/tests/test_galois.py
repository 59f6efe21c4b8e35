import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from flexbipyramid.cayley_menger import embed
from flexbipyramid.complexes import EdgeLengths, build_bipyramid, edge_lengths_sq
from flexbipyramid.constructions import (
    PAPER_PARAMS,
    flex8_source,
    random_type1_params,
    type1_construct,
    type1_source,
    type3_pose,
    type3_source,
)
from flexbipyramid.galois import (
    ALL_ONES,
    ZERO,
    FlatEdge,
    GaloisClass,
    MismatchedLengths,
    SignGroup,
    TargetOutOfRange,
    WrongSupport,
    canonical,
    classify,
    classify_source,
    dihedral_images,
    fiber,
    flat_pose_scan,
    gap_pattern,
    motion_range,
    observed_range,
    sign_vector,
    two_ones_consequences,
    weight,
    xor,
    zero_sum_check,
)
from flexbipyramid.numeric import within

F = Fraction
B5 = build_bipyramid(5)
bits = st.tuples(*[st.integers(0, 1)] * 5)


@pytest.fixture(scope="module")
def type3_result():
    return classify_source(type3_source())


@pytest.fixture(scope="module")
def flex8_result(flex_domain):
    return classify_source(flex8_source(flex_domain))


def test_sign_vector_identity_and_mirror():
    cp = embed(type3_pose(F(1, 2)))
    mirror = embed(type3_pose(F(-1, 2)))
    assert sign_vector(cp, cp) == ZERO
    assert sign_vector(cp, mirror) == ALL_ONES


def test_sign_vector_flat_edge():
    with pytest.raises(FlatEdge):
        sign_vector(embed(type3_pose(0)), embed(type3_pose(0)))


def test_sign_vector_needs_equal_lengths():
    with pytest.raises(MismatchedLengths):
        sign_vector(embed(type3_pose(1)), embed(type1_construct(PAPER_PARAMS)[1]))


def test_dihedral_images():
    imgs = dihedral_images((1, 0, 1, 0, 0))
    assert len(set(imgs)) == 5
    assert canonical((1, 0, 1, 0, 0)) == (0, 0, 1, 0, 1) == canonical((0, 1, 0, 1, 0))
    assert gap_pattern((1, 0, 1, 0, 0)) == gap_pattern((1, 0, 0, 1, 0)) == (2, 3)
    assert gap_pattern((1, 1, 0, 0, 0)) == (1, 4)


@given(bits)
def test_canonical_is_dihedral_invariant(u):
    assert all(canonical(v) == canonical(u) for v in dihedral_images(u))
    assert canonical(u) == min(dihedral_images(u))


@given(st.lists(bits, max_size=4))
def test_generated_group_is_closed(gens):
    g = SignGroup.generated_by(gens)
    assert ZERO in g.elements and g.is_xor_closed()
    assert all(xor(u, v) in g.elements for u, v in itertools.product(g.elements, repeat=2))


def test_forbidden_weights():
    assert SignGroup.generated_by([(1, 0, 0, 0, 0)]).forbidden_weights() == [(1, 0, 0, 0, 0)]
    assert SignGroup.generated_by([ALL_ONES, (1, 0, 1, 0, 0)]).forbidden_weights() == []


def test_singleton_fibers_are_inconclusive():
    cps = [[embed(type3_pose(F(1, 3)))], [embed(type3_pose(F(2, 3)))]]
    c = classify(cps)
    assert c.cls is GaloisClass.Inconclusive and c.group.elements == {ZERO}


def test_type3_all_flip(type3_result):
    c, fibers = type3_result
    assert c.cls is GaloisClass.AllFlip
    assert [len(f) for f in fibers] == [2, 2, 2]
    assert c.to_json() == {"class": "AllFlip", "elements": [[0] * 5, [1] * 5], "canonical_two_ones": None}


def test_flex8_four_element(flex8_result):
    c, fibers = flex8_result
    assert c.cls is GaloisClass.FourElement
    assert gap_pattern(c.canonical_two_ones) == gap_pattern((1, 0, 1, 0, 0))
    assert all(len(f) <= 4 for f in fibers)
    assert c.group.is_xor_closed() and not c.group.forbidden_weights()


def test_observed_groups_respect_zero_sum(type3_result, flex8_result):
    for c, fibers in (type3_result, flex8_result):
        for pts in fibers:
            for p, q in itertools.combinations(pts, 2):
                u = sign_vector(p, q)
                for cp in (p, q):
                    assert within(zero_sum_check(cp, u), F(1, 2 ** 40))


def test_zero_sum_examples(rng):
    cp = embed(type1_construct(random_type1_params(rng))[1])
    assert zero_sum_check(cp, ALL_ONES) == 0
    assert zero_sum_check(cp, (1, 0, 0, 1, 0)) == 0
    assert zero_sum_check(cp, ZERO) == 0


def test_target_out_of_range():
    src = type3_source()
    lo, hi = observed_range(src)
    with pytest.raises(TargetOutOfRange):
        fiber(src, hi + 1)


def test_motion_range_nonempty():
    mr = motion_range(edge_lengths_sq(type1_construct(PAPER_PARAMS)[1], B5))
    assert mr.nonempty()


def test_flat_pose_scan_type3():
    rep = flat_pose_scan(type3_source())
    assert rep.flat == [("t", 0), ("1/t", 0)]
    assert rep.motion_range is not None


def test_flat_pose_scan_flex8(flex_domain):
    rep = flat_pose_scan(flex8_source(flex_domain), count=9)
    assert rep.flat == [] and rep.samples == 36


def test_flat_pose_scan_rigid():
    rep = flat_pose_scan(type1_source(PAPER_PARAMS))
    assert rep.flat == [] and rep.samples == 0 and rep.motion_range is None


def test_two_ones_on_type1_lengths(flex8_result):
    lengths = edge_lengths_sq(type1_construct(PAPER_PARAMS)[1], B5)
    twos = [u for u in flex8_result[0].group.elements if weight(u) == 2]
    rep = two_ones_consequences(lengths, twos[0])
    assert rep.ok and rep.edges == (("1", "2"), ("4", "5"))


def test_two_ones_unequal_lengths_flagged():
    lengths = edge_lengths_sq(type1_construct(PAPER_PARAMS)[1], B5)
    bumped = EdgeLengths({**lengths.lambda_sq, ("1", "2"): lengths[("1", "2")] + 1})
    rep = two_ones_consequences(bumped, (1, 0, 0, 1, 0))
    assert not rep.equal_lengths and not rep.ok


def test_two_ones_wrong_support():
    lengths = edge_lengths_sq(type3_pose(1), B5)
    with pytest.raises(WrongSupport):
        two_ones_consequences(lengths, ALL_ONES)

