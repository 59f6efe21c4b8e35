import random
from fractions import Fraction

import pytest

from flexbipyramid.cayley_menger import (
    ConfigurationPoint,
    InconsistentSeed,
    SingularCoefficient,
    cm_det_5x5,
    coeff_a,
    coeff_b,
    diagonal_volumes,
    embed,
    from_json,
    generalized_volume,
    membership_residuals,
    oriented_volume,
    reconstruct_all,
    reconstruct_d_ij,
    reconstruct_sigma_ij,
    seed_from,
    to_json,
)
from flexbipyramid.constructions import random_type1_params, type1_construct, type3_pose
from flexbipyramid.geometry import dist_sq

from .conftest import random_realization

O = (Fraction(0),) * 3
E1, E2, E3 = (Fraction(1), 0, 0), (0, Fraction(1), 0), (0, 0, Fraction(1))


def test_oriented_volume_basics():
    assert oriented_volume(E1, E2, E3, O) == Fraction(1, 6)
    assert oriented_volume(E2, E1, E3, O) == Fraction(-1, 6)
    assert oriented_volume(E1, E2, (1, 1, 0), O) == 0


def test_unit_regular_tetrahedron():
    assert cm_det_5x5(*(Fraction(1),) * 6) == 4
    # coordinate oracle: vertices of a regular tetrahedron with edge sqrt(8)
    pts = [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
    v = oriented_volume(*[tuple(map(Fraction, p)) for p in pts])
    assert 288 * v * v == cm_det_5x5(*(Fraction(8),) * 6)


def test_coplanar_determinant_is_zero():
    pts = [O, E1, E2, (Fraction(2), Fraction(3), 0)]
    d = lambda i, j: dist_sq(pts[i], pts[j])  # noqa: E731
    assert cm_det_5x5(d(0, 1), d(0, 2), d(0, 3), d(1, 2), d(1, 3), d(2, 3)) == 0


def test_membership_identity_random(rng):
    for _ in range(50):
        cp = embed(random_realization(rng))
        assert all(r == 0 for r in membership_residuals(cp).values())


def test_flat_realization_has_zero_volumes():
    cp = embed(type3_pose(0))
    assert cp.s_vector() == [0] * 5
    assert generalized_volume(cp) == 0


def test_type1_line_symmetry():
    cp = embed(type1_construct(random_type1_params(random.Random(3)))[1])
    assert cp.s[("1", "2")] + cp.s[("4", "5")] == 0


def test_zero_sum_on_flexible_family(rng):
    for _ in range(30):
        cp = embed(type1_construct(random_type1_params(rng))[1])
        assert generalized_volume(cp) == 0


def test_generalized_volume_is_enclosed_volume(rng, b5):
    # for a generic (rigid) realization the sum is the signed enclosed volume,
    # computed independently as a sum of cones over the faces
    for _ in range(20):
        rho = random_realization(rng)
        cones = sum(oriented_volume(*(rho[v] for v in f), O) for f in b5.faces)
        assert generalized_volume(embed(rho)) == cones


def test_synthetic_point_flags_nonrealizability():
    cp = ConfigurationPoint(n=5, s={e: Fraction(0) for e in ConfigurationPoint(n=5).equator})
    cp.s[("1", "2")] = Fraction(1)
    assert generalized_volume(cp) == 1


def test_embed_isometry_and_reflection(rng):
    rho = random_realization(rng)
    rot = rho.transform([[Fraction(3, 5), Fraction(-4, 5), 0], [Fraction(4, 5), Fraction(3, 5), 0], [0, 0, 1]],
                        (Fraction(1, 2), 0, 7))
    ref = rho.transform([[1, 0, 0], [0, -1, 0], [0, 0, 1]])
    s0 = embed(rho).s_vector()
    assert embed(rot).s_vector() == s0
    assert embed(ref).s_vector() == [-x for x in s0]


def test_reconstruct_d_matches_coordinates(rng):
    rho = random_realization(rng)
    cp = embed(rho)
    cp.sigma.update(diagonal_volumes(rho, 5))
    assert reconstruct_d_ij(cp, "1", "3", "2") == dist_sq(rho["1"], rho["3"])


def test_reconstruct_d_type3_t1():
    rho = type3_pose(1)
    cp = embed(rho)
    assert reconstruct_d_ij(cp, "1", "3", "2") == dist_sq(rho["1"], rho["3"])


def test_printed_b_at_i_equals_j(rng):
    rho = random_realization(rng)
    cp = embed(rho)
    i, k = "1", "2"
    b = coeff_b(cp.dist(i, k), cp.dist(k, i), cp.dist(i, "T"), cp.dist(i, "B"), cp.dist(i, "T"),
                cp.dist(i, "B"), cp.dist(k, "T"), cp.dist(k, "B"), cp.d_TB)
    a = coeff_a(cp.dist(k, "T"), cp.dist(k, "B"), cp.d_TB)
    assert a * 0 + b + 288 * cp.vol(i, k) ** 2 == 0


def test_reconstruct_sigma(rng):
    rho = random_realization(rng)
    cp = embed(rho)
    direct = diagonal_volumes(rho, 5)
    assert reconstruct_sigma_ij(cp, "1", "3", "2") == direct[("1", "3")]
    cp.sigma[("1", "3")] = direct[("1", "3")]
    assert cp.vol("3", "1") == -direct[("1", "3")]


def test_reconstruct_sigma_coplanar():
    rho = type3_pose(0)
    cp = embed(type3_pose(Fraction(1, 2)))
    flat = embed(rho)
    # a flat pose has every diagonal volume zero, but a_{i,j,k} vanishes there too
    with pytest.raises(SingularCoefficient):
        reconstruct_sigma_ij(flat, "1", "3", "2")
    assert reconstruct_sigma_ij(cp, "1", "3", "2") == diagonal_volumes(type3_pose(Fraction(1, 2)), 5)[("1", "3")]


def test_singular_a_k():
    # k on the line TB makes the triangle T, B, k degenerate
    rho = type3_pose(Fraction(1, 3))
    tb = tuple((x + y) / 2 for x, y in zip(rho["T"], rho["B"]))
    cp = embed(rho.extend({"2": tb}))
    with pytest.raises(SingularCoefficient):
        reconstruct_d_ij(cp, "1", "3", "2")


@pytest.mark.parametrize("pivot", ["prev", "next"])
def test_reconstruct_all_type3(pivot):
    rho = type3_pose(2)
    cp = embed(rho)
    rec = reconstruct_all(seed_from(cp), pivot=pivot)
    assert rec.d == cp.d
    direct = diagonal_volumes(rho, 5)
    for (i, j), v in rec.sigma.items():
        assert v == direct[(i, j)]


def test_negated_s_is_inconsistent():
    seed = seed_from(embed(type3_pose(2)))
    seed.s[("1", "2")] = -seed.s[("1", "2")]
    with pytest.raises(InconsistentSeed):
        reconstruct_all(seed)


def test_wrong_volume_is_inconsistent():
    seed = seed_from(embed(type3_pose(2)))
    seed.s[("2", "3")] = seed.s[("2", "3")] * 2
    with pytest.raises(InconsistentSeed):
        reconstruct_all(seed)


def test_json_roundtrip(rng):
    cp = embed(random_realization(rng))
    back = from_json(to_json(cp))
    assert back.d == cp.d and back.s == cp.s
    assert "1-2" in to_json(cp)["d"] and "(5,1)" in to_json(cp)["s"]
