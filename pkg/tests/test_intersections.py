import itertools
from fractions import Fraction

import pytest

from flexbipyramid.constructions import (
    PAPER_PARAMS,
    flex8_realization,
    flex8_source,
    place_vertex_N,
    type1_construct,
    type3_pose,
)
from flexbipyramid.intersections import (
    ContactClass,
    ContactReport,
    DegenerateTriangle,
    classify_contact,
    scan_flex,
    scan_polyhedron,
    triangle_distance_sq,
)

from .conftest import random_point, regular_bipyramid

F = Fraction
UNIT = [(F(0), F(0), F(0)), (F(1), F(0), F(0)), (F(0), F(1), F(0))]
PAPER_PAIRS = {("T-4-5", "B-1-2"), ("T-5-1", "B-1-2"), ("B-1-2", "B-4-5")}
ROT = [[F(3, 5), F(-4, 5), 0], [F(4, 5), F(3, 5), 0], [0, 0, 1]]


def shift(tri, d):
    return [tuple(x + y for x, y in zip(p, d)) for p in tri]


def rotate(tri, m=ROT, d=(F(1, 3), F(-2), F(5))):
    return [tuple(sum(m[r][c] * p[c] for c in range(3)) + d[r] for r in range(3)) for p in tri]


def test_far_apart_is_disjoint():
    assert classify_contact(UNIT, shift(UNIT, (10, 10, 10))) is ContactClass.Disjoint


def test_piercing_is_improper():
    stab = [(F(1, 4), F(1, 4), F(-1)), (F(1, 4), F(1, 4), F(1)), (F(3), F(3), F(0))]
    assert classify_contact(UNIT, stab) is ContactClass.Improper


def test_touching_without_shared_vertex_is_improper():
    touch = [(F(1, 4), F(1, 4), F(0)), (F(1), F(1), F(1)), (F(2), F(0), F(1))]
    assert classify_contact(UNIT, touch) is ContactClass.Improper


def test_coplanar_overlap_and_separation():
    assert classify_contact(UNIT, shift(UNIT, (F(1, 4), F(1, 4), 0))) is ContactClass.Improper
    assert classify_contact(UNIT, shift(UNIT, (F(2), F(2), 0))) is ContactClass.Disjoint


def test_shared_edge_cases():
    a = [(F(0), F(0), F(0)), (F(1), F(0), F(0)), (F(0), F(1), F(0))]
    hinge = [(F(0), F(0), F(0)), (F(1), F(0), F(0)), (F(0), F(-1), F(1))]
    flat_other_side = [(F(0), F(0), F(0)), (F(1), F(0), F(0)), (F(0), F(-1), F(0))]
    folded = [(F(0), F(0), F(0)), (F(1), F(0), F(0)), (F(1), F(1), F(0))]
    shared = [(0, 0), (1, 1)]
    assert classify_contact(a, hinge, shared) is ContactClass.SharedEdgeOnly
    assert classify_contact(a, flat_other_side, shared) is ContactClass.SharedEdgeOnly
    assert classify_contact(a, folded, shared) is ContactClass.Improper


def test_shared_vertex_cases():
    a = UNIT
    away = [(F(0), F(0), F(0)), (F(-1), F(0), F(1)), (F(0), F(-1), F(1))]
    # second triangle lies in the plane and overlaps the first near the vertex
    inside = [(F(0), F(0), F(0)), (F(1), F(1), F(0)), (F(1), F(2), F(0))]
    assert classify_contact(a, away, [(0, 0)]) is ContactClass.SharedVertexOnly
    assert classify_contact(a, inside, [(0, 0)]) is ContactClass.Improper


def test_degenerate_triangle():
    with pytest.raises(DegenerateTriangle):
        classify_contact([(0, 0, 0), (1, 1, 1), (2, 2, 2)], UNIT)


def test_symmetry_and_isometry(rng):
    for _ in range(60):
        t1 = [random_point(rng, 4, 2) for _ in range(3)]
        t2 = [random_point(rng, 4, 2) for _ in range(3)]
        try:
            c = classify_contact(t1, t2)
        except DegenerateTriangle:
            continue
        assert classify_contact(t2, t1) is c
        assert classify_contact(rotate(t1), rotate(t2)) is c
        scaled = [[tuple(F(7, 3) * x for x in p) for p in t] for t in (t1, t2)]
        assert classify_contact(*scaled) is c


def test_triangle_distance():
    assert triangle_distance_sq(UNIT, shift(UNIT, (0, 0, 2))) == 4
    assert triangle_distance_sq(UNIT, shift(UNIT, (F(3), 0, 0))) == 4


def test_convex_bipyramid_is_embedded(b5):
    rep = scan_polyhedron(regular_bipyramid(), b5)
    assert rep.improper_count == 0 and not rep.undecided
    assert rep.min_separation_sq > 0
    names = dict(((a, b), c) for a, b, c in rep.pairs)
    assert names[("T-1-2", "T-2-3")] is ContactClass.SharedEdgeOnly


def test_adjacent_faces_never_disjoint(b5):
    rep = scan_polyhedron(type3_pose(F(2, 3)), b5)
    faces = dict(zip(b5.face_names, b5.faces))
    for a, b, c in rep.pairs:
        if set(faces[a]) & set(faces[b]):
            assert c is not ContactClass.Disjoint


def test_paper_parameters_three_pairs(b5):
    rep = scan_polyhedron(type1_construct(PAPER_PARAMS)[1], b5)
    assert set(rep.improper) == PAPER_PAIRS
    assert rep.to_json()["improper"] == [list(p) for p in rep.improper]


def test_report_scaling_invariant(b5):
    rho = type1_construct(PAPER_PARAMS)[1]
    big = rho.transform([[F(5, 2), 0, 0], [0, F(5, 2), 0], [0, 0, F(5, 2)]])
    r1, r2 = scan_polyhedron(rho, b5), scan_polyhedron(big, b5)
    assert r1.pairs == r2.pairs
    assert r2.min_separation_sq == F(25, 4) * r1.min_separation_sq


def test_subdivided_at_paper_parameters_is_clean(s8):
    rep = scan_polyhedron(place_vertex_N(type1_construct(PAPER_PARAMS)[1]), s8)
    assert rep.improper_count == 0 and not rep.undecided


def test_flex8_with_n_at_one_is_clean(s8):
    rep = scan_polyhedron(flex8_realization(1, with_n=True), s8)
    assert rep.improper_count == 0 and not rep.undecided and rep.min_separation_sq > 0


def test_pentagonal_flex_always_intersects(b5, flex_domain):
    scan = scan_flex(flex8_source(flex_domain), flex_domain.samples(9), b5)
    assert all(r.improper_count >= 1 for r in scan.reports)


def test_empty_scan(b5, flex_domain):
    scan = scan_flex(flex8_source(flex_domain), [], b5)
    assert scan.reports == [] and scan.worst_margin is None and scan.improper_total == 0


def test_report_json_shape():
    rep = ContactReport(pairs=[("a", "b", ContactClass.Improper)], min_separation_sq=F(1, 3))
    assert rep.to_json() == {"improper": [["a", "b"]], "undecided": [], "min_separation_sq": "1/3"}


def test_pair_order_is_canonical(b5):
    rep = scan_polyhedron(regular_bipyramid(), b5)
    assert [(a, b) for a, b, _ in rep.pairs] == list(itertools.combinations(b5.face_names, 2))


# -- independent float oracle -------------------------------------------------------
# Moller-Trumbore segment/triangle tests in floating point, applied to face
# pairs with no common vertex; shares no code with the exact predicates.


def _sub(a, b):
    return [x - y for x, y in zip(a, b)]


def _cross(a, b):
    return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _float_segment_hits(p, q, tri, eps=1e-12):
    e1, e2 = _sub(tri[1], tri[0]), _sub(tri[2], tri[0])
    d = _sub(q, p)
    h = _cross(d, e2)
    det = _dot(e1, h)
    if abs(det) < eps:
        return False
    s = _sub(p, tri[0])
    u = _dot(s, h) / det
    qv = _cross(s, e1)
    v = _dot(d, qv) / det
    t = _dot(e2, qv) / det
    return -eps <= u and -eps <= v and u + v <= 1 + eps and -eps <= t <= 1 + eps


def _float_improper(rho, cx):
    pts = {k: [float(x) for x in rho[k]] for k in rho.labels}
    out = set()
    for (n1, f1), (n2, f2) in itertools.combinations(zip(cx.face_names, cx.faces), 2):
        if set(f1) & set(f2):
            continue
        t1, t2 = [pts[v] for v in f1], [pts[v] for v in f2]
        if any(_float_segment_hits(t1[i], t1[(i + 1) % 3], t2) for i in range(3)) or \
                any(_float_segment_hits(t2[i], t2[(i + 1) % 3], t1) for i in range(3)):
            out.add((n1, n2))
    return out


def _exact_disjoint_vertex_sets(rep, cx):
    faces = dict(zip(cx.face_names, cx.faces))
    return {p for p in rep.improper if not set(faces[p[0]]) & set(faces[p[1]])}


def test_float_oracle_along_flex(s8, flex_domain):
    for a in flex_domain.samples(9):
        rho = flex8_realization(a, with_n=True)
        assert _exact_disjoint_vertex_sets(scan_polyhedron(rho, s8), s8) == _float_improper(rho, s8), a


def test_float_oracle_paper_parameters(b5):
    rho = type1_construct(PAPER_PARAMS)[1]
    assert _exact_disjoint_vertex_sets(scan_polyhedron(rho, b5), b5) == _float_improper(rho, b5)
