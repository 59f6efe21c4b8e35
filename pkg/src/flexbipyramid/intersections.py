"""Exact triangle-triangle contact classification and self-intersection scans.

Two faces of an embedded polyhedron may meet only along the simplex they share
combinatorially.  Every decision here is a sign of an orientation determinant,
so rational inputs are classified exactly; certified inputs are refined until
each sign is decided or ``SignUndecidable`` is raised.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .complexes import Realization, SimplicialSurface
from .geometry import cross, dot, norm_sq, orient3d, vsub
from .numeric import SignUndecidable, certified_sign, format_scalar, to_fraction_approx


class DegenerateTriangle(ValueError):
    pass


class ContactClass(enum.Enum):
    Disjoint = "Disjoint"
    SharedVertexOnly = "SharedVertexOnly"
    SharedEdgeOnly = "SharedEdgeOnly"
    Improper = "Improper"


def _sign(x) -> int:
    return certified_sign(x)


def _normal(tri):
    return cross(vsub(tri[1], tri[0]), vsub(tri[2], tri[0]))


def _check_triangle(tri):
    if all(_sign(c) == 0 for c in _normal(tri)):
        raise DegenerateTriangle("triangle vertices are collinear")


# -- 2D helpers for coplanar configurations --------------------------------


def _drop_axis(n) -> int:
    """Index of a nonzero component of the normal; projecting it out keeps areas."""
    for i in range(3):
        if _sign(n[i]) != 0:
            return i
    raise DegenerateTriangle("zero normal")


def _project(p, axis):
    return tuple(p[i] for i in range(3) if i != axis)


def _orient2d(a, b, c) -> int:
    return _sign((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def _on_segment_2d(p, a, b) -> bool:
    """p collinear with a, b: is it between them?"""
    for i in range(2):
        lo, hi = (a[i], b[i]) if _sign(a[i] - b[i]) <= 0 else (b[i], a[i])
        if _sign(p[i] - lo) < 0 or _sign(hi - p[i]) < 0:
            return False
    return True


def _segments_meet_2d(p, q, a, b) -> bool:
    o1, o2 = _orient2d(p, q, a), _orient2d(p, q, b)
    o3, o4 = _orient2d(a, b, p), _orient2d(a, b, q)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    return ((o1 == 0 and _on_segment_2d(a, p, q)) or (o2 == 0 and _on_segment_2d(b, p, q))
            or (o3 == 0 and _on_segment_2d(p, a, b)) or (o4 == 0 and _on_segment_2d(q, a, b)))


def _in_triangle_2d(p, tri) -> bool:
    s = [_orient2d(tri[i], tri[(i + 1) % 3], p) for i in range(3)]
    return all(x >= 0 for x in s) or all(x <= 0 for x in s)


def _segment_meets_triangle(p, q, tri) -> bool:
    a, b, c = tri
    sp, sq = _sign(orient3d(a, b, c, p)), _sign(orient3d(a, b, c, q))
    if sp * sq > 0:
        return False
    if sp == 0 and sq == 0:
        axis = _drop_axis(_normal(tri))
        p2, q2 = _project(p, axis), _project(q, axis)
        t2 = [_project(v, axis) for v in tri]
        if _in_triangle_2d(p2, t2) or _in_triangle_2d(q2, t2):
            return True
        return any(_segments_meet_2d(p2, q2, t2[i], t2[(i + 1) % 3]) for i in range(3))
    s = [_sign(orient3d(p, q, tri[i], tri[(i + 1) % 3])) for i in range(3)]
    return all(x >= 0 for x in s) or all(x <= 0 for x in s)


def _ray_enters(v, d_end, tri) -> bool:
    """Does the segment from vertex v of ``tri`` towards d_end contain points of tri other than v?"""
    others = [w for w in tri if w is not v]
    b1, b2 = vsub(others[0], v), vsub(others[1], v)
    d = vsub(d_end, v)
    n = cross(b1, b2)
    if _sign(dot(n, d)) != 0:
        return False
    # d in the cone spanned by b1, b2 (angle below pi)
    return _sign(dot(n, cross(b1, d))) >= 0 and _sign(dot(n, cross(d, b2))) >= 0


def classify_contact(f1: Sequence, f2: Sequence, shared: Sequence[tuple[int, int]] = ()) -> ContactClass:
    """Classify how two triangles meet.

    ``shared`` lists index pairs (i, j) with f1[i] and f2[j] the same vertex of
    the complex.  Coordinates of shared vertices must agree.
    """
    _check_triangle(f1)
    _check_triangle(f2)
    shared = list(shared)
    if len(shared) >= 3:
        raise ValueError("faces share all three vertices")
    if len(shared) == 2:
        (i1, j1), (i2, j2) = shared
        u, v = f1[i1], f1[i2]
        a = f1[3 - i1 - i2]
        b = f2[3 - j1 - j2]
        if _sign(orient3d(u, v, a, b)) != 0:
            return ContactClass.SharedEdgeOnly
        e = vsub(v, u)
        same_side = _sign(dot(cross(e, vsub(a, u)), cross(e, vsub(b, u)))) > 0
        return ContactClass.Improper if same_side else ContactClass.SharedEdgeOnly
    if len(shared) == 1:
        i, j = shared[0]
        v1, v2 = f1[i], f2[j]
        far1 = [f1[k] for k in range(3) if k != i]
        far2 = [f2[k] for k in range(3) if k != j]
        if _segment_meets_triangle(far1[0], far1[1], f2) or _segment_meets_triangle(far2[0], far2[1], f1):
            return ContactClass.Improper
        if any(_ray_enters(v2, w, list(f2)) for w in far1) or \
                any(_ray_enters(v1, w, list(f1)) for w in far2):
            return ContactClass.Improper
        return ContactClass.SharedVertexOnly
    for x, y in ((f1, f2), (f2, f1)):
        for k in range(3):
            if _segment_meets_triangle(x[k], x[(k + 1) % 3], y):
                return ContactClass.Improper
    return ContactClass.Disjoint


# -- exact distances for the separation margin ------------------------------


def _seg_point_dist_sq(p, a, b) -> Fraction:
    ab, ap = vsub(b, a), vsub(p, a)
    denom = norm_sq(ab)
    t = min(max(dot(ap, ab) / denom, Fraction(0)), Fraction(1))
    d = vsub(ap, tuple(t * x for x in ab))
    return norm_sq(d)


def _point_triangle_dist_sq(p, tri) -> Fraction:
    a, b, c = tri
    n = _normal(tri)
    s = [dot(cross(vsub(tri[(i + 1) % 3], tri[i]), vsub(p, tri[i])), n) for i in range(3)]
    if all(x >= 0 for x in s) or all(x <= 0 for x in s):
        h = dot(n, vsub(p, a))
        return h * h / norm_sq(n)
    return min(_seg_point_dist_sq(p, tri[i], tri[(i + 1) % 3]) for i in range(3))


def _seg_seg_dist_sq(p1, q1, p2, q2) -> Fraction:
    d1, d2, r = vsub(q1, p1), vsub(q2, p2), vsub(p1, p2)
    a, e, f = norm_sq(d1), norm_sq(d2), dot(d2, r)
    c, b = dot(d1, r), dot(d1, d2)
    denom = a * e - b * b
    candidates = [_seg_point_dist_sq(p1, p2, q2), _seg_point_dist_sq(q1, p2, q2),
                  _seg_point_dist_sq(p2, p1, q1), _seg_point_dist_sq(q2, p1, q1)]
    if denom != 0:
        s = (b * f - c * e) / denom
        t = (a * f - b * c) / denom
        if 0 <= s <= 1 and 0 <= t <= 1:
            x = tuple(p1[i] + s * d1[i] - p2[i] - t * d2[i] for i in range(3))
            candidates.append(norm_sq(x))
    return min(candidates)


def triangle_distance_sq(f1, f2) -> Fraction:
    """Squared distance between two disjoint rational triangles."""
    best = min(_point_triangle_dist_sq(p, f2) for p in f1)
    best = min(best, min(_point_triangle_dist_sq(p, f1) for p in f2))
    for i, j in itertools.product(range(3), range(3)):
        best = min(best, _seg_seg_dist_sq(f1[i], f1[(i + 1) % 3], f2[j], f2[(j + 1) % 3]))
    return best


# -- whole-polyhedron scans -------------------------------------------------


@dataclass
class ContactReport:
    pairs: list = field(default_factory=list)
    undecided: list = field(default_factory=list)
    # over face pairs without a common vertex; None if there are none
    min_separation_sq: object = None

    @property
    def improper(self) -> list:
        return [(a, b) for a, b, c in self.pairs if c is ContactClass.Improper]

    @property
    def improper_count(self) -> int:
        return len(self.improper)

    def to_json(self) -> dict:
        return {
            "improper": [list(p) for p in self.improper],
            "undecided": [list(p) for p in self.undecided],
            "min_separation_sq": None if self.min_separation_sq is None
            else format_scalar(self.min_separation_sq),
        }


def _rational_coords(p, bits: int):
    return tuple(x if isinstance(x, Fraction) else to_fraction_approx(x, bits) for x in p)


def scan_polyhedron(rho: Realization, cx: SimplicialSurface, margin_bits: int = 96) -> ContactReport:
    """Classify every unordered face pair, in the complex's face order.

    The separation margin is computed exactly from coordinates rounded to
    ``margin_bits`` bits, which is exact for rational realizations.
    """
    report = ContactReport()
    approx = {k: _rational_coords(rho[k], margin_bits) for k in rho.labels}
    margin = None
    names = cx.face_names
    for (n1, f1), (n2, f2) in itertools.combinations(zip(names, cx.faces), 2):
        shared = [(i, j) for i, u in enumerate(f1) for j, v in enumerate(f2) if u == v]
        t1 = [rho[v] for v in f1]
        t2 = [rho[v] for v in f2]
        try:
            cls = classify_contact(t1, t2, shared)
        except (SignUndecidable, DegenerateTriangle):
            report.undecided.append((n1, n2))
            continue
        report.pairs.append((n1, n2, cls))
        if not shared and cls is ContactClass.Disjoint:
            d = triangle_distance_sq([approx[v] for v in f1], [approx[v] for v in f2])
            margin = d if margin is None else min(margin, d)
    report.min_separation_sq = margin
    return report


@dataclass
class FlexScan:
    samples: list
    reports: list

    @property
    def worst_margin(self):
        margins = [r.min_separation_sq for r in self.reports if r.min_separation_sq is not None]
        return min(margins) if margins else None

    @property
    def improper_total(self) -> int:
        return sum(r.improper_count for r in self.reports)

    @property
    def undecided_total(self) -> int:
        return sum(len(r.undecided) for r in self.reports)


def scan_flex(pose_source, samples: Sequence, cx: SimplicialSurface, branch=None) -> FlexScan:
    """Scan the realization ``pose_source(x, branch)`` at every sample x."""
    reports = [scan_polyhedron(pose_source(x, branch), cx) for x in samples]
    return FlexScan(list(samples), reports)


@dataclass(frozen=True)
class EmbeddedBracket:
    """Clean samples ``inner`` around the start; each end sits in a (clean, dirty) bracket."""

    inner: tuple
    lower_bracket: tuple | None
    upper_bracket: tuple | None


def embedded_bracket(pose_source, cx: SimplicialSurface, start, domain, branch=None,
                     count: int = 33, bits: int = 16) -> EmbeddedBracket:
    """Walk out from ``start`` over a grid of ``domain`` until a scan reports a
    violation, then bisect each side to width ``2**-bits``.

    Sampled, not continuous: the result is the connected run of clean samples
    containing ``start``.
    """
    lo, hi = Fraction(domain[0]), Fraction(domain[1])

    def clean(x):
        r = scan_polyhedron(pose_source(x, branch), cx)
        return r.improper_count == 0 and not r.undecided

    start = Fraction(start)
    if not clean(start):
        raise ValueError(f"the realization at {start} is not embedded")
    grid = [lo + (hi - lo) * Fraction(i, count - 1) for i in range(count)]

    def side(points):
        good = start
        for x in points:
            if not clean(x):
                bad = x
                break
            good = x
        else:
            return good, None
        while abs(bad - good) > Fraction(1, 2 ** bits):
            mid = (good + bad) / 2
            if clean(mid):
                good = mid
            else:
                bad = mid
        return good, (good, bad) if good < bad else (bad, good)

    lo_good, lo_br = side([x for x in reversed(grid) if x < start])
    hi_good, hi_br = side([x for x in grid if x > start])
    return EmbeddedBracket((lo_good, hi_good), lo_br, hi_br)
