"""Sign-group analysis of a bipyramid motion.

Over a fixed top-bottom distance the motion has finitely many configurations.
Comparing the signs of the equatorial volumes s_e between two of them gives a
0/1 vector; the vectors seen over a real fiber generate a subgroup of Z_2^5,
which is compared against the two groups possible for a flexible pentagonal
bipyramid.  Only real configurations are visible here, so an observed group
can be smaller than the true one.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .cayley_menger import ConfigurationPoint, cm_det_5x5, embed
from .complexes import EdgeLengths, are_congruent, build_bipyramid, edge_key
from .constructions import PoseSource
from .geometry import dist_sq
from .numeric import SignUndecidable, certified_sign, sqrt, to_fraction_approx, within

N_EQ = 5
ZERO = (0,) * N_EQ
ALL_ONES = (1,) * N_EQ


class FlatEdge(ValueError):
    pass


class MismatchedLengths(ValueError):
    pass


class TargetOutOfRange(ValueError):
    pass


class WrongSupport(ValueError):
    pass


SignVector = tuple


def xor(u: SignVector, v: SignVector) -> SignVector:
    return tuple(a ^ b for a, b in zip(u, v))


def weight(u: SignVector) -> int:
    return sum(u)


def dihedral_images(u: SignVector) -> list[SignVector]:
    """The 10 images of an edge vector under the symmetries of the 5-cycle."""
    n = len(u)
    rots = [tuple(u[(e + k) % n] for e in range(n)) for k in range(n)]
    refl = [tuple(u[(k - e) % n] for e in range(n)) for k in range(n)]
    return rots + refl


def canonical(u: SignVector) -> SignVector:
    return min(dihedral_images(u))


def gap_pattern(u: SignVector) -> tuple:
    """Cyclic gaps between consecutive ones, sorted; (1,0,1,0,0) gives (2, 3)."""
    idx = [i for i, b in enumerate(u) if b]
    n = len(u)
    return tuple(sorted((idx[(k + 1) % len(idx)] - idx[k]) % n or n for k in range(len(idx))))


@dataclass(frozen=True)
class SignGroup:
    elements: frozenset

    @classmethod
    def generated_by(cls, gens: Iterable[SignVector]) -> "SignGroup":
        group = {ZERO}
        for g in gens:
            g = tuple(g)
            if g not in group:
                group |= {xor(g, h) for h in group}
        return cls(frozenset(group))

    def is_xor_closed(self) -> bool:
        return ZERO in self.elements and all(
            xor(u, v) in self.elements for u in self.elements for v in self.elements)

    def forbidden_weights(self) -> list[SignVector]:
        """Elements with exactly one one or exactly one zero."""
        return sorted(u for u in self.elements if weight(u) in (1, N_EQ - 1))

    def sorted_elements(self) -> list[SignVector]:
        return sorted(self.elements)


class GaloisClass(enum.Enum):
    AllFlip = "AllFlip"
    FourElement = "FourElement"
    Inconclusive = "Inconclusive"


@dataclass
class Classification:
    cls: GaloisClass
    group: SignGroup
    canonical_two_ones: SignVector | None = None

    def to_json(self) -> dict:
        return {
            "class": self.cls.value,
            "elements": [list(u) for u in self.group.sorted_elements()],
            "canonical_two_ones": None if self.canonical_two_ones is None
            else list(self.canonical_two_ones),
        }


def sign_vector(base: ConfigurationPoint, other: ConfigurationPoint,
                tol: Fraction | None = None) -> SignVector:
    """Bit e is 1 iff s_e has opposite certified signs at the two points."""
    tol = Fraction(1, 2 ** 40) if tol is None else tol
    for u, v in build_bipyramid(base.n).edges:
        if not within(base.dist(u, v) - other.dist(u, v), tol):
            raise MismatchedLengths(f"edge {u}-{v} differs between the two points")
    bits = []
    for e in base.equator:
        try:
            a, b = certified_sign(base.s[e]), certified_sign(other.s[e])
        except SignUndecidable as exc:
            raise FlatEdge(f"sign of s at edge {e} undecided") from exc
        if a == 0 or b == 0:
            raise FlatEdge(f"s vanishes at edge {e}")
        bits.append(int(a != b))
    return tuple(bits)


# -- motion range -------------------------------------------------------------


@dataclass
class MotionRange:
    """Squared T-B distances at which each almost tetrahedron is flat."""

    per_edge: dict
    m_sq: object
    M_sq: object

    @property
    def m(self):
        return sqrt(self.m_sq)

    @property
    def M(self):
        return sqrt(self.M_sq)

    def nonempty(self) -> bool:
        return certified_sign(self.M_sq - self.m_sq) > 0


def flat_quadratic(lengths: EdgeLengths, i: str, j: str) -> tuple:
    """det M_{i,j,T,B} = qa x^2 + qb x + qc in x = d_TB."""
    args = (lengths[(i, j)], lengths[(i, "T")], lengths[(i, "B")],
            lengths[(j, "T")], lengths[(j, "B")])
    f0, f1, fm = (cm_det_5x5(*args, Fraction(x)) for x in (0, 1, -1))
    return (f1 + fm) / 2 - f0, (f1 - fm) / 2, f0


def flat_distances(lengths: EdgeLengths, i: str, j: str) -> tuple:
    """Roots of det M_{i,j,T,B} as a quadratic in x = d_TB, smaller first."""
    qa, qb, f0 = flat_quadratic(lengths, i, j)
    disc = qb * qb - 4 * qa * f0
    root = sqrt(disc)
    r1, r2 = (-qb - root) / (2 * qa), (-qb + root) / (2 * qa)
    return (r1, r2) if certified_sign(r2 - r1) >= 0 else (r2, r1)


def motion_range(lengths: EdgeLengths, n: int = N_EQ) -> MotionRange:
    cx = build_bipyramid(n)
    per_edge = {e: flat_distances(lengths, *e) for e in cx.equator_edges}
    lows = [v[0] for v in per_edge.values()]
    highs = [v[1] for v in per_edge.values()]
    m_sq = max(lows, key=lambda x: to_fraction_approx(x))
    M_sq = min(highs, key=lambda x: to_fraction_approx(x))
    return MotionRange(per_edge, m_sq, M_sq)


# -- fibers -------------------------------------------------------------------


@dataclass
class FiberPoint:
    branch: object
    param: Fraction
    point: ConfigurationPoint
    realization: object


def _grid(domain, count: int) -> list[Fraction]:
    lo, hi = Fraction(domain[0]), Fraction(domain[1])
    if lo == hi:
        return [lo]
    return [lo + (hi - lo) * Fraction(i, count - 1) for i in range(count)]


def _d_tb(rho):
    return dist_sq(rho["T"], rho["B"])


def observed_range(source: PoseSource, grid: int = 65) -> tuple[Fraction, Fraction]:
    vals = [to_fraction_approx(_d_tb(source(x, br)), 64)
            for br in source.branches for x in _grid(source.domain, grid)]
    return min(vals), max(vals)


def _sign_or_zero(x) -> int:
    try:
        return certified_sign(x)
    except SignUndecidable:
        return 0


def fiber_search(source: PoseSource, target, tol: Fraction | None = None,
                 grid: int = 65, max_steps: int = 200) -> list[FiberPoint]:
    """Grid scan plus bisection per branch, deduplicated by direct congruence."""
    tol = Fraction(1, 2 ** 48) if tol is None else Fraction(tol)
    target = Fraction(target)
    lo, hi = observed_range(source, grid)
    if target < lo or target > hi:
        raise TargetOutOfRange(f"target {target} outside the observed range [{float(lo)}, {float(hi)}]")
    found: list[FiberPoint] = []

    def add(branch, x):
        rho = source(x, branch)
        if any(are_congruent(rho, fp.realization, tol) for fp in found):
            return
        found.append(FiberPoint(branch, x, embed(rho), rho))

    for branch in source.branches:
        xs = _grid(source.domain, grid)
        fs = [_sign_or_zero(_d_tb(source(x, branch)) - target) for x in xs]
        for k, (x, s) in enumerate(zip(xs, fs)):
            if s == 0:
                add(branch, x)
            elif k + 1 < len(xs) and fs[k + 1] == -s:
                a, b, sa = x, xs[k + 1], s
                for _ in range(max_steps):
                    mid = (a + b) / 2
                    val = _d_tb(source(mid, branch)) - target
                    if within(val, tol):
                        break
                    if _sign_or_zero(val) == sa:
                        a = mid
                    else:
                        b = mid
                add(branch, mid)
    return found


def fiber(source: PoseSource, target, tol: Fraction | None = None, grid: int = 65) -> list[ConfigurationPoint]:
    return [fp.point for fp in fiber_search(source, target, tol, grid)]


def generic_targets(source: PoseSource, tol: Fraction | None = None, grid: int = 65) -> list[Fraction]:
    """Quartiles of the observed d_TB range, avoiding per-edge flat distances."""
    tol = Fraction(1, 2 ** 20) if tol is None else tol
    lo, hi = observed_range(source, grid)
    mid = (source.domain[0] + source.domain[1]) / 2
    mr = motion_range(_lengths(source(mid, source.branches[0])))
    flats = [to_fraction_approx(v, 64) for pair in mr.per_edge.values() for v in pair]
    out = []
    for q in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
        t = lo + (hi - lo) * q
        while any(abs(t - f) <= tol for f in flats):
            t += 4 * tol
        out.append(t)
    return out


def _lengths(rho) -> EdgeLengths:
    from .complexes import edge_lengths_sq

    return edge_lengths_sq(rho, build_bipyramid(N_EQ))


def observed_elements(fibers: Sequence[Sequence[ConfigurationPoint]]) -> list[SignVector]:
    out = set()
    for pts in fibers:
        for p, q in itertools.combinations(pts, 2):
            out.add(sign_vector(p, q))
    return sorted(out)


def classify(fibers: Sequence[Sequence[ConfigurationPoint]]) -> Classification:
    group = SignGroup.generated_by(observed_elements(fibers))
    els = group.elements
    if els == {ZERO, ALL_ONES}:
        return Classification(GaloisClass.AllFlip, group)
    if len(els) == 4 and ALL_ONES in els:
        twos = [u for u in els if weight(u) == 2]
        if len(twos) == 1 and gap_pattern(twos[0]) == (2, 3):
            return Classification(GaloisClass.FourElement, group, canonical(twos[0]))
    return Classification(GaloisClass.Inconclusive, group)


def classify_source(source: PoseSource, grid: int = 65) -> tuple[Classification, list]:
    fibers = [fiber(source, t, grid=grid) for t in generic_targets(source, grid=grid)]
    return classify(fibers), fibers


def zero_sum_check(cp: ConfigurationPoint, element: SignVector):
    total = Fraction(0)
    for bit, e in zip(element, cp.equator):
        if bit:
            total = total + cp.s[e]
    return total


# -- flat poses and two-ones consequences --------------------------------------


@dataclass
class FlatPoseReport:
    # (branch, parameter) where every s_e is certified zero
    flat: list = field(default_factory=list)
    motion_range: MotionRange | None = None
    samples: int = 0


def flat_pose_scan(source: PoseSource, count: int = 33) -> FlatPoseReport:
    xs = _grid(source.domain, count)
    rep = FlatPoseReport()
    if len(xs) == 1 and len(source.branches) == 1:
        return rep
    mid = (Fraction(source.domain[0]) + Fraction(source.domain[1])) / 2
    rep.motion_range = motion_range(_lengths(source(mid, source.branches[0])))
    for br in source.branches:
        for x in xs:
            cp = embed(source(x, br))
            rep.samples += 1
            if all(_is_zero(v) for v in cp.s_vector()):
                rep.flat.append((br, x))
    return rep


def _is_zero(x) -> bool:
    try:
        return certified_sign(x) == 0
    except SignUndecidable:
        return False


@dataclass
class TwoOnesReport:
    edges: tuple
    equal_lengths: bool
    same_flat_distances: bool

    @property
    def ok(self) -> bool:
        return self.equal_lengths and self.same_flat_distances


def two_ones_consequences(lengths: EdgeLengths, element: SignVector,
                          tol: Fraction | None = None) -> TwoOnesReport:
    if weight(element) != 2:
        raise WrongSupport(f"{element} does not have exactly two ones")
    eq = build_bipyramid(N_EQ).equator_edges
    e1, e2 = (eq[i] for i, b in enumerate(element) if b)
    equal = _same(lengths[e1], lengths[e2], tol)
    # same roots <=> same monic quadratic
    q1, q2 = flat_quadratic(lengths, *e1), flat_quadratic(lengths, *e2)
    same_flat = all(_same(q1[k] / q1[0], q2[k] / q2[0], tol) for k in (1, 2))
    return TwoOnesReport((edge_key(*e1), edge_key(*e2)), equal, same_flat)


def _same(x, y, tol) -> bool:
    d = x - y
    if tol is None:
        return _is_zero(d)
    return within(d, tol)
