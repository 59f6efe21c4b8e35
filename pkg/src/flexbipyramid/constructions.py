"""Explicit flexible bipyramid constructions.

* the Type III Nelson motion, a rational curve in a parameter ``t``;
* the six-parameter line-symmetric (Type I) Nelson construction;
* the radical parametrization, in the apex height ``a``, of the flex through
  the parameters ``(-5/8, 1, 15/7, 11/4, 5/2, 2/7)``, and the extra vertex N
  that turns it into an embedded 8-vertex polyhedron.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .complexes import Realization, build_bipyramid, build_subdivided, edge_key
from .geometry import cross, dist_sq, dot, is_zero_vector, vadd, vscale, vsub
from .numeric import (
    SignUndecidable,
    certified_sign,
    sqrt,
)

F = Fraction


class DegenerateParams(ValueError):
    pass


class OutOfFlexDomain(ValueError):
    pass


class CollinearFrame(ValueError):
    pass


# --------------------------------------------------------------------------
# Type III motion


def type3_pose_projective(p, q, include_zero: bool = False) -> Realization:
    """The Type III motion at t = p / q, written homogeneously so q = 0 is t = oo."""
    p, q = F(p), F(q)
    if p == 0 and q == 0:
        raise ValueError("(p, q) = (0, 0) is not a parameter")
    p2, q2 = p * p, q * q
    k1 = F(3) / (28 * (9 * p2 + 13 * q2))
    r1 = (k1 * (-9 * p2 + 10 * q2), k1 * (69 * p2 + 161 * q2) / 4, k1 * 23 * p * q)
    k4 = F(989) / (493 * (p2 + 4 * q2) * (4 * p2 + q2))
    r4 = (k4 * (-4 * p2 * p2 + p2 * q2 - 4 * q2 * q2) / 6, F(0), k4 * (2 * p2 * p * q + 2 * p * q2 * q))
    k5 = F(69) / (9794 * (9 * p2 + 13 * q2))
    r5 = (k5 * (126 * p2 * p2 - 2429 * p2 * q2 - 1244 * q2 * q2) / (p2 + 4 * q2),
          k5 * (231 * p2 + 2971 * q2) / 4,
          k5 * (-1063 * p2 * p * q + 992 * p * q2 * q) / (p2 + 4 * q2))
    rb = (F(-4, 27), (q2 - p2) / (9 * (p2 + q2)), 2 * p * q / (9 * (p2 + q2)))
    coords = {
        "1": r1, "2": (F(1, 6), F(0), F(0)), "3": (F(0), F(0), F(0)), "4": r4, "5": r5,
        "T": (F(0), F(1, 4), F(0)), "B": rb,
    }
    if include_zero:
        coords["0"] = (F(23, 157) * (-3 * p2 + 12 * q2) / (2 * p2 + 8 * q2), F(46, 157),
                       F(23, 157) * 6 * p * q / (p2 + 4 * q2))
    return Realization(coords)


def type3_pose(t, include_zero: bool = False) -> Realization:
    """The Type III motion at a rational t; ``t="inf"`` gives the pose at infinity."""
    if isinstance(t, str) and t.lower() in ("inf", "oo", "infinity"):
        return type3_pose_projective(1, 0, include_zero)
    return type3_pose_projective(F(t), 1, include_zero)


# --------------------------------------------------------------------------
# Type I (line-symmetric) Nelson construction


@dataclass(frozen=True)
class Type1Params:
    t: object
    a: object
    x3: object
    y3: object
    z3: object
    mu: object

    def astuple(self) -> tuple:
        return (self.t, self.a, self.x3, self.y3, self.z3, self.mu)

    @classmethod
    def parse(cls, values: Sequence) -> "Type1Params":
        if len(values) != 6:
            raise ValueError("expected six parameters (t, a, x3, y3, z3, mu)")
        return cls(*(F(v) if not hasattr(v, "enclosure") else v for v in values))

    def rotation_cs(self):
        t2 = self.t * self.t
        return (t2 - 1) / (t2 + 1), 2 * self.t / (t2 + 1)


def type1_points(p: Type1Params) -> dict:
    """Coordinates of 0..5, T, B; the line l1 is the x-axis and l2 lies in z = 0."""
    c, s = p.rotation_cs()
    a, x3, y3, z3, mu = p.a, p.x3, p.y3, p.z3, p.mu
    p3 = (x3, y3, z3)
    p1 = (x3, -y3, -z3)
    p5 = (c * x3 + s * y3, -c * y3 + s * x3, -z3)
    p0 = vadd(vscale(mu, p1), vscale(1 - mu, p5))
    k = mu * (c - 1)
    p2 = (-(k - c) * x3 - (mu * s - s) * y3, (mu * s - s) * x3 - (k - c) * y3, z3)
    p4 = (-mu * s * y3 + (k + 1) * x3, mu * s * x3 + (k + 1) * y3, z3)
    zero = F(0)
    return {"0": p0, "1": p1, "2": p2, "3": p3, "4": p4, "5": p5,
            "T": (zero, zero, a), "B": (zero, zero, -a)}


@dataclass(frozen=True)
class FittingPair:
    rho_k: Realization
    rho_p: Realization

    def induced(self) -> Realization:
        """The B5 realization obtained by forgetting vertex 0."""
        coords = {k: v for k, v in self.rho_k.coordinates.items() if k != "0"}
        coords.update({k: v for k, v in self.rho_p.coordinates.items() if k != "0"})
        return Realization(coords)


def _nonzero(x) -> bool:
    return certified_sign(x) != 0


def type1_construct(p: Type1Params) -> tuple[FittingPair, Realization]:
    if not _nonzero(p.a):
        raise DegenerateParams("apex height a must be nonzero")
    if not _nonzero(p.z3):
        raise DegenerateParams("vertex 3 lies on the plane of the two lines (z3 = 0)")
    pts = type1_points(p)
    # equal distances to l1 and l2 <=> vertex 3 on a bisector plane
    if not _nonzero(dist_sq(pts["1"], pts["3"]) - dist_sq(pts["5"], pts["3"])):
        raise DegenerateParams("vertex 3 lies on a bisector plane of the two lines")
    fp = FittingPair(
        Realization({k: pts[k] for k in ("0", "1", "2", "3", "T", "B")}),
        Realization({k: pts[k] for k in ("0", "3", "4", "5", "T", "B")}),
    )
    rho = fp.induced()
    for u, v in build_bipyramid(5).edges:
        if not _nonzero(dist_sq(rho[u], rho[v])):
            raise DegenerateParams(f"edge {u}-{v} collapses")
    return fp, rho


def omega_residuals(points) -> tuple:
    """The two polynomials in the squared distances that vanish on the family."""
    w = {key: dist_sq(points[key[0]], points[key[1]]) for key in
         [("0", "1"), ("0", "5"), ("0", "T"), ("1", "T"), ("2", "T"), ("3", "T")]}
    r_sum = w["1", "T"] + w["2", "T"] - w["0", "T"] - w["3", "T"]
    r_pyth = w["0", "1"] * w["0", "5"] - (w["0", "T"] - w["1", "T"]) ** 2
    return r_sum, r_pyth


@dataclass
class OmegaReport:
    residuals: tuple
    ok: bool


def omega_check(p: Type1Params | dict) -> OmegaReport:
    points = type1_points(p) if isinstance(p, Type1Params) else p
    res = omega_residuals(points)
    return OmegaReport(res, all(certified_sign(r) == 0 for r in res))


@dataclass
class FittingPairReport:
    shared_mismatch: list = field(default_factory=list)
    collinear: bool = False
    # "sum" when 0 lies between 1 and 5, "difference" otherwise
    distance_case: str | None = None
    lambda_sq_10: object = None
    lambda_sq_50: object = None

    @property
    def ok(self) -> bool:
        return not self.shared_mismatch and self.collinear


def fitting_pair_check(fp: FittingPair) -> FittingPairReport:
    rep = FittingPairReport()
    for v in ("0", "3", "T", "B"):
        if not is_zero_vector(vsub(fp.rho_k[v], fp.rho_p[v])):
            rep.shared_mismatch.append(v)
    p0, p1, p5 = fp.rho_k["0"], fp.rho_k["1"], fp.rho_p["5"]
    rep.collinear = is_zero_vector(cross(vsub(p1, p0), vsub(p5, p0)))
    rep.lambda_sq_10 = dist_sq(p1, p0)
    rep.lambda_sq_50 = dist_sq(p5, p0)
    if rep.collinear:
        sgn = certified_sign(dot(vsub(p1, p0), vsub(p5, p0)))
        rep.distance_case = {-1: "sum", 1: "difference", 0: None}[sgn]
    return rep


def random_type1_params(rng, numerators: int = 40, denominators: int = 12) -> Type1Params:
    """Random rational parameters that pass every construction invariant."""
    def q():
        return F(rng.randint(-numerators, numerators), rng.randint(1, denominators))

    while True:
        p = Type1Params(q(), q(), q(), q(), q(), q())
        try:
            type1_construct(p)
        except DegenerateParams:
            continue
        return p


# --------------------------------------------------------------------------
# Flex of the 8-vertex polyhedron

PAPER_PARAMS = Type1Params(F(-5, 8), F(1), F(15, 7), F(11, 4), F(5, 2), F(2, 7))
PRINCIPAL = (-1, 1)
BRANCHES = ((-1, 1), (-1, -1), (1, 1), (1, -1))


def poly_A1(a):
    a2 = a * a
    return -2029832431225781 * a2 * a2 + 3583108625879406 * a2 - 1376807431326600


def poly_A2(a):
    a2 = a * a
    return -69776 * a2 * a2 + 744101 * a2 - 436100


def poly_B(a):
    a2 = a * a
    return -3419024 * a2 * a2 + 41949653 * a2 - 21368900


def poly_C1(a):
    a2 = a * a
    return 14910363664 * a2 ** 3 - 192762292317 * a2 * a2 + 1211236673778 * a2 - 560045725400


def poly_C2(a):
    a2 = a * a
    return 4472093788624 * a2 ** 3 - 40400312279273 * a2 * a2 + 38266083804200 * a2 - 9318977290000


@dataclass(frozen=True)
class FlexCurvePoint:
    a: object
    A1: object
    A2: object
    B: object
    C1: object
    C2: object
    branch_signs: tuple = PRINCIPAL

    @classmethod
    def at(cls, a, branch=PRINCIPAL) -> "FlexCurvePoint":
        a = F(a) if not hasattr(a, "enclosure") else a
        return cls(a, poly_A1(a), poly_A2(a), poly_B(a), poly_C1(a), poly_C2(a), tuple(branch))

    def inner_root(self, precision_bits=None):
        return self.branch_signs[1] * sqrt(self.A1 * self.A2, precision_bits)

    def outer_radicands(self, precision_bits=None):
        r = self.inner_root(precision_bits)
        return (self.C1 - 20 * r) / self.B, (320 * self.a ** 2 * r - self.C2) / self.B

    def is_valid(self, max_precision_bits=None) -> bool:
        """A1 A2 > 0, B != 0 and both outer radicands > 0, all certified."""
        try:
            if certified_sign(self.A1 * self.A2, max_precision_bits) <= 0:
                return False
            if certified_sign(self.A2, max_precision_bits) <= 0:
                return False
            if certified_sign(self.B, max_precision_bits) == 0:
                return False
            return all(certified_sign(r, max_precision_bits) > 0 for r in self.outer_radicands())
        except SignUndecidable:
            return False


def flex8_params(a, branch=PRINCIPAL, precision_bits: int | None = None) -> Type1Params:
    """Parameters of the flex at apex height ``a``.

    ``branch = (sign_t, sign_inner)``.  The printed formulas are the principal
    branch (-1, +1).  ``sign_inner`` flips the inner radical sqrt(A1 A2);
    ``sign_t = +1`` gives the mirror image, which also negates y3.  On the
    flipped inner branch y3 is continued analytically through its zero.
    """
    pt = FlexCurvePoint.at(a, branch)
    sign_t, _ = pt.branch_signs
    try:
        if certified_sign(pt.A1 * pt.A2) < 0 or certified_sign(pt.A2) < 0:
            raise OutOfFlexDomain(f"A1*A2 or A2 negative at a = {a}")
        if certified_sign(pt.B) == 0:
            raise OutOfFlexDomain(f"B vanishes at a = {a}")
        rad_x, rad_y = pt.outer_radicands(precision_bits)
        if certified_sign(rad_x) < 0 or certified_sign(rad_y) < 0:
            raise OutOfFlexDomain(f"outer radicand negative at a = {a}")
    except SignUndecidable as exc:
        raise OutOfFlexDomain(f"radicand sign undecided at a = {a}") from exc
    a_ = pt.a
    t = sign_t * sqrt(F(9529), precision_bits) * sqrt(pt.A2, precision_bits) / (76232 * a_)
    x3 = sqrt(F(89), precision_bits) / 623 * sqrt(rad_x, precision_bits)
    y3 = sqrt(F(89), precision_bits) / (2492 * a_) * sqrt(rad_y, precision_bits)
    # on the flipped inner branch the y radicand has a double root at
    # 685701 a^2 = 436100, where y3 crosses zero and changes sign
    if pt.branch_signs[1] < 0 and certified_sign(685701 * a_ * a_ - 436100) < 0:
        y3 = -y3
    if sign_t > 0:
        y3 = -y3
    return Type1Params(t, a_, x3, y3, F(5) / (2 * a_), F(2, 7))


def place_vertex_N(rho: Realization) -> Realization:
    """Extend a B5 realization by N = p1 - 9/10 u + 3 v + 3/5 u x v with u = p2 - p1, v = pB - p1."""
    p1, p2, pb = rho["1"], rho["2"], rho["B"]
    u, v = vsub(p2, p1), vsub(pb, p1)
    w = cross(u, v)
    if is_zero_vector(w):
        raise CollinearFrame("p1, p2, pB are collinear")
    n = vadd(vadd(vadd(p1, vscale(F(-9, 10), u)), vscale(F(3), v)), vscale(F(3, 5), w))
    return rho.restrict([k for k in rho.labels if k != "0"]).extend({"N": n})


def flex8_realization(a, branch=PRINCIPAL, with_n: bool = False,
                      precision_bits: int | None = None) -> Realization:
    _, rho = type1_construct(flex8_params(a, branch, precision_bits))
    return place_vertex_N(rho) if with_n else rho


@dataclass(frozen=True)
class FlexDomain:
    """Rational brackets around the two ends of the flex interval in ``a``.

    ``inner`` is a rational interval on which every sample is certified valid;
    each end lies in the matching bracket (valid side, invalid side).
    """

    inner: tuple
    lower_bracket: tuple
    upper_bracket: tuple

    def samples(self, count: int) -> list[Fraction]:
        lo, hi = self.inner
        if count == 1:
            return [(lo + hi) / 2]
        return [lo + (hi - lo) * F(i, count - 1) for i in range(count)]


def flex8_domain(branch=PRINCIPAL, start=F(1), step=F(1, 64), bits: int = 40) -> FlexDomain:
    """Recover the interval of valid ``a`` around ``start`` by stepping and bisection."""
    def valid(a):
        return FlexCurvePoint.at(a, branch).is_valid()

    if not valid(start):
        raise OutOfFlexDomain(f"start value a = {start} is not on the flex")

    def walk(direction):
        good = F(start)
        while True:
            nxt = good + direction * step
            if nxt <= 0 or not valid(nxt):
                bad = nxt
                break
            good = nxt
        tol = F(1, 2 ** bits)
        while abs(bad - good) > tol:
            mid = (good + bad) / 2
            if mid > 0 and valid(mid):
                good = mid
            else:
                bad = mid
        return good, bad

    lo_good, lo_bad = walk(-1)
    hi_good, hi_bad = walk(1)
    return FlexDomain((lo_good, hi_good), (lo_bad, lo_good), (hi_good, hi_bad))


# --------------------------------------------------------------------------
# Pose sources: families of realizations indexed by (branch, parameter)


@dataclass(frozen=True)
class PoseSource:
    name: str
    pose: Callable
    branches: tuple
    domain: tuple
    # True when the pose is exact for rational parameters
    exact: bool = False

    def __call__(self, x, branch=None) -> Realization:
        return self.pose(x, self.branches[0] if branch is None else branch)


def type3_source() -> PoseSource:
    """Type III motion in two charts: t in [-1, 1] and u = 1/t in [-1, 1]."""
    def pose(x, chart):
        return type3_pose_projective(x, 1) if chart == "t" else type3_pose_projective(1, x)

    return PoseSource("type3", pose, ("t", "1/t"), (F(-1), F(1)), exact=True)


def flex8_source(domain: FlexDomain | None = None, with_n: bool = False,
                 branches=BRANCHES, precision_bits: int | None = None) -> PoseSource:
    dom = domain or flex8_domain()

    def pose(a, branch):
        return flex8_realization(a, branch, with_n, precision_bits)

    return PoseSource("flex8", pose, tuple(branches), dom.inner, exact=False)


def type1_source(params: Type1Params) -> PoseSource:
    """A single rigid pose of the Type I construction (no motion)."""
    def pose(_x, _branch):
        return type1_construct(params)[1]

    return PoseSource("type1", pose, ("rigid",), (F(0), F(0)), exact=True)


def subdivided_lengths_constant(rho_a: Realization, rho_b: Realization, tol=None) -> bool:
    from .complexes import edge_lengths_sq

    cx = build_subdivided()
    return edge_lengths_sq(rho_a, cx).equals(edge_lengths_sq(rho_b, cx), tol)


def n_distances(rho: Realization) -> dict:
    return {edge_key("N", v): dist_sq(rho["N"], rho[v]) for v in ("B", "1", "2")}
