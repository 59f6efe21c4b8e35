"""Oriented Cayley-Menger coordinates of a bipyramid and their identities.

A configuration point stores every squared distance ``d`` together with the
oriented volumes ``s`` of the tetrahedra ``(i, i+1, T, B)``.  The printed
polynomial identities linking distances and volumes are implemented verbatim
and used to rebuild the full distance/volume table from the edge data.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .complexes import BipyramidComplex, Realization, build_bipyramid, edge_key, label_key
from .geometry import det, dist_sq, orient3d
from .numeric import (
    SignUndecidable,
    certified_sign,
    exact_value,
    is_exact,
)


class SingularCoefficient(ArithmeticError):
    pass


class InconsistentSeed(ValueError):
    pass


class NegativeSquaredVolume(ValueError):
    pass


def oriented_volume(a1, a2, a3, a4):
    """(1/6) det(a1 - a4, a2 - a4, a3 - a4)."""
    return orient3d(a1, a2, a3, a4) / 6


def cm_matrix(points_d: list[list]) -> list[list]:
    """Bordered Cayley-Menger matrix from a symmetric squared-distance table."""
    n = len(points_d)
    rows = [[Fraction(0)] + [Fraction(1)] * n]
    for i in range(n):
        rows.append([Fraction(1)] + [points_d[i][j] for j in range(n)])
    return rows


def cm_det_5x5(d_i_ip1, d_iT, d_iB, d_ip1T, d_ip1B, d_TB):
    """Determinant of M_{i,i+1,T,B}; equals 288 times the squared volume."""
    z = Fraction(0)
    table = [
        [z, d_i_ip1, d_iT, d_iB],
        [d_i_ip1, z, d_ip1T, d_ip1B],
        [d_iT, d_ip1T, z, d_TB],
        [d_iB, d_ip1B, d_TB, z],
    ]
    return det(cm_matrix(table))


def cm_det_6x6(d_ik, d_ij, d_iT, d_iB, d_kj, d_kT, d_kB, d_jT, d_jB, d_TB):
    """The five-point bordered determinant (vertices i, k, j, T, B); zero in R^3."""
    z = Fraction(0)
    table = [
        [z, d_ik, d_ij, d_iT, d_iB],
        [d_ik, z, d_kj, d_kT, d_kB],
        [d_ij, d_kj, z, d_jT, d_jB],
        [d_iT, d_kT, d_jT, z, d_TB],
        [d_iB, d_kB, d_jB, d_TB, z],
    ]
    return det(cm_matrix(table))


@dataclass(frozen=True)
class SignedDiagonalVolume:
    i: str
    j: str
    value: object


@dataclass(frozen=True)
class SquaredVolume:
    vertex_quadruple: tuple[str, str, str, str]
    value: object


@dataclass
class ConfigurationPoint:
    """Squared distances over vertex pairs and oriented equatorial volumes.

    ``sigma`` optionally carries the diagonal volumes of (i, j, T, B); entries
    are stored for i < j and read antisymmetrically.
    """

    n: int
    d: dict = field(default_factory=dict)
    s: dict = field(default_factory=dict)
    sigma: dict = field(default_factory=dict)

    def dist(self, u: str, v: str):
        if u == v:
            return Fraction(0)
        return self.d[edge_key(u, v)]

    def vol(self, i: str, j: str):
        """The oriented volume of (i, j, T, B), with varsigma_ij = -varsigma_ji."""
        if i == j:
            return Fraction(0)
        if (i, j) in self.s:
            return self.s[(i, j)]
        if (j, i) in self.s:
            return -self.s[(j, i)]
        if (i, j) in self.sigma:
            return self.sigma[(i, j)]
        if (j, i) in self.sigma:
            return -self.sigma[(j, i)]
        raise KeyError((i, j))

    def diagonal(self, i: str, j: str) -> SignedDiagonalVolume:
        return SignedDiagonalVolume(i, j, self.vol(i, j))

    @property
    def equator(self) -> list[tuple[str, str]]:
        return [(str(i), str(i % self.n + 1)) for i in range(1, self.n + 1)]

    @property
    def d_TB(self):
        return self.dist("T", "B")

    def s_vector(self) -> list:
        return [self.s[e] for e in self.equator]


def embed(rho: Realization, cx: BipyramidComplex | None = None) -> ConfigurationPoint:
    """All pairwise squared distances plus s_e = vol(i, i+1, T, B)."""
    n = cx.n if cx is not None else sum(1 for lab in rho.labels if lab.isdigit())
    labels = [str(i) for i in range(1, n + 1)] + ["T", "B"]
    d = {edge_key(u, v): dist_sq(rho[u], rho[v]) for u, v in itertools.combinations(labels, 2)}
    cp = ConfigurationPoint(n=n, d=d)
    for i, j in cp.equator:
        cp.s[(i, j)] = oriented_volume(rho[i], rho[j], rho["T"], rho["B"])
    return cp


def membership_residuals(cp: ConfigurationPoint) -> dict:
    """288 s_e^2 - det(M_e) for each equatorial edge."""
    out = {}
    for i, j in cp.equator:
        m = cm_det_5x5(cp.dist(i, j), cp.dist(i, "T"), cp.dist(i, "B"),
                       cp.dist(j, "T"), cp.dist(j, "B"), cp.d_TB)
        out[(i, j)] = 288 * cp.s[(i, j)] ** 2 - m
    return out


def generalized_volume(cp: ConfigurationPoint):
    total = Fraction(0)
    for e in cp.equator:
        total = total + cp.s[e]
    return total


def squared_volume(cp: ConfigurationPoint, quad: tuple[str, str, str, str]) -> SquaredVolume:
    """W of a tetrahedron from its six squared distances (det / 288)."""
    table = [[cp.dist(u, v) for v in quad] for u in quad]
    w = det(cm_matrix(table)) / 288
    if is_exact(w):
        if exact_value(w) < 0:
            raise NegativeSquaredVolume(f"squared volume of {quad} is negative")
    else:
        try:
            negative = certified_sign(w) < 0
        except SignUndecidable:
            negative = False
        if negative:
            raise NegativeSquaredVolume(f"squared volume of {quad} is certified negative")
    return SquaredVolume(tuple(quad), w)


def coeff_a(d_kT, d_kB, d_TB):
    return 2 * (d_kT * d_kB + d_kT * d_TB + d_kB * d_TB) - (d_kT ** 2 + d_kB ** 2 + d_TB ** 2)


def coeff_b(d_ik, d_kj, d_iT, d_iB, d_jT, d_jB, d_kT, d_kB, d_TB):
    return ((d_ik * (d_jB - d_jT) + d_kj * (d_iB - d_iT) + d_kB * (d_iT + d_jT)
             - d_kT * (d_iB + d_jB)) * (d_kB - d_kT)
            - d_TB * (d_iT * (d_kB + d_kj) + d_iB * (d_kT + d_kj)
                      + d_jT * (d_ik + d_kB) + d_jB * (d_ik + d_kT))
            - (d_kB + d_kT - d_TB) * (d_TB * (d_ik + d_kj) + (d_iT * d_jB + d_jT * d_iB))
            + 2 * (d_iT * d_kB * d_jT + d_iB * d_kT * d_jB + d_kB * d_kT * d_TB
                   + d_ik * d_kj * d_TB))


def _nonzero_or_raise(x, what: str):
    try:
        sgn = certified_sign(x)
    except SignUndecidable as exc:
        raise SingularCoefficient(f"{what} is not certified nonzero") from exc
    if sgn == 0:
        raise SingularCoefficient(f"{what} vanishes")


def reconstruct_d_ij(known: ConfigurationPoint, i: str, j: str, k: str):
    """d_ij = (288 vol_ik vol_kj - b_ijk) / a_k."""
    a = coeff_a(known.dist(k, "T"), known.dist(k, "B"), known.d_TB)
    _nonzero_or_raise(a, f"a_{k}")
    b = coeff_b(known.dist(i, k), known.dist(k, j), known.dist(i, "T"), known.dist(i, "B"),
                known.dist(j, "T"), known.dist(j, "B"), known.dist(k, "T"),
                known.dist(k, "B"), known.d_TB)
    return (288 * known.vol(i, k) * known.vol(k, j) - b) / a


def diagonal_coefficients(known: ConfigurationPoint, i: str, j: str, k: str):
    """The pair (a_{i,j,k}, b_{i,j,k}) of the diagonal-volume identity."""
    w_ikjB = squared_volume(known, (i, k, j, "B")).value
    w_ikjT = squared_volume(known, (i, k, j, "T")).value
    w_ijTB = squared_volume(known, (i, j, "T", "B")).value
    ss = known.vol(i, k) + known.vol(k, j)
    ss2 = ss ** 2
    a = -4 * ss * (ss2 - w_ikjB - w_ikjT + w_ijTB)
    b = (ss2 * (ss2 - 2 * w_ikjB - 2 * w_ikjT + 6 * w_ijTB)
         + (w_ikjB + w_ikjT - w_ijTB) ** 2 - 4 * w_ikjB * w_ikjT)
    return a, b


def reconstruct_sigma_ij(known: ConfigurationPoint, i: str, j: str, k: str):
    """varsigma_ij = -b_{i,j,k} / a_{i,j,k}; needs d_ij in ``known``."""
    a, b = diagonal_coefficients(known, i, j, k)
    _nonzero_or_raise(a, f"a_{{{i},{j},{k}}}")
    return -b / a


def seed_from(cp: ConfigurationPoint) -> ConfigurationPoint:
    """Restrict a configuration point to edge distances, s-values and d_TB."""
    cx = build_bipyramid(cp.n)
    d = {e: cp.d[e] for e in cx.edges}
    d[edge_key("T", "B")] = cp.d_TB
    return ConfigurationPoint(n=cp.n, d=d, s=dict(cp.s))


def reconstruct_all(seed: ConfigurationPoint, pivot: str = "prev") -> ConfigurationPoint:
    """Rebuild every d_ij and varsigma_ij by induction on j - i.

    ``pivot="prev"`` uses k = j - 1 at each step; ``"next"`` uses k = i + 1 and
    serves as an independent cross-check.
    """
    n = seed.n
    for e, r in membership_residuals(seed).items():
        if is_exact(r):
            bad = exact_value(r) != 0
        else:
            try:
                bad = certified_sign(r) != 0
            except SignUndecidable:
                bad = False
        if bad:
            raise InconsistentSeed(f"288 s^2 != det(M) on edge {e}")
    out = ConfigurationPoint(n=n, d=dict(seed.d), s=dict(seed.s))
    for gap in range(2, n):
        for i in range(1, n - gap + 1):
            j = i + gap
            k = j - 1 if pivot == "prev" else i + 1
            si, sj, sk = str(i), str(j), str(k)
            dij = reconstruct_d_ij(out, si, sj, sk)
            key = edge_key(si, sj)
            if key in seed.d:
                # closing pair (1, n): already an edge, the induction must agree
                if is_exact(dij) and is_exact(seed.d[key]) and \
                        exact_value(dij) != exact_value(seed.d[key]):
                    raise InconsistentSeed(f"closing distance d_{si}{sj} disagrees with the seed")
                continue
            out.d[key] = dij
            out.sigma[(si, sj)] = reconstruct_sigma_ij(out, si, sj, sk)
    return out


def table_from(cp: ConfigurationPoint) -> dict:
    """Every varsigma_ij (i < j) of a configuration, reading s for adjacent pairs."""
    labels = [str(i) for i in range(1, cp.n + 1)]
    return {(i, j): cp.vol(i, j) for i, j in itertools.combinations(labels, 2)}


def diagonal_volumes(rho: Realization, n: int) -> dict:
    """Directly measured varsigma_ij for i < j (coordinate oracle)."""
    labels = [str(i) for i in range(1, n + 1)]
    return {(i, j): oriented_volume(rho[i], rho[j], rho["T"], rho["B"])
            for i, j in itertools.combinations(labels, 2)}


def to_json(cp: ConfigurationPoint) -> dict:
    from .numeric import format_scalar

    d = {f"{u}-{v}": format_scalar(x) for (u, v), x in
         sorted(cp.d.items(), key=lambda kv: (label_key(kv[0][0]), label_key(kv[0][1])))}
    s = {f"({i},{j})": format_scalar(cp.s[(i, j)]) for i, j in cp.equator}
    return {"d": d, "s": s}


def from_json(data: Mapping, n: int | None = None) -> ConfigurationPoint:
    from .numeric import parse_scalar

    d = {}
    for key, val in data["d"].items():
        u, v = key.split("-")
        d[edge_key(u, v)] = parse_scalar(val)
    s = {}
    for key, val in data["s"].items():
        i, j = key.strip("()").split(",")
        s[(i.strip(), j.strip())] = parse_scalar(val)
    return ConfigurationPoint(n=n or len(s), d=d, s=s)
