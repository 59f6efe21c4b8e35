"""Bipyramid combinatorics, realizations, edge lengths and congruence."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .geometry import cross, dist_sq, is_zero_vector, orient3d, vsub
from .numeric import (
    CertifiedScalar,
    SignUndecidable,
    certified_sign,
    is_exact,
    exact_value,
    sqrt,
    within,
)

APEXES = ("T", "B", "N")


class InvalidN(ValueError):
    pass


class DegenerateEdge(ValueError):
    pass


def label_key(label: str):
    """Serialization order: numeric labels ascending, then T, B, N."""
    if label.isdigit():
        return (0, int(label), "")
    return (1, APEXES.index(label) if label in APEXES else len(APEXES), label)


def sort_labels(labels: Iterable[str]) -> list[str]:
    return sorted(labels, key=label_key)


def edge_key(u: str, v: str) -> tuple[str, str]:
    return (u, v) if label_key(u) <= label_key(v) else (v, u)


def face_name(face: Sequence[str]) -> str:
    """Name a face apex-first, then along the equator: T-5-1, B-1-2, N-B-1."""
    return "-".join(face)


@dataclass(frozen=True)
class SimplicialSurface:
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    # oriented triangles, each edge traversed once in each direction
    faces: tuple[tuple[str, str, str], ...]
    # names in the apex-first convention, aligned with ``faces``
    face_names: tuple[str, ...]

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.faces)

    def non_edges(self) -> list[tuple[str, str]]:
        es = set(self.edges)
        return [edge_key(u, v) for u, v in itertools.combinations(self.vertices, 2)
                if edge_key(u, v) not in es]

    def three_cycles(self) -> list[tuple[str, str, str]]:
        es = set(self.edges)
        out = []
        for tri in itertools.combinations(self.vertices, 3):
            if all(edge_key(a, b) in es for a, b in itertools.combinations(tri, 2)):
                out.append(tri)
        return out

    def face_set(self, name: str) -> frozenset:
        return frozenset(self.faces[self.face_names.index(name)])

    def is_oriented_manifold(self) -> bool:
        directed = [(f[i], f[(i + 1) % 3]) for f in self.faces for i in range(3)]
        if len(set(directed)) != len(directed):
            return False
        return all((b, a) in set(directed) for a, b in directed)


@dataclass(frozen=True)
class BipyramidComplex(SimplicialSurface):
    n: int = 0
    equator_edges: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class SubdividedComplex(SimplicialSurface):
    base: BipyramidComplex | None = None
    new_vertex: str = "N"
    replaced_face: frozenset = frozenset({"B", "1", "2"})
    new_faces: tuple[frozenset, ...] = ()


@dataclass(frozen=True)
class AlmostTetrahedron:
    index: tuple[str, str]
    vertex_set: frozenset
    missing_edge: frozenset = frozenset({"T", "B"})


def build_bipyramid(n: int) -> BipyramidComplex:
    """The n-gonal bipyramid with faces (i, i+1, T) and (i+1, i, B)."""
    if n < 4:
        raise InvalidN(f"n must be at least 4, got {n}")
    eq = [str(i) for i in range(1, n + 1)]
    equator = tuple((eq[i], eq[(i + 1) % n]) for i in range(n))
    edges = [edge_key(a, b) for a, b in equator]
    edges += [edge_key(v, apex) for v in eq for apex in ("T", "B")]
    faces, names = [], []
    for a, b in equator:
        faces.append((a, b, "T"))
        names.append(face_name(("T", a, b)))
    for a, b in equator:
        faces.append((b, a, "B"))
        names.append(face_name(("B", a, b)))
    return BipyramidComplex(
        vertices=tuple(eq + ["T", "B"]),
        edges=tuple(sorted(edges, key=lambda e: (label_key(e[0]), label_key(e[1])))),
        faces=tuple(faces),
        face_names=tuple(names),
        n=n,
        equator_edges=equator,
    )


def build_subdivided() -> SubdividedComplex:
    """B5 with face {B,1,2} replaced by three faces through N."""
    base = build_bipyramid(5)
    idx = base.face_names.index("B-1-2")
    faces = list(base.faces[:idx] + base.faces[idx + 1:])
    names = list(base.face_names[:idx] + base.face_names[idx + 1:])
    # the removed face is (2, 1, B); each of its edges keeps its direction
    faces += [("1", "B", "N"), ("2", "1", "N"), ("B", "2", "N")]
    names += ["N-B-1", "N-1-2", "N-B-2"]
    edges = list(base.edges) + [edge_key("N", v) for v in ("1", "2", "B")]
    return SubdividedComplex(
        vertices=base.vertices + ("N",),
        edges=tuple(sorted(edges, key=lambda e: (label_key(e[0]), label_key(e[1])))),
        faces=tuple(faces),
        face_names=tuple(names),
        base=base,
        new_faces=tuple(frozenset(f) for f in faces[-3:]),
    )


def almost_tetrahedra(cx: BipyramidComplex) -> list[AlmostTetrahedron]:
    return [AlmostTetrahedron((a, b), frozenset({a, b, "T", "B"})) for a, b in cx.equator_edges]


@dataclass(frozen=True)
class Realization:
    """Vertex label -> 3-vector of exact or certified scalars."""

    coordinates: Mapping[str, tuple] = field(default_factory=dict)

    def __post_init__(self):
        coords = {}
        for k, p in self.coordinates.items():
            if len(p) != 3:
                raise ValueError(f"vertex {k}: expected 3 coordinates")
            coords[str(k)] = tuple(x if isinstance(x, (Fraction, CertifiedScalar))
                                   else Fraction(x) for x in p)
        object.__setattr__(self, "coordinates", dict(sorted(coords.items(),
                                                            key=lambda kv: label_key(kv[0]))))

    def __getitem__(self, label: str) -> tuple:
        return self.coordinates[label]

    def __contains__(self, label) -> bool:
        return label in self.coordinates

    @property
    def labels(self) -> list[str]:
        return list(self.coordinates)

    def is_exact(self) -> bool:
        return all(is_exact(x) for p in self.coordinates.values() for x in p)

    def restrict(self, labels: Iterable[str]) -> "Realization":
        return Realization({k: self.coordinates[k] for k in labels})

    def extend(self, extra: Mapping[str, tuple]) -> "Realization":
        d = dict(self.coordinates)
        d.update(extra)
        return Realization(d)

    def transform(self, matrix, translation=(0, 0, 0)) -> "Realization":
        """Apply x -> matrix @ x + translation to every vertex."""
        out = {}
        for k, p in self.coordinates.items():
            out[k] = tuple(sum((matrix[r][c] * p[c] for c in range(3)), Fraction(0))
                           + translation[r] for r in range(3))
        return Realization(out)


@dataclass(frozen=True)
class EdgeLengths:
    """Squared edge lengths keyed by sorted edge label pairs."""

    lambda_sq: Mapping[tuple[str, str], object]

    def __getitem__(self, edge) -> object:
        return self.lambda_sq[edge_key(*edge)]

    def length(self, edge):
        """The Euclidean length, as a certified square root."""
        return sqrt(self[edge])

    @property
    def edges(self) -> list[tuple[str, str]]:
        return list(self.lambda_sq)

    def equals(self, other: "EdgeLengths", tol: Fraction | None = None) -> bool:
        """Exact equality for exact entries; |difference| <= tol otherwise."""
        if set(self.lambda_sq) != set(other.lambda_sq):
            return False
        for e, v in self.lambda_sq.items():
            w = other.lambda_sq[e]
            if is_exact(v) and is_exact(w):
                if exact_value(v) != exact_value(w):
                    return False
            else:
                if tol is None or not within(v - w, tol):
                    return False
        return True


def edge_lengths_sq(rho: Realization, cx: SimplicialSurface) -> EdgeLengths:
    out = {}
    for u, v in cx.edges:
        d = dist_sq(rho[u], rho[v])
        try:
            zero = certified_sign(d) == 0
        except SignUndecidable:
            zero = False
        if zero:
            raise DegenerateEdge(f"edge {u}-{v} has zero length")
        out[(u, v)] = d
    return EdgeLengths(out)


def _pairwise(rho: Realization) -> dict:
    labs = rho.labels
    return {(u, v): dist_sq(rho[u], rho[v]) for u, v in itertools.combinations(labs, 2)}


def are_congruent(rho1: Realization, rho2: Realization, tol: Fraction | None = None) -> bool:
    """Direct congruence via equal pairwise distances plus one orientation sign.

    Exact realizations are compared exactly; otherwise squared distances must
    agree within ``tol`` (default ``2**-64``).
    """
    if set(rho1.labels) != set(rho2.labels):
        raise ValueError("realizations have different vertex sets")
    if tol is None:
        tol = Fraction(1, 2 ** 64)
    labs = rho1.labels
    d1, d2 = _pairwise(rho1), _pairwise(rho2.restrict(labs))
    for key, v in d1.items():
        w = d2[key]
        if is_exact(v) and is_exact(w):
            if exact_value(v) != exact_value(w):
                return False
        elif not within(v - w, tol):
            return False
    for quad in itertools.combinations(labs, 4):
        s1 = certified_sign(orient3d(*(rho1[q] for q in quad)))
        if s1 != 0:
            return certified_sign(orient3d(*(rho2[q] for q in quad))) == s1
    # planar: a rotation realizes the mirror image
    return True


@dataclass
class NondegeneracyReport:
    collinear: list = field(default_factory=list)
    constant_non_edges: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.collinear and not self.constant_non_edges


def check_nondegeneracy(samples: Sequence[Realization], cx: SimplicialSurface,
                        tol: Fraction | None = None) -> NondegeneracyReport:
    """Flag collinear 3-cycles and non-edges that keep their length."""
    if len(samples) < 2:
        raise ValueError("need at least two samples")
    report = NondegeneracyReport()
    for idx, rho in enumerate(samples):
        for tri in cx.three_cycles():
            a, b, c = (rho[x] for x in tri)
            if is_zero_vector(cross(vsub(b, a), vsub(c, a))):
                report.collinear.append((idx, tri))
    width = tol if tol is not None else Fraction(1, 2 ** 64)
    for u, v in cx.non_edges():
        ref = dist_sq(samples[0][u], samples[0][v])
        constant = True
        for rho in samples[1:]:
            d = dist_sq(rho[u], rho[v])
            if is_exact(d) and is_exact(ref):
                same = exact_value(d) == exact_value(ref)
            else:
                same = within(d - ref, width)
            if not same:
                constant = False
                break
        if constant:
            report.constant_non_edges.append((u, v))
    return report
