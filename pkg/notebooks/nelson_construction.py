"""
Gluing two line-symmetric octahedra
===================================

Six rational parameters give two flexible octahedra sharing vertices 0, 3,
T and B.  Dropping vertex 0 leaves a flexible pentagonal bipyramid.  At the
reference parameters it self-intersects in exactly three face pairs, all
through face B-1-2; replacing that face by three faces through a new vertex
N removes them.
"""

from flexbipyramid.complexes import build_bipyramid, build_subdivided
from flexbipyramid.constructions import PAPER_PARAMS, fitting_pair_check, omega_check, place_vertex_N, type1_construct
from flexbipyramid.intersections import scan_polyhedron

pair, rho = type1_construct(PAPER_PARAMS)
for k in rho.labels:
    print(k, [str(x) for x in rho[k]])

# the two gluing constraints hold exactly
print(omega_check(PAPER_PARAMS).residuals)
print(fitting_pair_check(pair))

report = scan_polyhedron(rho, build_bipyramid(5))
print(report.improper)

rho8 = place_vertex_N(rho)
report = scan_polyhedron(rho8, build_subdivided())
print(report.improper_count, float(report.min_separation_sq))
