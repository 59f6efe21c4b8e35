"""
A rational Type III motion
==========================

Seven points, rational in t, with the same fifteen edge lengths for every t.
The motion flattens twice, at t = 0 and t = infinity, and its sign group is
the smallest possible one.
"""

from fractions import Fraction

from flexbipyramid.cayley_menger import embed, generalized_volume
from flexbipyramid.complexes import build_bipyramid, edge_lengths_sq
from flexbipyramid.constructions import type3_pose, type3_source
from flexbipyramid.galois import classify_source, flat_pose_scan

b5 = build_bipyramid(5)

# the edge lengths do not depend on t
ref = edge_lengths_sq(type3_pose(1), b5)
for t in (Fraction(-3), Fraction(1, 7), Fraction(5, 2), "inf"):
    print(t, ref.equals(edge_lengths_sq(type3_pose(t), b5)))

# oriented volumes of the five equatorial tetrahedra; they always sum to zero
cp = embed(type3_pose(Fraction(1, 2)))
print([str(s) for s in cp.s_vector()], generalized_volume(cp))

# flat poses: one in each chart, at t = 0 and at 1/t = 0
print(flat_pose_scan(type3_source()).flat)

# two real configurations per T-B distance, related by a mirror
result, fibers = classify_source(type3_source())
print(result.to_json(), [len(f) for f in fibers])
