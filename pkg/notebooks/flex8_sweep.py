"""
The flex in the apex height
===========================

Following the construction as the apex height a varies takes square roots,
so coordinates become certified intervals.  This script recovers the range
of a where the radicands stay real, finds the part of it where the 8-vertex
polyhedron stays embedded, classifies the sign group and writes OBJ frames.
"""

import tempfile
from fractions import Fraction
from pathlib import Path

from flexbipyramid.complexes import build_subdivided
from flexbipyramid.constructions import flex8_domain, flex8_params, flex8_source
from flexbipyramid.galois import classify_source
from flexbipyramid.intersections import embedded_bracket, scan_flex
from flexbipyramid.serialization import write_obj

# at a = 1 the flex passes through the reference parameters
p = flex8_params(1)
print([float(x) for x in p.astuple()])

domain = flex8_domain()
print("radicands real on", [float(x) for x in domain.inner])

s8 = build_subdivided()
source = flex8_source(domain, with_n=True)
bracket = embedded_bracket(source, s8, Fraction(1), domain.inner)
lo, hi = bracket.inner
print("embedded on", float(lo), float(hi))

samples = [lo + (hi - lo) * Fraction(i, 8) for i in range(9)]
scan = scan_flex(source, samples, s8)
print(scan.improper_total, scan.undecided_total, float(scan.worst_margin))

# outside the bracket faces cross
outside = scan_flex(source, [domain.inner[0], domain.inner[1]], s8)
print([r.improper_count for r in outside.reports])

result, fibers = classify_source(flex8_source(domain))
print(result.to_json(), [len(f) for f in fibers])

out = Path(tempfile.mkdtemp())
for i, a in enumerate(samples):
    (out / f"frame_{i:03d}.obj").write_text(write_obj(source(a), s8, name=f"frame_{i:03d}"))
print(sorted(q.name for q in out.iterdir()))
