"""Realization JSON and OBJ mesh input/output."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Mapping

from .complexes import Realization, SimplicialSurface, sort_labels
from .numeric import decimal_string, format_scalar, parse_scalar, to_fraction_approx


def realization_to_json(rho: Realization, metadata: Mapping | None = None) -> dict:
    out = {"vertices": {k: [format_scalar(x) for x in rho[k]] for k in rho.labels}}
    if metadata:
        out.update(metadata)
    return out


def _parse_coord(x) -> Fraction:
    if isinstance(x, Mapping):
        # certified values are read back as their printed decimal
        return parse_scalar(x["value"])
    return parse_scalar(x)


def realization_from_json(data: Mapping) -> Realization:
    if "vertices" not in data or not isinstance(data["vertices"], Mapping):
        raise ValueError('realization JSON needs a "vertices" object')
    coords = {}
    for k, p in data["vertices"].items():
        if not isinstance(p, list) or len(p) != 3:
            raise ValueError(f"vertex {k}: expected a list of three coordinates")
        coords[str(k)] = tuple(_parse_coord(x) for x in p)
    return Realization(coords)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _obj_number(x, digits: int = 17) -> str:
    return decimal_string(to_fraction_approx(x, 80), digits)


def write_obj(rho: Realization, cx: SimplicialSurface, name: str = "polyhedron") -> str:
    """Vertices in label order, faces 1-indexed with the complex's orientation.

    A ``# labels`` comment records vertex labels so the mesh can be read back.
    """
    labels = sort_labels(cx.vertices)
    index = {lab: i + 1 for i, lab in enumerate(labels)}
    lines = [f"# labels {' '.join(labels)}", f"o {name}"]
    for lab in labels:
        lines.append("v " + " ".join(_obj_number(x) for x in rho[lab]))
    for face in cx.faces:
        lines.append("f " + " ".join(str(index[v]) for v in face))
    return "\n".join(lines) + "\n"


def read_obj(text: str) -> tuple[Realization, list[tuple[int, int, int]]]:
    labels, verts, faces = None, [], []
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "#" and len(parts) > 1 and parts[1] == "labels":
            labels = parts[2:]
        elif parts[0] == "v":
            verts.append(tuple(Fraction(x) for x in parts[1:4]))
        elif parts[0] == "f":
            faces.append(tuple(int(x.split("/")[0]) for x in parts[1:4]))
    if labels is None:
        labels = [str(i + 1) for i in range(len(verts))]
    if len(labels) != len(verts):
        raise ValueError("label comment does not match the vertex count")
    return Realization(dict(zip(labels, verts))), faces


def load_realization(path: str | Path) -> Realization:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".obj":
        return read_obj(text)[0]
    return realization_from_json(json.loads(text))
