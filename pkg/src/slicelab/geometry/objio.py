"""Wavefront OBJ export and a matching minimal parser.

Output is deterministic: one "v x y z" line per vertex with six decimals,
one "f i j k" line per triangle with 1-based indices, "\\n" line endings,
no header. Identical meshes produce byte-identical files.
"""
from __future__ import annotations

from .mesh import TriangleMesh


def export_obj(m: TriangleMesh) -> bytes:
    m.validate_indices()
    parts: list[str] = []
    for x, y, z in m.vertices:
        parts.append(f"v {x:.6f} {y:.6f} {z:.6f}\n")
    for a, b, c in m.triangles:
        parts.append(f"f {a + 1} {b + 1} {c + 1}\n")
    return "".join(parts).encode("ascii")


def parse_obj(data: bytes) -> TriangleMesh:
    """Parse v/f lines produced by export_obj (or compatible writers).

    Face entries may carry "/vt/vn" suffixes, which are ignored; faces with
    more than three vertices are fan-triangulated.
    """
    mesh = TriangleMesh()
    for raw in data.decode("utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if fields[0] == "v" and len(fields) >= 4:
            mesh.vertices.append((float(fields[1]), float(fields[2]), float(fields[3])))
        elif fields[0] == "f" and len(fields) >= 4:
            idx = [int(f.split("/")[0]) - 1 for f in fields[1:]]
            for k in range(1, len(idx) - 1):
                mesh.triangles.append((idx[0], idx[k], idx[k + 1]))
    mesh.validate_indices()
    return mesh
