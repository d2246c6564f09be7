// Wavefront OBJ parsing for the mesh preview. Handles the subset the
// server emits (v and f lines, triangles, 1-based indices) plus f-entries
// of the a/b/c form that other exporters produce; polygons fan-triangulate.

export interface ParsedMesh {
  positions: Float32Array;
  indices: Uint32Array;
  vertexCount: number;
  triangleCount: number;
}

export class MalformedObj extends Error {}

export function parseObj(text: string): ParsedMesh {
  const positions: number[] = [];
  const indices: number[] = [];
  const lines = text.split("\n");
  for (let ln = 0; ln < lines.length; ln++) {
    const line = lines[ln]!.trim();
    if (line === "" || line.startsWith("#")) continue;
    const parts = line.split(/\s+/);
    const kind = parts[0];
    if (kind === "v") {
      if (parts.length < 4) throw new MalformedObj(`line ${ln + 1}: vertex needs 3 coords`);
      for (let i = 1; i <= 3; i++) {
        const value = Number(parts[i]);
        if (!Number.isFinite(value)) {
          throw new MalformedObj(`line ${ln + 1}: bad coordinate ${parts[i]}`);
        }
        positions.push(value);
      }
    } else if (kind === "f") {
      if (parts.length < 4) throw new MalformedObj(`line ${ln + 1}: face needs 3 vertices`);
      const corner = (s: string): number => {
        const head = s.split("/")[0]!;
        const idx = Number(head);
        if (!Number.isInteger(idx) || idx === 0) {
          throw new MalformedObj(`line ${ln + 1}: bad face index ${s}`);
        }
        // negative indices count back from the current vertex list
        const zero = idx > 0 ? idx - 1 : positions.length / 3 + idx;
        if (zero < 0 || zero >= positions.length / 3) {
          throw new MalformedObj(`line ${ln + 1}: face index ${idx} out of range`);
        }
        return zero;
      };
      const a = corner(parts[1]!);
      for (let i = 2; i < parts.length - 1; i++) {
        indices.push(a, corner(parts[i]!), corner(parts[i + 1]!));
      }
    }
    // other directives (vn, vt, o, g, s, mtllib, usemtl) are ignored
  }
  return {
    positions: new Float32Array(positions),
    indices: new Uint32Array(indices),
    vertexCount: positions.length / 3,
    triangleCount: indices.length / 3,
  };
}
