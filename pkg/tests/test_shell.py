"""Bands between stacked loops."""
import math
import random
from collections import defaultdict

import pytest

from slicelab.geometry import (
    Contour,
    NormalizedLoop,
    Point2,
    build_shell,
    merge_meshes,
    normalize_contour,
)
from shapes import random_convex_loop, regular_polygon, square_loop


def norm_outer(loop, depth=0):
    nl = normalize_contour(Contour(0, "s", "a", loop)).outer
    if depth:
        # Re-tag for parity tests: same geometry, different nesting depth.
        nl = NormalizedLoop(
            vertices=nl.vertices,
            angles=nl.angles,
            center=nl.center,
            depth=depth,
            parent_index=0,
        )
    return nl


def edge_audit(mesh):
    """Classify undirected edges by incidence and record directions."""
    incidence = defaultdict(list)
    for a, b, c in mesh.triangles:
        for u, v in ((a, b), (b, c), (c, a)):
            incidence[frozenset((u, v))].append((u, v))
    boundary, interior = set(), set()
    for key, dirs in incidence.items():
        if len(dirs) == 1:
            boundary.add(dirs[0])
        elif len(dirs) == 2:
            assert dirs[0] == (dirs[1][1], dirs[1][0]), "interior edge not opposed"
            interior.add(key)
        else:
            raise AssertionError(f"edge used {len(dirs)} times")
    return boundary, interior


def rim_edges(start, n, forward):
    out = set()
    for k in range(n):
        u, v = start + k, start + (k + 1) % n
        out.add((u, v) if forward else (v, u))
    return out


def test_square_over_square_count():
    a = norm_outer(square_loop())
    b = norm_outer(square_loop())
    mesh = build_shell(a, 0.0, b, 1.0)
    assert len(mesh.triangles) == 8
    assert len(mesh.vertices) == 8


def test_square_to_octagon_count():
    a = norm_outer(square_loop(r=1.0))
    b = norm_outer(regular_polygon(8, 1.0))
    mesh = build_shell(a, 0.0, b, 2.0)
    assert len(mesh.triangles) == 4 + 8


def test_every_triangle_spans_both_planes():
    a = norm_outer(square_loop())
    b = norm_outer(regular_polygon(8, 1.0))
    mesh = build_shell(a, 0.0, b, 2.0)
    for tri in mesh.triangles:
        zs = sorted(mesh.vertices[i][2] for i in tri)
        assert zs[0] == 0.0 and zs[2] == 2.0


def test_band_boundary_is_exactly_the_two_rims():
    rng = random.Random(77)
    for _ in range(20):
        la = random_convex_loop(rng, 7)
        lb = random_convex_loop(rng, 11)
        a, b = norm_outer(la), norm_outer(lb)
        mesh = build_shell(a, 0.0, b, 3.0)
        assert len(mesh.triangles) == len(a) + len(b)

        boundary, interior = edge_audit(mesh)
        n_low, n_up = len(a), len(b)
        # Lower rim runs against loop order, upper rim with it, so the band
        # glues seamlessly onto neighbours sharing either rim.
        expected = rim_edges(0, n_low, forward=False) | rim_edges(
            n_low, n_up, forward=True
        )
        assert boundary == expected
        # Euler check for an annulus: V - E + F == 0.
        v = len(mesh.vertices)
        e = len(boundary) + len(interior)
        f = len(mesh.triangles)
        assert v - e + f == 0


def test_band_normals_point_away_from_axis():
    rng = random.Random(3)
    la = random_convex_loop(rng, 9)
    a = norm_outer(la)
    b = norm_outer(la)
    mesh = build_shell(a, 0.0, b, 2.0)
    cx = sum(p.x for p in a.vertices) / len(a)
    cy = sum(p.y for p in a.vertices) / len(a)
    for tri in mesh.triangles:
        va, vb, vc = (mesh.vertices[i] for i in tri)
        ux, uy, uz = (vb[0] - va[0], vb[1] - va[1], vb[2] - va[2])
        wx, wy, wz = (vc[0] - va[0], vc[1] - va[1], vc[2] - va[2])
        nx, ny = uy * wz - uz * wy, uz * wx - ux * wz
        mx = (va[0] + vb[0] + vc[0]) / 3 - cx
        my = (va[1] + vb[1] + vc[1]) / 3 - cy
        assert nx * mx + ny * my > 0


def test_stacked_bands_share_a_seamless_rim():
    a = norm_outer(regular_polygon(6, 2.0))
    b = norm_outer(regular_polygon(6, 1.5))
    c = norm_outer(regular_polygon(6, 2.5))
    lower = build_shell(a, 0.0, b, 1.0)
    upper = build_shell(b, 1.0, c, 2.0)
    merged = merge_meshes([lower, upper])
    boundary, _ = edge_audit(merged)
    zs = {round(merged.vertices[u][2], 9) for u, v in boundary} | {
        round(merged.vertices[v][2], 9) for u, v in boundary
    }
    # The shared rim at z=1 must be fully interior after welding.
    assert zs == {0.0, 2.0}


def test_same_plane_rejected():
    a = norm_outer(square_loop())
    with pytest.raises(ValueError):
        build_shell(a, 1.0, a, 1.0)


def test_mixed_parity_rejected():
    a = norm_outer(square_loop())
    b = norm_outer(square_loop(r=0.5), depth=1)
    with pytest.raises(ValueError):
        build_shell(a, 0.0, b, 1.0)


def test_empty_loop_rejected():
    from slicelab.geometry import EmptyLoop

    a = norm_outer(square_loop())
    empty = NormalizedLoop(vertices=[], angles=[], center=Point2(0, 0), depth=0, parent_index=None)
    with pytest.raises(EmptyLoop):
        build_shell(a, 0.0, empty, 1.0)


def test_argument_order_does_not_matter():
    a = norm_outer(square_loop())
    b = norm_outer(regular_polygon(8, 1.0))
    m1 = build_shell(a, 0.0, b, 2.0)
    m2 = build_shell(b, 2.0, a, 0.0)
    assert m1.vertices == m2.vertices
    assert m1.triangles == m2.triangles
