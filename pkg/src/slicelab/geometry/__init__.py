"""Computational geometry core: contour normalization, shell construction,
volume assembly, collision detection, and mesh export.

All operations are pure functions of their inputs and safe to call from
any number of threads.
"""

from .collision import CollisionHit, detect_collisions
from .contour_json import contour_from_json, contour_to_json
from .errors import (
    CapUnsupported,
    DegenerateInput,
    EmptyLoop,
    GeometryError,
    InsufficientContours,
    MixedStructureLabels,
    NonSimpleLoop,
)
from .hull import convex_hull, hull_center
from .mesh import (
    MeshStats,
    TriangleMesh,
    connected_components,
    merge_meshes,
    mesh_stats,
    signed_volume,
)
from .normalize import (
    NormalizedContour,
    NormalizedLoop,
    clockwise_angle_deg,
    counterclockwise_angle_deg,
    normalize_contour,
    normalize_loop,
)
from .objio import export_obj, parse_obj
from .primitives import Contour, Hole, Loop, Point2, Winding, validate_contour
from .reconstruct import (
    OpenContourEnd,
    ReconstructionWarning,
    UnmatchedLoopCapped,
    reconstruct_volume,
)
from .shell import MatchResult, build_shell, cap_contour_end, cap_loop, match_loops
from .simplify import simplify_stroke

__all__ = [
    "CapUnsupported",
    "CollisionHit",
    "Contour",
    "DegenerateInput",
    "EmptyLoop",
    "GeometryError",
    "Hole",
    "InsufficientContours",
    "Loop",
    "MatchResult",
    "MeshStats",
    "MixedStructureLabels",
    "NonSimpleLoop",
    "NormalizedContour",
    "NormalizedLoop",
    "OpenContourEnd",
    "Point2",
    "ReconstructionWarning",
    "TriangleMesh",
    "UnmatchedLoopCapped",
    "Winding",
    "build_shell",
    "cap_contour_end",
    "cap_loop",
    "clockwise_angle_deg",
    "counterclockwise_angle_deg",
    "connected_components",
    "contour_from_json",
    "contour_to_json",
    "convex_hull",
    "detect_collisions",
    "export_obj",
    "hull_center",
    "match_loops",
    "merge_meshes",
    "mesh_stats",
    "normalize_contour",
    "normalize_loop",
    "parse_obj",
    "reconstruct_volume",
    "signed_volume",
    "simplify_stroke",
    "validate_contour",
]
