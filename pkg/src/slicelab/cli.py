"""Command line entry points.

Subcommands:
  tile         cut a directory of slice images into a tile store
  serve        run the collaboration server
  reconstruct  build a surface mesh from a contour stack JSON file
  simulate     measure routing egress across session sizes

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from slicelab.geometry import (
    GeometryError,
    contour_from_json,
    export_obj,
    reconstruct_volume,
)
from slicelab.server import ServerConfig, ServerError
from slicelab.sim import run_scaling
from slicelab.tiler import TilerError, ingest_dataset


def _read_config_file(path: str) -> dict:
    """Parse key=value lines; blank lines and # comments are skipped."""
    overrides: dict = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {stripped!r}")
        key, _, value = stripped.partition("=")
        overrides[key.strip()] = value.strip()
    return overrides


def _load_contour_documents(path: str) -> list[dict]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(doc, dict) and "contours" in doc:
        doc = doc["contours"]
    if not isinstance(doc, list) or not doc:
        raise ValueError(f"{path}: expected a non-empty list of contour documents")
    return doc


def cmd_tile(args: argparse.Namespace) -> int:
    manifest = ingest_dataset(
        args.source_dir,
        args.out_dir,
        dataset_id=args.dataset_id,
        pixel_spacing=args.pixel_spacing,
        slice_spacing=args.slice_spacing,
        tile_size=args.tile_size,
    )
    total = sum(
        manifest.grid(z)[0] * manifest.grid(z)[1] for z in range(manifest.zoom_levels)
    )
    print(
        f"tiled {manifest.slice_count} slices "
        f"({manifest.slice_width_px}x{manifest.slice_height_px}) "
        f"into {total} tiles/slice across {manifest.zoom_levels} zoom levels"
    )
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from slicelab.server.app import run_server

    overrides = _read_config_file(args.config) if args.config else {}
    if args.host is not None:
        overrides["listen_host"] = args.host
    if args.port is not None:
        overrides["listen_port"] = args.port
    if args.store_dir is not None:
        overrides["store_dir"] = args.store_dir
    if args.dataset_root is not None:
        overrides["dataset_root"] = args.dataset_root
    config = ServerConfig.load(overrides)
    print(f"serving on {config.listen_host}:{config.listen_port}", file=sys.stderr)
    run_server(config)
    return 0


def cmd_reconstruct(args: argparse.Namespace) -> int:
    documents = _load_contour_documents(args.contours)
    contours = [contour_from_json(d) for d in documents]
    if args.structure is not None:
        contours = [c for c in contours if c.structure_label == args.structure]
        if not contours:
            raise ValueError(f"no contours with structure {args.structure!r}")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        mesh, stats = reconstruct_volume(contours, args.slice_spacing)
    data = export_obj(mesh)
    Path(args.output).write_bytes(data)
    for w in caught:
        print(f"warning: {type(w.message).__name__}: {w.message}", file=sys.stderr)
    print(json.dumps(stats.to_json(), indent=2))
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        counts = tuple(int(p) for p in args.participants.split(","))
    except ValueError:
        raise ValueError("--participants must be comma-separated integers") from None
    report = run_scaling(
        counts,
        send_rate_hz=args.rate,
        duration_s=args.duration,
        seed=args.seed,
        group_capacity=args.group_capacity,
    )
    csv_text = report.to_csv()
    if args.output:
        Path(args.output).write_text(csv_text, encoding="utf-8")
    else:
        print(csv_text, end="")
    print(
        f"slope={report.slope:.3f} intercept={report.intercept:.3f} "
        f"r_squared={report.r_squared:.6f}",
        file=sys.stderr,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slicelab")
    sub = parser.add_subparsers(dest="command", required=True)

    tile = sub.add_parser("tile", help="cut slice images into a tile store")
    tile.add_argument("source_dir")
    tile.add_argument("out_dir")
    tile.add_argument("--dataset-id", required=True)
    tile.add_argument("--pixel-spacing", type=float, required=True)
    tile.add_argument("--slice-spacing", type=float, required=True)
    tile.add_argument("--tile-size", type=int, default=256)
    tile.set_defaults(func=cmd_tile)

    serve = sub.add_parser("serve", help="run the collaboration server")
    serve.add_argument("--config", help="key=value settings file")
    serve.add_argument("--host")
    serve.add_argument("--port", type=int)
    serve.add_argument("--store-dir")
    serve.add_argument("--dataset-root")
    serve.set_defaults(func=cmd_serve)

    rec = sub.add_parser("reconstruct", help="build a mesh from contour JSON")
    rec.add_argument("contours", help="JSON file with contour documents")
    rec.add_argument("-o", "--output", required=True, help="OBJ file to write")
    rec.add_argument("--slice-spacing", type=float, required=True)
    rec.add_argument("--structure", help="keep only this structure label")
    rec.set_defaults(func=cmd_reconstruct)

    sim = sub.add_parser("simulate", help="measure egress scaling")
    sim.add_argument("--participants", default="4,8,16,32")
    sim.add_argument("--rate", type=float, default=10.0)
    sim.add_argument("--duration", type=float, default=20.0)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--group-capacity", type=int, default=4)
    sim.add_argument("-o", "--output", help="write CSV here instead of stdout")
    sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ServerError, TilerError, GeometryError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
