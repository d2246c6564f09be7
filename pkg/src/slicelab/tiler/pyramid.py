"""Slice datasets to tile pyramids.

A dataset is a directory of same-sized lossless slice images, ordered by
filename. Ingestion cuts every slice into 256 px tiles at zoom 0 (full
resolution) and repeatedly box-downscales by 2x for coarser zoom levels,
cropping edge tiles instead of padding them so a stitch of any level
reproduces that level's pixels exactly.

Slices are processed strictly one at a time; peak memory holds one decoded
slice plus its current downscale, regardless of dataset size.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from PIL import Image, UnidentifiedImageError

from .errors import DatasetNotFound, MixedDimensions, UnreadableImage

DEFAULT_TILE_SIZE = 256
SOURCE_EXTENSIONS = {".png", ".bmp", ".tif", ".tiff"}
# PNG encoder setting pinned so re-ingest produces byte-identical tiles.
PNG_COMPRESS_LEVEL = 6


def zoom_level_count(width: int, height: int, tile_size: int = DEFAULT_TILE_SIZE) -> int:
    """floor(log2(max(w, h) / tile)) + 1, but never less than 1."""
    longest = max(width, height)
    if longest <= tile_size:
        return 1
    return int(math.floor(math.log2(longest / tile_size))) + 1


def grid_size(
    width: int, height: int, zoom: int, tile_size: int = DEFAULT_TILE_SIZE
) -> tuple[int, int]:
    """Tile columns and rows at a zoom level (ceiling division)."""
    step = tile_size << zoom
    return (-(-width // step), -(-height // step))


@dataclass(slots=True)
class TileAddress:
    slice: int
    zoom: int
    tx: int
    ty: int

    def path(self) -> str:
        return f"slices/{self.slice}/{self.zoom}/{self.tx}_{self.ty}.png"


@dataclass(slots=True)
class DatasetManifest:
    dataset_id: str
    slice_count: int
    slice_width_px: int
    slice_height_px: int
    pixel_spacing: float
    slice_spacing: float
    tile_size: int
    zoom_levels: int
    slice_checksums: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        # Field order is the wire order; consumers rely on it being stable.
        return {
            "dataset_id": self.dataset_id,
            "slice_count": self.slice_count,
            "slice_width_px": self.slice_width_px,
            "slice_height_px": self.slice_height_px,
            "pixel_spacing": self.pixel_spacing,
            "slice_spacing": self.slice_spacing,
            "tile_size": self.tile_size,
            "zoom_levels": self.zoom_levels,
            "slice_checksums": list(self.slice_checksums),
        }

    @classmethod
    def from_json(cls, data: dict) -> "DatasetManifest":
        return cls(
            dataset_id=data["dataset_id"],
            slice_count=data["slice_count"],
            slice_width_px=data["slice_width_px"],
            slice_height_px=data["slice_height_px"],
            pixel_spacing=data["pixel_spacing"],
            slice_spacing=data["slice_spacing"],
            tile_size=data["tile_size"],
            zoom_levels=data["zoom_levels"],
            slice_checksums=list(data["slice_checksums"]),
        )

    def grid(self, zoom: int) -> tuple[int, int]:
        return grid_size(self.slice_width_px, self.slice_height_px, zoom, self.tile_size)

    def contains(self, addr: TileAddress) -> bool:
        if not (0 <= addr.slice < self.slice_count):
            return False
        if not (0 <= addr.zoom < self.zoom_levels):
            return False
        cols, rows = self.grid(addr.zoom)
        return 0 <= addr.tx < cols and 0 <= addr.ty < rows


def list_slice_files(source_dir: str | os.PathLike) -> list[Path]:
    src = Path(source_dir)
    files = sorted(
        p for p in src.iterdir() if p.is_file() and p.suffix.lower() in SOURCE_EXTENSIONS
    )
    if not files:
        raise UnreadableImage(f"no slice images found in {src}")
    return files


def _open_slice(path: Path) -> Image.Image:
    try:
        img = Image.open(path)
        img.load()
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise UnreadableImage(f"cannot decode {path.name}: {exc}") from exc
    if img.mode not in ("L", "RGB"):
        converted = img.convert("RGB")
        img.close()
        return converted
    return img


def _pixel_checksum(img: Image.Image) -> str:
    h = hashlib.sha256()
    h.update(f"{img.mode}:{img.width}x{img.height}:".encode("ascii"))
    h.update(img.tobytes())
    return h.hexdigest()


def _write_tiles(img: Image.Image, zoom: int, slice_dir: Path, tile_size: int) -> int:
    zoom_dir = slice_dir / str(zoom)
    zoom_dir.mkdir(parents=True, exist_ok=True)
    cols = -(-img.width // tile_size)
    rows = -(-img.height // tile_size)
    for ty in range(rows):
        for tx in range(cols):
            x0, y0 = tx * tile_size, ty * tile_size
            box = (x0, y0, min(x0 + tile_size, img.width), min(y0 + tile_size, img.height))
            tile = img.crop(box)
            tile.save(
                zoom_dir / f"{tx}_{ty}.png",
                format="PNG",
                compress_level=PNG_COMPRESS_LEVEL,
            )
            tile.close()
    return cols * rows


def _halve(img: Image.Image) -> Image.Image:
    new_size = (-(-img.width // 2), -(-img.height // 2))
    return img.resize(new_size, Image.Resampling.BOX)


def ingest_dataset(
    source_dir: str | os.PathLike,
    out_dir: str | os.PathLike,
    dataset_id: str,
    pixel_spacing: float,
    slice_spacing: float,
    tile_size: int = DEFAULT_TILE_SIZE,
) -> DatasetManifest:
    """Cut every slice image into a tile pyramid and write the manifest.

    Deterministic: re-ingesting identical input produces identical
    checksums and identical tile bytes.
    """
    if pixel_spacing <= 0 or slice_spacing <= 0:
        raise ValueError("pixel_spacing and slice_spacing must be positive")
    if tile_size < 1:
        raise ValueError("tile_size must be at least 1")

    files = list_slice_files(source_dir)
    dataset_dir = Path(out_dir) / dataset_id
    dataset_dir.mkdir(parents=True, exist_ok=True)

    manifest: DatasetManifest | None = None
    for index, path in enumerate(files):
        img = _open_slice(path)
        try:
            if manifest is None:
                manifest = DatasetManifest(
                    dataset_id=dataset_id,
                    slice_count=len(files),
                    slice_width_px=img.width,
                    slice_height_px=img.height,
                    pixel_spacing=pixel_spacing,
                    slice_spacing=slice_spacing,
                    tile_size=tile_size,
                    zoom_levels=zoom_level_count(img.width, img.height, tile_size),
                )
            elif (img.width, img.height) != (
                manifest.slice_width_px,
                manifest.slice_height_px,
            ):
                raise MixedDimensions(
                    f"{path.name} is {img.width}x{img.height}, expected "
                    f"{manifest.slice_width_px}x{manifest.slice_height_px}"
                )
            manifest.slice_checksums.append(_pixel_checksum(img))

            slice_dir = dataset_dir / "slices" / str(index)
            level = img
            for zoom in range(manifest.zoom_levels):
                _write_tiles(level, zoom, slice_dir, tile_size)
                if zoom + 1 < manifest.zoom_levels:
                    shrunk = _halve(level)
                    if level is not img:
                        level.close()
                    level = shrunk
            if level is not img:
                level.close()
        finally:
            # Release the decoded buffer before touching the next slice.
            img.close()

    assert manifest is not None
    tmp = dataset_dir / "manifest.json.tmp"
    tmp.write_text(json.dumps(manifest.to_json(), indent=2) + "\n")
    tmp.replace(dataset_dir / "manifest.json")
    return manifest


def load_manifest(store_root: str | os.PathLike, dataset_id: str) -> DatasetManifest:
    path = Path(store_root) / dataset_id / "manifest.json"
    if not path.is_file():
        raise DatasetNotFound(dataset_id)
    return DatasetManifest.from_json(json.loads(path.read_text()))


def tile_file(store_root: str | os.PathLike, dataset_id: str, addr: TileAddress) -> Path:
    return Path(store_root) / dataset_id / addr.path()


def iter_addresses(manifest: DatasetManifest, slice_index: int) -> Iterator[TileAddress]:
    for zoom in range(manifest.zoom_levels):
        cols, rows = manifest.grid(zoom)
        for ty in range(rows):
            for tx in range(cols):
                yield TileAddress(slice=slice_index, zoom=zoom, tx=tx, ty=ty)
