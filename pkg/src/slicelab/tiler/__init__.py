"""Slice-dataset tile pyramids and their read-only HTTP service."""
from .errors import DatasetNotFound, MixedDimensions, TilerError, UnreadableImage
from .pyramid import (
    DEFAULT_TILE_SIZE,
    DatasetManifest,
    TileAddress,
    grid_size,
    ingest_dataset,
    iter_addresses,
    list_slice_files,
    load_manifest,
    tile_file,
    zoom_level_count,
)
from .service import create_tile_router

__all__ = [
    "DEFAULT_TILE_SIZE",
    "DatasetManifest",
    "DatasetNotFound",
    "MixedDimensions",
    "TileAddress",
    "TilerError",
    "UnreadableImage",
    "create_tile_router",
    "grid_size",
    "ingest_dataset",
    "iter_addresses",
    "list_slice_files",
    "load_manifest",
    "tile_file",
    "zoom_level_count",
]
