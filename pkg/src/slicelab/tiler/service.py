"""Read-only HTTP endpoints for ingested tile pyramids.

Path pieces that fail to parse as integers are a malformed request (400);
well-formed addresses outside the dataset's grid are missing resources
(404). No endpoint writes to the tile store.
"""
from __future__ import annotations

import os
from pathlib import Path

from fastapi import APIRouter, HTTPException, Response

from .errors import DatasetNotFound
from .pyramid import DatasetManifest, TileAddress, load_manifest, tile_file

_SAFE_ID = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789-_.")


def _parse_int(raw: str, what: str) -> int:
    if not raw or not raw.lstrip("-").isdigit():
        raise HTTPException(status_code=400, detail=f"malformed {what}: {raw!r}")
    return int(raw)


def create_tile_router(store_root: str | os.PathLike) -> APIRouter:
    root = Path(store_root)
    router = APIRouter()

    def manifest_or_404(dataset_id: str) -> DatasetManifest:
        if not dataset_id or not set(dataset_id) <= _SAFE_ID:
            raise HTTPException(status_code=400, detail="malformed dataset id")
        try:
            return load_manifest(root, dataset_id)
        except DatasetNotFound:
            raise HTTPException(status_code=404, detail=f"no dataset {dataset_id!r}")

    @router.get("/datasets/{dataset_id}/manifest.json")
    def get_manifest(dataset_id: str) -> dict:
        return manifest_or_404(dataset_id).to_json()

    @router.get("/datasets/{dataset_id}/slices/{slice_index}/{zoom}/{tile_name}")
    def get_tile(dataset_id: str, slice_index: str, zoom: str, tile_name: str) -> Response:
        manifest = manifest_or_404(dataset_id)
        if not tile_name.endswith(".png"):
            raise HTTPException(status_code=400, detail="tile name must end in .png")
        stem = tile_name[: -len(".png")]
        tx_s, sep, ty_s = stem.partition("_")
        if not sep:
            raise HTTPException(status_code=400, detail="tile name must be tx_ty.png")
        addr = TileAddress(
            slice=_parse_int(slice_index, "slice index"),
            zoom=_parse_int(zoom, "zoom"),
            tx=_parse_int(tx_s, "tile column"),
            ty=_parse_int(ty_s, "tile row"),
        )
        if not manifest.contains(addr):
            raise HTTPException(status_code=404, detail="tile address out of range")
        path = tile_file(root, dataset_id, addr)
        if not path.is_file():
            raise HTTPException(status_code=404, detail="tile missing from store")
        etag = f'"{manifest.slice_checksums[addr.slice][:32]}-{addr.zoom}-{addr.tx}-{addr.ty}"'
        return Response(
            content=path.read_bytes(),
            media_type="image/png",
            headers={"ETag": etag},
        )

    return router
