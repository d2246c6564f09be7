"""HTTP + WebSocket front end over the session hub.

All handlers are async and run on the event loop thread, so hub state
needs no locking. WebSocket deliveries go out through a connection
registry keyed by (session_id, participant_id).
"""
from __future__ import annotations

import asyncio
import contextlib
import logging
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, Response

from slicelab.tiler import load_manifest
from slicelab.tiler.service import create_tile_router

from .atlas import Atlas
from .config import ServerConfig
from .errors import (
    GroupFull,
    NoAtlasEntry,
    NotJoined,
    ServerError,
    SessionFull,
    StaleSequence,
    StorageFailure,
    UnknownDataset,
    UnknownSession,
    UnknownTarget,
)
from .hub import SessionHub
from .persist import SnapshotStore
from .wire import Delivery, Envelope, parse_envelope

log = logging.getLogger("slicelab.server")

_STATUS_BY_ERROR: tuple[tuple[type, int], ...] = (
    (UnknownSession, 404),
    (UnknownDataset, 404),
    (UnknownTarget, 404),
    (NoAtlasEntry, 404),
    (NotJoined, 403),
    (SessionFull, 409),
    (GroupFull, 409),
    (StaleSequence, 409),
    (StorageFailure, 500),
)


def _status_for(exc: ServerError) -> int:
    for etype, status in _STATUS_BY_ERROR:
        if isinstance(exc, etype):
            return status
    return 400


def discover_datasets(root: str | Path) -> dict[str, Any]:
    """Map dataset_id -> manifest for every tiled dataset under root."""
    out: dict[str, Any] = {}
    root = Path(root)
    if not root.is_dir():
        return out
    for child in sorted(root.iterdir()):
        if (child / "manifest.json").is_file():
            manifest = load_manifest(root, child.name)
            out[manifest.dataset_id] = manifest
    return out


def discover_atlases(root: str | Path) -> dict[str, Atlas]:
    """Load every <dataset>/atlas.json under root, keyed by atlas_id."""
    out: dict[str, Atlas] = {}
    root = Path(root)
    if not root.is_dir():
        return out
    for path in sorted(root.glob("*/atlas.json")):
        atlas = Atlas.load(path)
        out[atlas.atlas_id] = atlas
    return out


class ConnectionRegistry:
    def __init__(self) -> None:
        self._sockets: dict[tuple[str, str], WebSocket] = {}

    def register(self, session_id: str, participant_id: str, ws: WebSocket) -> None:
        self._sockets[(session_id, participant_id)] = ws

    def unregister(self, session_id: str, participant_id: str, ws: WebSocket) -> None:
        key = (session_id, participant_id)
        if self._sockets.get(key) is ws:
            del self._sockets[key]

    async def dispatch(self, session_id: str, deliveries: list[Delivery]) -> None:
        for d in deliveries:
            ws = self._sockets.get((session_id, d.recipient_id))
            if ws is None:
                continue  # recipient is not connected over WS right now
            try:
                await ws.send_text(d.envelope.encode())
            except Exception:
                self._sockets.pop((session_id, d.recipient_id), None)


async def _rebuild_worker(hub: SessionHub, registry: ConnectionRegistry) -> None:
    while True:
        for session_id, label in hub.due_rebuilds():
            try:
                _info, deliveries = hub.run_rebuild(session_id, label)
            except ServerError as exc:
                log.warning("rebuild %s/%s failed: %s", session_id, label, exc)
                continue
            except Exception:
                log.exception("rebuild %s/%s crashed", session_id, label)
                continue
            await registry.dispatch(session_id, deliveries)
            if hub.store is not None:
                with contextlib.suppress(StorageFailure):
                    hub.persist_snapshot(session_id)
        nxt = hub.next_rebuild_due()
        if nxt is None:
            await asyncio.sleep(0.05)
        else:
            await asyncio.sleep(max(nxt - hub.clock(), 0.005))


def create_app(
    config: ServerConfig | None = None,
    hub: SessionHub | None = None,
) -> FastAPI:
    config = config or ServerConfig()
    if hub is None:
        hub = SessionHub(
            config,
            datasets=discover_datasets(config.dataset_root),
            atlases=discover_atlases(config.dataset_root),
            store=SnapshotStore(config.store_dir),
        )
    registry = ConnectionRegistry()

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        if hub.store is not None:
            for sid in hub.store.list_sessions():
                if sid in hub.sessions:
                    continue
                try:
                    hub.restore_session(sid)
                except Exception as exc:
                    log.warning("skipping snapshot %s: %s", sid, exc)
        worker = asyncio.create_task(_rebuild_worker(hub, registry))
        try:
            yield
        finally:
            worker.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await worker
            if hub.store is not None:
                for sid in list(hub.sessions):
                    with contextlib.suppress(StorageFailure):
                        hub.persist_snapshot(sid)

    app = FastAPI(title="slicelab", lifespan=lifespan)
    app.state.hub = hub
    app.state.registry = registry
    app.include_router(create_tile_router(config.dataset_root))

    @app.exception_handler(ServerError)
    async def _server_error(_req: Request, exc: ServerError) -> JSONResponse:
        return JSONResponse(
            status_code=_status_for(exc),
            content={"error": {"code": exc.code, "message": str(exc)}},
        )

    @app.exception_handler(ValueError)
    async def _value_error(_req: Request, exc: ValueError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "bad_request", "message": str(exc)}},
        )

    def _require(body: Any, key: str, types: type | tuple) -> Any:
        if not isinstance(body, dict) or key not in body:
            raise ValueError(f"request body must include {key!r}")
        value = body[key]
        if not isinstance(value, types) or isinstance(value, bool):
            raise ValueError(f"{key!r} has the wrong type")
        return value

    async def _persist_quietly(session_id: str) -> None:
        if hub.store is not None:
            with contextlib.suppress(StorageFailure):
                hub.persist_snapshot(session_id)

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request) -> dict:
        body = await request.json()
        dataset_id = _require(body, "dataset_id", str)
        grouping = body.get("grouping", "automatic")
        atlas_id = body.get("atlas_id")
        session_id = body.get("session_id")
        state = hub.create_session(
            dataset_id, grouping=grouping, atlas_id=atlas_id, session_id=session_id
        )
        await _persist_quietly(state.session_id)
        return hub.snapshot(state.session_id)

    @app.get("/sessions/{session_id}/snapshot")
    async def get_snapshot(session_id: str) -> dict:
        return hub.snapshot(session_id)

    @app.post("/sessions/{session_id}/contours", status_code=201)
    async def post_contour(session_id: str, request: Request) -> dict:
        body = await request.json()
        sender_id = _require(body, "sender_id", str)
        contour = _require(body, "contour", dict)
        result, deliveries = hub.commit_contour(session_id, sender_id, contour)
        await registry.dispatch(session_id, deliveries)
        await _persist_quietly(session_id)
        return result

    @app.get("/sessions/{session_id}/structures/{structure_label}/mesh.obj")
    async def get_mesh(session_id: str, structure_label: str) -> Response:
        data = hub.mesh_obj(session_id, structure_label)
        return Response(content=data, media_type="model/obj")

    @app.post("/sessions/{session_id}/grades", status_code=201)
    async def post_grade(session_id: str, request: Request) -> dict:
        body = await request.json()
        grader_id = _require(body, "grader_id", str)
        author_id = _require(body, "author_id", str)
        structure_label = _require(body, "structure_label", str)
        stars = body.get("stars")
        record, deliveries = hub.grade(
            session_id,
            grader_id=grader_id,
            author_id=author_id,
            structure_label=structure_label,
            stars=stars,
        )
        await registry.dispatch(session_id, deliveries)
        await _persist_quietly(session_id)
        state = hub.sessions[session_id]
        return {"record": record.to_json(), "grade_summary": hub.grade_summary(state)}

    @app.websocket("/ws")
    async def websocket_endpoint(ws: WebSocket) -> None:
        await ws.accept()
        session_id: str | None = None
        participant_id: str | None = None
        env: Envelope | None = None
        try:
            raw = await ws.receive_text()
            try:
                env = parse_envelope(raw)
                if env.type != "JoinSession":
                    raise ValueError("first frame must be a JoinSession envelope")
                display_name = env.payload.get("display_name", env.sender_id)
                if not isinstance(display_name, str):
                    raise ValueError("'display_name' must be a string")
                _participant, deliveries = hub.join_session(
                    env.session_id,
                    env.sender_id,
                    display_name,
                    device_class=env.payload.get("device_class", "desktop"),
                    teacher=bool(env.payload.get("teacher", False)),
                )
            except (ServerError, ValueError) as exc:
                code = exc.code if isinstance(exc, ServerError) else "bad_request"
                err = Envelope(
                    type="Error",
                    session_id=env.session_id if env is not None else "",
                    sender_id="server",
                    seq=0,
                    payload={"code": code, "message": str(exc)},
                )
                await ws.send_text(err.encode())
                await ws.close(code=1008)
                return
            session_id, participant_id = env.session_id, env.sender_id
            state = hub.sessions[session_id]
            state.last_seq[participant_id] = max(
                state.last_seq.get(participant_id, 0), env.seq
            )
            registry.register(session_id, participant_id, ws)
            snap = hub._server_env(state, "Snapshot", hub.snapshot(session_id))
            await ws.send_text(snap.encode())
            await registry.dispatch(session_id, deliveries)

            while True:
                raw = await ws.receive_text()
                try:
                    inbound = parse_envelope(raw)
                    if inbound.session_id != session_id or inbound.sender_id != participant_id:
                        raise ValueError("envelope does not match this connection")
                    out = hub.handle_envelope(inbound)
                except (ServerError, ValueError) as exc:
                    code = exc.code if isinstance(exc, ServerError) else "bad_request"
                    err = Envelope(
                        type="Error",
                        session_id=session_id,
                        sender_id="server",
                        seq=0,
                        payload={"code": code, "message": str(exc)},
                    )
                    await ws.send_text(err.encode())
                    continue
                await registry.dispatch(session_id, out)
                if inbound.type == "LeaveSession":
                    registry.unregister(session_id, participant_id, ws)
                    session_id = participant_id = None
                    await ws.close()
                    return
        except WebSocketDisconnect:
            pass
        finally:
            if session_id is not None and participant_id is not None:
                registry.unregister(session_id, participant_id, ws)
                try:
                    out = hub.leave_session(session_id, participant_id)
                except ServerError:
                    out = []
                await registry.dispatch(session_id, out)

    return app


def run_server(config: ServerConfig | None = None) -> None:
    import uvicorn

    config = config or ServerConfig()
    app = create_app(config)
    uvicorn.run(app, host=config.listen_host, port=config.listen_port, log_level="warning")
