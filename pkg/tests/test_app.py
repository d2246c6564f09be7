"""HTTP and WebSocket behavior of the server application."""
from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from slicelab.geometry import contour_from_json
from slicelab.server import Atlas, ServerConfig, SessionHub, SnapshotStore
from slicelab.server.app import create_app
from slicelab.tiler import DatasetManifest

from test_hub import square_doc


def make_manifest() -> DatasetManifest:
    return DatasetManifest(
        dataset_id="demo",
        slice_count=8,
        slice_width_px=100,
        slice_height_px=80,
        pixel_spacing=0.5,
        slice_spacing=1.0,
        tile_size=256,
        zoom_levels=1,
        slice_checksums=["0" * 64] * 8,
    )


@pytest.fixture()
def client(tmp_path):
    config = ServerConfig(
        store_dir=str(tmp_path / "store"),
        dataset_root=str(tmp_path / "tiles"),
        group_capacity=2,
        rebuild_debounce_ms=50,
    )
    atlas = Atlas("atlas-1", [contour_from_json(square_doc(0, author="expert"))])
    hub = SessionHub(
        config,
        datasets={"demo": make_manifest()},
        atlases={"atlas-1": atlas},
        store=SnapshotStore(config.store_dir),
    )
    app = create_app(config, hub=hub)
    with TestClient(app) as tc:
        tc.hub = hub
        yield tc


def join_env(session_id, sender, seq=1, **payload):
    return json.dumps(
        {
            "type": "JoinSession",
            "session_id": session_id,
            "sender_id": sender,
            "seq": seq,
            "payload": payload,
        }
    )


def msg_env(type_, session_id, sender, seq, payload=None):
    return json.dumps(
        {
            "type": type_,
            "session_id": session_id,
            "sender_id": sender,
            "seq": seq,
            "payload": payload or {},
        }
    )


# -- REST ----------------------------------------------------------------------


def test_create_and_snapshot_session(client):
    r = client.post("/sessions", json={"dataset_id": "demo", "session_id": "s1"})
    assert r.status_code == 201
    body = r.json()
    assert body["session_id"] == "s1"
    assert body["dataset_id"] == "demo"
    assert body["grade_summary"] == []
    r2 = client.get("/sessions/s1/snapshot")
    assert r2.status_code == 200
    assert r2.json()["session_id"] == "s1"


def test_rest_error_mapping(client):
    assert client.post("/sessions", json={"dataset_id": "nope"}).status_code == 404
    assert client.post("/sessions", json={}).status_code == 400
    assert (
        client.post("/sessions", json={"dataset_id": "demo", "grouping": "x"}).status_code
        == 400
    )
    assert client.get("/sessions/ghost/snapshot").status_code == 404
    body = client.get("/sessions/ghost/snapshot").json()
    assert body["error"]["code"] == "unknown_session"


def test_rest_contour_commit_and_mesh(client):
    client.post("/sessions", json={"dataset_id": "demo", "session_id": "s1"})
    client.hub.join_session("s1", "alice", "Alice")

    r = client.post(
        "/sessions/s1/contours",
        json={"sender_id": "alice", "contour": square_doc(0, author="alice")},
    )
    assert r.status_code == 201
    assert r.json()["contour_id"] == "c1"
    assert r.json()["accuracy"] is None

    stranger = client.post(
        "/sessions/s1/contours",
        json={"sender_id": "bob", "contour": square_doc(0, author="bob")},
    )
    assert stranger.status_code == 403

    bad = client.post(
        "/sessions/s1/contours", json={"sender_id": "alice", "contour": {"slice": 1}}
    )
    assert bad.status_code == 400

    missing_mesh = client.get("/sessions/s1/structures/femur/mesh.obj")
    assert missing_mesh.status_code == 404

    client.post(
        "/sessions/s1/contours",
        json={"sender_id": "alice", "contour": square_doc(1, author="alice")},
    )
    client.hub.run_rebuild("s1", "femur")
    mesh = client.get("/sessions/s1/structures/femur/mesh.obj")
    assert mesh.status_code == 200
    assert mesh.headers["content-type"].startswith("model/obj")
    assert mesh.text.startswith("v ")


def test_rest_commit_returns_atlas_accuracy(client):
    client.post(
        "/sessions", json={"dataset_id": "demo", "session_id": "s1", "atlas_id": "atlas-1"}
    )
    client.hub.join_session("s1", "alice", "Alice")
    r = client.post(
        "/sessions/s1/contours",
        json={"sender_id": "alice", "contour": square_doc(0, author="alice")},
    )
    assert r.json()["accuracy"] == pytest.approx(1.0)


def test_rest_grades(client):
    client.post("/sessions", json={"dataset_id": "demo", "session_id": "s1"})
    client.hub.join_session("s1", "alice", "Alice")
    client.hub.join_session("s1", "bob", "Bob")
    client.post(
        "/sessions/s1/contours",
        json={"sender_id": "alice", "contour": square_doc(0, author="alice")},
    )
    r = client.post(
        "/sessions/s1/grades",
        json={
            "grader_id": "bob",
            "author_id": "alice",
            "structure_label": "femur",
            "stars": 4,
        },
    )
    assert r.status_code == 201
    assert r.json()["grade_summary"][0]["mean_stars"] == 4.0

    selfie = client.post(
        "/sessions/s1/grades",
        json={
            "grader_id": "alice",
            "author_id": "alice",
            "structure_label": "femur",
            "stars": 5,
        },
    )
    assert selfie.status_code == 400
    assert selfie.json()["error"]["code"] == "self_grading"


def test_tile_router_is_mounted(client):
    r = client.get("/datasets/absent/manifest.json")
    assert r.status_code == 404


# -- WebSocket -------------------------------------------------------------------


def test_ws_handshake_returns_snapshot_then_broadcasts_joins(client):
    client.post("/sessions", json={"dataset_id": "demo", "session_id": "s1"})
    with client.websocket_connect("/ws") as a:
        a.send_text(join_env("s1", "alice", display_name="Alice"))
        snap = json.loads(a.receive_text())
        assert snap["type"] == "Snapshot"
        assert snap["payload"]["session_id"] == "s1"
        assert "alice" in snap["payload"]["participants"]

        with client.websocket_connect("/ws") as b:
            b.send_text(join_env("s1", "bob", display_name="Bob"))
            snap_b = json.loads(b.receive_text())
            assert set(snap_b["payload"]["participants"]) == {"alice", "bob"}

            joined = json.loads(a.receive_text())
            assert joined["type"] == "JoinSession"
            assert joined["payload"]["participant"]["participant_id"] == "bob"
        left = json.loads(a.receive_text())
        assert left["type"] == "LeaveSession"
        assert left["payload"]["participant_id"] == "bob"


def test_ws_rejects_bad_handshake(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_text(msg_env("StrokeBegin", "s1", "alice", 1))
        err = json.loads(ws.receive_text())
        assert err["type"] == "Error"

    client.post("/sessions", json={"dataset_id": "demo", "session_id": "s1"})
    with client.websocket_connect("/ws") as ws:
        ws.send_text(join_env("ghost", "alice"))
        err = json.loads(ws.receive_text())
        assert err["payload"]["code"] == "unknown_session"


def test_ws_group_fanout_and_commit_round_trip(client):
    client.post("/sessions", json={"dataset_id": "demo", "session_id": "s1"})
    with client.websocket_connect("/ws") as a, client.websocket_connect("/ws") as b:
        a.send_text(join_env("s1", "alice", display_name="Alice"))
        a.receive_text()
        b.send_text(join_env("s1", "bob", display_name="Bob"))
        b.receive_text()
        a.receive_text()  # alice sees bob join; both now share group g1

        a.send_text(msg_env("StrokeBegin", "s1", "alice", 2, {"stroke_id": "k"}))
        stroke = json.loads(b.receive_text())
        assert stroke["type"] == "StrokeBegin"
        assert stroke["sender_id"] == "alice"

        a.send_text(
            msg_env("ContourCommit", "s1", "alice", 3, square_doc(0, author="alice"))
        )
        seen_by_bob = json.loads(b.receive_text())
        assert seen_by_bob["type"] == "ContourCommit"
        assert seen_by_bob["payload"]["author_id"] == "alice"
        assert seen_by_bob["payload"]["color"].startswith("#")
        ack = json.loads(a.receive_text())
        assert ack["type"] == "ContourCommit"
        assert ack["payload"]["contour_id"] == "c1"
        assert ack["payload"]["collisions"] == []


def test_ws_errors_keep_connection_alive(client):
    client.post("/sessions", json={"dataset_id": "demo", "session_id": "s1"})
    with client.websocket_connect("/ws") as ws:
        ws.send_text(join_env("s1", "alice", seq=1))
        ws.receive_text()
        ws.send_text(msg_env("SliceFocus", "s1", "alice", 1, {"slice_index": 2}))
        err = json.loads(ws.receive_text())
        assert err["type"] == "Error"
        assert err["payload"]["code"] == "stale_sequence"
        ws.send_text("not json at all")
        err2 = json.loads(ws.receive_text())
        assert err2["payload"]["code"] == "bad_request"
        ws.send_text(msg_env("SliceFocus", "s2", "alice", 5, {"slice_index": 2}))
        err3 = json.loads(ws.receive_text())
        assert err3["payload"]["code"] == "bad_request"
        # still usable after three rejected frames
        ws.send_text(msg_env("FilterSet", "s1", "alice", 9, {"opacity": 1.0}))
        ok = json.loads(ws.receive_text())
        assert ok["type"] == "FilterSet"


def test_ws_commit_triggers_mesh_rebuild_push(client):
    client.post("/sessions", json={"dataset_id": "demo", "session_id": "s1"})
    with client.websocket_connect("/ws") as a:
        a.send_text(join_env("s1", "alice", display_name="Alice"))
        a.receive_text()
        a.send_text(msg_env("ContourCommit", "s1", "alice", 2, square_doc(0, author="alice")))
        a.receive_text()  # commit ack
        a.send_text(msg_env("ContourCommit", "s1", "alice", 3, square_doc(1, author="alice")))
        a.receive_text()
        rebuilt = json.loads(a.receive_text())  # debounced push from the worker
        assert rebuilt["type"] == "MeshRebuilt"
        assert rebuilt["payload"]["structure_label"] == "femur"
        assert len(rebuilt["payload"]["version"]) == 12
        url = rebuilt["payload"]["mesh_url"]
    r = client.get(url)
    assert r.status_code == 200
    assert r.text.startswith("v ")
