"""Session hub: membership, message routing, commits, rebuilds, grading.

The hub is synchronous and transport-agnostic. Every operation mutates
one session and returns the list of Deliveries the caller must send;
the WebSocket layer, the traffic simulator, and the tests all drive the
same code paths. Time comes from an injectable clock so throttling and
rebuild debouncing are testable without sleeping.
"""
from __future__ import annotations

import hashlib
import time
import uuid
import warnings
from decimal import ROUND_HALF_UP, Decimal
from typing import Any, Callable

from slicelab.geometry import (
    Contour,
    GeometryError,
    contour_from_json,
    contour_to_json,
    detect_collisions,
    export_obj,
    reconstruct_volume,
)
from slicelab.tiler import DatasetManifest

from .atlas import Atlas, contour_accuracy
from .config import ServerConfig
from .errors import (
    GroupFull,
    InvalidContour,
    InvalidStars,
    NoAtlasEntry,
    NotJoined,
    SelfGrading,
    SessionFull,
    SliceOutOfRange,
    StaleSequence,
    StorageFailure,
    UnknownDataset,
    UnknownSession,
    UnknownTarget,
)
from .palette import color_for
from .persist import SnapshotStore
from .state import (
    DEVICE_CLASSES,
    CommittedContour,
    GradeRecord,
    Group,
    Participant,
    SessionState,
    StructureState,
)
from .wire import ACK_ONLY, GROUP_SCOPED, Delivery, Envelope

SERVER_ID = "server"
GROUPING_MODES = ("automatic", "manual")


class SessionHub:
    def __init__(
        self,
        config: ServerConfig,
        datasets: dict[str, DatasetManifest] | None = None,
        atlases: dict[str, Atlas] | None = None,
        store: SnapshotStore | None = None,
        clock: Callable[[], float] = time.monotonic,
    ) -> None:
        self.config = config
        self.datasets = dict(datasets or {})
        self.atlases = dict(atlases or {})
        self.store = store
        self.clock = clock
        self.sessions: dict[str, SessionState] = {}
        # (session_id, participant_id) -> time of last accepted focus update
        self._focus_accepted: dict[tuple[str, str], float] = {}
        # (session_id, structure_label) -> rebuild due time
        self._rebuild_due: dict[tuple[str, str], float] = {}
        # (session_id, structure_label) -> group of the latest committer
        self._rebuild_group: dict[tuple[str, str], str | None] = {}
        # (session_id, structure_label) -> (version, obj bytes) of latest mesh
        self._mesh_cache: dict[tuple[str, str], tuple[str, bytes]] = {}

    # -- lookups ---------------------------------------------------------

    def _session(self, session_id: str) -> SessionState:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise UnknownSession(f"no session {session_id!r}") from None

    def _member(self, state: SessionState, participant_id: str) -> Participant:
        try:
            return state.participants[participant_id]
        except KeyError:
            raise NotJoined(
                f"{participant_id!r} has not joined session {state.session_id!r}"
            ) from None

    def _manifest(self, state: SessionState) -> DatasetManifest:
        try:
            return self.datasets[state.dataset_id]
        except KeyError:
            raise UnknownDataset(f"dataset {state.dataset_id!r} is not loaded") from None

    # -- envelope helpers ------------------------------------------------

    def _server_env(self, state: SessionState, type_: str, payload: dict[str, Any]) -> Envelope:
        seq = state.last_seq.get(SERVER_ID, 0) + 1
        state.last_seq[SERVER_ID] = seq
        return Envelope(
            type=type_,
            session_id=state.session_id,
            sender_id=SERVER_ID,
            seq=seq,
            payload=payload,
        )

    @staticmethod
    def _session_fanout(
        state: SessionState, env: Envelope, exclude: str | None = None
    ) -> list[Delivery]:
        return [
            Delivery(recipient_id=pid, envelope=env)
            for pid in state.participants
            if pid != exclude
        ]

    @staticmethod
    def _group_fanout(
        state: SessionState, group: Group | None, env: Envelope, exclude: str | None = None
    ) -> list[Delivery]:
        if group is None:
            return []
        return [
            Delivery(recipient_id=pid, envelope=env)
            for pid in group.members
            if pid != exclude
        ]

    # -- session lifecycle -----------------------------------------------

    def create_session(
        self,
        dataset_id: str,
        grouping: str = "automatic",
        atlas_id: str | None = None,
        session_id: str | None = None,
    ) -> SessionState:
        if dataset_id not in self.datasets:
            raise UnknownDataset(f"no dataset {dataset_id!r}")
        if grouping not in GROUPING_MODES:
            raise ValueError(f"grouping must be one of {GROUPING_MODES}, got {grouping!r}")
        if atlas_id is not None and atlas_id not in self.atlases:
            raise NoAtlasEntry(f"no atlas {atlas_id!r}")
        if session_id is None:
            session_id = "s-" + uuid.uuid4().hex[:8]
        if session_id in self.sessions:
            raise ValueError(f"session {session_id!r} already exists")
        state = SessionState(
            session_id=session_id,
            dataset_id=dataset_id,
            grouping=grouping,
            atlas_id=atlas_id,
        )
        self.sessions[session_id] = state
        return state

    def join_session(
        self,
        session_id: str,
        participant_id: str,
        display_name: str,
        device_class: str = "desktop",
        teacher: bool = False,
    ) -> tuple[Participant, list[Delivery]]:
        state = self._session(session_id)
        if participant_id == SERVER_ID:
            raise ValueError(f"participant id {SERVER_ID!r} is reserved")
        if device_class not in DEVICE_CLASSES:
            raise ValueError(f"device_class must be one of {DEVICE_CLASSES}")
        existing = state.participants.get(participant_id)
        if existing is not None:
            # Reconnect: same identity, same color, no announcement.
            return existing, []
        if len(state.participants) >= self.config.palette_size:
            raise SessionFull(
                f"session {session_id!r} is at capacity {self.config.palette_size}"
            )
        used = {p.color_index for p in state.participants.values()}
        color_index = 0
        while color_index in used:
            color_index += 1
        participant = Participant(
            participant_id=participant_id,
            display_name=display_name,
            color=color_for(color_index),
            color_index=color_index,
            device_class=device_class,
            teacher=teacher,
        )
        state.participants[participant_id] = participant
        group_id: str | None = None
        if state.grouping == "automatic":
            group_id = self._auto_assign(state, participant_id)
        env = self._server_env(
            state,
            "JoinSession",
            {"participant": participant.to_json(), "group_id": group_id},
        )
        return participant, self._session_fanout(state, env, exclude=participant_id)

    def leave_session(self, session_id: str, participant_id: str) -> list[Delivery]:
        state = self._session(session_id)
        self._member(state, participant_id)
        del state.participants[participant_id]
        gid = state.member_group.pop(participant_id, None)
        if gid is not None:
            for g in state.groups:
                if g.group_id == gid and participant_id in g.members:
                    g.members.remove(participant_id)
        state.slice_focus.pop(participant_id, None)
        state.filters.pop(participant_id, None)
        state.last_seq.pop(participant_id, None)
        self._focus_accepted.pop((session_id, participant_id), None)
        env = self._server_env(
            state, "LeaveSession", {"participant_id": participant_id, "group_id": gid}
        )
        return self._session_fanout(state, env)

    # -- grouping ---------------------------------------------------------

    def _auto_assign(self, state: SessionState, participant_id: str) -> str:
        """Fill the fullest group that still has room; open a new one only
        when every existing group is at capacity."""
        cap = self.config.group_capacity
        best: Group | None = None
        for g in state.groups:
            if len(g.members) < cap and (best is None or len(g.members) > len(best.members)):
                best = g
        if best is None:
            best = Group(group_id=f"g{state.next_group}")
            state.next_group += 1
            state.groups.append(best)
        self._place_in_group(state, participant_id, best)
        return best.group_id

    def _place_in_group(self, state: SessionState, participant_id: str, group: Group) -> None:
        old = state.member_group.get(participant_id)
        if old is not None and old != group.group_id:
            for g in state.groups:
                if g.group_id == old and participant_id in g.members:
                    g.members.remove(participant_id)
        if participant_id not in group.members:
            group.members.append(participant_id)
        state.member_group[participant_id] = group.group_id

    def assign_group(
        self, session_id: str, participant_id: str, group_id: str | None = None
    ) -> tuple[str, list[Delivery]]:
        state = self._session(session_id)
        self._member(state, participant_id)
        if group_id is None:
            assigned = self._auto_assign(state, participant_id)
        else:
            group = next((g for g in state.groups if g.group_id == group_id), None)
            if group is None:
                group = Group(group_id=group_id)
                state.groups.append(group)
            if (
                participant_id not in group.members
                and len(group.members) >= self.config.group_capacity
            ):
                raise GroupFull(f"group {group_id!r} is at capacity")
            self._place_in_group(state, participant_id, group)
            assigned = group.group_id
        env = self._server_env(
            state, "JoinGroup", {"participant_id": participant_id, "group_id": assigned}
        )
        return assigned, self._session_fanout(state, env, exclude=participant_id)

    # -- message routing ---------------------------------------------------

    def handle_envelope(self, env: Envelope) -> list[Delivery]:
        state = self._session(env.session_id)
        sender = env.sender_id
        self._member(state, sender)
        last = state.last_seq.get(sender, 0)
        if env.seq <= last:
            raise StaleSequence(f"seq {env.seq} <= last seen {last} for {sender!r}")
        state.last_seq[sender] = env.seq

        if env.type in ("MeshRebuilt", "Snapshot", "Error"):
            raise ValueError(f"{env.type} is server-originated")
        if env.type == "JoinSession":
            raise ValueError("already joined; JoinSession is a connection handshake")
        if env.type == "LeaveSession":
            return self.leave_session(env.session_id, sender)
        if env.type == "JoinGroup":
            gid = env.payload.get("group_id")
            if gid is not None and not isinstance(gid, str):
                raise ValueError("'group_id' must be a string when present")
            _, deliveries = self.assign_group(env.session_id, sender, gid)
            return deliveries
        if env.type in ACK_ONLY:  # FilterSet
            state.filters[sender] = dict(env.payload)
            ack = self._server_env(
                state, "FilterSet", {"participant_id": sender, "filters": dict(env.payload)}
            )
            return [Delivery(recipient_id=sender, envelope=ack)]
        if env.type == "SliceFocus":
            idx = env.payload.get("slice_index")
            if not isinstance(idx, int) or isinstance(idx, bool):
                raise ValueError("'slice_index' must be an integer")
            return self.update_focus(env.session_id, sender, idx)
        if env.type == "GradeSubmit":
            p = env.payload
            _, deliveries = self.grade(
                env.session_id,
                grader_id=sender,
                author_id=p.get("author_id", ""),
                structure_label=p.get("structure_label", ""),
                stars=p.get("stars"),
            )
            return deliveries
        if env.type == "ContourCommit":
            result, deliveries = self.commit_contour(env.session_id, sender, env.payload)
            ack = self._server_env(state, "ContourCommit", result)
            deliveries.append(Delivery(recipient_id=sender, envelope=ack))
            return deliveries

        # Remaining group-scoped types (strokes, avatar poses) fan out
        # unmodified to the sender's group.
        if env.type in GROUP_SCOPED:
            return self._group_fanout(state, state.group_of(sender), env, exclude=sender)
        raise ValueError(f"unroutable message type {env.type!r}")

    # -- focus --------------------------------------------------------------

    def update_focus(
        self, session_id: str, participant_id: str, slice_index: int
    ) -> list[Delivery]:
        state = self._session(session_id)
        self._member(state, participant_id)
        now = self.clock()
        key = (session_id, participant_id)
        min_gap = 1.0 / self.config.focus_max_per_sec
        last = self._focus_accepted.get(key)
        if last is not None and now - last < min_gap:
            return []  # over budget: drop silently, keep previous focus
        manifest = self._manifest(state)
        if not 0 <= slice_index < manifest.slice_count:
            raise SliceOutOfRange(
                f"slice {slice_index} outside [0, {manifest.slice_count})"
            )
        self._focus_accepted[key] = now
        state.slice_focus[participant_id] = slice_index
        env = self._server_env(
            state,
            "SliceFocus",
            {"participant_id": participant_id, "slice_index": slice_index},
        )
        return self._session_fanout(state, env, exclude=participant_id)

    # -- contours and meshes --------------------------------------------------

    def _committed_on_slice(
        self, state: SessionState, slice_index: int, skip_id: str | None = None
    ) -> list[tuple[str, Contour]]:
        out: list[tuple[str, Contour]] = []
        for label in sorted(state.structures):
            for cc in state.structures[label].contours:
                if cc.contour.slice_index == slice_index and cc.contour_id != skip_id:
                    out.append((cc.contour_id, cc.contour))
        return out

    def commit_contour(
        self, session_id: str, sender_id: str, document: dict[str, Any]
    ) -> tuple[dict[str, Any], list[Delivery]]:
        state = self._session(session_id)
        participant = self._member(state, sender_id)
        try:
            contour = contour_from_json(document)
        except (ValueError, GeometryError) as exc:
            raise InvalidContour(str(exc)) from exc
        if contour.author_id != sender_id:
            raise InvalidContour(
                f"author {contour.author_id!r} does not match sender {sender_id!r}"
            )
        manifest = self._manifest(state)
        if not 0 <= contour.slice_index < manifest.slice_count:
            raise SliceOutOfRange(
                f"slice {contour.slice_index} outside [0, {manifest.slice_count})"
            )

        existing = self._committed_on_slice(state, contour.slice_index)
        hits = detect_collisions(contour, [c for _cid, c in existing])
        by_contour: dict[str, list[list[float]]] = {}
        for hit in hits:
            cid = existing[hit.index][0]
            by_contour.setdefault(cid, []).append([hit.point.x, hit.point.y])
        collisions = [
            {"contour_id": cid, "points": pts} for cid, pts in sorted(by_contour.items())
        ]

        accuracy: float | None = None
        if state.atlas_id is not None:
            atlas = self.atlases[state.atlas_id]
            if atlas.has(contour.slice_index, contour.structure_label):
                accuracy = contour_accuracy(
                    contour,
                    atlas.lookup(contour.slice_index, contour.structure_label),
                    manifest.slice_width_px,
                    manifest.slice_height_px,
                    manifest.pixel_spacing,
                )

        contour_id = f"c{state.next_contour}"
        state.next_contour += 1
        label = contour.structure_label
        structure = state.structures.setdefault(label, StructureState(label=label))
        structure.contours.append(CommittedContour(contour_id=contour_id, contour=contour))

        key = (session_id, label)
        self._rebuild_due[key] = self.clock() + self.config.rebuild_debounce_ms / 1000.0
        self._rebuild_group[key] = state.member_group.get(sender_id)

        result = {
            "contour_id": contour_id,
            "structure_label": label,
            "collisions": collisions,
            "accuracy": accuracy,
            "rebuild_due_ms": self.config.rebuild_debounce_ms,
        }
        env = self._server_env(
            state,
            "ContourCommit",
            {
                "contour_id": contour_id,
                "author_id": sender_id,
                "color": participant.color,
                "structure_label": label,
                "contour": contour_to_json(contour),
            },
        )
        deliveries = self._group_fanout(state, state.group_of(sender_id), env, exclude=sender_id)
        return result, deliveries

    def due_rebuilds(self, now: float | None = None) -> list[tuple[str, str]]:
        """Pop and return every (session_id, structure_label) whose debounce
        window has elapsed."""
        if now is None:
            now = self.clock()
        due = [key for key, t in self._rebuild_due.items() if t <= now]
        for key in due:
            del self._rebuild_due[key]
        return due

    def next_rebuild_due(self) -> float | None:
        return min(self._rebuild_due.values()) if self._rebuild_due else None

    def run_rebuild(
        self, session_id: str, structure_label: str
    ) -> tuple[dict[str, Any] | None, list[Delivery]]:
        state = self._session(session_id)
        structure = state.structures.get(structure_label)
        if structure is None:
            raise UnknownTarget(f"no structure {structure_label!r} in {session_id!r}")
        contours = [cc.contour for cc in structure.contours]
        if len({c.slice_index for c in contours}) < 2:
            return None, []  # not enough slices to span a volume yet
        manifest = self._manifest(state)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            mesh, stats = reconstruct_volume(contours, manifest.slice_spacing)
        obj_bytes = export_obj(mesh)
        version = hashlib.sha256(obj_bytes).hexdigest()[:12]
        structure.mesh_version = version
        structure.mesh_stats = stats.to_json()
        self._mesh_cache[(session_id, structure_label)] = (version, obj_bytes)
        if self.store is not None:
            self.store.save_mesh(
                session_id, structure_label, version, obj_bytes.decode("ascii")
            )
        info = {
            "structure_label": structure_label,
            "version": version,
            "stats": stats.to_json(),
            "warnings": sorted({type(w.message).__name__ for w in caught}),
            "mesh_url": f"/sessions/{session_id}/structures/{structure_label}/mesh.obj",
        }
        env = self._server_env(state, "MeshRebuilt", info)
        group_id = self._rebuild_group.get((session_id, structure_label))
        group = next((g for g in state.groups if g.group_id == group_id), None)
        return info, self._group_fanout(state, group, env)

    def mesh_obj(self, session_id: str, structure_label: str) -> bytes:
        state = self._session(session_id)
        structure = state.structures.get(structure_label)
        if structure is None or structure.mesh_version is None:
            raise UnknownTarget(
                f"no mesh for structure {structure_label!r} in {session_id!r}"
            )
        cached = self._mesh_cache.get((session_id, structure_label))
        if cached is not None and cached[0] == structure.mesh_version:
            return cached[1]
        if self.store is None:
            raise StorageFailure("mesh not cached and no snapshot store configured")
        text = self.store.load_mesh(session_id, structure_label, structure.mesh_version)
        data = text.encode("ascii")
        self._mesh_cache[(session_id, structure_label)] = (structure.mesh_version, data)
        return data

    # -- grading ----------------------------------------------------------

    def grade(
        self,
        session_id: str,
        grader_id: str,
        author_id: str,
        structure_label: str,
        stars: Any,
    ) -> tuple[GradeRecord, list[Delivery]]:
        state = self._session(session_id)
        self._member(state, grader_id)
        if not isinstance(stars, int) or isinstance(stars, bool) or not 1 <= stars <= 5:
            raise InvalidStars(f"stars must be an integer in [1, 5], got {stars!r}")
        if grader_id == author_id:
            raise SelfGrading("participants cannot grade their own work")
        known_author = author_id in state.participants or any(
            cc.contour.author_id == author_id
            for s in state.structures.values()
            for cc in s.contours
        )
        if not known_author:
            raise UnknownTarget(f"no participant or contour author {author_id!r}")
        if structure_label not in state.structures:
            raise UnknownTarget(f"no structure {structure_label!r} in {session_id!r}")
        record = GradeRecord(
            grader_id=grader_id,
            author_id=author_id,
            structure_label=structure_label,
            stars=stars,
            timestamp=self.clock(),
        )
        for i, g in enumerate(state.grades):
            if g.key() == record.key():
                state.grades[i] = record  # re-grade replaces the old stars
                break
        else:
            state.grades.append(record)
        env = self._server_env(
            state,
            "GradeSubmit",
            {
                "grader_id": grader_id,
                "author_id": author_id,
                "structure_label": structure_label,
                "stars": stars,
            },
        )
        return record, self._session_fanout(state, env, exclude=grader_id)

    @staticmethod
    def grade_summary(state: SessionState) -> list[dict[str, Any]]:
        """Mean stars per (author, structure), half-up to 2 decimals."""
        totals: dict[tuple[str, str], list[int]] = {}
        for g in state.grades:
            totals.setdefault((g.author_id, g.structure_label), []).append(g.stars)
        out = []
        for (author_id, label), values in sorted(totals.items()):
            mean = Decimal(sum(values)) / Decimal(len(values))
            out.append(
                {
                    "author_id": author_id,
                    "structure_label": label,
                    "mean_stars": float(mean.quantize(Decimal("0.01"), ROUND_HALF_UP)),
                    "grade_count": len(values),
                }
            )
        return out

    # -- atlas accuracy ------------------------------------------------------

    def accuracy_for(self, session_id: str, contour_id: str) -> float:
        state = self._session(session_id)
        for structure in state.structures.values():
            for cc in structure.contours:
                if cc.contour_id == contour_id:
                    if state.atlas_id is None:
                        raise NoAtlasEntry(f"session {session_id!r} has no atlas")
                    atlas = self.atlases[state.atlas_id]
                    expert = atlas.lookup(
                        cc.contour.slice_index, cc.contour.structure_label
                    )
                    manifest = self._manifest(state)
                    return contour_accuracy(
                        cc.contour,
                        expert,
                        manifest.slice_width_px,
                        manifest.slice_height_px,
                        manifest.pixel_spacing,
                    )
        raise UnknownTarget(f"no contour {contour_id!r} in session {session_id!r}")

    # -- snapshots -------------------------------------------------------------

    def snapshot(self, session_id: str) -> dict[str, Any]:
        state = self._session(session_id)
        doc = state.to_json()
        doc["grade_summary"] = self.grade_summary(state)
        return doc

    def persist_snapshot(self, session_id: str) -> str:
        if self.store is None:
            raise StorageFailure("no snapshot store configured")
        state = self._session(session_id)
        return str(self.store.save_state(state))

    def restore_session(self, session_id: str) -> SessionState:
        if self.store is None:
            raise StorageFailure("no snapshot store configured")
        state = self.store.load_state(session_id)
        if state.dataset_id not in self.datasets:
            raise UnknownDataset(
                f"snapshot references dataset {state.dataset_id!r} which is not loaded"
            )
        self.sessions[state.session_id] = state
        return state

    def restore_all(self) -> list[str]:
        if self.store is None:
            return []
        restored = []
        for sid in self.store.list_sessions():
            self.restore_session(sid)
            restored.append(sid)
        return restored
