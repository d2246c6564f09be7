"""Durable session snapshots.

Layout under the store root:

    store/
      <session_id>/
        state.json
        meshes/
          <structure>_<version>.obj

Writes go through a temp file in the same directory followed by an
atomic rename, so a crash mid-write never leaves a torn state.json.
"""
from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any

from .errors import StorageFailure
from .state import SessionState


class SnapshotStore:
    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)

    def session_dir(self, session_id: str) -> Path:
        return self.root / session_id

    def mesh_dir(self, session_id: str) -> Path:
        return self.session_dir(session_id) / "meshes"

    def state_path(self, session_id: str) -> Path:
        return self.session_dir(session_id) / "state.json"

    def mesh_path(self, session_id: str, structure_label: str, version: str) -> Path:
        return self.mesh_dir(session_id) / f"{structure_label}_{version}.obj"

    def _atomic_write(self, path: Path, data: bytes) -> None:
        tmp = path.with_suffix(path.suffix + ".tmp")
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(tmp, "wb") as fh:
                fh.write(data)
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, path)
        except OSError as exc:
            raise StorageFailure(f"cannot write {path}: {exc}") from exc
        finally:
            if tmp.exists():
                try:
                    tmp.unlink()
                except OSError:
                    pass

    def save_state(self, state: SessionState) -> Path:
        path = self.state_path(state.session_id)
        payload = json.dumps(state.to_json(), indent=2, sort_keys=False) + "\n"
        self._atomic_write(path, payload.encode("utf-8"))
        return path

    def save_mesh(self, session_id: str, structure_label: str, version: str, obj_text: str) -> Path:
        path = self.mesh_path(session_id, structure_label, version)
        self._atomic_write(path, obj_text.encode("utf-8"))
        return path

    def load_state(self, session_id: str) -> SessionState:
        path = self.state_path(session_id)
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc: dict[str, Any] = json.load(fh)
        except FileNotFoundError as exc:
            raise StorageFailure(f"no snapshot for session {session_id!r}") from exc
        except (OSError, json.JSONDecodeError) as exc:
            raise StorageFailure(f"cannot read {path}: {exc}") from exc
        return SessionState.from_json(doc)

    def load_mesh(self, session_id: str, structure_label: str, version: str) -> str:
        path = self.mesh_path(session_id, structure_label, version)
        try:
            return path.read_text(encoding="utf-8")
        except OSError as exc:
            raise StorageFailure(f"cannot read {path}: {exc}") from exc

    def list_sessions(self) -> list[str]:
        if not self.root.is_dir():
            return []
        out = []
        for child in sorted(self.root.iterdir()):
            if child.is_dir() and (child / "state.json").is_file():
                out.append(child.name)
        return out
