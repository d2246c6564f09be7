"""Message envelopes and routing scopes.

One JSON envelope per WebSocket frame. Field names are part of the wire
contract: type, session_id, sender_id, seq, payload.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .errors import UnknownType

MESSAGE_TYPES = frozenset(
    {
        "JoinSession",
        "LeaveSession",
        "JoinGroup",
        "SliceFocus",
        "AvatarPose",
        "StrokeBegin",
        "StrokeAppend",
        "StrokeEnd",
        "ContourCommit",
        "MeshRebuilt",
        "GradeSubmit",
        "FilterSet",
        "Snapshot",
        "Error",
    }
)

# Fanout scopes. Group-scoped traffic reaches only the sender's group
# members, which is what keeps total egress linear in session size.
GROUP_SCOPED = frozenset(
    {"StrokeBegin", "StrokeAppend", "StrokeEnd", "AvatarPose", "MeshRebuilt", "ContourCommit"}
)
SESSION_SCOPED = frozenset({"SliceFocus", "JoinSession", "LeaveSession", "GradeSubmit"})
ACK_ONLY = frozenset({"FilterSet"})


@dataclass(slots=True)
class Envelope:
    type: str
    session_id: str
    sender_id: str
    seq: int
    payload: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {
            "type": self.type,
            "session_id": self.session_id,
            "sender_id": self.sender_id,
            "seq": self.seq,
            "payload": self.payload,
        }

    def encode(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


def parse_envelope(data: Any) -> Envelope:
    """Validate an inbound frame. Unknown types raise UnknownType; missing
    or mistyped fields raise ValueError."""
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ValueError(f"frame is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ValueError("envelope must be a JSON object")
    for key in ("type", "session_id", "sender_id", "seq"):
        if key not in data:
            raise ValueError(f"envelope missing {key!r}")
    if not isinstance(data["type"], str):
        raise ValueError("'type' must be a string")
    if data["type"] not in MESSAGE_TYPES:
        raise UnknownType(f"unknown message type {data['type']!r}")
    if not isinstance(data["session_id"], str) or not isinstance(data["sender_id"], str):
        raise ValueError("'session_id' and 'sender_id' must be strings")
    seq = data["seq"]
    if not isinstance(seq, int) or isinstance(seq, bool):
        raise ValueError("'seq' must be an integer")
    payload = data.get("payload", {})
    if not isinstance(payload, dict):
        raise ValueError("'payload' must be an object")
    return Envelope(
        type=data["type"],
        session_id=data["session_id"],
        sender_id=data["sender_id"],
        seq=seq,
        payload=payload,
    )


@dataclass(slots=True)
class Delivery:
    """One outbound envelope addressed to one recipient."""

    recipient_id: str
    envelope: Envelope
