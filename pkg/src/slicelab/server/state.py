"""Session state: participants, groups, structures, grades.

Everything here is plain data with a JSON round-trip; the hub owns all
mutation rules.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from slicelab.geometry import Contour, contour_from_json, contour_to_json

DEVICE_CLASSES = ("desktop", "tablet", "headset")


@dataclass(slots=True)
class Participant:
    participant_id: str
    display_name: str
    color: str
    color_index: int
    device_class: str = "desktop"
    teacher: bool = False

    def to_json(self) -> dict[str, Any]:
        return {
            "participant_id": self.participant_id,
            "display_name": self.display_name,
            "color": self.color,
            "color_index": self.color_index,
            "device_class": self.device_class,
            "teacher": self.teacher,
        }

    @classmethod
    def from_json(cls, d: dict[str, Any]) -> "Participant":
        return cls(
            participant_id=d["participant_id"],
            display_name=d["display_name"],
            color=d["color"],
            color_index=d["color_index"],
            device_class=d.get("device_class", "desktop"),
            teacher=d.get("teacher", False),
        )


@dataclass(slots=True)
class Group:
    group_id: str
    members: list[str] = field(default_factory=list)

    def to_json(self) -> dict[str, Any]:
        return {"group_id": self.group_id, "members": list(self.members)}

    @classmethod
    def from_json(cls, d: dict[str, Any]) -> "Group":
        return cls(group_id=d["group_id"], members=list(d["members"]))


@dataclass(slots=True)
class GradeRecord:
    grader_id: str
    author_id: str
    structure_label: str
    stars: int
    timestamp: float

    def key(self) -> tuple[str, str, str]:
        return (self.grader_id, self.author_id, self.structure_label)

    def to_json(self) -> dict[str, Any]:
        return {
            "grader_id": self.grader_id,
            "author_id": self.author_id,
            "structure_label": self.structure_label,
            "stars": self.stars,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_json(cls, d: dict[str, Any]) -> "GradeRecord":
        return cls(
            grader_id=d["grader_id"],
            author_id=d["author_id"],
            structure_label=d["structure_label"],
            stars=d["stars"],
            timestamp=d["timestamp"],
        )


@dataclass(slots=True)
class CommittedContour:
    contour_id: str
    contour: Contour

    def to_json(self) -> dict[str, Any]:
        return {"contour_id": self.contour_id, "contour": contour_to_json(self.contour)}

    @classmethod
    def from_json(cls, d: dict[str, Any]) -> "CommittedContour":
        return cls(contour_id=d["contour_id"], contour=contour_from_json(d["contour"]))


@dataclass(slots=True)
class StructureState:
    label: str
    contours: list[CommittedContour] = field(default_factory=list)
    mesh_version: str | None = None
    mesh_stats: dict[str, Any] | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "contours": [c.to_json() for c in self.contours],
            "mesh_version": self.mesh_version,
            "mesh_stats": self.mesh_stats,
        }

    @classmethod
    def from_json(cls, d: dict[str, Any]) -> "StructureState":
        return cls(
            label=d["label"],
            contours=[CommittedContour.from_json(c) for c in d["contours"]],
            mesh_version=d.get("mesh_version"),
            mesh_stats=d.get("mesh_stats"),
        )


@dataclass(slots=True)
class SessionState:
    session_id: str
    dataset_id: str
    grouping: str = "automatic"
    atlas_id: str | None = None
    participants: dict[str, Participant] = field(default_factory=dict)
    groups: list[Group] = field(default_factory=list)
    member_group: dict[str, str] = field(default_factory=dict)
    slice_focus: dict[str, int] = field(default_factory=dict)
    structures: dict[str, StructureState] = field(default_factory=dict)
    grades: list[GradeRecord] = field(default_factory=list)
    filters: dict[str, dict[str, Any]] = field(default_factory=dict)
    assignments: list[str] = field(default_factory=list)
    last_seq: dict[str, int] = field(default_factory=dict)
    next_contour: int = 1
    next_group: int = 1

    def group_of(self, participant_id: str) -> Group | None:
        gid = self.member_group.get(participant_id)
        if gid is None:
            return None
        for g in self.groups:
            if g.group_id == gid:
                return g
        return None

    def to_json(self) -> dict[str, Any]:
        return {
            "session_id": self.session_id,
            "dataset_id": self.dataset_id,
            "grouping": self.grouping,
            "atlas_id": self.atlas_id,
            "participants": {k: p.to_json() for k, p in sorted(self.participants.items())},
            "groups": [g.to_json() for g in self.groups],
            "member_group": dict(sorted(self.member_group.items())),
            "slice_focus": dict(sorted(self.slice_focus.items())),
            "structures": {k: s.to_json() for k, s in sorted(self.structures.items())},
            "grades": [g.to_json() for g in self.grades],
            "filters": {k: v for k, v in sorted(self.filters.items())},
            "assignments": list(self.assignments),
            "last_seq": dict(sorted(self.last_seq.items())),
            "next_contour": self.next_contour,
            "next_group": self.next_group,
        }

    @classmethod
    def from_json(cls, d: dict[str, Any]) -> "SessionState":
        return cls(
            session_id=d["session_id"],
            dataset_id=d["dataset_id"],
            grouping=d.get("grouping", "automatic"),
            atlas_id=d.get("atlas_id"),
            participants={
                k: Participant.from_json(p) for k, p in d.get("participants", {}).items()
            },
            groups=[Group.from_json(g) for g in d.get("groups", [])],
            member_group=dict(d.get("member_group", {})),
            slice_focus={k: int(v) for k, v in d.get("slice_focus", {}).items()},
            structures={
                k: StructureState.from_json(s) for k, s in d.get("structures", {}).items()
            },
            grades=[GradeRecord.from_json(g) for g in d.get("grades", [])],
            filters=dict(d.get("filters", {})),
            assignments=list(d.get("assignments", [])),
            last_seq={k: int(v) for k, v in d.get("last_seq", {}).items()},
            next_contour=d.get("next_contour", 1),
            next_group=d.get("next_group", 1),
        )
