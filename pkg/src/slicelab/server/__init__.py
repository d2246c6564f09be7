"""Collaborative contouring server: session hub, wire protocol, HTTP/WS app."""

from .atlas import Atlas, contour_accuracy, dice_score, rasterize_contour
from .config import ServerConfig
from .errors import (
    GroupFull,
    InvalidContour,
    InvalidStars,
    NoAtlasEntry,
    NotJoined,
    SelfGrading,
    ServerError,
    SessionFull,
    SliceOutOfRange,
    StaleSequence,
    StorageFailure,
    UnknownDataset,
    UnknownSession,
    UnknownTarget,
    UnknownType,
)
from .hub import SERVER_ID, SessionHub
from .palette import BASE_PALETTE, color_for
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
from .wire import (
    ACK_ONLY,
    GROUP_SCOPED,
    MESSAGE_TYPES,
    SESSION_SCOPED,
    Delivery,
    Envelope,
    parse_envelope,
)

__all__ = [
    "ACK_ONLY",
    "Atlas",
    "BASE_PALETTE",
    "CommittedContour",
    "DEVICE_CLASSES",
    "Delivery",
    "Envelope",
    "GROUP_SCOPED",
    "GradeRecord",
    "Group",
    "GroupFull",
    "InvalidContour",
    "InvalidStars",
    "MESSAGE_TYPES",
    "NoAtlasEntry",
    "NotJoined",
    "Participant",
    "SERVER_ID",
    "SESSION_SCOPED",
    "SelfGrading",
    "ServerConfig",
    "ServerError",
    "SessionFull",
    "SessionHub",
    "SessionState",
    "SliceOutOfRange",
    "SnapshotStore",
    "StaleSequence",
    "StorageFailure",
    "StructureState",
    "UnknownDataset",
    "UnknownSession",
    "UnknownTarget",
    "UnknownType",
    "color_for",
    "contour_accuracy",
    "dice_score",
    "parse_envelope",
    "rasterize_contour",
]
