"""Session service failures.

Each error carries a stable machine-readable code used by both the REST
layer (status + body) and the WebSocket layer (Error envelopes).
"""


class ServerError(Exception):
    code = "server_error"


class UnknownDataset(ServerError):
    code = "unknown_dataset"


class UnknownSession(ServerError):
    code = "unknown_session"


class SessionFull(ServerError):
    code = "session_full"


class GroupFull(ServerError):
    code = "group_full"


class NotJoined(ServerError):
    code = "not_joined"


class StaleSequence(ServerError):
    code = "stale_sequence"


class UnknownType(ServerError):
    code = "unknown_type"


class InvalidContour(ServerError):
    code = "invalid_contour"


class SliceOutOfRange(ServerError):
    code = "slice_out_of_range"


class InvalidStars(ServerError):
    code = "invalid_stars"


class SelfGrading(ServerError):
    code = "self_grading"


class UnknownTarget(ServerError):
    code = "unknown_target"


class NoAtlasEntry(ServerError):
    code = "no_atlas_entry"


class StorageFailure(ServerError):
    code = "storage_failure"
