class TilerError(Exception):
    """Base class for dataset ingestion and serving failures."""


class MixedDimensions(TilerError):
    """Slice images in one dataset disagree on width or height."""


class UnreadableImage(TilerError):
    """A source file could not be decoded as an image."""


class DatasetNotFound(TilerError):
    """No ingested dataset under the requested id."""
