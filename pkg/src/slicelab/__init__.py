"""slicelab: collaborative slice contouring and surface reconstruction."""

__version__ = "0.1.0"
