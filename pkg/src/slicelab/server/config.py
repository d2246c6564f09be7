"""Server configuration with environment overrides.

Every field can be overridden by an environment variable named
SLICELAB_<FIELD> (upper case), and programmatically via `overrides`.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, fields


@dataclass(slots=True)
class ServerConfig:
    listen_host: str = "127.0.0.1"
    listen_port: int = 8000
    store_dir: str = "store"
    dataset_root: str = "tiles"
    palette_size: int = 24
    group_capacity: int = 4
    rebuild_debounce_ms: int = 500
    focus_max_per_sec: float = 2.0

    def __post_init__(self) -> None:
        if self.palette_size < 1:
            raise ValueError("palette_size must be positive")
        if self.group_capacity < 1:
            raise ValueError("group_capacity must be positive")
        if self.rebuild_debounce_ms < 0:
            raise ValueError("rebuild_debounce_ms must be non-negative")
        if self.focus_max_per_sec <= 0:
            raise ValueError("focus_max_per_sec must be positive")

    @classmethod
    def load(cls, overrides: dict | None = None, env: dict | None = None) -> "ServerConfig":
        """Defaults, then SLICELAB_* environment, then explicit overrides."""
        src = os.environ if env is None else env
        values: dict = {}
        for f in fields(cls):
            key = f"SLICELAB_{f.name.upper()}"
            if key in src:
                raw = src[key]
                if f.type in ("int", int):
                    values[f.name] = int(raw)
                elif f.type in ("float", float):
                    values[f.name] = float(raw)
                else:
                    values[f.name] = raw
        if overrides:
            unknown = set(overrides) - {f.name for f in fields(cls)}
            if unknown:
                raise ValueError(f"unknown config keys: {sorted(unknown)}")
            values.update(overrides)
        return cls(**values)
