"""Deterministic traffic simulation over the session hub.

Drives N scripted participants through the real routing code on a
virtual clock, so hours of stroke traffic take milliseconds and the
measured egress is reproducible bit for bit. Participants join before
the measurement window opens; the window then counts every delivered
envelope and its encoded size.
"""
from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from slicelab.server import Envelope, ServerConfig, SessionHub
from slicelab.tiler import DatasetManifest


@dataclass(slots=True)
class SimRow:
    participants: int
    messages_sent: int
    egress_messages: int
    egress_bytes: int
    duration_s: float
    send_rate_hz: float

    @property
    def egress_per_sec(self) -> float:
        return self.egress_messages / self.duration_s

    def to_json(self) -> dict:
        return {
            "participants": self.participants,
            "messages_sent": self.messages_sent,
            "egress_messages": self.egress_messages,
            "egress_bytes": self.egress_bytes,
            "duration_s": self.duration_s,
            "send_rate_hz": self.send_rate_hz,
            "egress_per_sec": self.egress_per_sec,
        }


@dataclass(slots=True)
class SimReport:
    rows: list[SimRow]
    slope: float
    intercept: float
    r_squared: float

    def ratios(self) -> list[float]:
        """Egress growth factor between successive participant counts."""
        out = []
        for prev, cur in zip(self.rows, self.rows[1:]):
            out.append(cur.egress_per_sec / prev.egress_per_sec)
        return out

    def to_csv(self) -> str:
        header = "participants,messages_sent,egress_messages,egress_bytes,duration_s,send_rate_hz"
        lines = [header]
        for r in self.rows:
            lines.append(
                f"{r.participants},{r.messages_sent},{r.egress_messages},"
                f"{r.egress_bytes},{r.duration_s},{r.send_rate_hz}"
            )
        return "\n".join(lines) + "\n"


class _VirtualClock:
    __slots__ = ("now",)

    def __init__(self) -> None:
        self.now = 0.0

    def __call__(self) -> float:
        return self.now


@dataclass(slots=True)
class _Sender:
    participant_id: str
    rng: random.Random
    seq: int = 0
    stroke_step: int = 0
    stroke_count: int = 0
    pos: list = field(default_factory=lambda: [50.0, 50.0])

    def next_envelope(self, session_id: str, stroke_length: int) -> Envelope:
        """Walk a Begin / Append* / End cycle with a jittering pen position."""
        self.seq += 1
        if self.stroke_step == 0:
            type_ = "StrokeBegin"
            payload = {
                "stroke_id": f"{self.participant_id}-{self.stroke_count}",
                "slice_index": self.rng.randrange(16),
                "point": list(self.pos),
            }
        elif self.stroke_step < stroke_length - 1:
            pts = []
            for _ in range(3):
                self.pos[0] += self.rng.uniform(-1.0, 1.0)
                self.pos[1] += self.rng.uniform(-1.0, 1.0)
                pts.append([round(self.pos[0], 3), round(self.pos[1], 3)])
            type_ = "StrokeAppend"
            payload = {
                "stroke_id": f"{self.participant_id}-{self.stroke_count}",
                "points": pts,
            }
        else:
            type_ = "StrokeEnd"
            payload = {"stroke_id": f"{self.participant_id}-{self.stroke_count}"}
            self.stroke_count += 1
        self.stroke_step = (self.stroke_step + 1) % stroke_length
        return Envelope(
            type=type_,
            session_id=session_id,
            sender_id=self.participant_id,
            seq=self.seq,
            payload=payload,
        )


def _sim_manifest() -> DatasetManifest:
    return DatasetManifest(
        dataset_id="sim",
        slice_count=16,
        slice_width_px=512,
        slice_height_px=512,
        pixel_spacing=0.5,
        slice_spacing=1.0,
        tile_size=256,
        zoom_levels=2,
        slice_checksums=["0" * 64] * 16,
    )


def simulate_traffic(
    n_participants: int,
    send_rate_hz: float = 10.0,
    duration_s: float = 20.0,
    seed: int = 0,
    group_capacity: int = 4,
    stroke_length: int = 8,
) -> SimRow:
    """Measure hub egress for one session of scripted stroke senders."""
    if n_participants < 1:
        raise ValueError("need at least one participant")
    if send_rate_hz <= 0 or duration_s <= 0:
        raise ValueError("send_rate_hz and duration_s must be positive")
    clock = _VirtualClock()
    config = ServerConfig(
        palette_size=max(n_participants, 24), group_capacity=group_capacity
    )
    hub = SessionHub(config, datasets={"sim": _sim_manifest()}, clock=clock)
    hub.create_session("sim", session_id="sim-run")
    senders = []
    for i in range(n_participants):
        pid = f"p{i:03d}"
        hub.join_session("sim-run", pid, pid.upper())
        senders.append(_Sender(participant_id=pid, rng=random.Random(seed * 1_000_003 + i)))

    # One event per send; participant phases are staggered inside a single
    # send interval so the heap interleaves senders deterministically.
    # Event times are offset + k * interval (multiplied, not accumulated,
    # to keep the duration cutoff exact).
    interval = 1.0 / send_rate_hz
    heap: list[tuple[float, int, int]] = []
    for i in range(n_participants):
        heapq.heappush(heap, (interval * i / n_participants, i, 0))

    messages_sent = 0
    egress_messages = 0
    egress_bytes = 0
    while heap:
        t, idx, k = heapq.heappop(heap)
        if t >= duration_s:
            continue
        clock.now = t
        env = senders[idx].next_envelope("sim-run", stroke_length)
        deliveries = hub.handle_envelope(env)
        messages_sent += 1
        egress_messages += len(deliveries)
        for d in deliveries:
            egress_bytes += len(d.envelope.encode())
        offset = interval * idx / n_participants
        heapq.heappush(heap, (offset + (k + 1) * interval, idx, k + 1))
    return SimRow(
        participants=n_participants,
        messages_sent=messages_sent,
        egress_messages=egress_messages,
        egress_bytes=egress_bytes,
        duration_s=duration_s,
        send_rate_hz=send_rate_hz,
    )


def run_scaling(
    participant_counts: Sequence[int] = (4, 8, 16, 32),
    send_rate_hz: float = 10.0,
    duration_s: float = 20.0,
    seed: int = 0,
    group_capacity: int = 4,
) -> SimReport:
    """Simulate each session size and fit egress rate against size."""
    if len(participant_counts) < 2:
        raise ValueError("need at least two participant counts to fit a line")
    rows = [
        simulate_traffic(
            n,
            send_rate_hz=send_rate_hz,
            duration_s=duration_s,
            seed=seed,
            group_capacity=group_capacity,
        )
        for n in participant_counts
    ]
    x = np.array([r.participants for r in rows], dtype=float)
    y = np.array([r.egress_per_sec for r in rows], dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    predicted = slope * x + intercept
    ss_res = float(np.sum((y - predicted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return SimReport(
        rows=rows, slope=float(slope), intercept=float(intercept), r_squared=r_squared
    )
