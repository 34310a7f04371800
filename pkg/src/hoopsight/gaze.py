"""Per-session gaze state: dwell-triggered lifts and the radial filter.

Discrete-time conventions (mirrored by the replay oracle in the test suite):
the interval between two samples is credited to the newer sample's hit, an
invalid sample counts as a miss everywhere, and a gaze gap of at most
``dwell_grace`` seconds bridges an accumulator across tracker flicker (the
bridged time counts).  Lift expiry is evaluated lazily against a caller
supplied clock, so frame composition between samples sees lifts expire at
exactly ``departure + linger``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .config import GazeConfig
from .ingest import BoundingBox, GazeSample

LV3 = 3.0
LV25 = 2.5


@dataclass
class GazeSessionState:
    """Mutable per-session spotlight/dwell machine state."""

    dwell: dict[str, float] = field(default_factory=dict)       # player -> seconds on target
    last_seen: dict[str, float] = field(default_factory=dict)   # player -> last hit timestamp
    lifted: dict[str, float | None] = field(default_factory=dict)  # player -> expiry (None = active)
    center: tuple[float, float] | None = None
    last_t: float | None = None    # focus machine clock
    filter_t: float | None = None  # filter machine clock (ops may run separately)
    active: str | None = None      # player the gaze is currently on

    def glow(self, player: str, cfg: GazeConfig) -> float:
        return min(1.0, self.dwell.get(player, 0.0) / cfg.dwell_trigger)

    def lifted_at(self, now: float) -> frozenset[str]:
        return frozenset(p for p, expiry in self.lifted.items()
                         if expiry is None or now < expiry)

    def reset(self) -> None:
        """Drop all dwell/lift/filter state (used on seek discontinuities)."""
        self.dwell.clear()
        self.last_seen.clear()
        self.lifted.clear()
        self.center = None
        self.last_t = None
        self.filter_t = None
        self.active = None


def hit_test(point: tuple[float, float], boxes: Mapping[str, BoundingBox],
             cfg: GazeConfig) -> str | None:
    """Player whose margin-expanded box contains the point.

    Overlaps resolve to the nearest box center, then ascending player id.
    """
    px, py = point
    best = None
    best_d = None
    for pid in sorted(boxes):
        box = boxes[pid]
        if box.contains(px, py, margin=cfg.hitbox_margin):
            d = math.hypot(px - box.cx, py - box.cy)
            if best_d is None or d < best_d:
                best, best_d = pid, d
    return best


def step_focus(state: GazeSessionState, sample: GazeSample, hit: str | None,
               cfg: GazeConfig) -> GazeSessionState:
    """Advance dwell accumulators and the lifted set by one sample."""
    hit = hit if sample.valid else None
    now = sample.timestamp
    dt = 0.0 if state.last_t is None else now - state.last_t

    # Prune lifts that expired before this sample so a stale entry cannot
    # re-arm (reads between samples are clock-gated the same way).
    for pid in list(state.lifted):
        expiry = state.lifted[pid]
        if expiry is not None and now >= expiry:
            del state.lifted[pid]

    if hit is not None:
        state.dwell[hit] = state.dwell.get(hit, 0.0) + dt
        state.last_seen[hit] = now
        if state.dwell[hit] >= cfg.dwell_trigger:
            state.lifted[hit] = None  # actively gazed: no expiry
        elif hit in state.lifted:
            state.lifted[hit] = None  # re-gaze during linger re-arms the lift

    # Departure: an actively-gazed lift starts its linger countdown the moment
    # the gaze is observed elsewhere.
    if state.active is not None and state.active != hit:
        if state.lifted.get(state.active, 0.0) is None:
            state.lifted[state.active] = now + cfg.linger

    # Accumulators reset after more than dwell_grace seconds of absence.
    for pid in list(state.dwell):
        if pid == hit:
            continue
        if now - state.last_seen.get(pid, now) > cfg.dwell_grace:
            del state.dwell[pid]
            state.last_seen.pop(pid, None)

    state.active = hit
    state.last_t = now
    return state


def step_filter(state: GazeSessionState, sample: GazeSample,
                cfg: GazeConfig) -> GazeSessionState:
    """Move the smoothed filter center toward a valid sample."""
    if not sample.valid:
        return state
    target = (sample.x, sample.y)
    if state.center is None or state.filter_t is None:
        state.center = target
        state.filter_t = sample.timestamp
        return state
    dt = sample.timestamp - state.filter_t
    keep = cfg.center_smoothing ** max(dt, 0.0)
    state.center = (target[0] + (state.center[0] - target[0]) * keep,
                    target[1] + (state.center[1] - target[1]) * keep)
    state.filter_t = sample.timestamp
    return state


@dataclass(frozen=True)
class DarkenRegion:
    """Audience darkening outside a disk at the smoothed filter center."""

    center: tuple[float, float]
    radius: float


def apply_gaze(importance: Mapping[str, float], state: GazeSessionState,
               spotlight_positions: Mapping[str, tuple[float, float]],
               cfg: GazeConfig, now: float | None = None
               ) -> tuple[dict[str, float], frozenset[str], DarkenRegion | None]:
    """Fold gaze state into the frame: lifts, spotlight gating, darkening.

    Returns (adjusted importance, green-spotlights-on set, darken descriptor).
    Lifting only ever raises a level; players the game state does not rank
    count as Lv1.  With no filter center yet, every spotlight stays on and no
    darkening is emitted.
    """
    if now is None:
        now = state.last_t if state.last_t is not None else 0.0
    adjusted = dict(importance)
    for pid in state.lifted_at(now):
        if adjusted.get(pid, 1.0) < LV3:
            adjusted[pid] = LV25

    if state.center is None:
        return adjusted, frozenset(spotlight_positions), None
    cx, cy = state.center
    on = frozenset(pid for pid, (x, y) in spotlight_positions.items()
                   if math.hypot(x - cx, y - cy) <= cfg.filter_radius)
    return adjusted, on, DarkenRegion(center=state.center, radius=cfg.filter_radius)


class GazeSession:
    """Single-writer wrapper tying hit testing and both state machines together."""

    def __init__(self, cfg: GazeConfig | None = None):
        self.cfg = cfg or GazeConfig()
        self.cfg.validate()
        self.state = GazeSessionState()
        self._last_sample_t: float | None = None

    def process(self, sample: GazeSample,
                boxes: Mapping[str, BoundingBox] | None = None) -> None:
        """Feed one sample; timestamps must be strictly increasing.

        Dwell accumulation is purely geometric; whether a lift raises a level
        is decided per frame in apply_gaze (players at Lv3 stay Lv3).
        """
        if self._last_sample_t is not None and sample.timestamp <= self._last_sample_t:
            raise ValueError("gaze timestamps must be strictly increasing")
        self._last_sample_t = sample.timestamp
        hit = None
        if sample.valid and boxes:
            hit = hit_test((sample.x, sample.y), boxes, self.cfg)
        step_focus(self.state, sample, hit, self.cfg)
        step_filter(self.state, sample, self.cfg)

    def replay(self, samples: Iterable[GazeSample],
               boxes_by_frame=None) -> GazeSessionState:
        for sample in samples:
            self.process(sample)
        return self.state

    def seek_reset(self) -> None:
        """A playhead discontinuity invalidates dwell state and the timestamp watermark."""
        self.state.reset()
        self._last_sample_t = None
