"""Transport-free session state machine shared by the server and offline replay.

One session owns a playhead over a bundle plus a gaze engine.  Gaze samples
are timestamped on the video clock by the client; frames are composed at
virtual presentation times (frame / frame_rate), consuming every buffered
sample that falls at or before the frame time.  The WebSocket layer only
paces and shuttles messages, so an offline replay of the same sample stream
is frame-for-frame identical to the online path.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .bundle import GameBundle
from .errors import SessionError
from .gaze import GazeSession
from .ingest import GazeSample
from .overlay import FrameComposer, RenderCommand

PLAYING = "playing"
PAUSED = "paused"


@dataclass(frozen=True)
class GazeAck:
    accepted: bool
    timestamp: float
    code: str | None = None  # non_monotone | invalid when rejected


class SessionCore:
    """Single-writer session over an immutable bundle."""

    def __init__(self, session_id: str, bundle: GameBundle,
                 config_overrides: dict | None = None):
        self.session_id = session_id
        self.bundle = bundle
        cfg = bundle.config
        if config_overrides:
            from .config import PipelineConfig
            merged = cfg.to_dict()
            for section, keys in config_overrides.items():
                merged.setdefault(section, {}).update(keys)
            cfg = PipelineConfig.from_dict(merged)
        self.config = cfg
        self.playhead = 0
        self.play_state = PAUSED
        self.gaze = GazeSession(cfg.gaze)
        self._pending: list[GazeSample] = []
        self._composer = FrameComposer(
            roster=bundle.roster, epv_maps=bundle.epv_maps,
            defense=bundle.defense, partition=bundle.partition,
            overlay_cfg=cfg.overlay, gaze_cfg=cfg.gaze,
            guard_distance_max=cfg.gamestate.guard_distance_max)

    @property
    def frame_rate(self) -> float:
        return self.bundle.frame_rate

    @property
    def frame_count(self) -> int:
        return self.bundle.frame_count

    def submit_gaze(self, sample: GazeSample) -> GazeAck:
        """Buffer one sample; timestamps must be strictly increasing."""
        if self._pending and sample.timestamp <= self._pending[-1].timestamp:
            return GazeAck(False, sample.timestamp, code="non_monotone")
        if self.gaze._last_sample_t is not None and \
                sample.timestamp <= self.gaze._last_sample_t:
            return GazeAck(False, sample.timestamp, code="non_monotone")
        self._pending.append(sample)
        return GazeAck(True, sample.timestamp)

    def control(self, action: str, frame: int | None = None) -> str:
        """play | pause | seek(frame); returns the new play state."""
        if action == "play":
            self.play_state = PLAYING
        elif action == "pause":
            self.play_state = PAUSED
        elif action == "seek":
            if frame is None or not (0 <= frame < self.frame_count):
                raise SessionError("seek_range",
                                   f"seek target {frame} outside [0, {self.frame_count})")
            self.playhead = frame
            # Dwell state is meaningless across a discontinuity.
            self.gaze.seek_reset()
            self._pending.clear()
        else:
            raise SessionError("bad_action", f"unknown control action {action!r}")
        return self.play_state

    def _apply_gaze_until(self, presentation_time: float) -> None:
        boxes_cache: dict[int, dict] = {}
        while self._pending and self._pending[0].timestamp <= presentation_time:
            sample = self._pending.pop(0)
            frame = min(self.frame_count - 1,
                        max(0, int(sample.timestamp * self.frame_rate)))
            if frame not in boxes_cache:
                boxes_cache[frame] = {pid: tb.box for pid, tb in
                                      self.bundle.tracks_at(frame).items()}
            self.gaze.process(sample, boxes_cache[frame])

    def compose_frame(self, frame: int) -> list[RenderCommand]:
        """Compose one frame at its presentation time, pure w.r.t. the playhead."""
        t = frame / self.frame_rate
        self._apply_gaze_until(t)
        return self._composer.compose(
            frame=frame,
            boxes=self.bundle.tracks_at(frame),
            keypoints=self.bundle.keypoints_at(frame),
            state=self.bundle.state_at(frame),
            positions=self.bundle.positions_at(frame),
            gaze_state=self.gaze.state,
            now=t)

    def next_frame(self) -> tuple[int, list[RenderCommand]] | None:
        """Emit the frame at the playhead and advance; None when exhausted or paused."""
        if self.play_state != PLAYING:
            return None
        return self.step_frame()

    def step_frame(self) -> tuple[int, list[RenderCommand]] | None:
        """Lockstep pull: emit and advance regardless of play state."""
        if self.playhead >= self.frame_count:
            return None
        frame = self.playhead
        commands = self.compose_frame(frame)
        self.playhead = frame + 1
        return frame, commands

    def frame_stream(self) -> Iterator[tuple[int, list[RenderCommand]]]:
        """Drain frames from the playhead while playing."""
        while True:
            item = self.next_frame()
            if item is None:
                return
            yield item


def replay(bundle: GameBundle, gaze_trace: Sequence[GazeSample] = (),
           config_overrides: dict | None = None
           ) -> Iterator[tuple[int, list[RenderCommand]]]:
    """Offline replay: whole trace buffered up front, then every frame in order."""
    core = SessionCore("offline", bundle, config_overrides)
    for sample in gaze_trace:
        ack = core.submit_gaze(sample)
        if not ack.accepted:
            raise SessionError(ack.code or "rejected",
                               f"gaze sample at t={sample.timestamp} rejected")
    core.control("play")
    return core.frame_stream()


class SessionManager:
    """Creates and looks up sessions over a set of loaded bundles."""

    def __init__(self, bundles: dict[str, GameBundle]):
        self.bundles = bundles
        self.sessions: dict[str, SessionCore] = {}
        self._ids = itertools.count(1)

    def create_session(self, game_id: str,
                       config_overrides: dict | None = None) -> SessionCore:
        if game_id not in self.bundles:
            raise SessionError("unknown_game", f"no such game: {game_id}")
        session_id = f"s{next(self._ids)}"
        core = SessionCore(session_id, self.bundles[game_id], config_overrides)
        self.sessions[session_id] = core
        return core

    def get(self, session_id: str) -> SessionCore:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise SessionError("unknown_session",
                               f"no such session: {session_id}") from None
