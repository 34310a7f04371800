"""Per-frame overlay composition into layered vector render commands.

The engine never rasterizes: each frame becomes an ordered list of drawing
primitives that the viewer (or the reference rasterizer used in tests)
executes.  Layer semantics follow the compositing order darken < court
overlays < restored foreground < labels; commands at the foreground-restore
layer are player-figure accents (brightness, glow) applied with the restored
pixels, and label commands ride above everything.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Mapping

from .ability import DefenseTable, EpvMap, RegionPartition, diff_at, dist, epv_at
from .config import GameStateConfig, GazeConfig, OverlayConfig
from .gamestate import GameStateFrame, LV2, LV25, LV3
from .gaze import DarkenRegion, GazeSessionState, apply_gaze
from .ingest import BoundingBox, CourtSample, PoseKeypoints, Roster
from .tracking import TrackedBox

log = logging.getLogger(__name__)


class Layer(IntEnum):
    BACKGROUND_DARKEN = 0
    COURT_OVERLAY = 1
    FOREGROUND_RESTORE = 2
    LABEL = 3


class Primitive(IntEnum):
    SPOTLIGHT = 0
    OFFENSE_RING = 1
    DEFENSE_SHIELD = 2
    LINK = 3
    NAME_LABEL = 4
    AUDIENCE_DARKEN = 5


class ColorRole(IntEnum):
    WHITE = 0       # Lv3 spotlight (handler / receiver)
    GREEN = 1       # Lv3 spotlight for open players
    GOLD = 2        # star player name label
    NEUTRAL = 3     # regular name label / links
    BRIGHTNESS = 4  # Lv2 player-figure accent
    GLOW = 5        # Lv2.5 / dwell-ramp player-figure accent
    DIM = 6         # darken commands
    SEQUENTIAL = 7  # EPV ring; color position carried in params


class Icon(IntEnum):
    NONE = 0
    SHOOTER = 1
    DEFENDER = 2


class DarkenScope(IntEnum):
    BACKGROUND = 0  # everything outside the human foreground
    AUDIENCE = 1    # outside foreground and court region


@dataclass(frozen=True, order=True)
class RenderCommand:
    """One drawable primitive; field meanings per primitive are in PROTOCOL.md."""

    layer: int
    player: str  # empty for global commands; sorts ties within a layer
    primitive: int
    color_role: int
    x: float = 0.0
    y: float = 0.0
    p0: float = 0.0
    p1: float = 0.0
    p2: float = 0.0
    p3: float = 0.0
    opacity: float = 1.0
    ease: float = 0.0
    text: str = ""
    icon: int = 0

    def __post_init__(self):
        if not (0.0 <= self.opacity <= 1.0):
            raise ValueError("opacity must be in [0, 1]")


@dataclass(frozen=True)
class RingSpec:
    """Offense ring geometry: radius and color both scale with EPV."""

    anchor: tuple[float, float]
    epv: float
    inner: float
    outer: float

    @property
    def radius(self) -> float:
        return self.inner + (self.epv / 3.0) * (self.outer - self.inner)

    @property
    def color_position(self) -> float:
        return self.epv / 3.0


@dataclass(frozen=True)
class ShieldSpec:
    """Defense shield: thickness from -DIFF%, arc length from guarding distance."""

    anchor: tuple[float, float]
    diff_percent: float
    distance: float
    guard_max: float
    orientation: float  # radians toward the ball handler
    px_per_point: float

    @property
    def thickness(self) -> float:
        return max(0.0, -self.diff_percent) * self.px_per_point

    @property
    def arc_fraction(self) -> float:
        return min(1.0, max(0.0, (self.guard_max - self.distance) / self.guard_max))


def feet_anchor(box: TrackedBox | BoundingBox,
                keypoints: PoseKeypoints | None = None,
                confidence_min: float = 0.3) -> tuple[float, float]:
    """Midpoint of confident foot joints, else the box's bottom center."""
    b = box.box if isinstance(box, TrackedBox) else box
    if keypoints is not None:
        feet = [keypoints.joints[j] for j in ("left_foot", "right_foot")
                if j in keypoints.joints]
        if len(feet) == 2 and all(f[2] >= confidence_min for f in feet):
            return ((feet[0][0] + feet[1][0]) / 2.0,
                    (feet[0][1] + feet[1][1]) / 2.0)
    return (b.x + b.w / 2.0, b.y + b.h)


def head_anchor(box: TrackedBox | BoundingBox,
                keypoints: PoseKeypoints | None = None,
                confidence_min: float = 0.3) -> tuple[float, float]:
    """Head joint when confident, else the box's top center."""
    b = box.box if isinstance(box, TrackedBox) else box
    if keypoints is not None and "head" in keypoints.joints:
        x, y, conf = keypoints.joints["head"]
        if conf >= confidence_min:
            return (x, y)
    return (b.x + b.w / 2.0, b.y)


class FrameComposer:
    """Builds per-frame command lists from the static game stores."""

    def __init__(self, roster: Roster, epv_maps: Mapping[str, EpvMap],
                 defense: DefenseTable, partition: RegionPartition,
                 overlay_cfg: OverlayConfig | None = None,
                 gaze_cfg: GazeConfig | None = None,
                 guard_distance_max: float | None = None):
        self.roster = roster
        self.epv_maps = epv_maps
        self.defense = defense
        self.partition = partition
        self.cfg = overlay_cfg or OverlayConfig()
        self.gaze_cfg = gaze_cfg or GazeConfig()
        self.guard_distance_max = (guard_distance_max if guard_distance_max
                                   is not None else GameStateConfig().guard_distance_max)
        self.cfg.validate()

    def _scale(self, box: BoundingBox) -> float:
        return box.h / self.cfg.reference_box_height

    def compose(self,
                frame: int,
                boxes: Mapping[str, TrackedBox],
                keypoints: Mapping[str, PoseKeypoints],
                state: GameStateFrame | None,
                positions: Mapping[str, CourtSample],
                gaze_state: GazeSessionState | None = None,
                now: float | None = None) -> list[RenderCommand]:
        cfg = self.cfg
        cmds: list[RenderCommand] = [RenderCommand(
            layer=Layer.BACKGROUND_DARKEN, player="",
            primitive=Primitive.AUDIENCE_DARKEN, color_role=ColorRole.DIM,
            p0=0.0, p1=float(DarkenScope.BACKGROUND), opacity=cfg.background_dim)]

        importance: dict[str, float] = dict(state.importance) if state else {}
        open_players = state.open_players if state else frozenset()

        def anchor_of(pid: str) -> tuple[float, float] | None:
            tb = boxes.get(pid)
            if tb is None:
                return None
            return feet_anchor(tb, keypoints.get(pid), cfg.keypoint_confidence_min)

        spotlight_positions = {pid: a for pid in sorted(open_players)
                               if (a := anchor_of(pid)) is not None}

        darken: DarkenRegion | None = None
        glow_levels: dict[str, float] = {}
        if gaze_state is not None:
            importance, spotlights_on, darken = apply_gaze(
                importance, gaze_state, spotlight_positions, self.gaze_cfg, now)
            for pid in gaze_state.dwell:
                g = gaze_state.glow(pid, self.gaze_cfg)
                if g > 0.0:
                    glow_levels[pid] = max(glow_levels.get(pid, 0.0), g)
        else:
            spotlights_on = frozenset(spotlight_positions)

        if darken is not None:
            cmds.append(RenderCommand(
                layer=Layer.BACKGROUND_DARKEN, player="",
                primitive=Primitive.AUDIENCE_DARKEN, color_role=ColorRole.DIM,
                x=darken.center[0], y=darken.center[1],
                p0=darken.radius, p1=float(DarkenScope.AUDIENCE),
                opacity=cfg.audience_dim))

        if state is None:
            return self._finish(cmds)

        handler_pos = None
        if state.handler is not None and state.handler in positions:
            s = positions[state.handler]
            handler_pos = (s.x, s.y)
        handler_anchor = anchor_of(state.handler) if state.handler else None

        for pid in sorted(importance):
            level = importance[pid]
            if level <= 1.0:
                continue
            tb = boxes.get(pid)
            if tb is None:
                log.warning("frame %d: player %s ranked Lv%s but has no tracked box; "
                            "commands skipped", frame, pid, level)
                continue
            anchor = anchor_of(pid)
            assert anchor is not None
            scale = self._scale(tb.box)
            on_offense = (state.offense is not None and pid in self.roster
                          and self.roster.team_of(pid) == state.offense)

            if level >= LV3:
                is_open = pid in state.open_players
                if not is_open or pid in spotlights_on:
                    cmds.append(RenderCommand(
                        layer=Layer.COURT_OVERLAY, player=pid,
                        primitive=Primitive.SPOTLIGHT,
                        color_role=ColorRole.GREEN if is_open else ColorRole.WHITE,
                        x=anchor[0], y=anchor[1],
                        p0=cfg.spotlight_radius * scale, opacity=1.0))
            elif level == LV2:
                cmds.append(RenderCommand(
                    layer=Layer.FOREGROUND_RESTORE, player=pid,
                    primitive=Primitive.SPOTLIGHT, color_role=ColorRole.BRIGHTNESS,
                    x=anchor[0], y=anchor[1], p0=cfg.spotlight_radius * scale,
                    opacity=1.0))

            if level == LV25:
                glow_levels[pid] = 1.0  # lifted players hold a saturated glow

            sample = positions.get(pid)
            if sample is None:
                log.warning("frame %d: player %s has no court sample; ability "
                            "visualization skipped", frame, pid)
            elif on_offense:
                epv_map = self.epv_maps.get(pid)
                if epv_map is not None:
                    spec = RingSpec(anchor=anchor,
                                    epv=epv_at(epv_map, (sample.x, sample.y),
                                               self.partition),
                                    inner=cfg.ring_inner * scale,
                                    outer=cfg.ring_outer * scale)
                    cmds.append(RenderCommand(
                        layer=Layer.COURT_OVERLAY, player=pid,
                        primitive=Primitive.OFFENSE_RING,
                        color_role=ColorRole.SEQUENTIAL,
                        x=anchor[0], y=anchor[1],
                        p0=spec.inner, p1=spec.outer, p2=spec.radius,
                        p3=spec.color_position, opacity=1.0))
            elif handler_pos is not None:
                lookup = diff_at(self.defense, pid, handler_pos, self.partition)
                d = dist((sample.x, sample.y), handler_pos)
                orientation = 0.0
                if handler_anchor is not None:
                    orientation = math.atan2(handler_anchor[1] - anchor[1],
                                             handler_anchor[0] - anchor[0])
                spec = ShieldSpec(anchor=anchor, diff_percent=lookup.value,
                                  distance=d, guard_max=self.guard_distance_max,
                                  orientation=orientation,
                                  px_per_point=cfg.shield_px_per_point)
                cmds.append(RenderCommand(
                    layer=Layer.COURT_OVERLAY, player=pid,
                    primitive=Primitive.DEFENSE_SHIELD, color_role=ColorRole.NEUTRAL,
                    x=anchor[0], y=anchor[1],
                    p0=cfg.shield_radius * scale, p1=spec.thickness,
                    p2=spec.arc_fraction, p3=spec.orientation, opacity=1.0))

            if level > LV2:
                entry = self.roster.entries.get(pid)
                name = entry.name if entry is not None else pid
                star = entry is not None and entry.role != "none"
                icon = Icon.NONE
                if star:
                    icon = Icon.SHOOTER if entry.role == "shooter" else Icon.DEFENDER
                head = head_anchor(tb, keypoints.get(pid), cfg.keypoint_confidence_min)
                cmds.append(RenderCommand(
                    layer=Layer.LABEL, player=pid, primitive=Primitive.NAME_LABEL,
                    color_role=ColorRole.GOLD if star else ColorRole.NEUTRAL,
                    x=head[0], y=head[1], p0=cfg.label_font_size * scale,
                    opacity=1.0, text=name, icon=int(icon)))

        if handler_anchor is not None:
            for defender, _ in sorted(state.links):
                d_anchor = anchor_of(defender)
                if d_anchor is None:
                    log.warning("frame %d: key defender %s has no tracked box; "
                                "link skipped", frame, defender)
                    continue
                cmds.append(RenderCommand(
                    layer=Layer.COURT_OVERLAY, player=defender,
                    primitive=Primitive.LINK, color_role=ColorRole.NEUTRAL,
                    x=d_anchor[0], y=d_anchor[1],
                    p0=handler_anchor[0], p1=handler_anchor[1],
                    p2=cfg.link_width, opacity=1.0))

        # Dwell feedback: the player's glow ramps with the accumulator and
        # saturates while lifted, independent of importance level.
        for pid in sorted(glow_levels):
            tb = boxes.get(pid)
            if tb is None:
                continue
            anchor = anchor_of(pid)
            cmds.append(RenderCommand(
                layer=Layer.FOREGROUND_RESTORE, player=pid,
                primitive=Primitive.SPOTLIGHT, color_role=ColorRole.GLOW,
                x=anchor[0], y=anchor[1],
                p0=cfg.spotlight_radius * self._scale(tb.box),
                opacity=glow_levels[pid]))

        return self._finish(cmds)

    @staticmethod
    def _finish(cmds: list[RenderCommand]) -> list[RenderCommand]:
        cmds.sort(key=lambda c: (c.layer, c.player, c.primitive, c.color_role))
        return cmds


def compose_frame(frame: int, boxes: Mapping[str, TrackedBox],
                  keypoints: Mapping[str, PoseKeypoints],
                  state: GameStateFrame | None,
                  positions: Mapping[str, CourtSample],
                  roster: Roster, epv_maps: Mapping[str, EpvMap],
                  defense: DefenseTable, partition: RegionPartition,
                  gaze_state: GazeSessionState | None = None,
                  overlay_cfg: OverlayConfig | None = None,
                  gaze_cfg: GazeConfig | None = None,
                  now: float | None = None) -> list[RenderCommand]:
    """One-shot composition; FrameComposer is cheaper when stores are reused."""
    composer = FrameComposer(roster, epv_maps, defense, partition,
                             overlay_cfg, gaze_cfg)
    return composer.compose(frame, boxes, keypoints, state, positions,
                            gaze_state, now)
