"""Tunable configuration for every pipeline stage.

All defaults are the engine's published constants; a YAML config file can
override any key, and CLI ``--opt section.key=value`` flags override the file.
Sections: ``matcher``, ``gamestate``, ``gaze``, ``overlay``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import ValidationError


@dataclass(frozen=True)
class MatcherConfig:
    """Two-stage association and track refinement parameters."""

    t_high: float = 0.6         # score above this -> high-quality cluster
    t_low: float = 0.1          # score at or below this -> rejected
    iou_match_min: float = 0.3  # minimum IoU to accept a tracker/box match
    max_gap: int = 4            # frames a tracker survives unmatched; also max interpolated gap
    smooth_window: int = 5      # centered moving-average window (frames)
    use_hungarian: bool = False  # optimal assignment instead of greedy per-box argmax

    def validate(self) -> None:
        if not (0.0 <= self.t_low < self.t_high <= 1.0):
            raise ValidationError("require 0 <= t_low < t_high <= 1", field="t_high")
        if not (0.0 < self.iou_match_min < 1.0):
            raise ValidationError("iou_match_min must be in (0, 1)", field="iou_match_min")
        if self.max_gap < 0:
            raise ValidationError("max_gap must be >= 0", field="max_gap")
        if self.smooth_window < 1:
            raise ValidationError("smooth_window must be >= 1", field="smooth_window")


@dataclass(frozen=True)
class GameStateConfig:
    """Possession, receiver look-ahead, and openness thresholds."""

    possession_window: float = 0.5   # trailing seconds used to decide offense
    lookahead: float = 1.8           # seconds scanned for the next receiver
    open_distance: float = 6.0       # feet; nearest defender at or beyond -> open
    handler_distance: float = 3.0    # feet; player must be this close to the ball
    guard_distance_max: float = 12.0  # feet; key-defender distance cap
    frame_rate: float = 30.0

    def validate(self) -> None:
        for name in ("possession_window", "lookahead", "open_distance",
                     "handler_distance", "guard_distance_max", "frame_rate"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive", field=name)


@dataclass(frozen=True)
class GazeConfig:
    """Dwell-trigger and radial-filter parameters."""

    dwell_trigger: float = 0.25    # seconds of dwell that lift a player
    linger: float = 1.8            # seconds a lift persists after gaze departure
    filter_radius: float = 650.0   # pixels; spotlight/darkening radius
    dwell_grace: float = 0.1       # seconds of absence tolerated before the accumulator resets
    center_smoothing: float = 0.85  # per-second exponential factor for the filter center
    hitbox_margin: float = 10.0    # pixels added around boxes for hit testing

    def validate(self) -> None:
        for name in ("dwell_trigger", "linger", "filter_radius", "dwell_grace",
                     "hitbox_margin"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive", field=name)
        if not (0.0 < self.center_smoothing <= 1.0):
            raise ValidationError("center_smoothing must be in (0, 1]", field="center_smoothing")


@dataclass(frozen=True)
class OverlayConfig:
    """Pixel-space constants for the render-command composer."""

    ring_inner: float = 18.0            # px at the reference box height (EPV = 0)
    ring_outer: float = 48.0            # px at the reference box height (EPV = 3)
    ring_thickness: float = 4.0         # px stroke width of the value ring
    reference_box_height: float = 160.0  # px box height at which the radii above apply
    spotlight_radius: float = 40.0      # px at the reference box height
    shield_radius: float = 56.0         # px arc distance from the defender anchor
    shield_px_per_point: float = 2.0    # px thickness per -1 DIFF% point
    link_width: float = 3.0             # px
    label_font_size: float = 16.0       # px at the reference box height
    background_dim: float = 0.35        # opacity of the global background darken
    audience_dim: float = 0.6           # opacity of the gaze-driven audience darken
    keypoint_confidence_min: float = 0.3  # joints below this fall back to box anchors

    def validate(self) -> None:
        if not (0.0 < self.ring_inner < self.ring_outer):
            raise ValidationError("require 0 < ring_inner < ring_outer", field="ring_outer")
        for name in ("reference_box_height", "spotlight_radius", "shield_radius",
                     "shield_px_per_point", "link_width", "label_font_size"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive", field=name)
        for name in ("background_dim", "audience_dim"):
            if not (0.0 <= getattr(self, name) <= 1.0):
                raise ValidationError(f"{name} must be in [0, 1]", field=name)


_SECTIONS = {
    "matcher": MatcherConfig,
    "gamestate": GameStateConfig,
    "gaze": GazeConfig,
    "overlay": OverlayConfig,
}


@dataclass(frozen=True)
class PipelineConfig:
    """Aggregate of all stage configs, as read from a config file."""

    matcher: MatcherConfig = field(default_factory=MatcherConfig)
    gamestate: GameStateConfig = field(default_factory=GameStateConfig)
    gaze: GazeConfig = field(default_factory=GazeConfig)
    overlay: OverlayConfig = field(default_factory=OverlayConfig)

    def validate(self) -> None:
        for name in _SECTIONS:
            getattr(self, name).validate()

    def to_dict(self) -> dict:
        return {name: dataclasses.asdict(getattr(self, name)) for name in _SECTIONS}

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        kwargs = {}
        for name, section_cls in _SECTIONS.items():
            section = dict(data.get(name) or {})
            known = {f.name for f in dataclasses.fields(section_cls)}
            unknown = set(section) - known
            if unknown:
                raise ValidationError(
                    f"unknown config key(s) in [{name}]: {', '.join(sorted(unknown))}",
                    field=name,
                )
            kwargs[name] = section_cls(**section)
        extra = set(data) - set(_SECTIONS)
        if extra:
            raise ValidationError(f"unknown config section(s): {', '.join(sorted(extra))}")
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg


def load_config(path: str | Path | None = None,
                overrides: dict[str, str] | None = None) -> PipelineConfig:
    """Load a PipelineConfig from YAML, then apply ``section.key=value`` overrides."""
    data: dict = {}
    if path is not None:
        raw = yaml.safe_load(Path(path).read_text())
        if raw is None:
            raw = {}
        if not isinstance(raw, dict):
            raise ValidationError(f"config file {path} must contain a mapping")
        data = raw
    for dotted, value in (overrides or {}).items():
        if dotted.count(".") != 1:
            raise ValidationError(f"override key must be section.key, got {dotted!r}")
        section, key = dotted.split(".")
        data.setdefault(section, {})[key] = yaml.safe_load(value)
    return PipelineConfig.from_dict(data)
