"""GameBundle: one preprocessed game on disk, ready to serve or replay.

A bundle directory holds a manifest plus the per-frame streams every session
needs: identity-stable tracks, derived game states, EPV maps, defense stats,
masks, keypoints, and the roster.  The manifest embeds the effective config
so replays reproduce composition exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from . import ingest
from .ability import (DefenseTable, EpvMap, NbaZonePartition, RegionPartition,
                      build_all_epv_maps, dump_epv_maps, load_epv_maps,
                      load_partition)
from .config import PipelineConfig
from .errors import ValidationError
from .gamestate import (GameStateFrame, compute_game_states, dump_game_states,
                        load_game_states)
from .ingest import (CourtSample, PoseKeypoints, Roster, SegmentationMask)
from .tracking import SOURCE_DETECTED, TrackedBox, postprocess
from .tracking.associate import SOURCE_INTERPOLATED

MANIFEST = "manifest.json"


def dump_tracks(tracks: Sequence[TrackedBox]) -> str:
    """tracks.csv: frame,identity,x,y,w,h,source."""
    return "".join(
        f"{t.frame},{t.identity},{t.box.x!r},{t.box.y!r},{t.box.w!r},{t.box.h!r},"
        f"{t.source}\n"
        for t in tracks)


def load_tracks(path: str | Path) -> list[TrackedBox]:
    from .errors import ParseError
    from .ingest import BoundingBox

    tracks = []
    text = Path(path).read_text()
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 7:
            raise ParseError(path, line_no, f"expected 7 fields, got {len(parts)}")
        frame_s, identity, x, y, w, h, source = parts
        if source not in (SOURCE_DETECTED, SOURCE_INTERPOLATED):
            raise ValidationError(f"unknown source {source!r}", field="source",
                                  line_no=line_no)
        try:
            tracks.append(TrackedBox(
                frame=int(frame_s), identity=identity,
                box=BoundingBox(float(x), float(y), float(w), float(h)),
                source=source))
        except ValueError:
            raise ParseError(path, line_no, "bad numeric field") from None
    tracks.sort(key=lambda t: (t.frame, t.identity))
    return tracks


@dataclass
class GameBundle:
    game_id: str
    frame_rate: float
    frame_count: int
    width: int
    height: int
    roster: Roster
    tracks: list[TrackedBox]
    game_states: list[GameStateFrame]
    tracking: list[CourtSample]
    epv_maps: Mapping[str, EpvMap]
    defense: DefenseTable
    masks: list[SegmentationMask]
    keypoints: list[PoseKeypoints]
    config: PipelineConfig
    partition: RegionPartition = field(default_factory=NbaZonePartition)
    court_polygon: list[tuple[float, float]] | None = None
    video_file: str | None = None

    def __post_init__(self):
        for t in self.tracks:
            if not (0 <= t.frame < self.frame_count):
                raise ValidationError(
                    f"track frame {t.frame} outside [0, {self.frame_count})",
                    field="frame")

    def tracks_at(self, frame: int) -> dict[str, TrackedBox]:
        if not hasattr(self, "_tracks_by_frame"):
            index: dict[int, dict[str, TrackedBox]] = {}
            for t in self.tracks:
                index.setdefault(t.frame, {})[t.identity] = t
            self._tracks_by_frame = index
        return self._tracks_by_frame.get(frame, {})

    def state_at(self, frame: int) -> GameStateFrame | None:
        if not hasattr(self, "_states_by_frame"):
            self._states_by_frame = {g.frame: g for g in self.game_states}
        return self._states_by_frame.get(frame)

    def positions_at(self, frame: int) -> dict[str, CourtSample]:
        if not hasattr(self, "_positions_by_frame"):
            index: dict[int, dict[str, CourtSample]] = {}
            for s in self.tracking:
                index.setdefault(s.frame, {})[s.entity] = s
            self._positions_by_frame = index
        return self._positions_by_frame.get(frame, {})

    def keypoints_at(self, frame: int) -> dict[str, PoseKeypoints]:
        if not hasattr(self, "_keypoints_by_frame"):
            index: dict[int, dict[str, PoseKeypoints]] = {}
            for kp in self.keypoints:
                index.setdefault(kp.frame, {})[kp.player] = kp
            self._keypoints_by_frame = index
        return self._keypoints_by_frame.get(frame, {})

    def mask_at(self, frame: int) -> SegmentationMask | None:
        if not hasattr(self, "_masks_by_frame"):
            self._masks_by_frame = {m.frame: m for m in self.masks}
        return self._masks_by_frame.get(frame)


def build_bundle(game_id: str,
                 detections_path: str | Path,
                 tracking_path: str | Path,
                 masks_path: str | Path,
                 shots_path: str | Path,
                 defense_path: str | Path,
                 roster_path: str | Path,
                 keypoints_path: str | Path | None = None,
                 config: PipelineConfig | None = None,
                 partition: RegionPartition | None = None,
                 frame_rate: float | None = None,
                 court_polygon: list[tuple[float, float]] | None = None) -> GameBundle:
    """Run the full preprocessing pipeline over raw input files."""
    config = config or PipelineConfig()
    config.validate()
    partition = partition or NbaZonePartition()

    for name, path in (("detections", detections_path), ("tracking", tracking_path),
                       ("masks", masks_path), ("shots", shots_path),
                       ("defense", defense_path), ("roster", roster_path)):
        if not Path(path).is_file():
            raise ValidationError(f"{name} file not found: {path}", field=name)

    roster = ingest.load_roster(roster_path)
    detections = ingest.load_detections(detections_path, roster=roster)
    tracking = ingest.load_tracking(tracking_path)
    masks = ingest.load_masks(masks_path)
    shots = ingest.load_shots(shots_path)
    defense_records = ingest.load_defense(defense_path)
    keypoints = (ingest.load_keypoints(keypoints_path)
                 if keypoints_path and Path(keypoints_path).is_file() else [])

    gs_cfg = config.gamestate
    if frame_rate is not None and frame_rate != gs_cfg.frame_rate:
        import dataclasses
        gs_cfg = dataclasses.replace(gs_cfg, frame_rate=frame_rate)
        config = PipelineConfig(matcher=config.matcher, gamestate=gs_cfg,
                                gaze=config.gaze, overlay=config.overlay)

    tracks = postprocess(detections, config.matcher)
    game_states = compute_game_states(tracking, roster, gs_cfg)
    epv_maps = build_all_epv_maps(shots, partition, sorted(roster.entries))
    defense = DefenseTable.from_records(defense_records)

    frames = [t.frame for t in tracks] + [s.frame for s in tracking] + \
             [m.frame for m in masks]
    frame_count = (max(frames) + 1) if frames else 0
    width = max((m.width for m in masks), default=0)
    height = max((m.height for m in masks), default=0)

    return GameBundle(
        game_id=game_id, frame_rate=gs_cfg.frame_rate, frame_count=frame_count,
        width=width, height=height, roster=roster, tracks=tracks,
        game_states=game_states, tracking=tracking, epv_maps=epv_maps,
        defense=defense, masks=masks, keypoints=keypoints, config=config,
        partition=partition, court_polygon=court_polygon)


def save_bundle(bundle: GameBundle, out_dir: str | Path) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "tracks.csv").write_text(dump_tracks(bundle.tracks))
    (out / "gamestate.csv").write_text(dump_game_states(bundle.game_states))
    (out / "tracking.csv").write_text(ingest.dump_tracking(bundle.tracking))
    (out / "epvmap.csv").write_text(dump_epv_maps(bundle.epv_maps))
    (out / "masks.rle").write_text(ingest.dump_masks(bundle.masks))
    (out / "roster.csv").write_text(ingest.dump_roster(bundle.roster))
    if bundle.keypoints:
        (out / "keypoints.csv").write_text(ingest.dump_keypoints(bundle.keypoints))
    defense_rows = [ingest.DefenseRecord(player=p, region=r, diff_percent=v)
                    for p, regions in sorted(bundle.defense.table.items())
                    for r, v in sorted(regions.items())]
    (out / "defense.csv").write_text(ingest.dump_defense(defense_rows))
    manifest = {
        "game_id": bundle.game_id,
        "frame_rate": bundle.frame_rate,
        "frame_count": bundle.frame_count,
        "width": bundle.width,
        "height": bundle.height,
        "court_polygon": bundle.court_polygon,
        "video_file": bundle.video_file,
        "config": bundle.config.to_dict(),
    }
    (out / MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return out


def load_bundle(path: str | Path,
                partition: RegionPartition | None = None) -> GameBundle:
    root = Path(path)
    manifest_path = root / MANIFEST
    if not manifest_path.is_file():
        raise ValidationError(f"not a bundle directory (no {MANIFEST}): {root}",
                              field="bundle")
    manifest = json.loads(manifest_path.read_text())
    config = PipelineConfig.from_dict(manifest.get("config", {}))
    roster = ingest.load_roster(root / "roster.csv")
    if partition is None:
        partition_file = root / "partition.csv"
        partition = (load_partition(partition_file) if partition_file.is_file()
                     else NbaZonePartition())
    keypoints_path = root / "keypoints.csv"
    polygon = manifest.get("court_polygon")
    return GameBundle(
        game_id=manifest["game_id"],
        frame_rate=manifest["frame_rate"],
        frame_count=manifest["frame_count"],
        width=manifest["width"],
        height=manifest["height"],
        roster=roster,
        tracks=load_tracks(root / "tracks.csv"),
        game_states=load_game_states(root / "gamestate.csv", roster),
        tracking=ingest.load_tracking(root / "tracking.csv"),
        epv_maps=load_epv_maps(root / "epvmap.csv"),
        defense=DefenseTable.from_records(ingest.load_defense(root / "defense.csv")),
        masks=ingest.load_masks(root / "masks.rle"),
        keypoints=(ingest.load_keypoints(keypoints_path)
                   if keypoints_path.is_file() else []),
        config=config,
        partition=partition,
        court_polygon=[tuple(p) for p in polygon] if polygon else None,
        video_file=manifest.get("video_file"))


def list_bundles(bundle_dir: str | Path) -> list[str]:
    root = Path(bundle_dir)
    if not root.is_dir():
        return []
    return sorted(p.name for p in root.iterdir()
                  if p.is_dir() and (p / MANIFEST).is_file())
