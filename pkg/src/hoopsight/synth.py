"""Deterministic synthetic game generator.

Stands in for scraped league data: produces a full scripted possession
(court tracking, detections, masks, keypoints, shot history, defense stats,
roster, and a gaze trace) plus the randomized constant-velocity scenes used
by the evaluation suite.  Everything is a pure function of the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import ingest
from .ingest import (BALL, BoundingBox, CourtSample, Detection, GazeSample,
                     PoseKeypoints, Roster, RosterEntry, SegmentationMask,
                     ShotRecord, DefenseRecord)

FRAME_RATE = 30.0
WIDTH = 640
HEIGHT = 360

# Screen projection of court feet (affine; the engine itself never projects).
_PX_OFFSET, _PX_SCALE = 24.0, 6.0
_PY_OFFSET, _PY_SCALE = 40.0, 5.2

# A representative interior point for each shipped region.
REGION_POINTS = {
    "restricted-area": (6.0, 25.0),
    "paint": (10.0, 25.0),
    "midrange-right": (18.0, 10.0),
    "midrange-center": (21.0, 25.0),
    "midrange-left": (18.0, 40.0),
    "corner-3-right": (5.0, 1.5),
    "corner-3-left": (5.0, 48.5),
    "above-break-3-right": (28.0, 8.0),
    "above-break-3-center": (30.0, 25.0),
    "above-break-3-left": (28.0, 42.0),
}


def project(x_ft: float, y_ft: float) -> tuple[float, float]:
    """Court feet -> screen pixels (player feet position)."""
    return (_PX_OFFSET + x_ft * _PX_SCALE, _PY_OFFSET + y_ft * _PY_SCALE)


def court_polygon() -> list[tuple[float, float]]:
    """Screen-space court quad used to scope audience darkening."""
    corners = [(0.0, 0.0), (94.0, 0.0), (94.0, 50.0), (0.0, 50.0)]
    return [project(x, y) for x, y in corners]


def box_at(x_ft: float, y_ft: float) -> BoundingBox:
    px, py = project(x_ft, y_ft)
    h = 44.0 + 0.5 * y_ft
    w = 0.45 * h
    return BoundingBox(px - w / 2.0, py - h, w, h)


def make_roster() -> Roster:
    entries = {}
    roles = {"A1": "shooter", "B1": "defender"}
    for team in ("A", "B"):
        for i in range(1, 6):
            pid = f"{team}{i}"
            entries[pid] = RosterEntry(player=pid, name=f"Player {pid}",
                                       team=team, role=roles.get(pid, "none"))
    return Roster(entries=dict(sorted(entries.items())))


def _player_pos(pid: str, t: int) -> tuple[float, float]:
    """Scripted court motion: team A on offense toward the low-x basket."""
    s = t / FRAME_RATE
    base = {
        "A1": (20.0 - 0.6 * s, 25.0 + 0.3 * s),
        "A2": (14.0 + 0.3 * s, 40.0 - 0.6 * s),
        "A3": (10.0 + 0.2 * s, 8.0 + 0.2 * s),
        "A4": (26.0 - 0.3 * s, 35.0),
        "A5": (30.0 - 0.2 * s, 15.0 + 0.3 * s),
    }
    if pid in base:
        return base[pid]
    anchor = {"B1": "A1", "B2": "A2", "B3": "A3", "B4": "A4", "B5": "A5"}[pid]
    ax, ay = base[anchor]
    if pid == "B3":
        return (ax + 7.0, ay + 4.0)  # sagging off: leaves A3 open
    return (ax + 1.8, ay + 0.8)


_PASS_START = 50  # A1 releases after this frame
_PASS_END = 60    # A2 receives at this frame


def _ball_pos(t: int) -> tuple[float, float, float]:
    if t <= _PASS_START:
        x, y = _player_pos("A1", t)
        return (x + 0.5, y, 4.0)
    if t >= _PASS_END:
        x, y = _player_pos("A2", t)
        return (x + 0.5, y, 4.0)
    x0, y0 = _player_pos("A1", _PASS_START)
    x1, y1 = _player_pos("A2", _PASS_END)
    f = (t - _PASS_START) / (_PASS_END - _PASS_START)
    height = 4.0 + 10.0 * math.sin(math.pi * f)
    return (x0 + 0.5 + (x1 - x0) * f, y0 + (y1 - y0) * f, height)


@dataclass
class SyntheticGame:
    game_id: str
    frame_count: int
    frame_rate: float
    width: int
    height: int
    roster: Roster
    tracking: list[CourtSample]
    ground_truth: list[Detection]
    detections: list[Detection]
    masks: list[SegmentationMask]
    keypoints: list[PoseKeypoints]
    shots: list[ShotRecord]
    defense: list[DefenseRecord]
    gaze_trace: list[GazeSample]
    court_polygon: list[tuple[float, float]] = field(default_factory=court_polygon)


def _make_shots() -> list[ShotRecord]:
    """Fixed per-region attempt/make tables (A1's corner three is 4-of-10)."""
    tables = {
        "A1": [("corner-3-right", 10, 4), ("paint", 20, 12),
               ("above-break-3-center", 15, 6)],
        "A2": [("midrange-center", 12, 6), ("restricted-area", 10, 7)],
        "A3": [("corner-3-left", 8, 3), ("paint", 6, 3)],
        "A4": [("restricted-area", 12, 8)],
        "A5": [("midrange-right", 10, 4), ("above-break-3-right", 6, 2)],
        "B1": [("paint", 10, 5)],
        "B2": [("midrange-left", 8, 3)],
    }
    shots = []
    for player in sorted(tables):
        for region, attempts, makes in tables[player]:
            x, y = REGION_POINTS[region]
            points = 3 if region.count("-3-") else 2
            for i in range(attempts):
                # Tiny deterministic jitter that stays inside the region.
                dx = 0.05 * (i % 5)
                dy = 0.03 * (i % 3)
                shots.append(ShotRecord(player=player, x=x + dx, y=y + dy,
                                        made=i < makes, points=points))
    return sorted(shots, key=lambda s: (s.player, s.x, s.y, s.points, s.made))


def _make_defense() -> list[DefenseRecord]:
    rows = [
        ("B1", "paint", -3.6), ("B1", "midrange-center", -3.6),
        ("B1", "restricted-area", -2.8),
        ("B2", "midrange-center", -1.2), ("B2", "restricted-area", -0.5),
        ("B3", "corner-3-left", 1.5),
        ("B4", "paint", -0.9),
        ("B5", "midrange-right", 2.0),
    ]
    return sorted((DefenseRecord(player=p, region=r, diff_percent=d)
                   for p, r, d in rows), key=lambda r: (r.player, r.region))


def _make_gaze_trace(frame_count: int) -> list[GazeSample]:
    """Scripted pointer path: dwell on A3, then on B3, then empty court."""
    samples = []
    t = 0.2
    dt = 1.0 / 60.0
    end = min(3.5, frame_count / FRAME_RATE - 0.1)
    while t < end:
        frame = min(frame_count - 1, int(t * FRAME_RATE))
        if t < 0.9:
            x, y = _player_pos("A3", frame)
        elif t < 1.0:
            x, y = None, None  # tracker dropout
        elif t < 1.6:
            x, y = _player_pos("B3", frame)
        else:
            x, y = 80.0, 6.0  # empty corner of the court
        if x is None:
            samples.append(GazeSample(timestamp=round(t, 6), x=0.0, y=0.0,
                                      valid=False))
        else:
            px, py = project(x, y)
            samples.append(GazeSample(timestamp=round(t, 6),
                                      x=round(px, 3), y=round(py - 20.0, 3),
                                      valid=True))
        t += dt
    return samples


def _mask_for_frame(frame: int, players: list[str]) -> SegmentationMask:
    ys, xs = np.mgrid[0:HEIGHT, 0:WIDTH]
    mask = np.zeros((HEIGHT, WIDTH), dtype=np.uint8)
    for pid in players:
        box = box_at(*_player_pos(pid, frame))
        cx, cy = box.cx, box.cy
        ax, ay = box.w * 0.35, box.h * 0.48
        mask |= (((xs - cx) / ax) ** 2 + ((ys - cy) / ay) ** 2 <= 1.0).astype(np.uint8)
    return SegmentationMask.encode(frame, mask)


def make_game(game_id: str = "demo", frame_count: int = 120,
              seed: int = 7) -> SyntheticGame:
    rng = np.random.default_rng(seed)
    roster = make_roster()
    players = sorted(roster.entries)

    tracking: list[CourtSample] = []
    ground_truth: list[Detection] = []
    detections: list[Detection] = []
    keypoints: list[PoseKeypoints] = []
    masks: list[SegmentationMask] = []

    # A4 dips to low confidence mid-clip; A5 is occluded for two frames.
    dip_frames = set(range(70, 73))
    drop_frames = {30, 31}

    for t in range(frame_count):
        bx, by, bz = _ball_pos(t)
        tracking.append(CourtSample(frame=t, entity=BALL,
                                    x=round(bx, 4), y=round(by, 4), z=round(bz, 4)))
        for pid in players:
            x, y = _player_pos(pid, t)
            tracking.append(CourtSample(frame=t, entity=pid,
                                        x=round(x, 4), y=round(y, 4)))
            box = box_at(x, y)
            conf = round(0.88 + 0.05 * math.sin(0.37 * t + sum(pid.encode()) % 7), 4)
            ground_truth.append(Detection(frame=t, identity=pid, box=box,
                                          confidence=1.0))
            if pid == "A5" and t in drop_frames:
                pass  # occluded: no detection at all
            else:
                if pid == "A4" and t in dip_frames:
                    conf = 0.3
                jx, jy = (float(v) for v in rng.normal(0.0, 0.4, size=2))
                jw, jh = (float(v) for v in rng.normal(0.0, 0.25, size=2))
                noisy = BoundingBox(round(box.x + jx, 4), round(box.y + jy, 4),
                                    round(max(4.0, box.w + jw), 4),
                                    round(max(8.0, box.h + jh), 4))
                detections.append(Detection(frame=t, identity=pid, box=noisy,
                                            confidence=conf))
            px, py = project(x, y)
            joints = {
                "head": (round(px, 3), round(box.y + 3.0, 3), 0.9),
                "hip": (round(px, 3), round(py - box.h * 0.45, 3), 0.85),
                "left_hand": (round(px - box.w * 0.4, 3), round(py - box.h * 0.55, 3), 0.8),
                "right_hand": (round(px + box.w * 0.4, 3), round(py - box.h * 0.55, 3), 0.8),
                "left_foot": (round(px - box.w * 0.18, 3), round(py, 3), 0.9),
                "right_foot": (round(px + box.w * 0.18, 3), round(py, 3), 0.9),
            }
            keypoints.append(PoseKeypoints(frame=t, player=pid, joints=joints))
        masks.append(_mask_for_frame(t, players))

    detections.sort(key=lambda d: (d.frame, d.identity, -d.confidence))
    ground_truth.sort(key=lambda d: (d.frame, d.identity))
    tracking.sort(key=lambda s: (s.frame, s.entity))

    return SyntheticGame(
        game_id=game_id, frame_count=frame_count, frame_rate=FRAME_RATE,
        width=WIDTH, height=HEIGHT, roster=roster, tracking=tracking,
        ground_truth=ground_truth, detections=detections, masks=masks,
        keypoints=keypoints, shots=_make_shots(), defense=_make_defense(),
        gaze_trace=_make_gaze_trace(frame_count))


def write_game_files(game: SyntheticGame, out_dir: str | Path) -> dict[str, Path]:
    """Write every input file for the game; returns name -> path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "detections": (out / "detections.csv", ingest.dump_detections(game.detections)),
        "ground_truth": (out / "ground_truth.csv", ingest.dump_detections(game.ground_truth)),
        "tracking": (out / "tracking.csv", ingest.dump_tracking(game.tracking)),
        "masks": (out / "masks.rle", ingest.dump_masks(game.masks)),
        "shots": (out / "shots.csv", ingest.dump_shots(game.shots)),
        "defense": (out / "defense.csv", ingest.dump_defense(game.defense)),
        "roster": (out / "roster.csv", ingest.dump_roster(game.roster)),
        "keypoints": (out / "keypoints.csv", ingest.dump_keypoints(game.keypoints)),
        "gaze": (out / "gaze_trace.csv", ingest.dump_gaze_trace(game.gaze_trace)),
        "court": (out / "court.csv", "".join(
            f"{x!r},{y!r}\n" for x, y in game.court_polygon)),
    }
    paths = {}
    for name, (path, text) in files.items():
        path.write_text(text)
        paths[name] = path
    return paths


def constant_velocity_scene(seed: int, n_players: int | None = None,
                            n_frames: int | None = None
                            ) -> tuple[list[Detection], list[Detection]]:
    """A lane scene with exact geometry and injected dips/dropouts.

    Returns (ground_truth, detections).  Boxes move at constant velocity with
    no geometric noise; some interior frames dip into the low-confidence
    cluster and some are dropped outright, which is exactly what the
    post-processing stage exists to recover.
    """
    rng = np.random.default_rng(seed)
    k = n_players if n_players is not None else int(rng.integers(3, 7))
    frames = n_frames if n_frames is not None else int(rng.integers(20, 41))
    gt: list[Detection] = []
    dets: list[Detection] = []
    for i in range(k):
        pid = f"P{i + 1}"
        x0 = float(rng.uniform(0, 200))
        y0 = 220.0 * i
        vx = float(rng.uniform(-3.0, 3.0))
        vy = float(rng.uniform(-0.5, 0.5))
        w, h = 50.0, 100.0

        protected = {0, 1, frames - 1}
        dips: set[int] = set()
        for _ in range(int(rng.integers(1, 4))):
            start = int(rng.integers(2, frames - 2))
            dips.update(range(start, min(start + int(rng.integers(1, 3)),
                                         frames - 1)))
        drops: set[int] = set()
        for _ in range(int(rng.integers(0, 3))):
            start = int(rng.integers(2, frames - 2))
            drops.update(range(start, min(start + int(rng.integers(1, 4)),
                                          frames - 1)))
        dips -= protected
        drops -= protected
        drops -= dips

        for t in range(frames):
            box = BoundingBox(x0 + vx * t, y0 + vy * t, w, h)
            gt.append(Detection(frame=t, identity=pid, box=box, confidence=1.0))
            if t in drops:
                continue
            conf = 0.3 if t in dips else 0.9
            dets.append(Detection(frame=t, identity=pid, box=box, confidence=conf))
    gt.sort(key=lambda d: (d.frame, d.identity))
    dets.sort(key=lambda d: (d.frame, d.identity))
    return gt, dets


def occlusion_scene(n_players: int = 10, frames: int = 20,
                    occluded: str = "P3", gap: tuple[int, int] = (8, 10)
                    ) -> tuple[list[Detection], list[Detection]]:
    """Ten constant-velocity players; one disappears for the gap frames."""
    gt: list[Detection] = []
    dets: list[Detection] = []
    for i in range(n_players):
        pid = f"P{i + 1}"
        x0 = 10.0 + 35.0 * i
        y0 = 150.0 * i
        vx = 1.5 + 0.25 * i
        vy = 0.5 - 0.1 * i
        for t in range(frames):
            box = BoundingBox(x0 + vx * t, y0 + vy * t, 48.0, 96.0)
            gt.append(Detection(frame=t, identity=pid, box=box, confidence=1.0))
            if pid == occluded and gap[0] <= t <= gap[1]:
                continue
            dets.append(Detection(frame=t, identity=pid, box=box, confidence=0.9))
    return gt, dets
