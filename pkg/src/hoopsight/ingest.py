"""Loaders and domain types for all external data files.

Every format is line-oriented text with comma-separated fields and no header
row (masks use a compact run-length layout instead).  Loaders validate each
record against its invariants, sort the output, and raise before returning
anything when a record is bad, so no partially-loaded state escapes.

Formats:
    detections.csv  frame,identity,x,y,w,h,confidence
    tracking.csv    frame,entity(player-id|BALL),x_ft,y_ft[,z_ft]
    masks.rle       per frame: "frame width height" then one line of run
                    lengths, starting with the count of background pixels,
                    alternating background/foreground in row-major order
    shots.csv       player,x_ft,y_ft,made(0|1),points(2|3)
    defense.csv     player,region,diff_percent
    roster.csv      player,name,team,role(none|shooter|defender)
    keypoints.csv   frame,player,joint,x,y,confidence
    gaze trace      timestamp,x,y,valid(0|1)
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import ParseError, ValidationError

COURT_LENGTH = 94.0  # feet, x axis (baseline to baseline)
COURT_WIDTH = 50.0   # feet, y axis (sideline to sideline)
BALL = "BALL"

JOINTS = ("head", "left_hand", "right_hand", "hip", "left_foot", "right_foot")


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned pixel box, top-left origin."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if self.w < 0 or self.h < 0:
            raise ValidationError("box width/height must be >= 0", field="w" if self.w < 0 else "h")

    @property
    def cx(self) -> float:
        return self.x + self.w / 2.0

    @property
    def cy(self) -> float:
        return self.y + self.h / 2.0

    def contains(self, px: float, py: float, margin: float = 0.0) -> bool:
        return (self.x - margin <= px <= self.x + self.w + margin
                and self.y - margin <= py <= self.y + self.h + margin)


@dataclass(frozen=True)
class Detection:
    """One identity-classified detector output box."""

    frame: int
    identity: str
    box: BoundingBox
    confidence: float

    def __post_init__(self):
        if not (0.0 <= self.confidence <= 1.0):
            raise ValidationError("confidence must be in [0, 1]", field="confidence")
        if self.box.w <= 0 or self.box.h <= 0:
            raise ValidationError("detection box must have positive area", field="w")


@dataclass(frozen=True)
class CourtSample:
    """Position of one entity (player or ball) on the court at one frame."""

    frame: int
    entity: str  # player id or BALL
    x: float     # feet along the baseline axis
    y: float     # feet along the sideline axis
    z: float | None = None  # feet; ball height when known


@dataclass(frozen=True)
class SegmentationMask:
    """Run-length-encoded binary human-foreground mask for one frame.

    Runs alternate background/foreground starting with background, in
    row-major pixel order; they must sum exactly to width * height.
    """

    frame: int
    width: int
    height: int
    runs: tuple[int, ...]

    def __post_init__(self):
        if sum(self.runs) != self.width * self.height:
            raise ValidationError(
                f"mask runs sum to {sum(self.runs)}, expected {self.width * self.height}",
                field="runs")
        if any(r < 0 for r in self.runs):
            raise ValidationError("mask runs must be non-negative", field="runs")

    def decode(self):
        """Expand to a height x width uint8 array (1 = human foreground)."""
        import numpy as np

        flat = np.zeros(self.width * self.height, dtype=np.uint8)
        pos = 0
        value = 0
        for run in self.runs:
            if value:
                flat[pos:pos + run] = 1
            pos += run
            value ^= 1
        return flat.reshape(self.height, self.width)

    @classmethod
    def encode(cls, frame: int, mask) -> "SegmentationMask":
        """Build from a height x width binary array."""
        import numpy as np

        arr = np.asarray(mask).astype(np.uint8).ravel()
        if arr.size == 0:
            raise ValidationError("mask must be non-empty", field="runs")
        change = np.flatnonzero(np.diff(arr)) + 1
        bounds = np.concatenate(([0], change, [arr.size]))
        runs = np.diff(bounds).tolist()
        if arr[0] == 1:
            runs = [0] + runs
        h, w = np.asarray(mask).shape
        return cls(frame=frame, width=w, height=h, runs=tuple(int(r) for r in runs))


@dataclass(frozen=True)
class PoseKeypoints:
    """Named 2D joints for one player at one frame."""

    frame: int
    player: str
    joints: Mapping[str, tuple[float, float, float]]  # name -> (x, y, confidence)

    def __post_init__(self):
        for name, (_, _, conf) in self.joints.items():
            if not (0.0 <= conf <= 1.0):
                raise ValidationError(f"joint {name} confidence must be in [0, 1]",
                                      field="confidence")


@dataclass(frozen=True)
class ShotRecord:
    """One historical shot attempt."""

    player: str
    x: float
    y: float
    made: bool
    points: int

    def __post_init__(self):
        if self.points not in (2, 3):
            raise ValidationError("shot point value must be 2 or 3", field="points")
        if not (0.0 <= self.x <= COURT_LENGTH and 0.0 <= self.y <= COURT_WIDTH):
            raise ValidationError("shot position outside court bounds", field="x")


@dataclass(frozen=True)
class DefenseRecord:
    """Percentage-points difference a defender imposes in one region."""

    player: str
    region: str
    diff_percent: float

    def __post_init__(self):
        if not (-100.0 <= self.diff_percent <= 100.0):
            raise ValidationError("diff_percent must be in [-100, 100]", field="diff_percent")


@dataclass(frozen=True)
class RosterEntry:
    player: str
    name: str
    team: str
    role: str  # none | shooter | defender

    def __post_init__(self):
        if self.role not in ("none", "shooter", "defender"):
            raise ValidationError(f"unknown role {self.role!r}", field="role")


@dataclass(frozen=True)
class Roster:
    """Player metadata keyed by player id."""

    entries: Mapping[str, RosterEntry]

    def __post_init__(self):
        # Mapping keys are unique by construction; check entry consistency.
        for pid, entry in self.entries.items():
            if entry.player != pid:
                raise ValidationError(f"roster key {pid!r} != entry player {entry.player!r}",
                                      field="player")

    def team_of(self, player: str) -> str:
        return self.entries[player].team

    def teams(self) -> tuple[str, ...]:
        return tuple(sorted({e.team for e in self.entries.values()}))

    def players_of(self, team: str) -> tuple[str, ...]:
        return tuple(sorted(p for p, e in self.entries.items() if e.team == team))

    def __contains__(self, player: str) -> bool:
        return player in self.entries

    def __iter__(self):
        return iter(sorted(self.entries))


@dataclass(frozen=True)
class GazeSample:
    """One gaze-tracker sample in screen pixels, timestamped on the video clock."""

    timestamp: float
    x: float
    y: float
    valid: bool = True


def _rows(path: str | Path) -> Iterable[tuple[int, list[str]]]:
    text = Path(path).read_text()
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        yield line_no, line.split(",")


def _parse(path, line_no, fields, specs):
    """Parse one CSV row against (name, converter) specs; raise ParseError on failure."""
    if len(fields) != len(specs):
        raise ParseError(path, line_no,
                         f"expected {len(specs)} fields, got {len(fields)}")
    out = []
    for raw, (name, conv) in zip(fields, specs):
        try:
            out.append(conv(raw))
        except (TypeError, ValueError):
            raise ParseError(path, line_no, f"bad {name}: {raw!r}") from None
    return out


def _revalidate(path, line_no, build):
    try:
        return build()
    except ValidationError as exc:
        raise ValidationError(str(exc), field=exc.field, line_no=line_no) from None


def load_detections(path: str | Path, roster: Roster | None = None) -> list[Detection]:
    """Load detections.csv, sorted by (frame, identity, confidence desc)."""
    dets = []
    for line_no, fields in _rows(path):
        frame, identity, x, y, w, h, conf = _parse(path, line_no, fields, [
            ("frame", int), ("identity", str), ("x", float), ("y", float),
            ("w", float), ("h", float), ("confidence", float)])
        if roster is not None and identity not in roster:
            raise ValidationError(f"identity {identity!r} not in roster",
                                  field="identity", line_no=line_no)
        dets.append(_revalidate(path, line_no, lambda: Detection(
            frame=frame, identity=identity, confidence=conf,
            box=BoundingBox(x, y, w, h))))
    dets.sort(key=lambda d: (d.frame, d.identity, -d.confidence, d.box.x, d.box.y))
    return dets


def load_tracking(path: str | Path, margin: float = 5.0) -> list[CourtSample]:
    """Load tracking.csv; positions must lie within court bounds plus margin."""
    samples = []
    for line_no, fields in _rows(path):
        if len(fields) == 5:
            frame, entity, x, y, z = _parse(path, line_no, fields, [
                ("frame", int), ("entity", str), ("x_ft", float),
                ("y_ft", float), ("z_ft", float)])
        else:
            frame, entity, x, y = _parse(path, line_no, fields, [
                ("frame", int), ("entity", str), ("x_ft", float), ("y_ft", float)])
            z = None
        if not (-margin <= x <= COURT_LENGTH + margin
                and -margin <= y <= COURT_WIDTH + margin):
            raise ValidationError(
                f"position ({x}, {y}) outside court bounds plus {margin} ft margin",
                field="x_ft", line_no=line_no)
        samples.append(CourtSample(frame=frame, entity=entity, x=x, y=y, z=z))
    samples.sort(key=lambda s: (s.frame, s.entity))
    return samples


def load_masks(path: str | Path) -> list[SegmentationMask]:
    """Load masks.rle; run totals are checked against width * height."""
    text = Path(path).read_text()
    lines = [(n, ln.strip()) for n, ln in enumerate(text.splitlines(), start=1)
             if ln.strip()]
    masks = []
    i = 0
    while i < len(lines):
        line_no, header = lines[i]
        parts = header.split()
        if len(parts) != 3:
            raise ParseError(path, line_no, f"expected 'frame width height', got {header!r}")
        try:
            frame, width, height = (int(p) for p in parts)
        except ValueError:
            raise ParseError(path, line_no, f"bad mask header: {header!r}") from None
        if i + 1 >= len(lines):
            raise ParseError(path, line_no, "mask header without run data")
        run_line_no, run_line = lines[i + 1]
        try:
            runs = tuple(int(tok) for tok in run_line.split())
        except ValueError:
            raise ParseError(path, run_line_no, "bad run length") from None
        masks.append(_revalidate(path, run_line_no, lambda: SegmentationMask(
            frame=frame, width=width, height=height, runs=runs)))
        i += 2
    masks.sort(key=lambda m: m.frame)
    return masks


def load_shots(path: str | Path) -> list[ShotRecord]:
    shots = []
    for line_no, fields in _rows(path):
        player, x, y, made, points = _parse(path, line_no, fields, [
            ("player", str), ("x_ft", float), ("y_ft", float),
            ("made", int), ("points", int)])
        if made not in (0, 1):
            raise ValidationError("made must be 0 or 1", field="made", line_no=line_no)
        shots.append(_revalidate(path, line_no, lambda: ShotRecord(
            player=player, x=x, y=y, made=bool(made), points=points)))
    shots.sort(key=lambda s: (s.player, s.x, s.y, s.points, s.made))
    return shots


def load_defense(path: str | Path) -> list[DefenseRecord]:
    records = []
    for line_no, fields in _rows(path):
        player, region, diff = _parse(path, line_no, fields, [
            ("player", str), ("region", str), ("diff_percent", float)])
        records.append(_revalidate(path, line_no, lambda: DefenseRecord(
            player=player, region=region, diff_percent=diff)))
    records.sort(key=lambda r: (r.player, r.region))
    return records


def load_roster(path: str | Path) -> Roster:
    entries: dict[str, RosterEntry] = {}
    for line_no, fields in _rows(path):
        player, name, team, role = _parse(path, line_no, fields, [
            ("player", str), ("name", str), ("team", str), ("role", str)])
        if player in entries:
            raise ValidationError(f"duplicate player id {player!r}",
                                  field="player", line_no=line_no)
        entries[player] = _revalidate(path, line_no, lambda: RosterEntry(
            player=player, name=name, team=team, role=role))
    return Roster(entries=dict(sorted(entries.items())))


def load_keypoints(path: str | Path) -> list[PoseKeypoints]:
    """Load keypoints.csv, grouping joint rows per (frame, player)."""
    grouped: dict[tuple[int, str], dict[str, tuple[float, float, float]]] = {}
    for line_no, fields in _rows(path):
        frame, player, joint, x, y, conf = _parse(path, line_no, fields, [
            ("frame", int), ("player", str), ("joint", str),
            ("x", float), ("y", float), ("confidence", float)])
        if joint not in JOINTS:
            raise ValidationError(f"unknown joint {joint!r}", field="joint", line_no=line_no)
        if not (0.0 <= conf <= 1.0):
            raise ValidationError("joint confidence must be in [0, 1]",
                                  field="confidence", line_no=line_no)
        grouped.setdefault((frame, player), {})[joint] = (x, y, conf)
    return [PoseKeypoints(frame=frame, player=player, joints=joints)
            for (frame, player), joints in sorted(grouped.items())]


def load_gaze_trace(path: str | Path) -> list[GazeSample]:
    """Load a gaze replay file; timestamps must be strictly increasing."""
    samples = []
    last_t = None
    for line_no, fields in _rows(path):
        t, x, y, valid = _parse(path, line_no, fields, [
            ("timestamp", float), ("x", float), ("y", float), ("valid", int)])
        if valid not in (0, 1):
            raise ValidationError("valid must be 0 or 1", field="valid", line_no=line_no)
        if last_t is not None and t <= last_t:
            raise ValidationError("gaze timestamps must be strictly increasing",
                                  field="timestamp", line_no=line_no)
        last_t = t
        samples.append(GazeSample(timestamp=t, x=x, y=y, valid=bool(valid)))
    return samples


def _num(value: float) -> str:
    """Canonical number rendering: shortest repr, integers without a dot."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    value = float(value)
    if value == int(value) and abs(value) < 1e16:
        return f"{value:.1f}"
    return repr(value)


def dump_detections(dets: Sequence[Detection]) -> str:
    return "".join(
        f"{d.frame},{d.identity},{_num(d.box.x)},{_num(d.box.y)},"
        f"{_num(d.box.w)},{_num(d.box.h)},{_num(d.confidence)}\n"
        for d in dets)


def dump_tracking(samples: Sequence[CourtSample]) -> str:
    lines = []
    for s in samples:
        base = f"{s.frame},{s.entity},{_num(s.x)},{_num(s.y)}"
        lines.append(base + (f",{_num(s.z)}" if s.z is not None else "") + "\n")
    return "".join(lines)


def dump_masks(masks: Sequence[SegmentationMask]) -> str:
    chunks = []
    for m in masks:
        chunks.append(f"{m.frame} {m.width} {m.height}\n")
        chunks.append(" ".join(str(r) for r in m.runs) + "\n")
    return "".join(chunks)


def dump_shots(shots: Sequence[ShotRecord]) -> str:
    return "".join(
        f"{s.player},{_num(s.x)},{_num(s.y)},{1 if s.made else 0},{s.points}\n"
        for s in shots)


def dump_defense(records: Sequence[DefenseRecord]) -> str:
    return "".join(f"{r.player},{r.region},{_num(r.diff_percent)}\n" for r in records)


def dump_roster(roster: Roster) -> str:
    return "".join(f"{e.player},{e.name},{e.team},{e.role}\n"
                   for _, e in sorted(roster.entries.items()))


def dump_keypoints(kps: Sequence[PoseKeypoints]) -> str:
    lines = []
    for kp in kps:
        for joint in sorted(kp.joints):
            x, y, conf = kp.joints[joint]
            lines.append(f"{kp.frame},{kp.player},{joint},{_num(x)},{_num(y)},{_num(conf)}\n")
    return "".join(lines)


def dump_gaze_trace(samples: Sequence[GazeSample]) -> str:
    return "".join(
        f"{_num(s.timestamp)},{_num(s.x)},{_num(s.y)},{1 if s.valid else 0}\n"
        for s in samples)
