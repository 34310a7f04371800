"""Region-based shooting and defense metrics.

The default court partition is analytic: NBA-style shooting zones around the
basket at the low-x baseline (restricted area, paint, three midrange slices,
two corner threes, three above-the-break threes) plus a backcourt region
covering everything past halfcourt.  Region boundaries are half-open toward
increasing x then y (radial boundaries belong to the outer region), so every
court point maps to exactly one region.  A polygonal partition can be loaded
from a file to substitute exact league geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import ParseError, ValidationError
from .ingest import COURT_WIDTH, DefenseRecord, ShotRecord

BASKET_X = 5.25   # feet from the baseline to the rim center
BASKET_Y = 25.0
RESTRICTED_RADIUS = 4.0
PAINT_HALF_WIDTH = 8.0     # paint spans y in [17, 33]
FREE_THROW_X = 19.0
THREE_RADIUS = 23.75
CORNER_LINE_X = 14.0       # corner threes end this far up the sideline
CORNER_INSET = 3.0         # corner three line is 3 ft from the sideline
HALF_COURT_X = 47.0
SIDE_BAND_Y = (17.0, 33.0)  # right / center / left split

BACKCOURT = "backcourt"


def dist(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Planar Euclidean distance in feet."""
    return math.hypot(a[0] - b[0], a[1] - b[1])


class RegionPartition:
    """Base interface: total, deterministic point -> region mapping."""

    def region_of(self, x: float, y: float) -> str:
        raise NotImplementedError

    def point_value(self, region: str) -> int:
        raise NotImplementedError

    def regions(self) -> tuple[str, ...]:
        raise NotImplementedError

    def is_scoring(self, region: str) -> bool:
        return region != BACKCOURT


class NbaZonePartition(RegionPartition):
    """The shipped analytic partition (scoring zones + backcourt)."""

    _REGIONS = {
        "restricted-area": 2,
        "paint": 2,
        "midrange-right": 2,
        "midrange-center": 2,
        "midrange-left": 2,
        "corner-3-right": 3,
        "corner-3-left": 3,
        "above-break-3-right": 3,
        "above-break-3-center": 3,
        "above-break-3-left": 3,
        BACKCOURT: 3,
    }

    def regions(self) -> tuple[str, ...]:
        return tuple(self._REGIONS)

    def point_value(self, region: str) -> int:
        try:
            return self._REGIONS[region]
        except KeyError:
            raise ValidationError(f"unknown region {region!r}", field="region") from None

    @staticmethod
    def _side(y: float) -> str:
        if y < SIDE_BAND_Y[0]:
            return "right"
        if y < SIDE_BAND_Y[1]:
            return "center"
        return "left"

    def region_of(self, x: float, y: float) -> str:
        if x >= HALF_COURT_X:
            return BACKCOURT
        if x < CORNER_LINE_X:
            if y < CORNER_INSET:
                return "corner-3-right"
            if y >= COURT_WIDTH - CORNER_INSET:
                return "corner-3-left"
        d = math.hypot(x - BASKET_X, y - BASKET_Y)
        if d >= THREE_RADIUS:
            return f"above-break-3-{self._side(y)}"
        if d < RESTRICTED_RADIUS:
            return "restricted-area"
        if x < FREE_THROW_X and abs(y - BASKET_Y) < PAINT_HALF_WIDTH:
            return "paint"
        return f"midrange-{self._side(y)}"


class PolygonPartition(RegionPartition):
    """Partition loaded from a file of polygonal regions.

    Containment uses even-odd ray casting with boundary points counted inside;
    the first containing region in file order wins, which keeps the mapping
    total and deterministic as long as the polygons tile the court.
    """

    def __init__(self, entries: Sequence[tuple[str, int, list[tuple[float, float]]]]):
        if not entries:
            raise ValidationError("partition file has no regions", field="region")
        self._entries = list(entries)
        self._values = {name: pv for name, pv, _ in entries}

    def regions(self) -> tuple[str, ...]:
        return tuple(name for name, _, _ in self._entries)

    def point_value(self, region: str) -> int:
        try:
            return self._values[region]
        except KeyError:
            raise ValidationError(f"unknown region {region!r}", field="region") from None

    @staticmethod
    def _contains(poly: list[tuple[float, float]], x: float, y: float) -> bool:
        inside = False
        n = len(poly)
        for i in range(n):
            x1, y1 = poly[i]
            x2, y2 = poly[(i + 1) % n]
            if (x1, y1) == (x, y):
                return True
            if (y1 > y) != (y2 > y):
                t = (y - y1) / (y2 - y1)
                xi = x1 + t * (x2 - x1)
                if math.isclose(xi, x, abs_tol=1e-12):
                    return True
                if x < xi:
                    inside = not inside
        return inside

    def region_of(self, x: float, y: float) -> str:
        for name, _, poly in self._entries:
            if self._contains(poly, x, y):
                return name
        raise ValidationError(f"point ({x}, {y}) outside every region", field="region")


def load_partition(path: str | Path) -> PolygonPartition:
    """partition file: region,point_value,"x1 y1;x2 y2;..." per line."""
    entries = []
    text = Path(path).read_text()
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",", 2)
        if len(parts) != 3:
            raise ParseError(path, line_no, "expected region,point_value,vertices")
        name, pv_s, verts_s = parts
        try:
            pv = int(pv_s)
        except ValueError:
            raise ParseError(path, line_no, f"bad point value: {pv_s!r}") from None
        if pv not in (2, 3):
            raise ValidationError("point value must be 2 or 3",
                                  field="point_value", line_no=line_no)
        poly = []
        for pair in verts_s.strip().strip('"').split(";"):
            pair = pair.strip()
            if not pair:
                continue
            try:
                xs, ys = pair.split()
                poly.append((float(xs), float(ys)))
            except ValueError:
                raise ParseError(path, line_no, f"bad vertex: {pair!r}") from None
        if len(poly) < 3:
            raise ValidationError("polygon needs at least 3 vertices",
                                  field="polygon", line_no=line_no)
        entries.append((name, pv, poly))
    return PolygonPartition(entries)


class RegionStats(NamedTuple):
    attempts: int
    makes: int
    epv: float


@dataclass(frozen=True)
class EpvMap:
    """Per-region expected point value for one player."""

    player: str
    regions: Mapping[str, RegionStats]

    def __post_init__(self):
        for region, st in self.regions.items():
            if not (0 <= st.makes <= st.attempts):
                raise ValidationError(f"region {region}: makes must be in [0, attempts]",
                                      field="makes")
            if not (0.0 <= st.epv <= 3.0):
                raise ValidationError(f"region {region}: epv must be in [0, 3]",
                                      field="epv")

    def is_default(self, region: str) -> bool:
        return self.regions[region].attempts == 0


def build_epv_map(shots: Sequence[ShotRecord], partition: RegionPartition,
                  player: str | None = None,
                  league_defaults: Mapping[str, float] | None = None) -> EpvMap:
    """Aggregate one player's shots per region.

    Zero-attempt regions fall back to the given league default (1.0 when none
    is supplied); the backcourt is non-scoring and defaults to 0.
    """
    if player is None:
        players = {s.player for s in shots}
        if len(players) != 1:
            raise ValidationError("shots must belong to exactly one player when "
                                  "no player id is given", field="player")
        player = players.pop()
    counts: dict[str, list[int]] = {r: [0, 0] for r in partition.regions()}
    for shot in shots:
        if shot.player != player:
            continue
        region = partition.region_of(shot.x, shot.y)
        counts[region][0] += 1
        counts[region][1] += int(shot.made)
    regions = {}
    for region, (attempts, makes) in counts.items():
        if attempts > 0:
            epv = makes / attempts * partition.point_value(region)
        elif not partition.is_scoring(region):
            epv = 0.0
        elif league_defaults is not None and region in league_defaults:
            epv = league_defaults[region]
        else:
            epv = 1.0
        regions[region] = RegionStats(attempts=attempts, makes=makes, epv=epv)
    return EpvMap(player=player, regions=regions)


def league_default_epv(shots: Sequence[ShotRecord],
                       partition: RegionPartition) -> dict[str, float]:
    """League-average EPV per region over every loaded shot; backcourt stays 0."""
    counts: dict[str, list[int]] = {r: [0, 0] for r in partition.regions()}
    for shot in shots:
        region = partition.region_of(shot.x, shot.y)
        counts[region][0] += 1
        counts[region][1] += int(shot.made)
    defaults = {}
    for region, (attempts, makes) in counts.items():
        if not partition.is_scoring(region):
            defaults[region] = 0.0
        elif attempts > 0:
            defaults[region] = makes / attempts * partition.point_value(region)
        else:
            defaults[region] = 1.0
    return defaults


def build_all_epv_maps(shots: Sequence[ShotRecord], partition: RegionPartition,
                       players: Iterable[str]) -> dict[str, EpvMap]:
    """Maps for every listed player, empty regions filled with league averages."""
    defaults = league_default_epv(shots, partition)
    by_player: dict[str, list[ShotRecord]] = {p: [] for p in players}
    for shot in shots:
        by_player.setdefault(shot.player, []).append(shot)
    return {p: build_epv_map(tuple(by_player[p]), partition, player=p,
                             league_defaults=defaults)
            for p in sorted(by_player)}


def epv_at(epv_map: EpvMap, pos: tuple[float, float],
           partition: RegionPartition) -> float:
    """EPV of the region containing the position; non-scoring regions are 0."""
    region = partition.region_of(pos[0], pos[1])
    if not partition.is_scoring(region):
        return 0.0
    return epv_map.regions[region].epv


class DiffLookup(NamedTuple):
    value: float
    has_data: bool


@dataclass(frozen=True)
class DefenseTable:
    """DIFF% by (player, region)."""

    table: Mapping[str, Mapping[str, float]]

    @classmethod
    def from_records(cls, records: Sequence[DefenseRecord]) -> "DefenseTable":
        table: dict[str, dict[str, float]] = {}
        for r in records:
            table.setdefault(r.player, {})[r.region] = r.diff_percent
        return cls(table={p: dict(sorted(regions.items()))
                          for p, regions in sorted(table.items())})


def diff_at(table: DefenseTable, defender: str, pos: tuple[float, float],
            partition: RegionPartition) -> DiffLookup:
    """DIFF% of the defender in the region containing pos; missing -> (0, no data)."""
    region = partition.region_of(pos[0], pos[1])
    value = table.table.get(defender, {}).get(region)
    if value is None:
        return DiffLookup(0.0, False)
    return DiffLookup(value, True)


def dump_epv_maps(maps: Mapping[str, EpvMap]) -> str:
    """epvmap.csv: player,region,attempts,makes,epv."""
    lines = []
    for player in sorted(maps):
        m = maps[player]
        for region in sorted(m.regions):
            st = m.regions[region]
            lines.append(f"{player},{region},{st.attempts},{st.makes},{st.epv!r}\n")
    return "".join(lines)


def load_epv_maps(path: str | Path) -> dict[str, EpvMap]:
    grouped: dict[str, dict[str, RegionStats]] = {}
    text = Path(path).read_text()
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise ParseError(path, line_no, f"expected 5 fields, got {len(parts)}")
        player, region, attempts_s, makes_s, epv_s = parts
        try:
            stats = RegionStats(int(attempts_s), int(makes_s), float(epv_s))
        except ValueError:
            raise ParseError(path, line_no, "bad numeric field") from None
        grouped.setdefault(player, {})[region] = stats
    return {player: EpvMap(player=player, regions=regions)
            for player, regions in sorted(grouped.items())}
