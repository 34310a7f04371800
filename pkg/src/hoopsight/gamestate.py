"""Per-frame game state derived from court tracking data.

Possession follows the most recent ball handler inside a trailing window;
the next receiver is found by scanning ahead; openness and key-defender
assignments come from pairwise court distances.  All distance ties break by
ascending player id so identical inputs always produce identical output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .ability import dist
from .config import GameStateConfig
from .errors import StateError
from .ingest import BALL, CourtSample, Roster

LV1 = 1.0
LV2 = 2.0
LV25 = 2.5
LV3 = 3.0


@dataclass(frozen=True)
class GameStateFrame:
    frame: int
    offense: str | None
    handler: str | None
    receiver: str | None
    open_players: frozenset[str]
    key_defenders: frozenset[str]
    links: frozenset[tuple[str, str]]  # (defender, handler)
    importance: Mapping[str, float]

    def validate(self, roster: Roster) -> None:
        if self.offense is not None:
            for pid in [p for p in (self.handler, self.receiver) if p is not None]:
                assert roster.team_of(pid) == self.offense
            for pid in self.open_players:
                assert roster.team_of(pid) == self.offense
            for pid in self.key_defenders:
                assert roster.team_of(pid) != self.offense
        for defender, target in self.links:
            assert target == self.handler and defender in self.key_defenders
        if self.handler is not None:
            assert self.importance[self.handler] == LV3
        assert LV25 not in self.importance.values()


class TrackingStore:
    """Indexed, immutable view over a full game's court samples."""

    def __init__(self, samples: Iterable[CourtSample]):
        self._by_frame: dict[int, dict[str, CourtSample]] = {}
        for s in samples:
            self._by_frame.setdefault(s.frame, {})[s.entity] = s
        self.frames = sorted(self._by_frame)

    def at(self, frame: int) -> dict[str, CourtSample]:
        return self._by_frame.get(frame, {})

    def ball(self, frame: int) -> CourtSample | None:
        return self._by_frame.get(frame, {}).get(BALL)

    def position(self, frame: int, entity: str) -> tuple[float, float] | None:
        s = self._by_frame.get(frame, {}).get(entity)
        return (s.x, s.y) if s is not None else None

    def players_at(self, frame: int) -> list[str]:
        return sorted(e for e in self._by_frame.get(frame, {}) if e != BALL)


def detect_ball_handler(samples: Mapping[str, CourtSample] | Iterable[CourtSample],
                        cfg: GameStateConfig) -> str | None:
    """Closest player within handler_distance of the ball; ties -> lowest id."""
    if not isinstance(samples, Mapping):
        samples = {s.entity: s for s in samples}
    ball = samples.get(BALL)
    if ball is None:
        raise StateError("no ball sample at frame")
    best = None
    best_d = None
    for pid in sorted(samples):
        if pid == BALL:
            continue
        s = samples[pid]
        d = dist((s.x, s.y), (ball.x, ball.y))
        if d <= cfg.handler_distance and (best_d is None or d < best_d):
            best, best_d = pid, d
    return best


def _handler_or_none(samples: Mapping[str, CourtSample], cfg: GameStateConfig) -> str | None:
    if BALL not in samples:
        return None
    return detect_ball_handler(samples, cfg)


def _window_frames(cfg: GameStateConfig) -> int:
    return max(1, round(cfg.possession_window * cfg.frame_rate))


def _lookahead_frames(cfg: GameStateConfig) -> int:
    return max(1, round(cfg.lookahead * cfg.frame_rate))


def detect_offense(store: TrackingStore, frame: int, roster: Roster,
                   cfg: GameStateConfig,
                   handlers: Mapping[int, str | None] | None = None) -> str | None:
    """Team of the most recent ball handler inside the trailing window."""
    window = _window_frames(cfg)
    for f in range(frame, frame - window, -1):
        handler = (handlers.get(f) if handlers is not None
                   else _handler_or_none(store.at(f), cfg))
        if handler is not None:
            return roster.team_of(handler)
    return None


def detect_next_receiver(store: TrackingStore, frame: int, cfg: GameStateConfig,
                         handlers: Mapping[int, str | None] | None = None) -> str | None:
    """First ball handler differing from the current one within the look-ahead."""
    current = (handlers.get(frame) if handlers is not None
               else _handler_or_none(store.at(frame), cfg))
    horizon = _lookahead_frames(cfg)
    for f in range(frame + 1, frame + horizon + 1):
        handler = (handlers.get(f) if handlers is not None
                   else _handler_or_none(store.at(f), cfg))
        if handler is not None and handler != current:
            return handler
    return None


def detect_open_players(samples: Mapping[str, CourtSample], offense: str,
                        handler: str | None, roster: Roster,
                        cfg: GameStateConfig) -> frozenset[str]:
    """Offensive players (not the handler) whose nearest defender is >= open_distance."""
    attackers = []
    defenders = []
    for pid, s in samples.items():
        if pid == BALL or pid not in roster:
            continue
        (attackers if roster.team_of(pid) == offense else defenders).append(s)
    open_set = set()
    for a in attackers:
        if a.entity == handler:
            continue
        nearest = min((dist((a.x, a.y), (d.x, d.y)) for d in defenders),
                      default=math.inf)
        if nearest >= cfg.open_distance:
            open_set.add(a.entity)
    return frozenset(open_set)


def detect_key_defenders(store: TrackingStore, frame: int, handler: str | None,
                         offense: str | None, roster: Roster,
                         cfg: GameStateConfig) -> frozenset[str]:
    """Defenders assigned to the handler over the window, within guarding range.

    A defender's assignment is the offensive player with the smallest mean
    distance over the trailing window; the defender is key when that player is
    the current handler and the current distance to the handler is within
    guard_distance_max.
    """
    if handler is None or offense is None:
        return frozenset()
    now = store.at(frame)
    handler_pos = store.position(frame, handler)
    if handler_pos is None:
        return frozenset()
    window = _window_frames(cfg)
    defenders = [pid for pid in store.players_at(frame)
                 if pid in roster and roster.team_of(pid) != offense]
    attackers = [pid for pid in store.players_at(frame)
                 if pid in roster and roster.team_of(pid) == offense]
    key = set()
    for d in defenders:
        totals: dict[str, list[float]] = {}
        for f in range(frame - window + 1, frame + 1):
            dp = store.position(f, d)
            if dp is None:
                continue
            for a in attackers:
                ap = store.position(f, a)
                if ap is None:
                    continue
                totals.setdefault(a, []).append(dist(dp, ap))
        if not totals:
            continue
        assigned = min(totals, key=lambda a: (sum(totals[a]) / len(totals[a]), a))
        d_now = store.position(frame, d)
        if assigned == handler and d_now is not None and \
                dist(d_now, handler_pos) <= cfg.guard_distance_max:
            key.add(d)
    return frozenset(key)


def rank_importance(players: Iterable[str], handler: str | None,
                    receiver: str | None, open_players: frozenset[str],
                    key_defenders: frozenset[str]) -> dict[str, float]:
    """Offensive-first levels: ball/receiver/open -> 3, key defenders -> 2, rest -> 1.

    Gaze lifts to Lv2.5 happen downstream and never here.
    """
    importance = {pid: LV1 for pid in players}
    for pid in key_defenders:
        importance[pid] = LV2
    for pid in open_players:
        importance[pid] = LV3
    if receiver is not None:
        importance[receiver] = LV3
    if handler is not None:
        importance[handler] = LV3
    return importance


def one_on_one_links(key_defenders: frozenset[str], handler: str | None
                     ) -> frozenset[tuple[str, str]]:
    """One (defender, handler) link per key defender; empty without a handler."""
    if handler is None:
        return frozenset()
    return frozenset((d, handler) for d in key_defenders)


def compute_game_states(samples: Iterable[CourtSample], roster: Roster,
                        cfg: GameStateConfig | None = None) -> list[GameStateFrame]:
    """Derive a GameStateFrame for every frame present in the tracking data."""
    cfg = cfg or GameStateConfig()
    cfg.validate()
    store = TrackingStore(samples)
    handlers = {f: _handler_or_none(store.at(f), cfg) for f in store.frames}

    frames = []
    for f in store.frames:
        at = store.at(f)
        handler = handlers[f]
        offense = detect_offense(store, f, roster, cfg, handlers)
        receiver = detect_next_receiver(store, f, cfg, handlers)
        if receiver is not None and (offense is None
                                     or roster.team_of(receiver) != offense):
            receiver = None  # a steal is not a pass target; Lv3 stays offensive
        if offense is not None:
            open_players = detect_open_players(at, offense, handler, roster, cfg)
        else:
            open_players = frozenset()
        key_defenders = detect_key_defenders(store, f, handler, offense, roster, cfg)
        ranked = [p for p in store.players_at(f) if p in roster]
        importance = rank_importance(ranked, handler, receiver,
                                     open_players, key_defenders)
        frames.append(GameStateFrame(
            frame=f, offense=offense, handler=handler, receiver=receiver,
            open_players=open_players, key_defenders=key_defenders,
            links=one_on_one_links(key_defenders, handler),
            importance=importance))
    return frames


def dump_game_states(frames: Sequence[GameStateFrame]) -> str:
    """gamestate.csv: frame,offense,handler,receiver,open_list,defender_list."""
    lines = []
    for gs in frames:
        open_list = ";".join(sorted(gs.open_players))
        def_list = ";".join(sorted(gs.key_defenders))
        lines.append(f"{gs.frame},{gs.offense or ''},{gs.handler or ''},"
                     f"{gs.receiver or ''},{open_list},{def_list}\n")
    return "".join(lines)


def load_game_states(path, roster: Roster) -> list[GameStateFrame]:
    """Rebuild GameStateFrames from gamestate.csv (importance is re-derived)."""
    from pathlib import Path

    from .errors import ParseError

    frames = []
    text = Path(path).read_text()
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 6:
            raise ParseError(path, line_no, f"expected 6 fields, got {len(parts)}")
        frame_s, offense, handler, receiver, open_s, def_s = parts
        try:
            frame = int(frame_s)
        except ValueError:
            raise ParseError(path, line_no, f"bad frame: {frame_s!r}") from None
        open_players = frozenset(p for p in open_s.split(";") if p)
        key_defenders = frozenset(p for p in def_s.split(";") if p)
        handler = handler or None
        receiver = receiver or None
        players = set(open_players) | set(key_defenders)
        players |= {p for p in (handler, receiver) if p is not None}
        frames.append(GameStateFrame(
            frame=frame, offense=offense or None, handler=handler,
            receiver=receiver, open_players=open_players,
            key_defenders=key_defenders,
            links=one_on_one_links(key_defenders, handler),
            importance=rank_importance(sorted(players), handler, receiver,
                                       open_players, key_defenders)))
    frames.sort(key=lambda g: g.frame)
    return frames
