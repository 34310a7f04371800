"""Interval-based lift oracle: replays a (timestamp, hit) trace directly.

Recomputes, without the engine's state machine, which players are lifted at
any queried time: a lift exists once the credited on-target time (interval
between consecutive samples credited to the newer sample's hit, gaps of at
most the grace bridged) reaches the dwell trigger, and survives until linger
seconds after the first sample observed off-target, unless re-gazed.
"""

from __future__ import annotations


def lifted_intervals(trace: list[tuple[float, str | None]], dwell_trigger: float,
                     linger: float, grace: float) -> dict[str, list[tuple[float, float]]]:
    """Per player, the [start, end) intervals during which they are lifted."""
    players = sorted({h for _, h in trace if h is not None})
    out: dict[str, list[tuple[float, float]]] = {p: [] for p in players}
    for player in players:
        acc = 0.0
        last_on: float | None = None   # last sample timestamp with hit == player
        lift_start: float | None = None
        lift_end: float | None = None  # None while actively gazed
        prev_t: float | None = None
        prev_hit: str | None = None
        for t, hit in trace:
            dt = 0.0 if prev_t is None else t - prev_t
            if hit == player:
                # The engine resets at off-samples only; the last chance was
                # the previous sample.
                if (last_on is not None and prev_hit != player
                        and prev_t is not None and prev_t - last_on > grace):
                    acc = 0.0
                acc += dt
                last_on = t
                if lift_start is not None and lift_end is not None:
                    if t < lift_end:
                        lift_end = None  # re-gaze during linger re-arms
                    else:
                        out[player].append((lift_start, lift_end))
                        lift_start = lift_end = None
                if lift_start is None and acc >= dwell_trigger:
                    lift_start, lift_end = t, None
            else:
                if prev_hit == player and lift_start is not None and lift_end is None:
                    lift_end = t + linger  # departure observed at this sample
                if last_on is not None and t - last_on > grace:
                    acc = 0.0
            prev_t, prev_hit = t, hit
        if lift_start is not None:
            out[player].append((lift_start, lift_end if lift_end is not None
                                else float("inf")))
    return out


def is_lifted(intervals: dict[str, list[tuple[float, float]]], player: str,
              now: float) -> bool:
    return any(start <= now < end for start, end in intervals.get(player, []))
