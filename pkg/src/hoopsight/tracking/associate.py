"""Two-stage confidence-clustered association with gap interpolation and smoothing.

Per frame, detections are split by confidence into high / low / rejected
clusters.  High boxes associate first against trackers of their own identity
(the detector's identity classification is trusted at high confidence) and
spawn new trackers when unmatched.  Low boxes then associate against whatever
trackers remain, regardless of labeled identity, so motion continuity can
recover occluded players whose appearance-based scores dipped.  After the
pass, per-identity gaps up to ``max_gap`` frames are filled by linear
interpolation and every attribute series is smoothed with a centered,
symmetric moving average (symmetric windows keep constant-velocity motion
exactly unchanged).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from ..config import MatcherConfig
from ..ingest import BoundingBox, Detection
from .kalman import Tracker

SOURCE_DETECTED = "detected"
SOURCE_INTERPOLATED = "interpolated"


@dataclass(frozen=True)
class TrackedBox:
    """One output box: at most one per (frame, identity)."""

    frame: int
    identity: str
    box: BoundingBox
    source: str = SOURCE_DETECTED
    confidence: float = 1.0


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union; zero-area unions are 0 by convention."""
    ix = max(a.x, b.x)
    iy = max(a.y, b.y)
    ix2 = min(a.x + a.w, b.x + b.w)
    iy2 = min(a.y + a.h, b.y + b.h)
    inter = max(0.0, ix2 - ix) * max(0.0, iy2 - iy)
    union = a.w * a.h + b.w * b.h - inter
    if union <= 0.0:
        return 0.0
    return min(1.0, inter / union)  # rounding can push a self-overlap past 1


def cluster_detections(dets: Sequence[Detection], cfg: MatcherConfig
                       ) -> tuple[list[Detection], list[Detection], list[Detection]]:
    """Partition one frame's detections into (high, low, rejected) by confidence.

    Thresholds are strict: a score equal to t_high lands in the low cluster
    and a score equal to t_low is rejected.
    """
    high, low, rejected = [], [], []
    for det in dets:
        if det.confidence > cfg.t_high:
            high.append(det)
        elif det.confidence > cfg.t_low:
            low.append(det)
        else:
            rejected.append(det)
    return high, low, rejected


def _det_order(det: Detection) -> tuple:
    return (-det.confidence, det.identity, det.box.x, det.box.y)


def _greedy_match(boxes: Sequence[Detection], trackers: Sequence[Tracker],
                  predicted: dict[int, BoundingBox], consumed: set[int],
                  cfg: MatcherConfig, same_identity: bool) -> list[tuple[Detection, Tracker]]:
    """Greedy per-box argmax over unconsumed trackers; ties -> lowest track id."""
    pairs = []
    for det in sorted(boxes, key=_det_order):
        best = None
        best_iou = 0.0
        for trk in trackers:
            if trk.track_id in consumed:
                continue
            if same_identity and trk.identity != det.identity:
                continue
            value = iou(det.box, predicted[trk.track_id])
            if value > best_iou or (value == best_iou and value > 0.0 and best is not None
                                    and trk.track_id < best.track_id):
                best = trk
                best_iou = value
        if best is not None and best_iou >= cfg.iou_match_min:
            consumed.add(best.track_id)
            pairs.append((det, best))
    return pairs


def _hungarian_match(boxes: Sequence[Detection], trackers: Sequence[Tracker],
                     predicted: dict[int, BoundingBox], consumed: set[int],
                     cfg: MatcherConfig, same_identity: bool) -> list[tuple[Detection, Tracker]]:
    """Optimal assignment maximizing total IoU, gated by iou_match_min."""
    import numpy as np
    from scipy.optimize import linear_sum_assignment

    boxes = sorted(boxes, key=_det_order)
    candidates = [t for t in trackers if t.track_id not in consumed]
    if not boxes or not candidates:
        return []
    cost = np.zeros((len(boxes), len(candidates)))
    for i, det in enumerate(boxes):
        for j, trk in enumerate(candidates):
            if same_identity and trk.identity != det.identity:
                continue
            cost[i, j] = iou(det.box, predicted[trk.track_id])
    rows, cols = linear_sum_assignment(-cost)
    pairs = []
    for i, j in zip(rows, cols):
        ok = cost[i, j] >= cfg.iou_match_min
        if same_identity and boxes[i].identity != candidates[j].identity:
            ok = False
        if ok:
            consumed.add(candidates[j].track_id)
            pairs.append((boxes[i], candidates[j]))
    return pairs


class Associator:
    """Stateful per-video association loop."""

    def __init__(self, cfg: MatcherConfig):
        self.cfg = cfg
        self.trackers: list[Tracker] = []
        self._next_id = 1

    def _spawn(self, det: Detection, frame: int) -> Tracker:
        trk = Tracker(self._next_id, det.identity, det.box, frame)
        self._next_id += 1
        self.trackers.append(trk)
        return trk

    def step(self, frame: int, high: Sequence[Detection], low: Sequence[Detection]
             ) -> list[TrackedBox]:
        """Advance trackers to ``frame``, run both association stages, emit boxes."""
        cfg = self.cfg
        self.trackers = [t for t in self.trackers
                         if frame - t.last_updated <= cfg.max_gap]
        predicted = {t.track_id: t.predict() for t in self.trackers}

        match = _hungarian_match if cfg.use_hungarian else _greedy_match
        consumed: set[int] = set()
        emitted: list[tuple[Detection, Tracker]] = []

        # Stage 1: high-confidence boxes against same-identity trackers.
        for det, trk in match(high, self.trackers, predicted, consumed, cfg, True):
            trk.update(det.box, frame)
            emitted.append((det, trk))
        matched_dets = {id(det) for det, _ in emitted}
        for det in sorted(high, key=_det_order):
            if id(det) not in matched_dets:
                trk = self._spawn(det, frame)
                consumed.add(trk.track_id)
                emitted.append((det, trk))

        # Stage 2: low-confidence boxes against whatever trackers remain.
        for det, trk in match(low, self.trackers, predicted, consumed, cfg, False):
            trk.update(det.box, frame)
            emitted.append((det, trk))

        # At most one output per (frame, identity): keep the most confident.
        best: dict[str, tuple[Detection, Tracker]] = {}
        for det, trk in emitted:
            key = trk.identity
            if key not in best or (det.confidence, -trk.track_id) > (
                    best[key][0].confidence, -best[key][1].track_id):
                best[key] = (det, trk)
        return [TrackedBox(frame=frame, identity=trk.identity, box=det.box,
                           source=SOURCE_DETECTED, confidence=det.confidence)
                for identity, (det, trk) in sorted(best.items())]


def associate_frame(trackers_or_assoc, high: Sequence[Detection],
                    low: Sequence[Detection], cfg: MatcherConfig | None = None,
                    frame: int = 0) -> tuple[list[TrackedBox], "Associator"]:
    """Single-frame association; accepts an Associator or builds one from cfg."""
    if isinstance(trackers_or_assoc, Associator):
        assoc = trackers_or_assoc
    else:
        assoc = Associator(cfg or MatcherConfig())
        assoc.trackers = list(trackers_or_assoc)
        assoc._next_id = 1 + max((t.track_id for t in assoc.trackers), default=0)
    return assoc.step(frame, high, low), assoc


def _interpolate_gaps(series: list[TrackedBox], cfg: MatcherConfig) -> list[TrackedBox]:
    """Fill per-identity gaps of <= max_gap frames by linear interpolation."""
    out = [series[0]]
    for prev, nxt in zip(series, series[1:]):
        gap = nxt.frame - prev.frame - 1
        if 1 <= gap <= cfg.max_gap:
            for k in range(1, gap + 1):
                t = k / (gap + 1)
                box = BoundingBox(
                    prev.box.x + (nxt.box.x - prev.box.x) * t,
                    prev.box.y + (nxt.box.y - prev.box.y) * t,
                    prev.box.w + (nxt.box.w - prev.box.w) * t,
                    prev.box.h + (nxt.box.h - prev.box.h) * t)
                out.append(TrackedBox(
                    frame=prev.frame + k, identity=prev.identity, box=box,
                    source=SOURCE_INTERPOLATED,
                    confidence=min(prev.confidence, nxt.confidence)))
        out.append(nxt)
    return out


def _smooth_series(series: list[TrackedBox], cfg: MatcherConfig) -> list[TrackedBox]:
    """Centered moving average per attribute over contiguous frame runs.

    Windows shrink symmetrically near run edges so a linear series is a fixed
    point of the filter; runs are split wherever a frame gap survived
    interpolation.
    """
    if cfg.smooth_window <= 1 or len(series) <= 1:
        return series
    half = cfg.smooth_window // 2
    out: list[TrackedBox] = []
    run: list[TrackedBox] = []

    def flush(run: list[TrackedBox]) -> None:
        n = len(run)
        for i, tb in enumerate(run):
            r = min(half, i, n - 1 - i)
            if r == 0:
                out.append(tb)
                continue
            window = run[i - r:i + r + 1]
            m = len(window)
            box = BoundingBox(
                sum(w.box.x for w in window) / m,
                sum(w.box.y for w in window) / m,
                sum(w.box.w for w in window) / m,
                sum(w.box.h for w in window) / m)
            out.append(TrackedBox(frame=tb.frame, identity=tb.identity, box=box,
                                  source=tb.source, confidence=tb.confidence))

    for tb in series:
        if run and tb.frame != run[-1].frame + 1:
            flush(run)
            run = []
        run.append(tb)
    if run:
        flush(run)
    return out


def postprocess(dets: Iterable[Detection], cfg: MatcherConfig | None = None
                ) -> list[TrackedBox]:
    """Full pass: cluster + associate per frame, then interpolate and smooth."""
    cfg = cfg or MatcherConfig()
    cfg.validate()
    dets = sorted(dets, key=lambda d: (d.frame, d.identity, -d.confidence))
    if not dets:
        return []

    by_frame: dict[int, list[Detection]] = {}
    for det in dets:
        by_frame.setdefault(det.frame, []).append(det)

    assoc = Associator(cfg)
    emitted: list[TrackedBox] = []
    for frame in range(dets[0].frame, dets[-1].frame + 1):
        high, low, _ = cluster_detections(by_frame.get(frame, ()), cfg)
        emitted.extend(assoc.step(frame, high, low))

    by_identity: dict[str, list[TrackedBox]] = {}
    for tb in emitted:
        by_identity.setdefault(tb.identity, []).append(tb)

    out: list[TrackedBox] = []
    for identity in sorted(by_identity):
        series = sorted(by_identity[identity], key=lambda tb: tb.frame)
        series = _interpolate_gaps(series, cfg)
        series = _smooth_series(series, cfg)
        out.extend(series)
    out.sort(key=lambda tb: (tb.frame, tb.identity))
    return out


def high_cluster_baseline(dets: Iterable[Detection], cfg: MatcherConfig | None = None
                          ) -> list[TrackedBox]:
    """Detector-only reference: high-confidence boxes, no tracking or recovery."""
    cfg = cfg or MatcherConfig()
    best: dict[tuple[int, str], Detection] = {}
    for det in dets:
        if det.confidence > cfg.t_high:
            key = (det.frame, det.identity)
            if key not in best or det.confidence > best[key].confidence:
                best[key] = det
    return [TrackedBox(frame=d.frame, identity=d.identity, box=d.box,
                       source=SOURCE_DETECTED, confidence=d.confidence)
            for _, d in sorted(best.items())]
