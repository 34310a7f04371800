"""Per-identity average precision over IoU thresholds 0.50:0.95:0.05.

Each identity is scored like a detection class: predictions are ranked by
descending confidence, greedily matched against unconsumed ground-truth boxes
of the same frame and identity (highest IoU first, accepted at IoU >=
threshold), and the all-point interpolated area under the precision-recall
curve is taken.  Reported APs are means over identities present in the ground
truth; predictions for unknown identities count as false positives and are
flagged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from ..ingest import BoundingBox, Detection
from .associate import TrackedBox, iou

IOU_THRESHOLDS = tuple(round(0.5 + 0.05 * i, 2) for i in range(10))


@dataclass(frozen=True)
class EvaluationReport:
    ap_50_95: float
    ap_50: float
    ap_75: float
    per_identity: Mapping[str, Mapping[float, float]]  # identity -> threshold -> AP
    n_gt: int
    n_pred: int
    unknown_identities: tuple[str, ...] = ()

    def mean_ap(self, threshold: float) -> float:
        values = [aps[threshold] for aps in self.per_identity.values()]
        return sum(values) / len(values) if values else 0.0


def _norm(item) -> tuple[int, str, BoundingBox, float]:
    if isinstance(item, Detection):
        return item.frame, item.identity, item.box, item.confidence
    if isinstance(item, TrackedBox):
        return item.frame, item.identity, item.box, item.confidence
    raise TypeError(f"cannot evaluate {type(item).__name__}")


def _gt_key(entry) -> tuple:
    frame, identity, box, _ = entry
    return (frame, identity, box.x, box.y, box.w, box.h)


def _pred_key(entry) -> tuple:
    frame, identity, box, conf = entry
    return (-conf, frame, box.x, box.y, box.w, box.h)


def average_precision(recalls: Sequence[float], precisions: Sequence[float]) -> float:
    """All-point interpolated AP for a PR curve given in rank order."""
    if not recalls:
        return 0.0
    mrec = [0.0] + list(recalls)
    mpre = [0.0] + list(precisions)
    for i in range(len(mpre) - 2, -1, -1):
        mpre[i] = max(mpre[i], mpre[i + 1])
    ap = 0.0
    for i in range(1, len(mrec)):
        ap += (mrec[i] - mrec[i - 1]) * mpre[i]
    return ap


def _ap_single(preds, gts, threshold: float) -> float:
    """AP for one identity at one IoU threshold."""
    n_gt = len(gts)
    if n_gt == 0:
        return 0.0
    consumed = [False] * n_gt
    tps = []
    for frame, _, box, _ in preds:
        best_j = -1
        best_iou = 0.0
        for j, (g_frame, _, g_box, _) in enumerate(gts):
            if consumed[j] or g_frame != frame:
                continue
            value = iou(box, g_box)
            if value > best_iou:
                best_iou = value
                best_j = j
        if best_j >= 0 and best_iou >= threshold:
            consumed[best_j] = True
            tps.append(True)
        else:
            tps.append(False)
    recalls, precisions = [], []
    tp_count = 0
    for rank, is_tp in enumerate(tps, start=1):
        tp_count += int(is_tp)
        recalls.append(tp_count / n_gt)
        precisions.append(tp_count / rank)
    return average_precision(recalls, precisions)


def evaluate_ap(predictions: Sequence[Detection | TrackedBox],
                ground_truth: Sequence[Detection | TrackedBox]) -> EvaluationReport:
    """Score predictions against ground truth; both may be raw or tracked boxes."""
    preds = sorted((_norm(p) for p in predictions), key=_pred_key)
    gts = sorted((_norm(g) for g in ground_truth), key=_gt_key)

    gt_by_identity: dict[str, list] = {}
    for entry in gts:
        gt_by_identity.setdefault(entry[1], []).append(entry)
    pred_by_identity: dict[str, list] = {}
    for entry in preds:
        pred_by_identity.setdefault(entry[1], []).append(entry)

    unknown = tuple(sorted(set(pred_by_identity) - set(gt_by_identity)))

    per_identity: dict[str, dict[float, float]] = {}
    for identity in sorted(gt_by_identity):
        id_preds = pred_by_identity.get(identity, [])
        id_gts = gt_by_identity[identity]
        per_identity[identity] = {
            thr: _ap_single(id_preds, id_gts, thr) for thr in IOU_THRESHOLDS}

    def mean_at(thr: float) -> float:
        if not per_identity:
            return 0.0
        return sum(aps[thr] for aps in per_identity.values()) / len(per_identity)

    ap_50 = mean_at(0.5)
    ap_75 = mean_at(0.75)
    if per_identity:
        ap_50_95 = sum(mean_at(t) for t in IOU_THRESHOLDS) / len(IOU_THRESHOLDS)
    else:
        ap_50_95 = 0.0
    return EvaluationReport(
        ap_50_95=ap_50_95, ap_50=ap_50, ap_75=ap_75,
        per_identity=per_identity, n_gt=len(gts), n_pred=len(preds),
        unknown_identities=unknown)
