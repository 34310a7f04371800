"""Brute-force AP oracle, independent of the production evaluator.

Matching is re-derived from the metric definition with naive scans: walk the
predictions in confidence order, let each claim the unconsumed same-frame
ground-truth box with the largest IoU when that IoU passes the threshold.
The PR integral is computed from its definition (sum of recall increments
times the best precision at or after that rank) rather than the evaluator's
envelope sweep.
"""

from __future__ import annotations


def box_iou(a, b) -> float:
    ax2, ay2 = a.x + a.w, a.y + a.h
    bx2, by2 = b.x + b.w, b.y + b.h
    iw = min(ax2, bx2) - max(a.x, b.x)
    ih = min(ay2, by2) - max(a.y, b.y)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    union = a.w * a.h + b.w * b.h - inter
    return inter / union if union > 0 else 0.0


def _items(records):
    out = []
    for r in records:
        out.append((r.frame, r.identity, r.box, getattr(r, "confidence", 1.0)))
    return out


def oracle_ap_single(preds, gts, threshold: float) -> float:
    """AP for one identity's prediction/GT lists at one IoU threshold."""
    n_gt = len(gts)
    if n_gt == 0:
        return 0.0
    order = sorted(range(len(preds)),
                   key=lambda i: (-preds[i][3], preds[i][0], preds[i][2].x,
                                  preds[i][2].y, preds[i][2].w, preds[i][2].h))
    taken = set()
    labels = []
    for i in order:
        frame, _, box, _ = preds[i]
        best_j, best_v = None, 0.0
        for j, (g_frame, _, g_box, _) in enumerate(gts):
            if j in taken or g_frame != frame:
                continue
            v = box_iou(box, g_box)
            if v > best_v:
                best_j, best_v = j, v
        if best_j is not None and best_v >= threshold:
            taken.add(best_j)
            labels.append(1)
        else:
            labels.append(0)

    # Precision/recall at every rank, then integrate by definition.
    precisions, recalls = [], []
    tp = 0
    for rank, lab in enumerate(labels, start=1):
        tp += lab
        precisions.append(tp / rank)
        recalls.append(tp / n_gt)
    ap = 0.0
    prev_recall = 0.0
    for k in range(len(labels)):
        if recalls[k] > prev_recall:
            best_p = max(precisions[k:])
            ap += (recalls[k] - prev_recall) * best_p
            prev_recall = recalls[k]
    return ap


def oracle_report(predictions, ground_truth):
    """(ap_50_95, ap_50, ap_75) means over identities present in the GT."""
    preds = _items(predictions)
    gts = sorted(_items(ground_truth),
                 key=lambda e: (e[0], e[1], e[2].x, e[2].y, e[2].w, e[2].h))
    identities = sorted({g[1] for g in gts})
    # The metric's thresholds are the decimals 0.50, 0.55, ..., 0.95.
    thresholds = [round(0.5 + 0.05 * i, 2) for i in range(10)]
    table = {}
    for identity in identities:
        id_preds = [p for p in preds if p[1] == identity]
        id_gts = [g for g in gts if g[1] == identity]
        table[identity] = [oracle_ap_single(id_preds, id_gts, t)
                           for t in thresholds]
    if not identities:
        return 0.0, 0.0, 0.0
    k = len(identities)
    per_thr = [sum(table[i][j] for i in identities) / k for j in range(10)]
    return sum(per_thr) / 10.0, per_thr[0], per_thr[5]
