"""Detection post-processing: association, refinement, and evaluation."""

from .associate import (
    Associator,
    SOURCE_DETECTED,
    SOURCE_INTERPOLATED,
    TrackedBox,
    associate_frame,
    cluster_detections,
    high_cluster_baseline,
    iou,
    postprocess,
)
from .evaluate import IOU_THRESHOLDS, EvaluationReport, evaluate_ap
from .kalman import KalmanBoxFilter, Tracker, kalman_predict, kalman_update

__all__ = [
    "Associator",
    "SOURCE_DETECTED",
    "SOURCE_INTERPOLATED",
    "TrackedBox",
    "associate_frame",
    "cluster_detections",
    "high_cluster_baseline",
    "iou",
    "postprocess",
    "IOU_THRESHOLDS",
    "EvaluationReport",
    "evaluate_ap",
    "KalmanBoxFilter",
    "Tracker",
    "kalman_predict",
    "kalman_update",
]
