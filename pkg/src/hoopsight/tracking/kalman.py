"""Constant-velocity Kalman filter over (cx, cy, w, h) box state.

State vector is [cx, cy, w, h, vcx, vcy, vw, vh] with per-frame velocities.
Process and measurement noise are scaled by the current box height, which
keeps the filter tuned across near/far players without per-game calibration.
"""

from __future__ import annotations

import numpy as np

from ..ingest import BoundingBox

_STD_POSITION = 1.0 / 20.0
_STD_VELOCITY = 1.0 / 160.0
# Velocity is unobserved at track birth; a wide prior (half the box height per
# frame) lets the filter lock onto the true displacement within two updates.
_INIT_VELOCITY_STD = 0.5

_NDIM = 4

_MOTION = np.eye(2 * _NDIM)
for _i in range(_NDIM):
    _MOTION[_i, _NDIM + _i] = 1.0
_PROJECT = np.eye(_NDIM, 2 * _NDIM)


def _measurement(box: BoundingBox) -> np.ndarray:
    return np.array([box.cx, box.cy, box.w, box.h], dtype=np.float64)


def _to_box(mean: np.ndarray) -> BoundingBox:
    cx, cy, w, h = mean[:4]
    w = max(w, 0.0)
    h = max(h, 0.0)
    return BoundingBox(cx - w / 2.0, cy - h / 2.0, w, h)


class KalmanBoxFilter:
    """Shared filter math; trackers hold (mean, covariance) pairs."""

    def initiate(self, box: BoundingBox) -> tuple[np.ndarray, np.ndarray]:
        m = _measurement(box)
        mean = np.concatenate([m, np.zeros(_NDIM)])
        h = max(m[3], 1.0)
        std = [2 * _STD_POSITION * h] * _NDIM + [_INIT_VELOCITY_STD * h] * _NDIM
        cov = np.diag(np.square(std))
        return mean, cov

    def predict(self, mean: np.ndarray, cov: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        h = max(mean[3], 1.0)
        std = [_STD_POSITION * h] * _NDIM + [_STD_VELOCITY * h] * _NDIM
        motion_cov = np.diag(np.square(std))
        mean = _MOTION @ mean
        cov = _MOTION @ cov @ _MOTION.T + motion_cov
        return mean, (cov + cov.T) / 2.0

    def update(self, mean: np.ndarray, cov: np.ndarray,
               box: BoundingBox) -> tuple[np.ndarray, np.ndarray]:
        h = max(mean[3], 1.0)
        std = [_STD_POSITION * h] * _NDIM
        innovation_cov = np.diag(np.square(std))

        projected_mean = _PROJECT @ mean
        projected_cov = _PROJECT @ cov @ _PROJECT.T + innovation_cov
        gain = np.linalg.solve(projected_cov.T, (_PROJECT @ cov.T)).T
        innovation = _measurement(box) - projected_mean

        new_mean = mean + gain @ innovation
        new_cov = cov - gain @ projected_cov @ gain.T
        return new_mean, (new_cov + new_cov.T) / 2.0


_SHARED = KalmanBoxFilter()


class Tracker:
    """One identity's motion state across frames."""

    def __init__(self, track_id: int, identity: str, box: BoundingBox, frame: int):
        self.track_id = track_id
        self.identity = identity
        self.mean, self.covariance = _SHARED.initiate(box)
        self.last_updated = frame
        self.hit_count = 1

    def predict(self) -> BoundingBox:
        self.mean, self.covariance = _SHARED.predict(self.mean, self.covariance)
        return _to_box(self.mean)

    def update(self, box: BoundingBox, frame: int) -> None:
        self.mean, self.covariance = _SHARED.update(self.mean, self.covariance, box)
        self.last_updated = frame
        self.hit_count += 1

    @property
    def box(self) -> BoundingBox:
        return _to_box(self.mean)


def kalman_predict(tracker: Tracker) -> BoundingBox:
    """Advance the tracker one frame and return the predicted box."""
    return tracker.predict()


def kalman_update(tracker: Tracker, box: BoundingBox, frame: int | None = None) -> Tracker:
    """Correct the tracker state with an observed box."""
    tracker.update(box, tracker.last_updated if frame is None else frame)
    return tracker
