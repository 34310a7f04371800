"""Reference software rasterizer for render-command lists.

Test-only counterpart of the viewer's canvas compositor: it executes darken
and court-overlay commands on a numpy image, then restores human-foreground
pixels from the source frame.  Label and foreground-accent commands are
vector-only (there is no text shaping here and player-figure effects are a
viewer concern), so after rasterization every mask-covered pixel equals the
source frame by construction of the pipeline, which is exactly the invariant
the acceptance suite checks.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .overlay import ColorRole, DarkenScope, Layer, Primitive, RenderCommand

# Fixed palette for the reference canvas (the real palette is viewer-chosen).
_COLORS = {
    ColorRole.WHITE: (255, 255, 255),
    ColorRole.GREEN: (80, 220, 100),
    ColorRole.GOLD: (240, 200, 60),
    ColorRole.NEUTRAL: (220, 220, 220),
}


def _grid(h: int, w: int):
    ys, xs = np.mgrid[0:h, 0:w]
    return xs.astype(np.float64), ys.astype(np.float64)


def _sequential_color(position: float) -> tuple[int, int, int]:
    """Light-to-dark single-hue ramp; darker = higher value."""
    p = min(1.0, max(0.0, position))
    return (int(255 - 205 * p), int(230 - 170 * p), int(140 - 100 * p))


def _blend(img: np.ndarray, region: np.ndarray, color, opacity: float) -> None:
    if not region.any():
        return
    c = np.array(color, dtype=np.float64)
    img[region] = (1.0 - opacity) * img[region] + opacity * c


def rasterize(source: np.ndarray, commands: Sequence[RenderCommand],
              mask: np.ndarray | None = None,
              court_region: np.ndarray | None = None) -> np.ndarray:
    """Composite commands over a source frame.

    source: HxWx3 uint8; mask: HxW binary human foreground; court_region:
    HxW binary area exempt from audience darkening (in addition to the mask).
    """
    h, w = source.shape[:2]
    img = source.astype(np.float64).copy()
    xs, ys = _grid(h, w)
    fg = (np.zeros((h, w), dtype=bool) if mask is None
          else np.asarray(mask).astype(bool))

    for cmd in sorted(commands, key=lambda c: (c.layer, c.player, c.primitive)):
        if cmd.layer == Layer.BACKGROUND_DARKEN and \
                cmd.primitive == Primitive.AUDIENCE_DARKEN:
            scope = ~fg
            if int(cmd.p1) == DarkenScope.AUDIENCE and court_region is not None:
                scope &= ~np.asarray(court_region).astype(bool)
            if cmd.p0 > 0.0:
                d2 = (xs - cmd.x) ** 2 + (ys - cmd.y) ** 2
                scope &= d2 > cmd.p0 ** 2
            img[scope] *= (1.0 - cmd.opacity)
        elif cmd.layer == Layer.COURT_OVERLAY:
            _draw_overlay(img, xs, ys, cmd)
        # FOREGROUND_RESTORE accents and LABEL text are viewer-rendered.

    img[fg] = source.astype(np.float64)[fg]
    return np.clip(np.rint(img), 0, 255).astype(np.uint8)


def _draw_overlay(img, xs, ys, cmd: RenderCommand) -> None:
    d2 = (xs - cmd.x) ** 2 + (ys - cmd.y) ** 2
    if cmd.primitive == Primitive.SPOTLIGHT:
        region = d2 <= cmd.p0 ** 2
        _blend(img, region, _COLORS[ColorRole(cmd.color_role)], 0.5 * cmd.opacity)
    elif cmd.primitive == Primitive.OFFENSE_RING:
        d = np.sqrt(d2)
        half = 2.0
        region = np.abs(d - cmd.p2) <= half
        color = _sequential_color(cmd.p3)
        _blend(img, region, color, cmd.opacity)
        for guide in (cmd.p0, cmd.p1):
            _blend(img, np.abs(d - guide) <= 0.75, _COLORS[ColorRole.NEUTRAL],
                   0.4 * cmd.opacity)
    elif cmd.primitive == Primitive.DEFENSE_SHIELD:
        if cmd.p2 <= 0.0:
            return
        d = np.sqrt(d2)
        band = np.abs(d - cmd.p0) <= max(cmd.p1, 0.5) / 2.0
        ang = np.arctan2(ys - cmd.y, xs - cmd.x)
        delta = np.abs(np.arctan2(np.sin(ang - cmd.p3), np.cos(ang - cmd.p3)))
        span = cmd.p2 * math.pi / 2.0
        _blend(img, band & (delta <= span), _COLORS[ColorRole.NEUTRAL], cmd.opacity)
    elif cmd.primitive == Primitive.LINK:
        ax, ay, bx, by = cmd.x, cmd.y, cmd.p0, cmd.p1
        vx, vy = bx - ax, by - ay
        length2 = vx * vx + vy * vy
        if length2 <= 0.0:
            return
        t = np.clip(((xs - ax) * vx + (ys - ay) * vy) / length2, 0.0, 1.0)
        dist2 = (xs - (ax + t * vx)) ** 2 + (ys - (ay + t * vy)) ** 2
        _blend(img, dist2 <= (cmd.p2 / 2.0) ** 2, _COLORS[ColorRole.NEUTRAL],
               cmd.opacity)
