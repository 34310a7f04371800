import numpy as np

from hoopsight.overlay import ColorRole, DarkenScope, Layer, Primitive, RenderCommand
from hoopsight.raster import rasterize


def checkerboard(h=60, w=80):
    ys, xs = np.mgrid[0:h, 0:w]
    img = ((xs // 8 + ys // 8) % 2 * 120 + 60).astype(np.uint8)
    return np.stack([img, img + 20, img - 30], axis=-1).astype(np.uint8)


def darken(opacity=0.5, scope=DarkenScope.BACKGROUND, x=0.0, y=0.0, radius=0.0):
    return RenderCommand(layer=Layer.BACKGROUND_DARKEN, player="",
                         primitive=Primitive.AUDIENCE_DARKEN,
                         color_role=ColorRole.DIM, x=x, y=y, p0=radius,
                         p1=float(scope), opacity=opacity)


def spotlight(x, y, r, role=ColorRole.WHITE):
    return RenderCommand(layer=Layer.COURT_OVERLAY, player="P",
                         primitive=Primitive.SPOTLIGHT, color_role=role,
                         x=x, y=y, p0=r, opacity=1.0)


class TestDarken:
    def test_background_dim_spares_mask(self):
        src = checkerboard()
        mask = np.zeros((60, 80), dtype=np.uint8)
        mask[10:30, 10:30] = 1
        out = rasterize(src, [darken(0.5)], mask=mask)
        assert (out[mask == 1] == src[mask == 1]).all()
        assert (out[mask == 0] <= src[mask == 0]).all()
        assert out[0, 0, 0] == round(src[0, 0, 0] * 0.5)

    def test_audience_scope_spares_court_and_disk(self):
        src = checkerboard()
        court = np.zeros((60, 80), dtype=np.uint8)
        court[40:, :] = 1
        cmd = darken(0.8, DarkenScope.AUDIENCE, x=20.0, y=10.0, radius=8.0)
        out = rasterize(src, [cmd], mask=None, court_region=court)
        assert (out[45, 5] == src[45, 5]).all()      # court exempt
        assert (out[10, 20] == src[10, 20]).all()    # inside the disk
        assert (out[10, 60] < src[10, 60]).all()     # audience darkened


class TestCompositeOrder:
    def test_foreground_restored_over_overlays(self):
        src = checkerboard()
        mask = np.zeros((60, 80), dtype=np.uint8)
        mask[20:40, 30:50] = 1
        cmds = [darken(0.5), spotlight(40.0, 30.0, 15.0)]
        out = rasterize(src, cmds, mask=mask)
        assert (out[mask == 1] == src[mask == 1]).all()
        # spotlight (center x=40, y=30, r=15) visible at a non-mask pixel
        pure_darken = np.clip(np.rint(src[30, 27] * 0.5), 0, 255)
        assert not (out[30, 27] == pure_darken).all()

    def test_labels_and_accents_do_not_rasterize(self):
        src = checkerboard()
        label = RenderCommand(layer=Layer.LABEL, player="P",
                              primitive=Primitive.NAME_LABEL,
                              color_role=ColorRole.GOLD, x=40, y=30, p0=16,
                              text="X")
        accent = RenderCommand(layer=Layer.FOREGROUND_RESTORE, player="P",
                               primitive=Primitive.SPOTLIGHT,
                               color_role=ColorRole.GLOW, x=40, y=30, p0=10)
        out = rasterize(src, [label, accent], mask=None)
        assert (out == src).all()

    def test_ring_shield_link_draw_strokes(self):
        src = np.zeros((60, 80, 3), dtype=np.uint8)
        ring = RenderCommand(layer=Layer.COURT_OVERLAY, player="P",
                             primitive=Primitive.OFFENSE_RING,
                             color_role=ColorRole.SEQUENTIAL,
                             x=40, y=30, p0=6.0, p1=20.0, p2=12.0, p3=0.5)
        shield = RenderCommand(layer=Layer.COURT_OVERLAY, player="Q",
                               primitive=Primitive.DEFENSE_SHIELD,
                               color_role=ColorRole.NEUTRAL,
                               x=10, y=10, p0=8.0, p1=3.0, p2=0.5, p3=0.0)
        link = RenderCommand(layer=Layer.COURT_OVERLAY, player="Q",
                             primitive=Primitive.LINK,
                             color_role=ColorRole.NEUTRAL,
                             x=5, y=50, p0=70.0, p1=50.0, p2=3.0)
        out = rasterize(src, [ring, shield, link])
        assert (out[30, 52] > 0).any()   # value ring at radius 12
        assert (out[10, 18] > 0).any()   # shield arc toward +x
        assert (out[50, 40] > 0).any()   # link midpoint
        assert (out[30, 40] == 0).all()  # ring center untouched

    def test_degenerate_shield_skipped(self):
        src = np.zeros((40, 40, 3), dtype=np.uint8)
        shield = RenderCommand(layer=Layer.COURT_OVERLAY, player="Q",
                               primitive=Primitive.DEFENSE_SHIELD,
                               color_role=ColorRole.NEUTRAL,
                               x=20, y=20, p0=8.0, p1=3.0, p2=0.0, p3=0.0)
        assert (rasterize(src, [shield]) == src).all()


class TestMaskInvariantOnFixture:
    def test_hundred_frames_mask_pixels_identical(self, demo_bundle):
        """Foreground pixels survive full composition bit-exactly."""
        from hoopsight.session import replay

        rng = np.random.default_rng(0)
        frames = dict(replay(demo_bundle, demo_bundle_trace := []))
        court = None
        checked = 0
        for frame in range(100):
            mask = demo_bundle.mask_at(frame)
            if mask is None:
                continue
            fg = mask.decode()
            src = rng.integers(0, 256, size=(mask.height, mask.width, 3),
                               dtype=np.uint8)
            out = rasterize(src, frames[frame], mask=fg, court_region=court)
            assert (out[fg == 1] == src[fg == 1]).all()
            checked += 1
        assert checked == 100
