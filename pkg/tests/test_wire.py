import io
import struct

import pytest

from hoopsight.overlay import ColorRole, Layer, Primitive, RenderCommand
from hoopsight.wire import decode_frame, encode_frame, read_dump, write_dump


def sample_commands():
    return [
        RenderCommand(layer=Layer.BACKGROUND_DARKEN, player="",
                      primitive=Primitive.AUDIENCE_DARKEN,
                      color_role=ColorRole.DIM, opacity=0.375),
        RenderCommand(layer=Layer.COURT_OVERLAY, player="A1",
                      primitive=Primitive.SPOTLIGHT, color_role=ColorRole.WHITE,
                      x=120.5, y=330.25, p0=40.0, opacity=1.0),
        RenderCommand(layer=Layer.LABEL, player="A1",
                      primitive=Primitive.NAME_LABEL, color_role=ColorRole.GOLD,
                      x=120.5, y=180.0, p0=16.0, text="Player A1", icon=1),
    ]


class TestRoundTrip:
    def test_encode_decode(self):
        record = encode_frame(17, sample_commands())
        frame, commands = decode_frame(record)
        assert frame == 17
        assert len(commands) == 3
        # float32 quantization: these values are exactly representable
        assert commands == sample_commands()

    def test_float32_quantization(self):
        cmd = RenderCommand(layer=0, player="", primitive=5, color_role=6,
                            x=1.0 / 3.0)
        _, decoded = decode_frame(encode_frame(0, [cmd]))
        assert decoded[0].x == pytest.approx(1.0 / 3.0, abs=1e-7)
        assert decoded[0].x == struct.unpack("<f", struct.pack("<f", 1 / 3))[0]

    def test_unicode_text(self):
        cmd = RenderCommand(layer=3, player="P1", primitive=4, color_role=3,
                            text="Jokić")
        _, decoded = decode_frame(encode_frame(0, [cmd]))
        assert decoded[0].text == "Jokić"

    def test_empty_frame(self):
        frame, commands = decode_frame(encode_frame(5, []))
        assert frame == 5 and commands == []


class TestFraming:
    def test_length_prefix_checked(self):
        record = encode_frame(1, sample_commands())
        with pytest.raises(ValueError):
            decode_frame(record[4:])  # prefix stripped
        with pytest.raises(ValueError):
            decode_frame(record + b"\x00")  # trailing junk

    def test_dump_stream_round_trip(self):
        frames = [(i, sample_commands()) for i in range(4)]
        buf = io.BytesIO()
        assert write_dump(buf, frames) == 4
        buf.seek(0)
        out = list(read_dump(buf))
        assert [f for f, _ in out] == [0, 1, 2, 3]
        assert all(cmds == sample_commands() for _, cmds in out)

    def test_truncated_dump_raises(self):
        buf = io.BytesIO()
        write_dump(buf, [(0, sample_commands())])
        data = buf.getvalue()
        with pytest.raises(ValueError):
            list(read_dump(io.BytesIO(data[:-3])))

    def test_golden_encoding_bytes(self):
        """Freeze the exact layout of a minimal record."""
        cmd = RenderCommand(layer=1, player="A", primitive=0, color_role=0,
                            x=1.0, y=2.0, p0=3.0, opacity=1.0)
        record = encode_frame(2, [cmd])
        expected = (
            struct.pack("<I", len(record) - 4)
            + struct.pack("<IH", 2, 1)
            + bytes([1, 0, 0])            # layer, primitive, color role
            + bytes([1]) + b"A"           # id
            + struct.pack("<8f", 1.0, 2.0, 3.0, 0.0, 0.0, 0.0, 1.0, 0.0)
            + bytes([0])                  # text length
            + bytes([0])                  # icon
        )
        assert record == expected
