"""Binary wire encoding for frame messages, shared with the viewer.

One frame per record.  Records are length-delimited so a dump file is just
their concatenation; over a message-framed transport the same record is the
message payload.  All integers are little-endian, all reals are IEEE-754
float32.  PROTOCOL.md documents the layout bit-exactly.
"""

from __future__ import annotations

import io
import struct
from typing import BinaryIO, Iterable, Iterator, Sequence

from .overlay import RenderCommand

_HEAD = struct.Struct("<IH")          # frame index, command count
_CMD_FIXED = struct.Struct("<BBB")    # layer, primitive, color role
_CMD_FLOATS = struct.Struct("<8f")    # x, y, p0..p3, opacity, ease


def encode_frame(frame: int, commands: Sequence[RenderCommand]) -> bytes:
    """Encode one frame's commands as a length-delimited record."""
    buf = io.BytesIO()
    buf.write(_HEAD.pack(frame, len(commands)))
    for cmd in commands:
        buf.write(_CMD_FIXED.pack(cmd.layer, cmd.primitive, cmd.color_role))
        pid = cmd.player.encode("utf-8")
        if len(pid) > 255:
            raise ValueError("player id too long for wire format")
        buf.write(bytes([len(pid)]))
        buf.write(pid)
        buf.write(_CMD_FLOATS.pack(cmd.x, cmd.y, cmd.p0, cmd.p1, cmd.p2, cmd.p3,
                                   cmd.opacity, cmd.ease))
        text = cmd.text.encode("utf-8")
        if len(text) > 255:
            raise ValueError("label text too long for wire format")
        buf.write(bytes([len(text)]))
        buf.write(text)
        buf.write(bytes([cmd.icon]))
    payload = buf.getvalue()
    return struct.pack("<I", len(payload)) + payload


def decode_frame(record: bytes) -> tuple[int, list[RenderCommand]]:
    """Decode one full record, including its 4-byte length prefix."""
    if len(record) < 4:
        raise ValueError("record shorter than its length prefix")
    (length,) = struct.unpack_from("<I", record, 0)
    if length != len(record) - 4:
        raise ValueError(f"record length prefix {length} != payload size {len(record) - 4}")
    record = record[4:]
    frame, count = _HEAD.unpack_from(record, 0)
    pos = _HEAD.size
    commands = []
    for _ in range(count):
        layer, primitive, color_role = _CMD_FIXED.unpack_from(record, pos)
        pos += _CMD_FIXED.size
        id_len = record[pos]
        pos += 1
        player = record[pos:pos + id_len].decode("utf-8")
        pos += id_len
        x, y, p0, p1, p2, p3, opacity, ease = _CMD_FLOATS.unpack_from(record, pos)
        pos += _CMD_FLOATS.size
        text_len = record[pos]
        pos += 1
        text = record[pos:pos + text_len].decode("utf-8")
        pos += text_len
        icon = record[pos]
        pos += 1
        commands.append(RenderCommand(
            layer=layer, player=player, primitive=primitive,
            color_role=color_role, x=x, y=y, p0=p0, p1=p1, p2=p2, p3=p3,
            opacity=opacity, ease=ease, text=text, icon=icon))
    if pos != len(record):
        raise ValueError(f"trailing bytes in frame record: {len(record) - pos}")
    return frame, commands


def write_dump(stream: BinaryIO,
               frames: Iterable[tuple[int, Sequence[RenderCommand]]]) -> int:
    """Write a replay dump: concatenated length-delimited records."""
    n = 0
    for frame, commands in frames:
        stream.write(encode_frame(frame, commands))
        n += 1
    return n


def read_dump(stream: BinaryIO) -> Iterator[tuple[int, list[RenderCommand]]]:
    """Iterate the records of a replay dump."""
    while True:
        head = stream.read(4)
        if not head:
            return
        if len(head) != 4:
            raise ValueError("truncated record length")
        (length,) = struct.unpack("<I", head)
        payload = stream.read(length)
        if len(payload) != length:
            raise ValueError("truncated record payload")
        yield decode_frame(head + payload)
