// Wire protocol shared with the server; layout is specified bit-exactly in
// ../PROTOCOL.md. Frame records are little-endian binary, control messages
// are JSON text.

export const Layer = {
  BackgroundDarken: 0,
  CourtOverlay: 1,
  ForegroundRestore: 2,
  Label: 3,
} as const;

export const Primitive = {
  Spotlight: 0,
  OffenseRing: 1,
  DefenseShield: 2,
  Link: 3,
  NameLabel: 4,
  AudienceDarken: 5,
} as const;

export const ColorRole = {
  White: 0,
  Green: 1,
  Gold: 2,
  Neutral: 3,
  Brightness: 4,
  Glow: 5,
  Dim: 6,
  Sequential: 7,
} as const;

export interface RenderCommand {
  layer: number;
  player: string;
  primitive: number;
  colorRole: number;
  x: number;
  y: number;
  p0: number;
  p1: number;
  p2: number;
  p3: number;
  opacity: number;
  ease: number;
  text: string;
  icon: number;
}

export interface FrameMessage {
  frame: number;
  commands: RenderCommand[];
}

const utf8 = { enc: new TextEncoder(), dec: new TextDecoder() };

/** Decode one full record, including its 4-byte length prefix. */
export function decodeFrame(data: ArrayBuffer | Uint8Array): FrameMessage {
  const bytes = data instanceof Uint8Array ? data : new Uint8Array(data);
  const view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  if (bytes.byteLength < 4) throw new Error("record shorter than its length prefix");
  const length = view.getUint32(0, true);
  if (length !== bytes.byteLength - 4) {
    throw new Error(`record length prefix ${length} != payload size ${bytes.byteLength - 4}`);
  }
  let pos = 4;
  const frame = view.getUint32(pos, true);
  pos += 4;
  const count = view.getUint16(pos, true);
  pos += 2;
  const commands: RenderCommand[] = [];
  for (let i = 0; i < count; i++) {
    const layer = view.getUint8(pos++);
    const primitive = view.getUint8(pos++);
    const colorRole = view.getUint8(pos++);
    const idLen = view.getUint8(pos++);
    const player = utf8.dec.decode(bytes.subarray(pos, pos + idLen));
    pos += idLen;
    const floats: number[] = [];
    for (let k = 0; k < 8; k++) {
      floats.push(view.getFloat32(pos, true));
      pos += 4;
    }
    const textLen = view.getUint8(pos++);
    const text = utf8.dec.decode(bytes.subarray(pos, pos + textLen));
    pos += textLen;
    const icon = view.getUint8(pos++);
    commands.push({
      layer, primitive, colorRole, player,
      x: floats[0], y: floats[1], p0: floats[2], p1: floats[3],
      p2: floats[4], p3: floats[5], opacity: floats[6], ease: floats[7],
      text, icon,
    });
  }
  if (pos !== bytes.byteLength) {
    throw new Error(`trailing bytes in frame record: ${bytes.byteLength - pos}`);
  }
  return { frame, commands };
}

/** Encode a frame record (used by tests to prove byte-compatibility). */
export function encodeFrame(msg: FrameMessage): Uint8Array {
  const parts: number[] = [];
  const pushU32 = (v: number) => parts.push(v & 0xff, (v >>> 8) & 0xff, (v >>> 16) & 0xff, (v >>> 24) & 0xff);
  const pushU16 = (v: number) => parts.push(v & 0xff, (v >>> 8) & 0xff);
  const f32 = new DataView(new ArrayBuffer(4));
  const pushF32 = (v: number) => {
    f32.setFloat32(0, v, true);
    parts.push(f32.getUint8(0), f32.getUint8(1), f32.getUint8(2), f32.getUint8(3));
  };
  pushU32(msg.frame);
  pushU16(msg.commands.length);
  for (const cmd of msg.commands) {
    parts.push(cmd.layer, cmd.primitive, cmd.colorRole);
    const id = utf8.enc.encode(cmd.player);
    if (id.length > 255) throw new Error("player id too long for wire format");
    parts.push(id.length, ...id);
    for (const v of [cmd.x, cmd.y, cmd.p0, cmd.p1, cmd.p2, cmd.p3, cmd.opacity, cmd.ease]) {
      pushF32(v);
    }
    const text = utf8.enc.encode(cmd.text);
    if (text.length > 255) throw new Error("label text too long for wire format");
    parts.push(text.length, ...text, cmd.icon);
  }
  const payload = Uint8Array.from(parts);
  const out = new Uint8Array(4 + payload.length);
  new DataView(out.buffer).setUint32(0, payload.length, true);
  out.set(payload, 4);
  return out;
}

// ---- JSON control plane ----------------------------------------------------

export interface GazeSample {
  t: number;
  x: number;
  y: number;
  valid: boolean;
}

export type ClientMessage =
  | { type: "create"; game: string; config?: unknown }
  | { type: "control"; action: "play" | "pause" }
  | { type: "control"; action: "seek"; frame: number }
  | { type: "gaze"; t: number; x: number; y: number; valid: boolean }
  | { type: "step" };

export type ServerEvent =
  | { type: "created"; session: string; frame_rate: number; frame_count: number;
      width: number; height: number }
  | { type: "state"; playing: boolean; playhead: number; ended?: boolean }
  | { type: "ack"; t: number }
  | { type: "error"; code: string; message?: string; t?: number };
