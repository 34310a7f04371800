import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { decodeFrame, encodeFrame, type FrameMessage } from "../src/protocol.js";

const fixture = (name: string) =>
  fileURLToPath(new URL(`./fixtures/${name}`, import.meta.url));

const goldenBytes = new Uint8Array(readFileSync(fixture("golden_frame.bin")));
const goldenJson = JSON.parse(
  readFileSync(fixture("golden_frame.json"), "utf-8")) as FrameMessage;

describe("frame record decoding", () => {
  it("decodes the engine-produced golden record exactly", () => {
    const msg = decodeFrame(goldenBytes);
    expect(msg.frame).toBe(goldenJson.frame);
    expect(msg.commands).toHaveLength(goldenJson.commands.length);
    msg.commands.forEach((cmd, i) => {
      expect(cmd).toEqual(goldenJson.commands[i]);
    });
  });

  it("re-encodes the golden record byte for byte", () => {
    const msg = decodeFrame(goldenBytes);
    expect(encodeFrame(msg)).toEqual(goldenBytes);
  });

  it("round-trips unicode label text", () => {
    const label = goldenJson.commands.find((c) => c.text.length > 0)!;
    expect(label.text).toBe("Player Jokić");
  });

  it("rejects a stripped length prefix", () => {
    expect(() => decodeFrame(goldenBytes.subarray(4))).toThrow(/length prefix/);
  });

  it("rejects trailing bytes", () => {
    const extended = new Uint8Array(goldenBytes.length + 1);
    extended.set(goldenBytes);
    expect(() => decodeFrame(extended)).toThrow();
  });

  it("handles an empty frame", () => {
    const empty = encodeFrame({ frame: 9, commands: [] });
    expect(decodeFrame(empty)).toEqual({ frame: 9, commands: [] });
  });
});
