import { describe, expect, it } from "vitest";

import { decodeMask, maskToAlpha, parseMaskStream } from "../src/masks.js";

describe("mask stream", () => {
  it("parses frames and validates run totals", () => {
    const masks = parseMaskStream("0 20 10\n100 50 50\n2 20 10\n0 10 190\n");
    expect([...masks.keys()]).toEqual([0, 2]);
    expect(masks.get(0)!.runs).toEqual([100, 50, 50]);
  });

  it("rejects runs that do not sum to width*height", () => {
    expect(() => parseMaskStream("0 20 10\n100 50 49\n")).toThrow(/sum/);
  });

  it("decodes alternating background/foreground runs", () => {
    const masks = parseMaskStream("0 4 2\n3 2 3\n");
    const flat = decodeMask(masks.get(0)!);
    expect([...flat]).toEqual([0, 0, 0, 1, 1, 0, 0, 0]);
  });

  it("builds an alpha channel for compositing", () => {
    const masks = parseMaskStream("0 2 1\n1 1\n");
    const rgba = maskToAlpha(masks.get(0)!);
    expect(rgba[3]).toBe(0);
    expect(rgba[7]).toBe(255);
  });
});
