// Run-length mask stream parsing (masks.rle from the bundle endpoints).
// Runs alternate background/foreground starting with background, row-major.

export interface RleMask {
  frame: number;
  width: number;
  height: number;
  runs: number[];
}

export function parseMaskStream(text: string): Map<number, RleMask> {
  const lines = text.split("\n").map((l) => l.trim()).filter((l) => l.length > 0);
  const out = new Map<number, RleMask>();
  for (let i = 0; i + 1 < lines.length; i += 2) {
    const header = lines[i].split(/\s+/).map(Number);
    if (header.length !== 3 || header.some(Number.isNaN)) {
      throw new Error(`bad mask header: ${lines[i]}`);
    }
    const [frame, width, height] = header;
    const runs = lines[i + 1].split(/\s+/).map(Number);
    if (runs.some((r) => Number.isNaN(r) || r < 0)) {
      throw new Error(`bad run lengths for frame ${frame}`);
    }
    const total = runs.reduce((a, b) => a + b, 0);
    if (total !== width * height) {
      throw new Error(`mask runs sum to ${total}, expected ${width * height}`);
    }
    out.set(frame, { frame, width, height, runs });
  }
  return out;
}

/** Expand to one byte per pixel (1 = human foreground), row-major. */
export function decodeMask(mask: RleMask): Uint8Array {
  const flat = new Uint8Array(mask.width * mask.height);
  let pos = 0;
  let value = 0;
  for (const run of mask.runs) {
    if (value === 1) flat.fill(1, pos, pos + run);
    pos += run;
    value ^= 1;
  }
  return flat;
}

/** RGBA alpha mask (opaque where foreground) for canvas compositing. */
export function maskToAlpha(mask: RleMask): Uint8ClampedArray<ArrayBuffer> {
  const flat = decodeMask(mask);
  const rgba = new Uint8ClampedArray(new ArrayBuffer(flat.length * 4));
  for (let i = 0; i < flat.length; i++) {
    rgba[i * 4 + 3] = flat[i] === 1 ? 255 : 0;
  }
  return rgba;
}
