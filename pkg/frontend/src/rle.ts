import type { Box, Rle } from "./types.js";

/**
 * Decode run-length counts (alternating 0s/1s, starting with a 0-run,
 * row-major) into one byte per pixel.
 */
export function decodeRle(rle: Rle): Uint8Array {
  const [height, width] = rle.size;
  const total = height * width;
  const out = new Uint8Array(total);
  let pos = 0;
  let value = 0;
  for (const run of rle.counts) {
    if (value === 1) {
      out.fill(1, pos, pos + run);
    }
    pos += run;
    value = 1 - value;
  }
  if (pos !== total) {
    throw new Error(`RLE covers ${pos} pixels, size says ${total}`);
  }
  return out;
}

export function encodeRle(bits: Uint8Array, width: number, height: number): Rle {
  if (bits.length !== width * height) {
    throw new Error(`bits length ${bits.length} != ${width * height}`);
  }
  const counts: number[] = [];
  let value = 0;
  let run = 0;
  for (let i = 0; i < bits.length; i++) {
    const v = bits[i] ? 1 : 0;
    if (v === value) {
      run++;
    } else {
      counts.push(run);
      value = v;
      run = 1;
    }
  }
  counts.push(run);
  return { size: [height, width], counts };
}

export function maskArea(rle: Rle): number {
  let area = 0;
  let value = 0;
  for (const run of rle.counts) {
    if (value === 1) area += run;
    value = 1 - value;
  }
  return area;
}

/** Tight bounding box of the set pixels, or null for an empty mask. */
export function maskBoundingBox(bits: Uint8Array, width: number, height: number): Box | null {
  let x0 = width, y0 = height, x1 = -1, y1 = -1;
  for (let y = 0; y < height; y++) {
    const row = y * width;
    for (let x = 0; x < width; x++) {
      if (bits[row + x]) {
        if (x < x0) x0 = x;
        if (x > x1) x1 = x;
        if (y < y0) y0 = y;
        if (y > y1) y1 = y;
      }
    }
  }
  if (x1 < 0) return null;
  return { x0, y0, x1: x1 + 1, y1: y1 + 1 };
}
