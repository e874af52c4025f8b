import type { Box } from "./types.js";

/** RGBA color; alpha in [0, 1] applies to mask fills. */
export interface OverlayColor {
  r: number;
  g: number;
  b: number;
  alpha: number;
}

export const MASK_FILL: OverlayColor = { r: 66, g: 133, b: 244, alpha: 0.45 };
export const BOX_STROKE: OverlayColor = { r: 255, g: 196, b: 0, alpha: 1.0 };
export const CANDIDATE_STROKE: OverlayColor = { r: 52, g: 199, b: 89, alpha: 1.0 };

/**
 * Alpha-blend the mask over an RGBA buffer in place. Pixels outside the mask
 * are untouched, so an empty mask leaves the image unmodified.
 */
export function compositeMaskFill(
  rgba: Uint8ClampedArray,
  width: number,
  height: number,
  mask: Uint8Array,
  color: OverlayColor = MASK_FILL,
): Uint8ClampedArray {
  if (mask.length !== width * height) {
    throw new Error(`mask length ${mask.length} != ${width * height}`);
  }
  const a = color.alpha;
  for (let i = 0; i < mask.length; i++) {
    if (!mask[i]) continue;
    const o = i * 4;
    rgba[o] = Math.round(rgba[o] * (1 - a) + color.r * a);
    rgba[o + 1] = Math.round(rgba[o + 1] * (1 - a) + color.g * a);
    rgba[o + 2] = Math.round(rgba[o + 2] * (1 - a) + color.b * a);
    rgba[o + 3] = 255;
  }
  return rgba;
}

/**
 * Boundary pixels of the mask: set pixels with at least one 4-neighbor
 * outside the mask (or on the image edge). Rendered as the "boundary"
 * overlay mode.
 */
export function maskBoundary(mask: Uint8Array, width: number, height: number): Uint8Array {
  const edge = new Uint8Array(mask.length);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const i = y * width + x;
      if (!mask[i]) continue;
      const bare =
        x === 0 || x === width - 1 || y === 0 || y === height - 1 ||
        !mask[i - 1] || !mask[i + 1] || !mask[i - width] || !mask[i + width];
      if (bare) edge[i] = 1;
    }
  }
  return edge;
}

/** Stroke a 1px rectangle outline (integer pixel coordinates, half-open). */
export function strokeBox(
  rgba: Uint8ClampedArray,
  width: number,
  height: number,
  box: Box,
  color: OverlayColor = BOX_STROKE,
): Uint8ClampedArray {
  const setPx = (x: number, y: number) => {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    const o = (y * width + x) * 4;
    rgba[o] = color.r;
    rgba[o + 1] = color.g;
    rgba[o + 2] = color.b;
    rgba[o + 3] = 255;
  };
  for (let x = box.x0; x < box.x1; x++) {
    setPx(x, box.y0);
    setPx(x, box.y1 - 1);
  }
  for (let y = box.y0; y < box.y1; y++) {
    setPx(box.x0, y);
    setPx(box.x1 - 1, y);
  }
  return rgba;
}
