import type { Box, RecordDto } from "./types.js";

/**
 * Sum of crop origins along the parent chain: the offset of a child record's
 * frame inside the full slice. Records without a crop origin are already in
 * the slice frame.
 */
export function chainOffset(
  record: RecordDto,
  byId: Map<number, RecordDto>,
): [number, number] {
  let dx = 0;
  let dy = 0;
  let current: RecordDto | undefined = record;
  const seen = new Set<number>();
  while (current && current.crop_origin) {
    if (seen.has(current.record_id)) {
      throw new Error(`cycle in parent chain at record ${current.record_id}`);
    }
    seen.add(current.record_id);
    dx += current.crop_origin[0];
    dy += current.crop_origin[1];
    current = current.parent_id != null ? byId.get(current.parent_id) : undefined;
  }
  return [dx, dy];
}

export function boxToSliceFrame(
  record: RecordDto,
  byId: Map<number, RecordDto>,
  box: Box,
): Box {
  const [dx, dy] = chainOffset(record, byId);
  return { x0: box.x0 + dx, y0: box.y0 + dy, x1: box.x1 + dx, y1: box.y1 + dy };
}

export function pointToSliceFrame(
  record: RecordDto,
  byId: Map<number, RecordDto>,
  point: [number, number],
): [number, number] {
  const [dx, dy] = chainOffset(record, byId);
  return [point[0] + dx, point[1] + dy];
}

export function pointToChildFrame(
  record: RecordDto,
  byId: Map<number, RecordDto>,
  point: [number, number],
): [number, number] {
  const [dx, dy] = chainOffset(record, byId);
  return [point[0] - dx, point[1] - dy];
}
