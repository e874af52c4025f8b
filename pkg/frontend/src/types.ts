/** Wire types mirrored from the service's JSON API. */

export interface Box {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export interface Rle {
  size: [number, number]; // [height, width]
  counts: number[];
}

export interface RecordDto {
  record_id: number;
  slice_index: number;
  prompt: string;
  box: Box | null;
  mask_rle: Rle;
  provenance: "auto" | "auto-empty" | "refined" | "rectified" | "further";
  parent_id: number | null;
  crop_origin: [number, number] | null;
  extra: Record<string, unknown>;
}

export interface VolumeMeta {
  width: number;
  height: number;
  depth: number;
  channels: number;
  bit_depth: number;
  sample_kind: string;
  value_min: number;
  value_max: number;
}

export interface SessionState {
  session_id: string;
  source_name: string;
  meta: VolumeMeta;
  adapt: Record<string, unknown>;
  backend: Record<string, unknown>;
  created_at: string;
  updated_at: string;
  record_count: number;
  records?: RecordDto[];
}

export interface JobDto {
  job_id: string;
  session_id: string;
  prompt: string;
  status: "queued" | "running" | "done" | "failed";
  total: number;
  completed: number;
  result: { slice_index: number; record_id: number; replaced: boolean; has_box: boolean }[];
  error: string | null;
}

export interface CandidateSetDto {
  seed: number;
  count: number;
  boxes: Box[];
}

export interface SliceMetricsDto {
  slice: number;
  accuracy: number;
  iou: number;
  dice: number;
}

export interface ReportDto {
  per_slice: SliceMetricsDto[];
  aggregate: Record<string, { mean: number; std: number }>;
  sample_count: number;
}
