import { ApiClient } from "./api.js";
import type { Box, JobDto, RecordDto, ReportDto } from "./types.js";

/**
 * Interactive correction flows. Every mutation goes through the service; the
 * returned records are the server's authoritative copies.
 */

export interface RectifyFlowResult {
  candidates: Box[];
  chosen: Box;
  record: RecordDto;
}

/**
 * Rectify: fetch a reproducible candidate grid, let the caller pick one (by
 * index or its own logic), post the chosen box verbatim. Integer
 * coordinates travel untouched end to end.
 */
export async function rectifyFlow(
  api: ApiClient,
  sessionId: string,
  recordId: number,
  seed: number,
  pick: (boxes: Box[]) => number,
  count = 8,
): Promise<RectifyFlowResult> {
  const grid = await api.candidates(sessionId, recordId, seed, count);
  const index = pick(grid.boxes);
  if (index < 0 || index >= grid.boxes.length) {
    throw new Error(`candidate index ${index} out of range`);
  }
  const chosen = grid.boxes[index];
  const record = await api.rectify(sessionId, recordId, chosen);
  return { candidates: grid.boxes, chosen, record };
}

export interface FurtherFlowResult {
  parent: RecordDto;
  child: RecordDto;
}

/** Drill into the active record's box with a sub-prompt. */
export async function furtherFlow(
  api: ApiClient,
  sessionId: string,
  recordId: number,
  subPrompt: string,
): Promise<FurtherFlowResult> {
  const parent = await api.getRecord(sessionId, recordId);
  const child = await api.further(sessionId, recordId, subPrompt);
  return { parent, child };
}

export interface BatchFlowResult {
  job: JobDto;
  replacedSlices: number[];
}

export async function batchFlow(
  api: ApiClient,
  sessionId: string,
  prompt: string,
  options: Record<string, number | string> = {},
  onProgress?: (job: JobDto) => void,
): Promise<BatchFlowResult> {
  const { job_id } = await api.startBatch(sessionId, prompt, options);
  const job = await api.waitForJob(job_id, {}, onProgress);
  if (job.status === "failed") {
    throw new Error(`batch failed: ${job.error ?? "unknown"}`);
  }
  const replacedSlices = job.result.filter((r) => r.replaced).map((r) => r.slice_index);
  return { job, replacedSlices };
}

export async function evaluateFlow(
  api: ApiClient,
  sessionId: string,
  gtPath: string,
): Promise<ReportDto> {
  return api.evaluateSession(sessionId, gtPath);
}
