import type {
  Box,
  CandidateSetDto,
  JobDto,
  RecordDto,
  ReportDto,
  SessionState,
  VolumeMeta,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

async function parseOrThrow<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = (await resp.json()) as { error?: string };
      if (body.error) detail = body.error;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

/** Thin typed client for the /api/v1 endpoints; holds no state of its own. */
export class ApiClient {
  constructor(readonly baseUrl: string, private readonly fetchImpl: typeof fetch = fetch) {}

  private url(path: string): string {
    return `${this.baseUrl}/api/v1${path}`;
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const resp = await this.fetchImpl(this.url(path), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return parseOrThrow<T>(resp);
  }

  async createSession(
    file: Blob,
    filename: string,
    options: { backend?: string; remoteUrl?: string; syntheticThreshold?: number } = {},
  ): Promise<{ session_id: string; meta: VolumeMeta }> {
    const form = new FormData();
    form.append("file", file, filename);
    if (options.backend) form.append("backend", options.backend);
    if (options.remoteUrl) form.append("remote_url", options.remoteUrl);
    if (options.syntheticThreshold != null) {
      form.append("synthetic_threshold", String(options.syntheticThreshold));
    }
    const resp = await this.fetchImpl(this.url("/sessions"), {
      method: "POST",
      body: form,
    });
    return parseOrThrow(resp);
  }

  async getSession(sessionId: string, includeRecords = true): Promise<SessionState> {
    const resp = await this.fetchImpl(
      this.url(`/sessions/${sessionId}?records=${includeRecords}`),
    );
    return parseOrThrow(resp);
  }

  async getRecord(sessionId: string, recordId: number): Promise<RecordDto> {
    const resp = await this.fetchImpl(this.url(`/sessions/${sessionId}/records/${recordId}`));
    return parseOrThrow(resp);
  }

  previewUrl(sessionId: string, sliceIndex: number, scale = 1.0): string {
    return this.url(`/sessions/${sessionId}/preview?slice=${sliceIndex}&scale=${scale}`);
  }

  async fetchPreview(sessionId: string, sliceIndex: number, scale = 1.0): Promise<Blob> {
    const resp = await this.fetchImpl(this.previewUrl(sessionId, sliceIndex, scale));
    if (!resp.ok) throw new ApiError(resp.status, "preview failed");
    return resp.blob();
  }

  segmentSlice(
    sessionId: string,
    sliceIndex: number,
    prompt: string,
    thresholds: { box_threshold?: number; text_threshold?: number } = {},
  ): Promise<RecordDto> {
    return this.postJson(`/sessions/${sessionId}/segment`, {
      slice_index: sliceIndex,
      prompt,
      ...thresholds,
    });
  }

  startBatch(
    sessionId: string,
    prompt: string,
    options: Record<string, number | string> = {},
  ): Promise<{ job_id: string; status: string }> {
    return this.postJson(`/sessions/${sessionId}/batch`, { prompt, ...options });
  }

  async getJob(jobId: string): Promise<JobDto> {
    const resp = await this.fetchImpl(this.url(`/jobs/${jobId}`));
    return parseOrThrow(resp);
  }

  /** Poll until the job reaches a terminal state. */
  async waitForJob(
    jobId: string,
    { intervalMs = 150, timeoutMs = 120_000 }: { intervalMs?: number; timeoutMs?: number } = {},
    onProgress?: (job: JobDto) => void,
  ): Promise<JobDto> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const job = await this.getJob(jobId);
      onProgress?.(job);
      if (job.status === "done" || job.status === "failed") return job;
      if (Date.now() > deadline) throw new ApiError(408, `job ${jobId} timed out`);
      await new Promise((r) => setTimeout(r, intervalMs));
    }
  }

  candidates(sessionId: string, recordId: number, seed: number, count = 8): Promise<CandidateSetDto> {
    return this.postJson(`/sessions/${sessionId}/records/${recordId}/candidates`, {
      seed,
      count,
    });
  }

  rectify(sessionId: string, recordId: number, box: Box): Promise<RecordDto> {
    return this.postJson(`/sessions/${sessionId}/records/${recordId}/rectify`, { box });
  }

  further(
    sessionId: string,
    recordId: number,
    prompt: string,
    thresholds: { box_threshold?: number; text_threshold?: number } = {},
  ): Promise<RecordDto> {
    return this.postJson(`/sessions/${sessionId}/records/${recordId}/further`, {
      prompt,
      ...thresholds,
    });
  }

  evaluateSession(sessionId: string, gtPath: string, emptyZero = false): Promise<ReportDto> {
    return this.postJson(`/evaluate`, {
      session_id: sessionId,
      gt_path: gtPath,
      empty_zero: emptyZero,
    });
  }

  evaluatePaths(predPath: string, gtPath: string): Promise<ReportDto> {
    return this.postJson(`/evaluate`, { pred_path: predPath, gt_path: gtPath });
  }

  exportUrl(sessionId: string): string {
    return this.url(`/sessions/${sessionId}/export`);
  }
}
