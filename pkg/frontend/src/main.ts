import { ApiClient } from "./api.js";
import { boxToSliceFrame } from "./coords.js";
import { dashboardView, formatMetric, seriesToPolyline } from "./dashboard.js";
import { batchFlow, furtherFlow, rectifyFlow } from "./flows.js";
import {
  BOX_STROKE,
  CANDIDATE_STROKE,
  compositeMaskFill,
  maskBoundary,
  strokeBox,
} from "./overlay.js";
import { decodeRle } from "./rle.js";
import {
  ViewState,
  activateRecord,
  activeRecord,
  clearCandidates,
  initialState,
  popBreadcrumb,
  recordsById,
  selectSlice,
  setOverlayMode,
  setReport,
  setSession,
  showCandidates,
} from "./state.js";
import type { Box, RecordDto } from "./types.js";

const api = new ApiClient(window.location.origin);
let state: ViewState = initialState();

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function setStatus(text: string, isError = false) {
  const el = $("status");
  el.textContent = text;
  el.className = isError ? "status error" : "status";
}

async function refreshSession(sessionId: string) {
  const session = await api.getSession(sessionId);
  state = setSession(state, session);
  render();
}

async function render() {
  const session = state.session;
  $("session-panel").style.display = session ? "block" : "none";
  if (!session) return;

  const meta = session.meta;
  $("meta").textContent =
    `${session.source_name}: ${meta.width}x${meta.height}, ` +
    `${meta.depth} slice(s), ${meta.bit_depth}-bit ${meta.sample_kind}, ` +
    `range [${meta.value_min}, ${meta.value_max}]`;

  const slider = $("slice") as HTMLInputElement;
  slider.max = String(meta.depth - 1);
  slider.value = String(state.currentSlice);
  $("slice-label").textContent = `slice ${state.currentSlice}/${meta.depth - 1}`;

  await drawViewport();
  renderRecordInfo();
  renderBreadcrumbs();
  renderDashboard();
}

async function drawViewport() {
  const session = state.session;
  if (!session) return;
  const canvas = $("viewport") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d");
  if (!ctx) return;

  const blob = await api.fetchPreview(session.session_id, state.currentSlice);
  const bitmap = await createImageBitmap(blob);
  canvas.width = bitmap.width;
  canvas.height = bitmap.height;
  ctx.drawImage(bitmap, 0, 0);

  const record = activeRecord(state);
  if (record) {
    const image = ctx.getImageData(0, 0, canvas.width, canvas.height);
    overlayRecord(image.data, canvas.width, canvas.height, record);
    ctx.putImageData(image, 0, 0);
  }
  if (state.candidates.length && record) {
    const image = ctx.getImageData(0, 0, canvas.width, canvas.height);
    const byId = recordsById(state);
    for (const candidate of state.candidates) {
      const box = record.crop_origin ? boxToSliceFrame(record, byId, candidate) : candidate;
      strokeBox(image.data, canvas.width, canvas.height, box, CANDIDATE_STROKE);
    }
    ctx.putImageData(image, 0, 0);
  }
}

function overlayRecord(
  rgba: Uint8ClampedArray,
  width: number,
  height: number,
  record: RecordDto,
) {
  const [h, w] = record.mask_rle.size;
  const bits = decodeRle(record.mask_rle);
  const byId = recordsById(state);
  let full = bits;
  if (record.crop_origin) {
    // children render translated into the slice frame
    full = new Uint8Array(width * height);
    const origin = boxToSliceFrame(record, byId, { x0: 0, y0: 0, x1: w, y1: h });
    for (let y = 0; y < h; y++) {
      for (let x = 0; x < w; x++) {
        if (bits[y * w + x]) full[(origin.y0 + y) * width + (origin.x0 + x)] = 1;
      }
    }
  }
  const painted = state.overlayMode === "boundary" ? maskBoundary(full, width, height) : full;
  compositeMaskFill(rgba, width, height, painted);
  if (record.box) {
    const box = record.crop_origin ? boxToSliceFrame(record, byId, record.box) : record.box;
    strokeBox(rgba, width, height, box, BOX_STROKE);
  }
}

function renderRecordInfo() {
  const record = activeRecord(state);
  const el = $("record-info");
  if (!record) {
    el.textContent = "no record for this slice yet";
    return;
  }
  const boxText = record.box
    ? `(${record.box.x0},${record.box.y0})-(${record.box.x1},${record.box.y1})`
    : "none";
  el.textContent =
    `record ${record.record_id} [${record.provenance}] prompt="${record.prompt}" box=${boxText}`;
}

function renderBreadcrumbs() {
  const el = $("breadcrumbs");
  el.innerHTML = "";
  const byId = recordsById(state);
  state.breadcrumbs.forEach((rid, i) => {
    const rec = byId.get(rid);
    const crumb = document.createElement("button");
    crumb.textContent = i === 0 ? `slice ${rec?.slice_index ?? "?"}` : `#${rid}`;
    crumb.onclick = () => {
      while (state.breadcrumbs.length > i + 1) state = popBreadcrumb(state);
      render();
    };
    el.appendChild(crumb);
    if (i < state.breadcrumbs.length - 1) el.appendChild(document.createTextNode(" › "));
  });
}

function renderDashboard() {
  const panel = $("dashboard");
  if (!state.report) {
    panel.style.display = "none";
    return;
  }
  panel.style.display = "block";
  const view = dashboardView(state.report);
  const cards = $("cards");
  cards.innerHTML = "";
  for (const card of view.cards) {
    const div = document.createElement("div");
    div.className = "card";
    div.innerHTML = `<h3>${card.name}</h3><p>${card.text}</p>`;
    cards.appendChild(div);
  }
  const svg = $("chart");
  const width = 560;
  const height = 160;
  const colors: Record<string, string> = {
    accuracy: "#4285f4",
    iou: "#34c759",
    dice: "#ff9f0a",
  };
  svg.innerHTML = view.series
    .map(
      (s) =>
        `<polyline fill="none" stroke="${colors[s.name]}" stroke-width="1.5" ` +
        `points="${seriesToPolyline(s, width, height)}"/>`,
    )
    .join("");
  $("dashboard-note").textContent =
    `${view.sampleCount} slices; lines are per-slice accuracy/IoU/Dice in [0,1]`;
}

function wire() {
  ($("upload-form") as HTMLFormElement).onsubmit = async (ev) => {
    ev.preventDefault();
    const input = $("file") as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    setStatus("uploading…");
    try {
      const { session_id } = await api.createSession(file, file.name);
      state = initialState();
      await refreshSession(session_id);
      setStatus(`session ${session_id} ready`);
    } catch (err) {
      setStatus(`upload failed: ${err}`, true);
    }
  };

  ($("slice") as HTMLInputElement).oninput = async (ev) => {
    state = selectSlice(state, Number((ev.target as HTMLInputElement).value));
    await render();
  };

  $("overlay-fill").onclick = () => {
    state = setOverlayMode(state, "mask-fill");
    render();
  };
  $("overlay-boundary").onclick = () => {
    state = setOverlayMode(state, "boundary");
    render();
  };

  $("run-a").onclick = async () => {
    const session = state.session;
    if (!session) return;
    const prompt = ($("prompt") as HTMLInputElement).value;
    setStatus("segmenting…");
    try {
      const record = await api.segmentSlice(session.session_id, state.currentSlice, prompt);
      await refreshSession(session.session_id);
      state = activateRecord(state, record);
      await render();
      setStatus(`record ${record.record_id}: ${record.provenance}`);
    } catch (err) {
      setStatus(`segment failed: ${err}`, true);
    }
  };

  $("run-b").onclick = async () => {
    const session = state.session;
    if (!session) return;
    const prompt = ($("prompt") as HTMLInputElement).value;
    setStatus("batch running…");
    try {
      const { job, replacedSlices } = await batchFlow(
        api,
        session.session_id,
        prompt,
        {},
        (j) => setStatus(`batch ${j.completed}/${j.total}`),
      );
      await refreshSession(session.session_id);
      setStatus(
        `batch done: ${job.total} slices, refined ${replacedSlices.length} ` +
        `(${replacedSlices.join(", ") || "none"})`,
      );
    } catch (err) {
      setStatus(`batch failed: ${err}`, true);
    }
  };

  $("run-c").onclick = async () => {
    const session = state.session;
    if (!session) return;
    const gtPath = ($("gt-path") as HTMLInputElement).value;
    setStatus("evaluating…");
    try {
      const report = await api.evaluateSession(session.session_id, gtPath);
      state = setReport(state, report);
      await render();
      setStatus(
        `evaluation: IoU ${formatMetric(report.aggregate["iou"].mean)} ` +
        `over ${report.sample_count} slices`,
      );
    } catch (err) {
      setStatus(`evaluation failed: ${err}`, true);
    }
  };

  $("show-candidates").onclick = async () => {
    const session = state.session;
    const record = activeRecord(state);
    if (!session || !record) return;
    const seed = (Date.now() & 0xffff) >>> 0; // regenerate-on-demand
    const grid = await api.candidates(session.session_id, record.record_id, seed);
    state = showCandidates(state, grid.boxes, grid.seed);
    await render();
    setStatus(`pick one of ${grid.boxes.length} candidate boxes (click the canvas)`);
  };

  ($("viewport") as HTMLCanvasElement).onclick = async (ev) => {
    if (!state.candidates.length) return;
    const session = state.session;
    const record = activeRecord(state);
    if (!session || !record) return;
    const canvas = ev.target as HTMLCanvasElement;
    const rect = canvas.getBoundingClientRect();
    const x = Math.floor(((ev.clientX - rect.left) / rect.width) * canvas.width);
    const y = Math.floor(((ev.clientY - rect.top) / rect.height) * canvas.height);
    const byId = recordsById(state);
    const hit = state.candidates.findIndex((c) => {
      const b = record.crop_origin ? boxToSliceFrame(record, byId, c) : c;
      return x >= b.x0 && x < b.x1 && y >= b.y0 && y < b.y1;
    });
    if (hit < 0) return;
    setStatus("rectifying…");
    try {
      const { record: fixed } = await rectifyFlow(
        api,
        session.session_id,
        record.record_id,
        state.candidateSeed,
        () => hit,
      );
      state = clearCandidates(state);
      await refreshSession(session.session_id);
      state = activateRecord(state, fixed);
      await render();
      setStatus(`rectified into record ${fixed.record_id}`);
    } catch (err) {
      setStatus(`rectify failed: ${err}`, true);
    }
  };

  $("run-further").onclick = async () => {
    const session = state.session;
    const record = activeRecord(state);
    if (!session || !record) return;
    const subPrompt = ($("sub-prompt") as HTMLInputElement).value;
    setStatus("drilling into the box…");
    try {
      const { child } = await furtherFlow(api, session.session_id, record.record_id, subPrompt);
      await refreshSession(session.session_id);
      state = activateRecord(state, child);
      await render();
      setStatus(`child record ${child.record_id} in crop frame`);
    } catch (err) {
      setStatus(`further segment failed: ${err}`, true);
    }
  };

  $("export").onclick = () => {
    const session = state.session;
    if (!session) return;
    window.open(api.exportUrl(session.session_id), "_blank");
  };
}

wire();
setStatus("upload a TIFF or PNG to begin");
