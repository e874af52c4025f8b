import type { Box, RecordDto, ReportDto, SessionState } from "./types.js";

export type OverlayMode = "mask-fill" | "boundary";

/**
 * Everything the view needs to render. The server is authoritative: this
 * state is derivable from server state plus local view preferences, so a
 * refresh that replays `setSession` reproduces the same view.
 */
export interface ViewState {
  session: SessionState | null;
  currentSlice: number;
  activeRecordId: number | null;
  overlayMode: OverlayMode;
  candidates: Box[];
  candidateSeed: number;
  /** record ids from slice-frame root to the deepest crop */
  breadcrumbs: number[];
  report: ReportDto | null;
}

export function initialState(): ViewState {
  return {
    session: null,
    currentSlice: 0,
    activeRecordId: null,
    overlayMode: "mask-fill",
    candidates: [],
    candidateSeed: 0,
    breadcrumbs: [],
    report: null,
  };
}

export function recordsById(state: ViewState): Map<number, RecordDto> {
  const map = new Map<number, RecordDto>();
  for (const rec of state.session?.records ?? []) {
    map.set(rec.record_id, rec);
  }
  return map;
}

export function setSession(state: ViewState, session: SessionState): ViewState {
  const keepSlice = Math.min(state.currentSlice, Math.max(session.meta.depth - 1, 0));
  return { ...state, session, currentSlice: keepSlice };
}

export function selectSlice(state: ViewState, slice: number): ViewState {
  const depth = state.session?.meta.depth ?? 1;
  const bounded = Math.min(Math.max(slice, 0), depth - 1);
  // slice navigation leaves any crop drill-down
  return { ...state, currentSlice: bounded, activeRecordId: latestRecordIdForSlice(state, bounded), breadcrumbs: [], candidates: [] };
}

export function latestRecordIdForSlice(state: ViewState, slice: number): number | null {
  let latest: number | null = null;
  for (const rec of state.session?.records ?? []) {
    if (rec.slice_index === slice && rec.crop_origin === null) {
      if (latest === null || rec.record_id > latest) latest = rec.record_id;
    }
  }
  return latest;
}

export function activateRecord(state: ViewState, record: RecordDto): ViewState {
  const breadcrumbs = record.crop_origin ? [...state.breadcrumbs, record.record_id]
    : [record.record_id];
  return {
    ...state,
    currentSlice: record.slice_index,
    activeRecordId: record.record_id,
    breadcrumbs,
    candidates: [],
  };
}

export function setOverlayMode(state: ViewState, mode: OverlayMode): ViewState {
  return { ...state, overlayMode: mode };
}

export function showCandidates(state: ViewState, boxes: Box[], seed: number): ViewState {
  return { ...state, candidates: boxes, candidateSeed: seed };
}

export function clearCandidates(state: ViewState): ViewState {
  return { ...state, candidates: [] };
}

export function popBreadcrumb(state: ViewState): ViewState {
  if (state.breadcrumbs.length <= 1) return state;
  const breadcrumbs = state.breadcrumbs.slice(0, -1);
  return {
    ...state,
    breadcrumbs,
    activeRecordId: breadcrumbs[breadcrumbs.length - 1] ?? null,
    candidates: [],
  };
}

export function setReport(state: ViewState, report: ReportDto): ViewState {
  return { ...state, report };
}

export function activeRecord(state: ViewState): RecordDto | null {
  if (state.activeRecordId === null) return null;
  return recordsById(state).get(state.activeRecordId) ?? null;
}
