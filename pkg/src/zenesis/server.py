"""HTTP service: sessions, the three modes, HITL endpoints, and export.

All routes live under /api/v1. Session mutations are serialized per session;
batch jobs run on background threads with observable progress.
"""

from __future__ import annotations

import io
import os
import tempfile
import zipfile

import numpy as np
from fastapi import FastAPI, File, Form, Request, UploadFile
from fastapi.responses import FileResponse, JSONResponse, Response
from PIL import Image as PILImage

from .adapt import AdaptConfig
from .backend import BackendDescriptor, Thresholds
from .errors import (
    BackendUnavailable,
    CountMismatch,
    DegenerateBox,
    DimensionMismatch,
    EmptyInput,
    EmptyPrompt,
    IndexOutOfRange,
    NoParentBox,
    UnknownRecord,
    UnknownSession,
    UnreadableFile,
    UnsupportedLayout,
    ZenesisError,
)
from .geometry import BBox
from .hitl import further_segment, propose_random_boxes, rectify
from .metrics import evaluate_pair_set
from .pipeline import (
    JobManager,
    evaluate_session,
    export_session,
    run_interactive,
)
from .refine import RefineConfig
from .session import SessionStore

MAX_UPLOAD_BYTES = 2 * 1024**3  # streaming cap
_UPLOAD_CHUNK = 4 * 1024**2

_ERROR_CODES = {
    UnknownSession: 404,
    UnknownRecord: 404,
    UnreadableFile: 400,
    UnsupportedLayout: 400,
    IndexOutOfRange: 400,
    EmptyPrompt: 400,
    EmptyInput: 400,
    DegenerateBox: 400,
    NoParentBox: 400,
    DimensionMismatch: 400,
    CountMismatch: 400,
    BackendUnavailable: 502,
}


def _status_for(exc: ZenesisError) -> int:
    for klass, code in _ERROR_CODES.items():
        if isinstance(exc, klass):
            return code
    return 400


def create_app(data_dir: str,
               default_backend: BackendDescriptor = BackendDescriptor(),
               max_workers: int | None = None) -> FastAPI:
    app = FastAPI(title="zenesis", docs_url=None, redoc_url=None)
    store = SessionStore(data_dir)
    jobs = JobManager(max_workers=max_workers)
    app.state.store = store
    app.state.jobs = jobs

    @app.exception_handler(ZenesisError)
    async def zenesis_error_handler(request: Request, exc: ZenesisError):
        return JSONResponse(status_code=_status_for(exc), content={"error": str(exc)})

    @app.exception_handler(ValueError)
    async def value_error_handler(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    def get_session(session_id: str):
        return store.get(session_id)

    # -- sessions --------------------------------------------------------

    @app.post("/api/v1/sessions")
    def create_session(
        file: UploadFile = File(...),
        backend: str = Form(None),
        remote_url: str = Form(None),
        synthetic_threshold: int = Form(None),
        clip_lo: float = Form(0.005),
        clip_hi: float = Form(0.995),
        scope: str = Form("per-volume"),
    ):
        if backend is None:
            descriptor = default_backend
        else:
            descriptor = BackendDescriptor(
                kind=backend,
                remote_url=remote_url or default_backend.remote_url,
                synthetic_threshold=synthetic_threshold,
            )
        adapt_cfg = AdaptConfig(clip_lo_percentile=clip_lo,
                                clip_hi_percentile=clip_hi, scope=scope)
        total = 0
        with tempfile.NamedTemporaryFile(delete=False, dir=store.data_dir) as tmp:
            while True:
                chunk = file.file.read(_UPLOAD_CHUNK)
                if not chunk:
                    break
                total += len(chunk)
                if total > MAX_UPLOAD_BYTES:
                    tmp.close()
                    os.unlink(tmp.name)
                    return JSONResponse(status_code=413,
                                        content={"error": "upload exceeds 2 GiB cap"})
                tmp.write(chunk)
            staged = tmp.name
        try:
            session = store.create_session(
                staged,
                source_name=file.filename or "upload",
                adapt_config=adapt_cfg,
                backend_descriptor=descriptor,
                move=True,
            )
        finally:
            if os.path.exists(staged):
                os.unlink(staged)
        return {"session_id": session.session_id, "meta": session.meta().to_dict()}

    @app.get("/api/v1/sessions/{session_id}")
    def get_session_state(session_id: str, records: bool = True):
        return get_session(session_id).to_dict(include_records=records)

    @app.get("/api/v1/sessions/{session_id}/records/{record_id}")
    def get_record(session_id: str, record_id: int):
        return get_session(session_id).get_record(record_id).to_dict()

    @app.get("/api/v1/sessions/{session_id}/preview")
    def preview(session_id: str, slice: int = 0, scale: float = 1.0):
        if not 0.0 < scale <= 1.0:
            return JSONResponse(status_code=400,
                                content={"error": "scale must be in (0, 1]"})
        image = get_session(session_id).adapted_slice(slice)
        pixels = image.pixels
        if scale < 1.0:
            out_w = max(1, round(image.width * scale))
            out_h = max(1, round(image.height * scale))
            ys = (np.arange(out_h) * image.height // out_h).astype(int)
            xs = (np.arange(out_w) * image.width // out_w).astype(int)
            pixels = pixels[ys][:, xs]
        buf = io.BytesIO()
        PILImage.fromarray(pixels, "RGB").save(buf, format="PNG")
        return Response(content=buf.getvalue(), media_type="image/png")

    # -- mode A ----------------------------------------------------------

    @app.post("/api/v1/sessions/{session_id}/segment")
    async def mode_a(session_id: str, request: Request):
        body = await request.json()
        session = get_session(session_id)
        record = run_interactive(
            session,
            slice_index=int(body.get("slice_index", 0)),
            prompt=str(body.get("prompt", "")),
            thresholds=Thresholds.from_dict(body),
        )
        return record.to_dict()

    # -- mode B ----------------------------------------------------------

    @app.post("/api/v1/sessions/{session_id}/batch")
    async def mode_b(session_id: str, request: Request):
        body = await request.json()
        session = get_session(session_id)
        prompt = str(body.get("prompt", ""))
        if not prompt.strip():
            raise EmptyPrompt("batch requires a prompt")
        job = jobs.submit(
            session,
            prompt=prompt,
            thresholds=Thresholds.from_dict(body),
            refine_config=RefineConfig(
                window=int(body.get("refine_window", 5)),
                size_factor=float(body.get("refine_factor", 1.5)),
                min_history=int(body.get("refine_min_history", 3)),
            ),
        )
        return {"job_id": job.job_id, "status": job.status}

    @app.get("/api/v1/jobs/{job_id}")
    def get_job(job_id: str):
        job = jobs.get(job_id)
        if job is not None:
            return job.to_dict()
        for sid in store.ids():  # finished jobs survive restarts in the log
            session = store.get(sid)
            if job_id in session.jobs:
                return session.jobs[job_id]
        return JSONResponse(status_code=404, content={"error": f"no job {job_id}"})

    @app.post("/api/v1/jobs/{job_id}/cancel")
    def cancel_job(job_id: str):
        job = jobs.cancel(job_id)
        if job is None:
            return JSONResponse(status_code=404, content={"error": f"no job {job_id}"})
        return job.to_dict()

    # -- HITL ------------------------------------------------------------

    @app.post("/api/v1/sessions/{session_id}/records/{record_id}/candidates")
    async def candidates(session_id: str, record_id: int, request: Request):
        body = await request.json() if await _has_body(request) else {}
        session = get_session(session_id)
        record = session.get_record(record_id)
        image = session.image_for_record(record)
        seed = int(body.get("seed", 0))
        count = int(body.get("count", 8))
        cand = propose_random_boxes((image.width, image.height), count, seed)
        return {
            "seed": cand.seed,
            "count": cand.count,
            "boxes": [b.to_dict() for b in cand.boxes],
        }

    @app.post("/api/v1/sessions/{session_id}/records/{record_id}/rectify")
    async def rectify_record(session_id: str, record_id: int, request: Request):
        body = await request.json()
        session = get_session(session_id)
        record = rectify(session, record_id, BBox.from_dict(body["box"]))
        return record.to_dict()

    @app.post("/api/v1/sessions/{session_id}/records/{record_id}/further")
    async def further_record(session_id: str, record_id: int, request: Request):
        body = await request.json()
        session = get_session(session_id)
        record = further_segment(
            session,
            record_id,
            sub_prompt=str(body.get("prompt", "")),
            thresholds=Thresholds.from_dict(body),
        )
        return record.to_dict()

    # -- mode C ----------------------------------------------------------

    @app.post("/api/v1/evaluate")
    async def mode_c(request: Request):
        body = await request.json()
        gt = body.get("gt_path")
        if not gt:
            return JSONResponse(status_code=400, content={"error": "gt_path required"})
        if not os.path.exists(gt):
            return JSONResponse(status_code=404,
                                content={"error": f"ground truth not found: {gt}"})
        empty_value = 0.0 if body.get("empty_zero") else 1.0
        if body.get("session_id"):
            session = get_session(body["session_id"])
            report = evaluate_session(session, gt, empty_value)
        elif body.get("pred_path"):
            report = evaluate_pair_set(body["pred_path"], gt, empty_value)
        else:
            return JSONResponse(status_code=400,
                                content={"error": "session_id or pred_path required"})
        return report.to_dict()

    # -- export ----------------------------------------------------------

    @app.get("/api/v1/sessions/{session_id}/export")
    def export(session_id: str):
        session = get_session(session_id)
        out_dir = os.path.join(session.directory, "exports")
        paths = export_session(session, out_dir)
        zip_path = os.path.join(out_dir, "export.zip")
        with zipfile.ZipFile(zip_path, "w") as zf:
            for name, path in paths.items():
                zf.write(path, arcname=os.path.basename(path))
        return FileResponse(zip_path, media_type="application/zip",
                            filename=f"{session_id}-export.zip")

    @app.get("/healthz")
    def healthz():
        return {"ok": True}

    return app


async def _has_body(request: Request) -> bool:
    body = await request.body()
    return bool(body)
