"""The three processing modes over a session.

Interactive (mode A) segments one slice. Batch (mode B) detects every slice
on a worker pool, runs the sequential refinement pass, then segments the
accepted boxes; outputs are deterministic for fixed inputs because records
are appended in slice order. Evaluation (mode C) scores stored or uploaded
masks against ground truth.
"""

from __future__ import annotations

import os
import threading
import uuid
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .backend.base import Detection, Thresholds
from .errors import CountMismatch
from .mask import Mask
from .metrics import (
    MetricsReport,
    _load_mask_source,
    evaluate_mask_pairs,
    write_report_csv,
)
from .records import SegmentationRecord
from .refine import RefineConfig, refine_sequence
from .session import Session
from .volume import write_mask_stack

JOB_QUEUED = "queued"
JOB_RUNNING = "running"
JOB_DONE = "done"
JOB_FAILED = "failed"

_STATUS_ORDER = {JOB_QUEUED: 0, JOB_RUNNING: 1, JOB_DONE: 2, JOB_FAILED: 2}


def run_interactive(session: Session, slice_index: int, prompt: str,
                    thresholds: Thresholds) -> SegmentationRecord:
    """Mode A: detect-and-segment one slice, persist the record."""
    image = session.adapted_slice(slice_index)
    record = session.backend.detect_and_segment(image, prompt, thresholds)
    record.slice_index = slice_index
    return session.add_record(record)


@dataclass
class BatchJob:
    job_id: str
    session_id: str
    prompt: str
    thresholds: Thresholds
    refine_config: RefineConfig
    status: str = JOB_QUEUED
    total: int = 0
    completed: int = 0
    result: list[dict] = field(default_factory=list)
    error: str | None = None
    _cancel: threading.Event = field(default_factory=threading.Event, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def to_dict(self) -> dict:
        with self._lock:
            return {
                "job_id": self.job_id,
                "session_id": self.session_id,
                "prompt": self.prompt,
                "thresholds": self.thresholds.to_dict(),
                "refine": self.refine_config.to_dict(),
                "status": self.status,
                "total": self.total,
                "completed": self.completed,
                "result": list(self.result),
                "error": self.error,
            }

    def _advance(self, status: str) -> None:
        # transitions only move forward
        with self._lock:
            if _STATUS_ORDER[status] >= _STATUS_ORDER[self.status]:
                self.status = status

    def cancel(self) -> None:
        self._cancel.set()
        with self._lock:
            if self.status == JOB_QUEUED:
                self.status = JOB_FAILED
                self.error = "cancelled"


def run_batch(session: Session, job: BatchJob, max_workers: int | None = None) -> BatchJob:
    """Mode B body. Detection and segmentation fan out; refinement is one
    ordered pass. Partial results are retained on failure."""
    if job._cancel.is_set():
        job._advance(JOB_FAILED)
        job.error = job.error or "cancelled"
        session.record_job(job.to_dict())
        return job
    job._advance(JOB_RUNNING)
    backend = session.backend
    try:
        depth = session.volume().depth
        dims = (session.volume().width, session.volume().height)
        job.total = depth
        workers = max_workers or min(8, os.cpu_count() or 1)
        images = [session.adapted_slice(i) for i in range(depth)]

        def detect_top(image) -> Detection | None:
            found = backend.detect(image, job.prompt, job.thresholds)
            return found[0] if found else None

        with ThreadPoolExecutor(max_workers=workers) as pool:
            tops = list(pool.map(detect_top, images))
            if job._cancel.is_set():
                raise _Cancelled()
            refined = refine_sequence(tops, job.refine_config, dims)

            def segment_slice(args):
                index, outcome = args
                if outcome is None:
                    return index, None, False
                box, replaced = outcome
                return index, backend.segment(images[index], box), replaced

            segmented = list(pool.map(segment_slice, enumerate(refined)))

        for index, mask, replaced in segmented:
            if job._cancel.is_set():
                raise _Cancelled()
            outcome = refined[index]
            if outcome is None:
                record = SegmentationRecord(
                    slice_index=index,
                    prompt=job.prompt,
                    box=None,
                    mask=Mask.empty(dims[0], dims[1]),
                    provenance="auto-empty",
                    extra={"job_id": job.job_id},
                )
            else:
                box, _ = outcome
                record = SegmentationRecord(
                    slice_index=index,
                    prompt=job.prompt,
                    box=box,
                    mask=mask,
                    provenance="refined" if replaced else "auto",
                    extra={"job_id": job.job_id, "replaced": replaced},
                )
            stored = session.add_record(record)
            with job._lock:
                job.result.append({
                    "slice_index": index,
                    "record_id": stored.record_id,
                    "replaced": bool(outcome is not None and replaced),
                    "has_box": outcome is not None,
                })
                job.completed += 1
        job._advance(JOB_DONE)
    except _Cancelled:
        job._advance(JOB_FAILED)
        job.error = "cancelled"
    except Exception as exc:  # partial results retained, error surfaced
        job._advance(JOB_FAILED)
        job.error = f"{type(exc).__name__}: {exc}"
    session.record_job(job.to_dict())
    return job


class _Cancelled(Exception):
    pass


class JobManager:
    """Owns batch jobs and their worker threads."""

    def __init__(self, max_workers: int | None = None):
        self.max_workers = max_workers
        self._jobs: dict[str, BatchJob] = {}
        self._threads: dict[str, threading.Thread] = {}
        self._lock = threading.Lock()

    def submit(self, session: Session, prompt: str, thresholds: Thresholds,
               refine_config: RefineConfig, background: bool = True) -> BatchJob:
        job = BatchJob(
            job_id=uuid.uuid4().hex[:12],
            session_id=session.session_id,
            prompt=prompt,
            thresholds=thresholds,
            refine_config=refine_config,
        )
        with self._lock:
            self._jobs[job.job_id] = job
        if background:
            thread = threading.Thread(
                target=run_batch, args=(session, job, self.max_workers), daemon=True
            )
            with self._lock:
                self._threads[job.job_id] = thread
            thread.start()
        else:
            run_batch(session, job, self.max_workers)
        return job

    def get(self, job_id: str) -> BatchJob | None:
        with self._lock:
            return self._jobs.get(job_id)

    def cancel(self, job_id: str) -> BatchJob | None:
        job = self.get(job_id)
        if job is not None:
            job.cancel()
        return job

    def wait(self, job_id: str, timeout: float | None = None) -> BatchJob | None:
        with self._lock:
            thread = self._threads.get(job_id)
        if thread is not None:
            thread.join(timeout)
        return self.get(job_id)


def session_prediction_masks(session: Session) -> list[Mask]:
    """Latest full-frame mask per slice; slices never segmented predict
    empty."""
    vol = session.volume()
    latest = session.latest_full_frame_records()
    masks = []
    for i in range(vol.depth):
        rec = latest.get(i)
        masks.append(rec.mask if rec else Mask.empty(vol.width, vol.height))
    return masks


def evaluate_session(session: Session, gt_source: str,
                     empty_value: float = 1.0) -> MetricsReport:
    """Mode C against a session's stored masks."""
    preds = session_prediction_masks(session)
    gts = _load_mask_source(os.fspath(gt_source))
    if len(preds) != len(gts):
        raise CountMismatch(f"{len(preds)} session slices vs {len(gts)} ground truth")
    report = evaluate_mask_pairs(list(zip(preds, gts)), empty_value)
    session.record_report(report.to_dict())
    return report


def export_session(session: Session, out_dir: str) -> dict[str, str]:
    """Mask stack (1-bit multi-page TIFF), per-slice manifest, and the last
    evaluation as CSV when present. Exported masks reload bit-exact."""
    os.makedirs(out_dir, exist_ok=True)
    vol = session.volume()
    latest = session.latest_full_frame_records()
    masks = session_prediction_masks(session)
    mask_path = os.path.join(out_dir, "masks.tif")
    write_mask_stack([m.bits for m in masks], mask_path)

    manifest = {
        "session_id": session.session_id,
        "source_name": session.source_name,
        "depth": vol.depth,
        "slices": [],
    }
    for i in range(vol.depth):
        rec = latest.get(i)
        manifest["slices"].append({
            "slice_index": i,
            "record_id": rec.record_id if rec else None,
            "provenance": rec.provenance if rec else "none",
            "box": rec.box.to_dict() if rec and rec.box else None,
            "prompt": rec.prompt if rec else None,
        })
    manifest_path = os.path.join(out_dir, "manifest.json")
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    paths = {"masks": mask_path, "manifest": manifest_path}

    if session.last_report is not None:
        report = _report_from_dict(session.last_report)
        csv_path = os.path.join(out_dir, "metrics.csv")
        write_report_csv(report, csv_path)
        paths["metrics"] = csv_path
    return paths


def _report_from_dict(d: dict) -> MetricsReport:
    from .metrics import SliceMetrics

    per_slice = [
        SliceMetrics(
            slice_index=int(row["slice"]),
            accuracy=float(row["accuracy"]),
            iou=float(row["iou"]),
            dice=float(row["dice"]),
        )
        for row in d["per_slice"]
    ]
    aggregate = {
        name: (float(v["mean"]), float(v["std"]))
        for name, v in d["aggregate"].items()
    }
    return MetricsReport(per_slice=per_slice, aggregate=aggregate,
                         sample_count=int(d["sample_count"]))
