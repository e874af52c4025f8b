"""Sessions: one uploaded volume, its configuration, and an append-only
record history persisted as a newline-delimited JSON event log.

A session directory holds the uploaded file and events.ndjson; replaying the
log reconstructs the exact session state (same record ids, same mask bytes).
Mutations are serialized by a per-session lock; reads are safe concurrently.
"""

from __future__ import annotations

import datetime as dt
import json
import os
import shutil
import threading
import uuid
from dataclasses import dataclass, field

from .adapt import AdaptConfig, Image8, adapt_with_config, volume_clip_bounds
from .backend import BackendDescriptor, SegmentationBackend, make_backend
from .errors import UnknownRecord, UnknownSession, ZenesisError
from .records import SegmentationRecord
from .volume import Volume, VolumeMeta, load_volume, volume_info

EVENTS_FILE = "events.ndjson"


def _now() -> str:
    return dt.datetime.now(dt.timezone.utc).isoformat()


@dataclass
class Session:
    session_id: str
    directory: str
    volume_file: str  # path of the stored upload
    source_name: str
    adapt_config: AdaptConfig
    backend_descriptor: BackendDescriptor
    created_at: str = field(default_factory=_now)
    updated_at: str = field(default_factory=_now)
    records: dict[int, SegmentationRecord] = field(default_factory=dict)
    accepted_boxes: dict[int, dict] = field(default_factory=dict)  # slice -> box dict
    jobs: dict[str, dict] = field(default_factory=dict)
    last_report: dict | None = None
    lock: threading.RLock = field(default_factory=threading.RLock, repr=False)

    _next_record_id: int = 1
    _volume: Volume | None = field(default=None, repr=False)
    _bounds: tuple[float, float] | None = field(default=None, repr=False)
    _adapted: dict[int, Image8] = field(default_factory=dict, repr=False)
    _backend: SegmentationBackend | None = field(default=None, repr=False)

    # -- state access ------------------------------------------------------

    def volume(self) -> Volume:
        with self.lock:
            if self._volume is None:
                self._volume = load_volume(self.volume_file)
            return self._volume

    def meta(self) -> VolumeMeta:
        return volume_info(self.volume())

    @property
    def backend(self) -> SegmentationBackend:
        with self.lock:
            if self._backend is None:
                self._backend = make_backend(self.backend_descriptor)
            return self._backend

    def adapted_slice(self, index: int) -> Image8:
        """Backend-ready slice, cached; per-volume clip bounds by default."""
        with self.lock:
            if index in self._adapted:
                return self._adapted[index]
        vol = self.volume()
        from .volume import slice_at  # local import keeps module load light

        if self.adapt_config.scope == "per-volume":
            with self.lock:
                if self._bounds is None:
                    self._bounds = volume_clip_bounds(vol, self.adapt_config)
                bounds = self._bounds
        else:
            bounds = None
        image = adapt_with_config(slice_at(vol, index), self.adapt_config, bounds)
        with self.lock:
            if len(self._adapted) > 256:
                self._adapted.clear()
            self._adapted[index] = image
        return image

    def get_record(self, record_id: int) -> SegmentationRecord:
        try:
            return self.records[record_id]
        except KeyError:
            raise UnknownRecord(f"no record {record_id} in session {self.session_id}") from None

    def image_for_record(self, record: SegmentationRecord) -> Image8:
        """The image in the record's own frame: the adapted slice, or the
        crop the record was produced in (mask dims define the frame)."""
        full = self.adapted_slice(record.slice_index)
        if record.crop_origin is None:
            return full
        from .hitl import _chain_offset

        dx, dy = _chain_offset(record, self.get_record)
        return full.crop(dx, dy, dx + record.mask.width, dy + record.mask.height)

    def latest_full_frame_records(self) -> dict[int, SegmentationRecord]:
        """Most recent full-slice record per slice index (children excluded)."""
        latest: dict[int, SegmentationRecord] = {}
        for rid in sorted(self.records):
            rec = self.records[rid]
            if rec.crop_origin is None:
                latest[rec.slice_index] = rec
        return latest

    # -- mutation ----------------------------------------------------------

    def add_record(self, record: SegmentationRecord) -> SegmentationRecord:
        with self.lock:
            record.record_id = self._next_record_id
            self._next_record_id += 1
            self.records[record.record_id] = record
            self._apply_record_side_effects(record)
            self._append_event({"type": "record_added", "record": record.to_dict()})
            self.updated_at = _now()
        return record

    def _apply_record_side_effects(self, record: SegmentationRecord) -> None:
        # full-frame boxes feed the refinement history used by batch re-runs
        if record.crop_origin is None and record.box is not None:
            self.accepted_boxes[record.slice_index] = record.box.to_dict()

    def record_job(self, job: dict) -> None:
        with self.lock:
            self.jobs[job["job_id"]] = dict(job)
            self._append_event({"type": "job_update", "job": dict(job)})
            self.updated_at = _now()

    def record_report(self, report: dict) -> None:
        with self.lock:
            self.last_report = report
            self._append_event({"type": "evaluation", "report": report})
            self.updated_at = _now()

    def _append_event(self, event: dict) -> None:
        event = {"at": _now(), **event}
        path = os.path.join(self.directory, EVENTS_FILE)
        with open(path, "a") as fh:
            fh.write(json.dumps(event, separators=(",", ":")) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    # -- serialization -----------------------------------------------------

    def to_dict(self, include_records: bool = True) -> dict:
        out = {
            "session_id": self.session_id,
            "source_name": self.source_name,
            "meta": self.meta().to_dict(),
            "adapt": self.adapt_config.to_dict(),
            "backend": self.backend_descriptor.to_dict(),
            "created_at": self.created_at,
            "updated_at": self.updated_at,
            "record_count": len(self.records),
        }
        if include_records:
            out["records"] = [self.records[rid].to_dict() for rid in sorted(self.records)]
        return out


class SessionStore:
    """Directory-backed registry of sessions."""

    def __init__(self, data_dir: str):
        self.data_dir = os.fspath(data_dir)
        os.makedirs(self.data_dir, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create_session(self, upload_path: str, source_name: str,
                       adapt_config: AdaptConfig = AdaptConfig(),
                       backend_descriptor: BackendDescriptor = BackendDescriptor(),
                       move: bool = False) -> Session:
        """Register a new session around an already-staged upload file. The
        file is validated by loading it before any state is persisted."""
        session_id = uuid.uuid4().hex[:12]
        directory = os.path.join(self.data_dir, session_id)
        os.makedirs(directory)
        ext = os.path.splitext(source_name)[1].lower() or ".tif"
        stored = os.path.join(directory, f"volume{ext}")
        try:
            if move:
                shutil.move(upload_path, stored)
            else:
                shutil.copyfile(upload_path, stored)
            load_volume(stored)  # validate before persisting the session
        except ZenesisError:
            shutil.rmtree(directory, ignore_errors=True)
            raise
        session = Session(
            session_id=session_id,
            directory=directory,
            volume_file=stored,
            source_name=source_name,
            adapt_config=adapt_config,
            backend_descriptor=backend_descriptor,
        )
        session._append_event({
            "type": "session_created",
            "session_id": session_id,
            "volume_file": os.path.basename(stored),
            "source_name": source_name,
            "adapt": adapt_config.to_dict(),
            "backend": backend_descriptor.to_dict(),
            "created_at": session.created_at,
        })
        with self._lock:
            self._sessions[session_id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            if session_id in self._sessions:
                return self._sessions[session_id]
        session = self.replay(session_id)
        with self._lock:
            self._sessions.setdefault(session_id, session)
            return self._sessions[session_id]

    def ids(self) -> list[str]:
        on_disk = [
            name for name in sorted(os.listdir(self.data_dir))
            if os.path.isfile(os.path.join(self.data_dir, name, EVENTS_FILE))
        ]
        return on_disk

    def replay(self, session_id: str) -> Session:
        """Rebuild a session purely from its event log."""
        directory = os.path.join(self.data_dir, session_id)
        path = os.path.join(directory, EVENTS_FILE)
        if not os.path.isfile(path):
            raise UnknownSession(session_id)
        session: Session | None = None
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                event = json.loads(line)
                kind = event["type"]
                if kind == "session_created":
                    session = Session(
                        session_id=event["session_id"],
                        directory=directory,
                        volume_file=os.path.join(directory, event["volume_file"]),
                        source_name=event.get("source_name", ""),
                        adapt_config=AdaptConfig.from_dict(event["adapt"]),
                        backend_descriptor=BackendDescriptor.from_dict(event["backend"]),
                        created_at=event.get("created_at", event["at"]),
                        updated_at=event["at"],
                    )
                elif session is None:
                    raise ZenesisError(f"event log of {session_id} missing creation event")
                elif kind == "record_added":
                    record = SegmentationRecord.from_dict(event["record"])
                    session.records[record.record_id] = record
                    session._next_record_id = max(session._next_record_id,
                                                  record.record_id + 1)
                    session._apply_record_side_effects(record)
                    session.updated_at = event["at"]
                elif kind == "job_update":
                    session.jobs[event["job"]["job_id"]] = event["job"]
                    session.updated_at = event["at"]
                elif kind == "evaluation":
                    session.last_report = event["report"]
                    session.updated_at = event["at"]
        if session is None:
            raise ZenesisError(f"event log of {session_id} is empty")
        return session
