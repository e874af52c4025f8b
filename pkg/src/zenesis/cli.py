"""Command-line entry points: serve, batch, eval, baseline, stub."""

from __future__ import annotations

import json
import os
import sys

import click
import numpy as np

from .adapt import AdaptConfig
from .backend import BackendDescriptor, Thresholds, make_backend
from .baselines import otsu_segment, ungrounded_segment
from .metrics import evaluate_pair_set, write_report_csv, write_report_json
from .pipeline import BatchJob, run_batch, export_session
from .refine import RefineConfig
from .session import SessionStore
from .volume import load_volume, slice_at, write_mask_stack
from .adapt import adapt_with_config, volume_clip_bounds

ENV_DATA_DIR = "ZENESIS_DATA_DIR"
ENV_REMOTE_URL = "ZENESIS_REMOTE_URL"


def _backend_descriptor(kind: str, remote_url: str | None,
                        synthetic_threshold: int | None) -> BackendDescriptor:
    # environment overrides the flag when set
    url = os.environ.get(ENV_REMOTE_URL) or remote_url
    return BackendDescriptor(kind=kind, remote_url=url,
                             synthetic_threshold=synthetic_threshold)


@click.group()
def main():
    """Text-prompted segmentation for raw scientific images and volumes."""


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8080, show_default=True, type=int)
@click.option("--data-dir", default="./zenesis-data", show_default=True)
@click.option("--backend", "backend_kind", default="synthetic", show_default=True,
              type=click.Choice(["synthetic", "remote"]))
@click.option("--remote-url", default=None, help="Model-server URL for --backend remote.")
@click.option("--synthetic-threshold", default=None, type=int,
              help="Fixed intensity threshold for the synthetic backend.")
def serve(host, port, data_dir, backend_kind, remote_url, synthetic_threshold):
    """Run the HTTP service."""
    import uvicorn

    from .server import create_app

    data_dir = os.environ.get(ENV_DATA_DIR) or data_dir
    descriptor = _backend_descriptor(backend_kind, remote_url, synthetic_threshold)
    app = create_app(data_dir, default_backend=descriptor)
    uvicorn.run(app, host=host, port=port, log_level="info")


@main.command()
@click.option("--port", default=9090, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--synthetic-threshold", default=None, type=int)
def stub(port, host, synthetic_threshold):
    """Run the wire-protocol stub server (synthetic semantics over HTTP)."""
    import uvicorn

    from .stubserver import create_stub_app

    uvicorn.run(create_stub_app(synthetic_threshold), host=host, port=port,
                log_level="info")


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--prompt", required=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--backend", "backend_kind", default="synthetic", show_default=True,
              type=click.Choice(["synthetic", "remote"]))
@click.option("--remote-url", default=None)
@click.option("--synthetic-threshold", default=None, type=int)
@click.option("--box-threshold", default=0.35, show_default=True, type=float)
@click.option("--text-threshold", default=0.25, show_default=True, type=float)
@click.option("--refine-window", default=5, show_default=True, type=int)
@click.option("--refine-factor", default=1.5, show_default=True, type=float)
@click.option("--refine-min-history", default=3, show_default=True, type=int)
@click.option("--data-dir", default=None, help="Session directory (default: temp under --out).")
def batch(input_path, prompt, out_dir, backend_kind, remote_url, synthetic_threshold,
          box_threshold, text_threshold, refine_window, refine_factor,
          refine_min_history, data_dir):
    """Batch-process a volume (mode B) and export the results."""
    os.makedirs(out_dir, exist_ok=True)
    data_dir = os.environ.get(ENV_DATA_DIR) or data_dir or os.path.join(out_dir, "sessions")
    store = SessionStore(data_dir)
    descriptor = _backend_descriptor(backend_kind, remote_url, synthetic_threshold)
    session = store.create_session(
        input_path,
        source_name=os.path.basename(input_path),
        backend_descriptor=descriptor,
    )
    job = BatchJob(
        job_id="cli",
        session_id=session.session_id,
        prompt=prompt,
        thresholds=Thresholds(box_threshold=box_threshold, text_threshold=text_threshold),
        refine_config=RefineConfig(window=refine_window, size_factor=refine_factor,
                                   min_history=refine_min_history),
    )
    run_batch(session, job)
    if job.status != "done":
        click.echo(f"batch failed: {job.error}", err=True)
        sys.exit(1)
    paths = export_session(session, out_dir)
    replaced = sum(1 for r in job.result if r["replaced"])
    click.echo(f"session {session.session_id}: {job.total} slices, "
               f"{replaced} refined replacements")
    for name, path in paths.items():
        click.echo(f"  {name}: {path}")


@main.command(name="eval")
@click.option("--pred", required=True, type=click.Path(exists=True))
@click.option("--gt", required=True, type=click.Path(exists=True))
@click.option("--report", "report_path", default=None, type=click.Path())
@click.option("--csv", "csv_path", default=None, type=click.Path())
@click.option("--empty-zero", is_flag=True,
              help="Score empty-vs-empty slices as 0 instead of 1.")
def eval_cmd(pred, gt, report_path, csv_path, empty_zero):
    """Evaluate predictions against ground truth (mode C)."""
    report = evaluate_pair_set(pred, gt, empty_value=0.0 if empty_zero else 1.0)
    for name, (mean, std) in report.aggregate.items():
        click.echo(f"{name}: {mean:.4f}±{std:.4f}")
    if report_path:
        write_report_json(report, report_path)
        click.echo(f"report: {report_path}")
    if csv_path:
        write_report_csv(report, csv_path)
        click.echo(f"csv: {csv_path}")


@main.command()
@click.option("--method", required=True, type=click.Choice(["otsu", "ungrounded"]))
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--synthetic-threshold", default=None, type=int,
              help="Backend threshold for --method ungrounded.")
def baseline(method, input_path, out_dir, synthetic_threshold):
    """Run a classical baseline over every slice and export the mask stack."""
    os.makedirs(out_dir, exist_ok=True)
    volume = load_volume(input_path)
    cfg = AdaptConfig()
    bounds = volume_clip_bounds(volume, cfg)
    backend = make_backend(BackendDescriptor(synthetic_threshold=synthetic_threshold))
    masks = []
    for i in range(volume.depth):
        image = adapt_with_config(slice_at(volume, i), cfg, bounds)
        if method == "otsu":
            masks.append(otsu_segment(image).bits)
        else:
            masks.append(ungrounded_segment(image, backend).mask.bits)
    mask_path = os.path.join(out_dir, f"{method}-masks.tif")
    write_mask_stack(masks, mask_path)
    meta = {
        "method": method,
        "input": os.path.abspath(input_path),
        "depth": volume.depth,
        "foreground_px": [int(np.sum(m)) for m in masks],
    }
    with open(os.path.join(out_dir, f"{method}-summary.json"), "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
    click.echo(f"{method}: {volume.depth} slices -> {mask_path}")


if __name__ == "__main__":
    main()
