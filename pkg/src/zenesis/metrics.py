"""Confusion-based segmentation metrics and the evaluation entry points.

accuracy = (tp+tn)/n, iou = tp/(tp+fp+fn), dice = 2tp/(2tp+fp+fn).
When both masks are empty, iou and dice are 1 by default (an exactly correct
empty prediction scores perfectly); pass empty_value=0.0 to disable.
Aggregates report mean and sample (n-1) standard deviation.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import CountMismatch, DimensionMismatch, EmptyInput, UnreadableFile
from .mask import Mask
from .volume import load_mask_stack, load_volume

METRIC_NAMES = ("accuracy", "iou", "dice")


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    fn: int
    tn: int

    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def confusion(pred: Mask, gt: Mask) -> Confusion:
    if (pred.width, pred.height) != (gt.width, gt.height):
        raise DimensionMismatch(
            f"pred {pred.width}x{pred.height} vs gt {gt.width}x{gt.height}"
        )
    p, g = pred.bits, gt.bits
    tp = int(np.count_nonzero(p & g))
    fp = int(np.count_nonzero(p & ~g))
    fn = int(np.count_nonzero(~p & g))
    tn = p.size - tp - fp - fn
    return Confusion(tp=tp, fp=fp, fn=fn, tn=tn)


def accuracy(c: Confusion) -> float:
    return (c.tp + c.tn) / c.total()


def iou(c: Confusion, empty_value: float = 1.0) -> float:
    denom = c.tp + c.fp + c.fn
    if denom == 0:
        return empty_value
    return c.tp / denom


def dice(c: Confusion, empty_value: float = 1.0) -> float:
    denom = 2 * c.tp + c.fp + c.fn
    if denom == 0:
        return empty_value
    return 2 * c.tp / denom


@dataclass(frozen=True)
class SliceMetrics:
    slice_index: int
    accuracy: float
    iou: float
    dice: float

    def value(self, name: str) -> float:
        return getattr(self, name)


@dataclass
class MetricsReport:
    per_slice: list[SliceMetrics]
    aggregate: dict[str, tuple[float, float]]  # metric -> (mean, sample std)
    sample_count: int

    def to_dict(self) -> dict:
        return {
            "per_slice": [
                {
                    "slice": m.slice_index,
                    "accuracy": m.accuracy,
                    "iou": m.iou,
                    "dice": m.dice,
                }
                for m in self.per_slice
            ],
            "aggregate": {
                name: {"mean": mean, "std": std}
                for name, (mean, std) in self.aggregate.items()
            },
            "sample_count": self.sample_count,
        }


def _mean_std(values: list[float]) -> tuple[float, float]:
    # fsum keeps aggregation exactly permutation-invariant
    n = len(values)
    mean = math.fsum(values) / n
    if n == 1:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var)


def aggregate(per_slice: list[SliceMetrics]) -> MetricsReport:
    if not per_slice:
        raise EmptyInput("no per-slice metrics to aggregate")
    agg = {
        name: _mean_std([m.value(name) for m in per_slice])
        for name in METRIC_NAMES
    }
    return MetricsReport(per_slice=list(per_slice), aggregate=agg,
                         sample_count=len(per_slice))


def slice_metrics(index: int, pred: Mask, gt: Mask,
                  empty_value: float = 1.0) -> SliceMetrics:
    c = confusion(pred, gt)
    return SliceMetrics(
        slice_index=index,
        accuracy=accuracy(c),
        iou=iou(c, empty_value),
        dice=dice(c, empty_value),
    )


def evaluate_mask_pairs(pairs: list[tuple[Mask, Mask]],
                        empty_value: float = 1.0) -> MetricsReport:
    per_slice = []
    for i, (pred, gt) in enumerate(pairs):
        try:
            per_slice.append(slice_metrics(i, pred, gt, empty_value))
        except DimensionMismatch as exc:
            raise DimensionMismatch(f"slice {i}: {exc}") from exc
    return aggregate(per_slice)


def _read_mask_file(path: str) -> list[Mask]:
    if path.lower().endswith((".tif", ".tiff")):
        # direct read admits 1-bit/bool mask stacks that are not valid volumes
        return [Mask.from_array(m) for m in load_mask_stack(path)]
    vol = load_volume(path)
    return [Mask.from_array((vol.pixels[i] != 0).any(axis=2)) for i in range(vol.depth)]


def _load_mask_source(path: str) -> list[Mask]:
    """A directory of index-aligned mask files (sorted by name) or one
    multi-page stack. Any nonzero sample counts as foreground."""
    if os.path.isdir(path):
        names = sorted(
            n for n in os.listdir(path)
            if n.lower().endswith((".tif", ".tiff", ".png"))
        )
        if not names:
            raise UnreadableFile(f"no mask files in {path}")
        masks = []
        for name in names:
            masks.extend(_read_mask_file(os.path.join(path, name)))
        return masks
    return _read_mask_file(path)


def evaluate_pair_set(pred_source: str, gt_source: str,
                      empty_value: float = 1.0) -> MetricsReport:
    """Per-slice metrics plus aggregate for two aligned mask sources."""
    preds = _load_mask_source(os.fspath(pred_source))
    gts = _load_mask_source(os.fspath(gt_source))
    if len(preds) != len(gts):
        raise CountMismatch(f"{len(preds)} prediction slices vs {len(gts)} ground truth")
    return evaluate_mask_pairs(list(zip(preds, gts)), empty_value)


def write_report_json(report: MetricsReport, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")


def write_report_csv(report: MetricsReport, path: str) -> None:
    """Columns slice,accuracy,iou,dice at 6 decimal places, with a final
    aggregate (mean) row."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["slice", "accuracy", "iou", "dice"])
        for m in report.per_slice:
            writer.writerow([
                m.slice_index,
                f"{m.accuracy:.6f}",
                f"{m.iou:.6f}",
                f"{m.dice:.6f}",
            ])
        writer.writerow([
            "aggregate",
            f"{report.aggregate['accuracy'][0]:.6f}",
            f"{report.aggregate['iou'][0]:.6f}",
            f"{report.aggregate['dice'][0]:.6f}",
        ])
