"""Model pair behind the protocol endpoints.

Any object with detect(image, prompt, box_threshold, text_threshold) and
segment(image, box) can serve; the bundled implementation wraps a
transformers zero-shot detector and a SAM checkpoint. Loading fails loudly
when checkpoints are unavailable so the server refuses to start.
"""

from __future__ import annotations

from typing import Protocol

import numpy as np

from .config import ModelConfig


class ModelsUnavailable(RuntimeError):
    """Checkpoints missing or backends not installed."""


class ModelPair(Protocol):
    def detect(self, image: np.ndarray, prompt: str, box_threshold: float,
               text_threshold: float) -> list[dict]:
        """[{x0, y0, x1, y1, score, phrase}, ...] on an (h, w, 3) uint8 image."""

    def segment(self, image: np.ndarray, box: tuple[int, int, int, int]) -> np.ndarray:
        """Bool mask of shape (h, w); raw model output, unclipped."""


class TransformersModelPair:
    """GroundingDINO-style detector plus SAM, via Hugging Face transformers."""

    def __init__(self, config: ModelConfig):
        try:
            import torch
            from transformers import (
                AutoModelForZeroShotObjectDetection,
                AutoProcessor,
                SamModel,
                SamProcessor,
            )
        except ImportError as exc:
            raise ModelsUnavailable(f"torch/transformers not installed: {exc}") from exc
        try:
            self.device = torch.device(config.device)
            self.det_processor = AutoProcessor.from_pretrained(config.detector_checkpoint)
            self.detector = AutoModelForZeroShotObjectDetection.from_pretrained(
                config.detector_checkpoint).to(self.device).eval()
            self.seg_processor = SamProcessor.from_pretrained(config.segmenter_checkpoint)
            self.segmenter = SamModel.from_pretrained(
                config.segmenter_checkpoint).to(self.device).eval()
        except Exception as exc:
            raise ModelsUnavailable(
                f"cannot load checkpoints ({config.detector_checkpoint}, "
                f"{config.segmenter_checkpoint}): {exc}"
            ) from exc
        self._torch = torch

    def detect(self, image, prompt, box_threshold, text_threshold):
        torch = self._torch
        # grounded detectors expect lower-cased, period-terminated phrases
        text = prompt.strip().lower()
        if not text.endswith("."):
            text += "."
        inputs = self.det_processor(images=image, text=text,
                                    return_tensors="pt").to(self.device)
        with torch.no_grad():
            outputs = self.detector(**inputs)
        h, w = image.shape[:2]
        results = self.det_processor.post_process_grounded_object_detection(
            outputs,
            inputs.input_ids,
            threshold=box_threshold,
            text_threshold=text_threshold,
            target_sizes=[(h, w)],
        )[0]
        detections = []
        for box, score, label in zip(results["boxes"], results["scores"],
                                     results.get("text_labels", results.get("labels"))):
            x0, y0, x1, y1 = (int(round(float(v))) for v in box.tolist())
            x0, y0 = max(x0, 0), max(y0, 0)
            x1, y1 = min(max(x1, x0 + 1), w), min(max(y1, y0 + 1), h)
            detections.append({
                "x0": x0, "y0": y0, "x1": x1, "y1": y1,
                "score": float(score), "phrase": str(label),
            })
        detections.sort(key=lambda d: (-d["score"], d["y0"], d["x0"]))
        return detections

    def segment(self, image, box):
        torch = self._torch
        x0, y0, x1, y1 = box
        inputs = self.seg_processor(
            image, input_boxes=[[[float(x0), float(y0), float(x1), float(y1)]]],
            return_tensors="pt").to(self.device)
        with torch.no_grad():
            outputs = self.segmenter(**inputs, multimask_output=False)
        masks = self.seg_processor.image_processor.post_process_masks(
            outputs.pred_masks.cpu(),
            inputs["original_sizes"].cpu(),
            inputs["reshaped_input_sizes"].cpu(),
        )[0]
        return masks[0, 0].numpy().astype(bool)


def load_models(config: ModelConfig) -> ModelPair:
    return TransformersModelPair(config)
