import numpy as np
import pytest
from scipy import ndimage

FIXED_THRESHOLD = 128  # matches the protocol fixtures
MIN_COMPONENT = 9


class FakeModels:
    """Intensity-threshold stand-in with the exact semantics the protocol
    fixtures were recorded against; lets the server's HTTP layer run without
    checkpoints."""

    def _gray(self, image):
        mean = image.astype(np.uint32).sum(axis=2) / 3.0
        return np.floor(mean + 0.5).astype(np.uint8)

    def detect(self, image, prompt, box_threshold, text_threshold):
        gray = self._gray(image)
        fore = gray >= FIXED_THRESHOLD
        structure = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]])
        labels, count = ndimage.label(fore, structure=structure)
        out = []
        for idx, span in enumerate(ndimage.find_objects(labels), start=1):
            region = labels[span] == idx
            if int(region.sum()) < MIN_COMPONENT:
                continue
            score = float(gray[span][region].mean() / 255.0)
            if score < box_threshold:
                continue
            ysl, xsl = span
            out.append({"x0": xsl.start, "y0": ysl.start,
                        "x1": xsl.stop, "y1": ysl.stop,
                        "score": score, "phrase": prompt})
        out.sort(key=lambda d: (-d["score"], d["y0"], d["x0"]))
        return out

    def segment(self, image, box):
        gray = self._gray(image)
        x0, y0, x1, y1 = box
        mask = np.zeros(gray.shape, dtype=bool)
        mask[y0:y1, x0:x1] = gray[y0:y1, x0:x1] >= FIXED_THRESHOLD
        return mask


@pytest.fixture
def fake_models():
    return FakeModels()
