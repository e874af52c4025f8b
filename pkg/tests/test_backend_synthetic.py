import numpy as np
import pytest

from zenesis.backend import SyntheticBackend, Thresholds
from zenesis.backend.synthetic import resolve_threshold
from zenesis.errors import DegenerateBox, EmptyPrompt
from zenesis.geometry import BBox

from .conftest import make_image8, square_image


@pytest.fixture
def backend():
    return SyntheticBackend(threshold=128)


class TestDetect:
    def test_single_square(self, backend):
        image = square_image(64, at=(20, 20), side=10)
        found = backend.detect(image, "particle", Thresholds())
        assert len(found) == 1
        det = found[0]
        assert det.box == BBox(20, 20, 30, 30)
        assert det.score == 1.0
        assert det.phrase == "particle"

    def test_all_black_empty(self, backend):
        image = make_image8(np.zeros((32, 32), dtype=np.uint8))
        assert backend.detect(image, "anything", Thresholds()) == []

    def test_two_squares_tie_break(self, backend):
        gray = np.zeros((64, 64), dtype=np.uint8)
        gray[40:50, 5:15] = 255   # lower square
        gray[10:20, 30:40] = 255  # upper square, later in x
        image = make_image8(gray)
        found = backend.detect(image, "squares", Thresholds())
        assert len(found) == 2
        # equal scores; (y0, x0) ascending
        assert found[0].box == BBox(30, 10, 40, 20)
        assert found[1].box == BBox(5, 40, 15, 50)

    def test_score_orders_detections(self, backend):
        gray = np.zeros((64, 64), dtype=np.uint8)
        gray[40:50, 5:15] = 255  # bright
        gray[10:20, 30:40] = 160  # dim
        image = make_image8(gray)
        found = backend.detect(image, "p", Thresholds())
        assert [d.box.y0 for d in found] == [40, 10]
        assert found[0].score > found[1].score

    def test_box_threshold_filters(self, backend):
        gray = np.zeros((64, 64), dtype=np.uint8)
        gray[10:20, 10:20] = 160  # score 160/255 ~ 0.627
        image = make_image8(gray)
        assert backend.detect(image, "p", Thresholds(box_threshold=0.7)) == []
        found = backend.detect(image, "p", Thresholds(box_threshold=0.6))
        assert len(found) == 1
        assert all(d.score >= 0.6 for d in found)

    def test_min_component_size(self, backend):
        gray = np.zeros((32, 32), dtype=np.uint8)
        gray[5:7, 5:9] = 255  # 8 px, below the 9-px floor
        image = make_image8(gray)
        assert backend.detect(image, "p", Thresholds()) == []
        gray[5:8, 5:8] = 255  # 3x3 = 9 px... but union with previous strip
        image = make_image8(gray)
        found = backend.detect(image, "p", Thresholds())
        assert len(found) == 1

    def test_four_connectivity(self, backend):
        gray = np.zeros((16, 16), dtype=np.uint8)
        # two 3x3 blocks touching only diagonally: separate components
        gray[2:5, 2:5] = 255
        gray[5:8, 5:8] = 255
        image = make_image8(gray)
        found = backend.detect(image, "p", Thresholds())
        assert len(found) == 2

    def test_empty_prompt(self, backend):
        image = square_image()
        with pytest.raises(EmptyPrompt):
            backend.detect(image, "", Thresholds())
        with pytest.raises(EmptyPrompt):
            backend.detect(image, "   ", Thresholds())

    def test_purity(self, backend):
        image = square_image(48, at=(8, 4), side=12, fg=200)
        a = backend.detect(image, "p", Thresholds())
        b = backend.detect(image, "p", Thresholds())
        assert a == b

    def test_detection_boxes_segment_to_at_least_min_size(self, backend):
        rng = np.random.default_rng(11)
        for _ in range(20):
            gray = (rng.random((40, 40)) > 0.8).astype(np.uint8) * 255
            image = make_image8(gray)
            for det in backend.detect(image, "p", Thresholds(box_threshold=0.0)):
                assert backend.segment(image, det.box).area() >= 9


class TestSegment:
    def test_square_inside_box(self, backend):
        image = square_image(64, at=(20, 20), side=10)
        mask = backend.segment(image, BBox(15, 15, 35, 35))
        assert mask.area() == 100
        assert (mask.width, mask.height) == (64, 64)

    def test_black_region_empty(self, backend):
        image = square_image(64, at=(20, 20), side=10)
        mask = backend.segment(image, BBox(40, 40, 60, 60))
        assert mask.area() == 0

    def test_full_image_box_equals_thresholding(self, backend):
        gray = np.zeros((32, 32), dtype=np.uint8)
        gray[:, 16:] = 255
        image = make_image8(gray)
        mask = backend.segment(image, BBox(0, 0, 32, 32))
        np.testing.assert_array_equal(mask.bits, gray >= 128)

    def test_bits_confined_to_box(self, backend):
        gray = np.full((32, 32), 255, dtype=np.uint8)
        image = make_image8(gray)
        box = BBox(4, 6, 10, 12)
        mask = backend.segment(image, box)
        assert mask.area() == box.area()
        outside = mask.bits.copy()
        outside[box.y0:box.y1, box.x0:box.x1] = False
        assert outside.sum() == 0

    def test_degenerate_box_raises(self, backend):
        image = square_image()
        with pytest.raises(DegenerateBox):
            backend.segment(image, BBox(70, 70, 80, 80))  # fully outside 64x64
        with pytest.raises(DegenerateBox):
            BBox(5, 5, 5, 10)  # zero width rejected at construction


class TestDetectAndSegment:
    def test_square_pipeline(self, backend):
        image = square_image(64, at=(20, 20), side=10)
        record = backend.detect_and_segment(image, "particle", Thresholds())
        assert record.provenance == "auto"
        assert record.box == BBox(20, 20, 30, 30)
        assert record.mask.area() == 100
        assert record.extra["score"] == 1.0

    def test_all_black_auto_empty(self, backend):
        image = make_image8(np.zeros((32, 32), dtype=np.uint8))
        record = backend.detect_and_segment(image, "particle", Thresholds())
        assert record.provenance == "auto-empty"
        assert record.box is None
        assert record.mask.area() == 0

    def test_brighter_square_wins(self, backend):
        gray = np.zeros((64, 64), dtype=np.uint8)
        gray[40:50, 5:15] = 200
        gray[10:20, 30:40] = 255
        image = make_image8(gray)
        record = backend.detect_and_segment(image, "p", Thresholds())
        assert record.box == BBox(30, 10, 40, 20)
        assert record.mask.area() == 100

    def test_deterministic_mask_bytes(self, backend):
        image = square_image(48, at=(10, 12), side=9, fg=220)
        a = backend.detect_and_segment(image, "p", Thresholds())
        b = backend.detect_and_segment(image, "p", Thresholds())
        assert a.mask.to_bytes() == b.mask.to_bytes()
        assert a.box == b.box


class TestDefaultThreshold:
    def test_defaults_to_one_above_otsu(self):
        gray = np.zeros((32, 32), dtype=np.uint8)
        gray[:, 16:] = 200
        image = make_image8(gray)
        # exhaustive-scan Otsu on a two-valued image picks the low value
        assert resolve_threshold(image, None) == 1
        assert resolve_threshold(image, 77) == 77

    def test_all_black_detects_nothing_by_default(self):
        backend = SyntheticBackend()  # otsu-based threshold
        image = make_image8(np.zeros((32, 32), dtype=np.uint8))
        assert backend.detect(image, "p", Thresholds()) == []

    def test_two_valued_image_default_segments_upper_class(self):
        backend = SyntheticBackend()
        gray = np.zeros((32, 32), dtype=np.uint8)
        gray[:, 16:] = 200
        image = make_image8(gray)
        record = backend.detect_and_segment(image, "p", Thresholds())
        assert record.box == BBox(16, 0, 32, 32)
        assert record.mask.area() == 32 * 16
