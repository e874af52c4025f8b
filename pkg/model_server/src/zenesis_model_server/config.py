import json
from dataclasses import dataclass

DEFAULT_DETECTOR = "IDEA-Research/grounding-dino-tiny"
DEFAULT_SEGMENTER = "facebook/sam-vit-huge"


@dataclass(frozen=True)
class ModelConfig:
    detector_checkpoint: str = DEFAULT_DETECTOR
    segmenter_checkpoint: str = DEFAULT_SEGMENTER
    device: str = "cpu"

    @classmethod
    def from_file(cls, path: str) -> "ModelConfig":
        with open(path) as fh:
            data = json.load(fh)
        return cls(
            detector_checkpoint=data.get("detector_checkpoint", DEFAULT_DETECTOR),
            segmenter_checkpoint=data.get("segmenter_checkpoint", DEFAULT_SEGMENTER),
            device=data.get("device", "cpu"),
        )
