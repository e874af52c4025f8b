from .app import create_app
from .config import ModelConfig
from .models import ModelPair, ModelsUnavailable, load_models

__all__ = ["ModelConfig", "ModelPair", "ModelsUnavailable", "create_app", "load_models"]
