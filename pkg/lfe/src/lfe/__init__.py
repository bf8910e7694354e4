"""Local feature extraction from a VGG16 backbone's max-pool outputs."""

from .backbone import (
    POOL_DEPTHS,
    build_backbone,
    load_backbone,
    pretrained_backbone,
    random_backbone,
    save_backbone,
)
from .extractor import (
    FOUR_SET_LENGTH,
    SET_LENGTH,
    LfeConfig,
    export,
    extract_local,
    fine_tune,
)

__all__ = [
    "POOL_DEPTHS",
    "build_backbone",
    "load_backbone",
    "pretrained_backbone",
    "random_backbone",
    "save_backbone",
    "FOUR_SET_LENGTH",
    "SET_LENGTH",
    "LfeConfig",
    "export",
    "extract_local",
    "fine_tune",
]

__version__ = "0.1.0"
