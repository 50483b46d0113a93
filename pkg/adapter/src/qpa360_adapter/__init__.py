"""Checkpoint-to-container bridge for qpa360 quality adaptation."""

from .checkpoint import (
    AmbiguousPatternError,
    CheckpointBankSpec,
    CheckpointError,
    MissingTensorError,
    TensorShapeError,
    export_banks,
    load_named_tensors,
    select_tensor,
)
from .modulation import (
    LatentModulation,
    ModulationShapeError,
    apply_quality_map,
    nearest_row_indices,
)
from .reference import DEMO_TENSOR_NAMES, ReferenceCodec, make_demo_checkpoint

__version__ = "0.1.0"

__all__ = [
    "AmbiguousPatternError",
    "CheckpointBankSpec",
    "CheckpointError",
    "MissingTensorError",
    "TensorShapeError",
    "export_banks",
    "load_named_tensors",
    "select_tensor",
    "LatentModulation",
    "ModulationShapeError",
    "apply_quality_map",
    "nearest_row_indices",
    "DEMO_TENSOR_NAMES",
    "ReferenceCodec",
    "make_demo_checkpoint",
    "__version__",
]
