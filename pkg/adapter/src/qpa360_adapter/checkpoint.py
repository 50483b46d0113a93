"""Extraction of per-quality modulation tables from model checkpoints.

A checkpoint is a torch file holding named tensors (optionally nested
under a "state_dict" key). Each of the four modulation tables is selected
by a regex over tensor names that must match exactly once, then written
to the portable bank container consumed by the qpa360 tooling.
"""

import re
from dataclasses import dataclass

import numpy as np
import torch

from qpa360 import BANK_ORDER, VectorBank, VectorBankSet, save_bank_set

__all__ = [
    "CheckpointBankSpec",
    "CheckpointError",
    "MissingTensorError",
    "AmbiguousPatternError",
    "TensorShapeError",
    "load_named_tensors",
    "select_tensor",
    "export_banks",
]


class CheckpointError(ValueError):
    """Base class for checkpoint extraction failures."""


class MissingTensorError(CheckpointError):
    """A pattern matched no tensor name."""


class AmbiguousPatternError(CheckpointError):
    """A pattern matched more than one tensor name."""


class TensorShapeError(CheckpointError):
    """A selected tensor is not a 2-D quality-by-channels table."""


@dataclass(frozen=True)
class CheckpointBankSpec:
    """Checkpoint path plus one name regex per modulation table."""

    checkpoint: str
    encoder_pattern: str
    decoder_pattern: str
    reconstruction_pattern: str
    feature_pattern: str

    def pattern_for(self, bank_name):
        return getattr(self, f"{bank_name}_pattern")


def load_named_tensors(path):
    """Tensor name -> tensor mapping from a checkpoint file."""
    state = torch.load(path, map_location="cpu", weights_only=True)
    if isinstance(state, dict) and isinstance(state.get("state_dict"), dict):
        state = state["state_dict"]
    if not isinstance(state, dict):
        raise CheckpointError(f"{path}: checkpoint does not hold a name->tensor mapping")
    return {name: t for name, t in state.items() if isinstance(t, torch.Tensor)}


def select_tensor(tensors, pattern, bank_name):
    """The single tensor whose name matches `pattern`."""
    rx = re.compile(pattern)
    hits = sorted(name for name in tensors if rx.search(name))
    if not hits:
        raise MissingTensorError(f"{bank_name}: pattern {pattern!r} matches no tensor")
    if len(hits) > 1:
        raise AmbiguousPatternError(
            f"{bank_name}: pattern {pattern!r} matches {len(hits)} tensors: {', '.join(hits)}"
        )
    tensor = tensors[hits[0]]
    if tensor.ndim != 2:
        raise TensorShapeError(
            f"{bank_name}: tensor {hits[0]!r} has shape {tuple(tensor.shape)}, expected 2-D"
        )
    return hits[0], tensor


def export_banks(spec, out_path):
    """Write the four tables selected by `spec` to a bank container file.

    Returns the tensor names that were exported, in bank order. Table
    values are stored as 32-bit floats, so float32 checkpoints round-trip
    exactly.
    """
    tensors = load_named_tensors(spec.checkpoint)
    banks = {}
    names = []
    for bank_name in BANK_ORDER:
        name, tensor = select_tensor(tensors, spec.pattern_for(bank_name), bank_name)
        names.append(name)
        banks[bank_name] = VectorBank(
            np.ascontiguousarray(tensor.detach().numpy(), dtype=np.float32)
        )
    save_bank_set(VectorBankSet(**banks), out_path)
    return tuple(names)
