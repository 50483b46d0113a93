"""Latent modulation modules and quality-map patching.

A model exposes its modulation points as named LatentModulation modules.
Unpatched, each point scales the latent channel-wise with the single
vector stored for its integer quality index. Patching replaces that
vector with a per-row matrix interpolated from a bank container and a
quality-map document, so each latent row is scaled according to its
latitude.
"""

import copy

import torch
from torch import nn

from qpa360 import load_bank_set, load_quality_map, row_modulation_matrix

__all__ = ["LatentModulation", "ModulationShapeError", "nearest_row_indices", "apply_quality_map"]


class ModulationShapeError(ValueError):
    """Latent geometry does not match the quality map or gain matrix."""


class LatentModulation(nn.Module):
    """Channel-wise latent scaling from a per-quality vector table.

    vectors: (q_num, channels) table, one modulation vector per integer
    quality index. Until patched, forward uses vectors[quality_index].
    After patching, row_gains (latent_rows, channels) scales each latent
    row individually.
    """

    def __init__(self, bank_name, vectors, quality_index, latent_rows):
        super().__init__()
        vectors = torch.as_tensor(vectors)
        if vectors.ndim != 2:
            raise ValueError(f"vectors must be 2-D, got shape {tuple(vectors.shape)}")
        if not 0 <= quality_index < vectors.shape[0]:
            raise ValueError(
                f"quality_index {quality_index} outside [0, {vectors.shape[0] - 1}]"
            )
        if latent_rows < 1:
            raise ValueError(f"latent_rows must be >= 1, got {latent_rows}")
        self.bank_name = bank_name
        self.quality_index = int(quality_index)
        self.latent_rows = int(latent_rows)
        self.register_buffer("vectors", vectors)
        self.register_buffer("row_gains", None)

    @property
    def channels(self):
        return self.vectors.shape[1]

    def set_row_gains(self, matrix):
        """Install a (latent_rows, channels) gain matrix, replacing the vector."""
        gains = torch.as_tensor(matrix, dtype=self.vectors.dtype)
        if gains.shape != (self.latent_rows, self.channels):
            raise ModulationShapeError(
                f"gain matrix shape {tuple(gains.shape)} does not match "
                f"(latent_rows, channels) = ({self.latent_rows}, {self.channels})"
            )
        self.row_gains = gains

    def forward(self, x):
        if x.ndim != 4 or x.shape[1] != self.channels:
            raise ModulationShapeError(
                f"expected latent of shape (n, {self.channels}, h, w), got {tuple(x.shape)}"
            )
        if self.row_gains is None:
            return x * self.vectors[self.quality_index].view(1, -1, 1, 1)
        if x.shape[2] != self.latent_rows:
            raise ModulationShapeError(
                f"latent has {x.shape[2]} rows, module declares {self.latent_rows}"
            )
        return x * self.row_gains.t().view(1, self.channels, self.latent_rows, 1)


def nearest_row_indices(latent_rows, map_rows):
    """Quality-map row index for each latent row, by nearest relative position."""
    idx = [int((r + 0.5) * map_rows / latent_rows) for r in range(latent_rows)]
    return [min(i, map_rows - 1) for i in idx]


def apply_quality_map(model, qmap_path, bank_path, resample="error"):
    """Copy of `model` with every modulation point patched for the map.

    Each point gets the per-row matrix interpolated from its bank at the
    map's quality values. When the map's row count differs from a point's
    latent rows, resample="nearest" picks the nearest map row for each
    latent row; the default refuses with the point's name.
    """
    if resample not in ("error", "nearest"):
        raise ValueError(f"resample must be 'error' or 'nearest', got {resample!r}")
    if not hasattr(model, "modulation_points"):
        raise ValueError("model does not expose modulation_points()")
    qmap = load_quality_map(qmap_path)
    bank_set = load_bank_set(bank_path)
    patched = copy.deepcopy(model)
    for name, point in patched.modulation_points().items():
        bank = getattr(bank_set, point.bank_name)
        if qmap.rows == point.latent_rows:
            q_values = qmap
        elif resample == "nearest":
            indices = nearest_row_indices(point.latent_rows, qmap.rows)
            q_values = [float(qmap.q_tilde[i]) for i in indices]
        else:
            raise ModulationShapeError(
                f"{name}: quality map has {qmap.rows} rows but the latent has "
                f"{point.latent_rows}; pass resample='nearest' to bridge"
            )
        try:
            matrix = row_modulation_matrix(bank, q_values)
        except ValueError as exc:
            raise ModulationShapeError(f"{name}: {exc}") from exc
        point.set_row_gains(matrix)
    return patched
