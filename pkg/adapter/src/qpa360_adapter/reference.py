"""Minimal deterministic codec used to demonstrate quality-map patching.

Not a real compressor: a chain of seeded 1x1 convolutions with the four
modulation points between them, mirroring where a variable-rate codec
scales its latents. Useful for exercising apply_quality_map end to end
and for regression-testing the baseline-reduction property.
"""

import numpy as np
import torch
from torch import nn

from qpa360 import BANK_ORDER

from .modulation import LatentModulation

__all__ = ["ReferenceCodec", "make_demo_checkpoint", "DEMO_TENSOR_NAMES"]

DEMO_TENSOR_NAMES = {
    "encoder": "encoder.q_bank",
    "decoder": "decoder.q_bank",
    "reconstruction": "reconstruction.q_bank",
    "feature": "feature.q_bank",
}


class ReferenceCodec(nn.Module):
    """Feature -> encoder -> decoder -> reconstruction toy pipeline."""

    def __init__(self, bank_set, quality_index, latent_rows, seed=0):
        super().__init__()
        self.mods = nn.ModuleDict(
            {
                name: LatentModulation(
                    name,
                    torch.tensor(np.asarray(getattr(bank_set, name).vectors)),
                    quality_index,
                    latent_rows,
                )
                for name in BANK_ORDER
            }
        )
        gen = torch.Generator().manual_seed(seed)

        def conv(c_in, c_out):
            layer = nn.Conv2d(c_in, c_out, kernel_size=1, bias=False)
            with torch.no_grad():
                layer.weight.copy_(torch.randn(layer.weight.shape, generator=gen) * 0.5)
            return layer

        c = {name: getattr(bank_set, name).channels for name in BANK_ORDER}
        self.to_encoder = conv(c["feature"], c["encoder"])
        self.to_decoder = conv(c["encoder"], c["decoder"])
        self.to_reconstruction = conv(c["decoder"], c["reconstruction"])
        self.input_channels = c["feature"]

    def modulation_points(self):
        return dict(self.mods)

    def forward(self, x):
        x = self.mods["feature"](x)
        x = self.to_encoder(x)
        x = self.mods["encoder"](x)
        x = self.to_decoder(x)
        x = self.mods["decoder"](x)
        x = self.to_reconstruction(x)
        return self.mods["reconstruction"](x)


def make_demo_checkpoint(path, q_num=64, seed=0):
    """Write a synthetic checkpoint with four bank tables plus decoy tensors."""
    gen = torch.Generator().manual_seed(seed)
    channels = {"encoder": 4, "decoder": 4, "reconstruction": 3, "feature": 2}
    state = {
        DEMO_TENSOR_NAMES[name]: torch.randn((q_num, channels[name]), generator=gen)
        for name in BANK_ORDER
    }
    state["head.bias"] = torch.randn((8,), generator=gen)
    state["head.weight"] = torch.randn((8, 3, 3, 3), generator=gen)
    torch.save(state, path)
    return state
