"""Two-scale patch discriminator.

Each scale is a stride-2 conv stack (kernel 4, instance norm except on the
first layer, leaky-ReLU 0.2) with spectral normalization, closed by a
1-channel logit conv. The logit conv uses kernel 3 so the patch grids come
out at input/16 exactly (e.g. 8x8 for 128x128 input, 4x4 at the half scale).
Intermediate activations are returned for optional feature matching. The
segmentation map may be concatenated to the input (flag).
"""

from __future__ import annotations

import torch
import torch.nn as nn
import torch.nn.functional as F

from .spectral import SNConv2d


class PatchDiscriminator(nn.Module):
    def __init__(self, in_channels: int, channels: tuple[int, ...] = (64, 128, 256, 512)):
        super().__init__()
        layers = []
        c_in = in_channels
        for i, c_out in enumerate(channels):
            block = [SNConv2d(c_in, c_out, 4, stride=2, padding=1)]
            if i > 0:
                block.append(nn.InstanceNorm2d(c_out))
            block.append(nn.LeakyReLU(0.2))
            layers.append(nn.Sequential(*block))
            c_in = c_out
        self.stages = nn.ModuleList(layers)
        self.logit = SNConv2d(c_in, 1, 3, stride=1, padding=1)

    def forward(self, x: torch.Tensor) -> tuple[torch.Tensor, list[torch.Tensor]]:
        feats = []
        for stage in self.stages:
            x = stage(x)
            feats.append(x)
        return self.logit(x), feats


class MultiScaleDiscriminator(nn.Module):
    def __init__(
        self,
        image_channels: int = 3,
        n_classes: int = 0,
        channels: tuple[int, ...] = (64, 128, 256, 512),
        n_scales: int = 2,
    ):
        super().__init__()
        self.n_classes = n_classes
        in_channels = image_channels + n_classes
        self.scales = nn.ModuleList(
            [PatchDiscriminator(in_channels, channels) for _ in range(n_scales)]
        )

    def forward(
        self, image: torch.Tensor, seg: torch.Tensor | None = None
    ) -> tuple[list[torch.Tensor], list[list[torch.Tensor]]]:
        """Returns per-scale patch logits and per-scale feature lists."""
        if self.n_classes:
            if seg is None:
                raise ValueError("discriminator was built with segmentation conditioning")
            if seg.shape[-2:] != image.shape[-2:]:
                seg = F.interpolate(seg, size=image.shape[-2:], mode="nearest")
            x = torch.cat([image, seg], dim=1)
        else:
            x = image
        logits, features = [], []
        for i, disc in enumerate(self.scales):
            if i > 0:
                x = F.avg_pool2d(x, 2)
            out, feats = disc(x)
            logits.append(out)
            features.append(feats)
        return logits, features
