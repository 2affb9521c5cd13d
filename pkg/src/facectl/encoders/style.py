"""Region-wise style encoder.

A downsampling conv stack followed by transposed-conv upsampling back to the
input resolution (instance norm + leaky-ReLU 0.2 throughout), ending in a
region average pool that turns the final feature maps into one style vector
per semantic class.
"""

from __future__ import annotations

import torch
import torch.nn as nn

from .regions import region_average_pool, validate_segmentation


class StyleEncoder(nn.Module):
    def __init__(
        self,
        style_dim: int = 64,
        down_channels: tuple[int, ...] = (32, 64, 128, 256),
        up_channels: tuple[int, ...] = (128, 64, 32),
    ):
        super().__init__()
        self.style_dim = style_dim
        down = []
        c_in = 3
        for c_out in down_channels:
            down += [
                nn.Conv2d(c_in, c_out, 3, stride=2, padding=1),
                nn.InstanceNorm2d(c_out),
                nn.LeakyReLU(0.2),
            ]
            c_in = c_out
        self.down = nn.Sequential(*down)
        up = []
        for c_out in up_channels:
            up += [
                nn.ConvTranspose2d(c_in, c_out, 3, stride=2, padding=1, output_padding=1),
                nn.InstanceNorm2d(c_out),
                nn.LeakyReLU(0.2),
            ]
            c_in = c_out
        # final upsample back to input resolution, no norm on the pooled features
        up += [nn.ConvTranspose2d(c_in, style_dim, 3, stride=2, padding=1, output_padding=1)]
        self.up = nn.Sequential(*up)

    def forward(self, image: torch.Tensor) -> torch.Tensor:
        if image.ndim != 4:
            raise ValueError("style encoder expects Bx3xHxW input")
        return self.up(self.down(image))


def encode_region_styles(
    image: torch.Tensor, seg: torch.Tensor, encoder: StyleEncoder
) -> torch.Tensor:
    """Style matrix BxNxD; rows for regions absent from the image are zero."""
    if image.ndim == 3:
        image = image[None]
    if seg.ndim == 3:
        seg = seg[None]
    validate_segmentation(seg)
    if image.shape[-2:] != seg.shape[-2:]:
        raise ValueError("image and segmentation must be spatially aligned")
    features = encoder(image)
    return region_average_pool(features, seg)
