"""Identity-Style normalization and the residual blocks built on it.

The module first batch-normalizes features without affine parameters, then
modulates them twice: per-channel (gamma_id, beta_id) produced from the
identity embedding by one FC layer, and per-pixel (gamma_s, beta_s) produced
from broadcast region styles by a two-conv head. Heads parameterize residual
scales (the effective gamma is 1 + head output, small-normal init), so
zeroing the head weights reduces the module to plain batch normalization.
"""

from __future__ import annotations

import torch
import torch.nn as nn
import torch.nn.functional as F

from ..encoders.regions import broadcast_styles
from .spectral import SNConv2d


class ISNorm(nn.Module):
    def __init__(
        self,
        channels: int,
        embed_dim: int,
        style_dim: int,
        hidden: int = 16,
        use_identity: bool = True,
        use_styles: bool = True,
    ):
        super().__init__()
        self.channels = channels
        self.use_identity = use_identity
        self.use_styles = use_styles
        self.bn = nn.BatchNorm2d(channels, affine=False, momentum=0.1)
        if use_identity:
            self.id_fc = nn.Linear(embed_dim, 2 * channels)
            nn.init.normal_(self.id_fc.weight, std=0.02)
            nn.init.zeros_(self.id_fc.bias)
        if use_styles:
            self.style_shared = nn.Conv2d(style_dim, hidden, 3, padding=1)
            self.style_gamma = nn.Conv2d(hidden, channels, 3, padding=1)
            self.style_beta = nn.Conv2d(hidden, channels, 3, padding=1)
            for conv in (self.style_gamma, self.style_beta):
                nn.init.normal_(conv.weight, std=0.02)
                nn.init.zeros_(conv.bias)

    def forward(
        self,
        features: torch.Tensor,
        z_id: torch.Tensor | None,
        styles: torch.Tensor | None,
        seg: torch.Tensor | None,
    ) -> torch.Tensor:
        if features.shape[1] != self.channels:
            raise ValueError(
                f"feature channels {features.shape[1]} do not match module channels {self.channels}"
            )
        out = self.bn(features)
        if self.use_identity:
            if z_id is None:
                raise ValueError("identity modulation requires z_id")
            mod = self.id_fc(z_id)
            gamma_id, beta_id = mod.chunk(2, dim=1)
            out = (1.0 + gamma_id)[:, :, None, None] * out + beta_id[:, :, None, None]
        if self.use_styles:
            if styles is None or seg is None:
                raise ValueError("style modulation requires styles and a segmentation map")
            if seg.shape[-2:] != features.shape[-2:]:
                raise ValueError(
                    f"segmentation resolution {tuple(seg.shape[-2:])} must match "
                    f"features {tuple(features.shape[-2:])}"
                )
            z_style = broadcast_styles(styles, seg)
            h = F.relu(self.style_shared(z_style))
            gamma_s = 1.0 + self.style_gamma(h)
            beta_s = self.style_beta(h)
            out = gamma_s * out + beta_s
        return out


class ISBlock(nn.Module):
    """[ISNorm -> LReLU -> 3x3 conv] x2 with a skip path, then optional 2x upsample."""

    def __init__(
        self,
        c_in: int,
        c_out: int,
        embed_dim: int,
        style_dim: int,
        hidden: int = 16,
        use_identity: bool = True,
        use_styles: bool = True,
        upsample: bool = True,
    ):
        super().__init__()
        self.upsample = upsample
        kw = dict(embed_dim=embed_dim, style_dim=style_dim, hidden=hidden,
                  use_identity=use_identity, use_styles=use_styles)
        self.norm1 = ISNorm(c_in, **kw)
        self.conv1 = SNConv2d(c_in, c_out, 3, padding=1)
        self.norm2 = ISNorm(c_out, **kw)
        self.conv2 = SNConv2d(c_out, c_out, 3, padding=1)
        self.learned_skip = c_in != c_out
        if self.learned_skip:
            self.norm_skip = ISNorm(c_in, **kw)
            self.conv_skip = SNConv2d(c_in, c_out, 1, bias=False)

    def forward(self, x, z_id, styles, seg):
        dx = self.conv1(F.leaky_relu(self.norm1(x, z_id, styles, seg), 0.2))
        dx = self.conv2(F.leaky_relu(self.norm2(dx, z_id, styles, seg), 0.2))
        skip = self.conv_skip(self.norm_skip(x, z_id, styles, seg)) if self.learned_skip else x
        out = skip + dx
        if self.upsample:
            out = F.interpolate(out, scale_factor=2, mode="nearest")
        return out
