"""The IS-block generator with background injection.

Initial features come from the coefficient conditioning (a rendered coarse
face downsampled to the initial resolution, a single FC of the raw
coefficient vector, or the sum of both). A stack of IS blocks decodes them;
the last `background_blocks` blocks receive the masked target image resized
to their input resolution as extra channels, and a final conv + tanh maps to
an RGB image in [-1, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import torch
import torch.nn as nn
import torch.nn.functional as F

from ..encoders.regions import downsample_segmentation
from .isnorm import ISBlock
from .spectral import SNConv2d, SNLinear

CONDITIONING_MODES = ("render", "fc", "both")


@dataclass(frozen=True)
class GeneratorConfig:
    image_size: int = 64
    initial_resolution: int = 4
    block_channels: tuple[int, ...] = (96, 64, 48, 48, 32, 32)
    background_blocks: int = 2
    conditioning_mode: str = "both"
    style_dim: int = 64
    embed_dim: int = 128
    n_classes: int = 8
    norm_hidden: int = 16
    coeff_dim: int = 73
    use_identity: bool = True
    use_styles: bool = True
    upsample_schedule: tuple[bool, ...] | None = None

    @classmethod
    def full_scale(cls) -> "GeneratorConfig":
        # paper-scale defaults: eight blocks decoding to 256x256
        return cls(
            image_size=256,
            block_channels=(1024, 1024, 512, 256, 128, 64, 64, 64),
            style_dim=512,
            embed_dim=512,
            n_classes=19,
            norm_hidden=128,
            coeff_dim=80 + 64 + 27 + 80 + 6,
        )

    @property
    def n_blocks(self) -> int:
        return len(self.block_channels)

    def resolved_schedule(self) -> tuple[bool, ...]:
        ratio = self.image_size / self.initial_resolution
        n_up = int(round(math.log2(ratio)))
        if 2 ** n_up != ratio or n_up > self.n_blocks:
            raise ValueError(
                f"image_size {self.image_size} is not initial_resolution "
                f"{self.initial_resolution} times 2^k for k <= {self.n_blocks} blocks"
            )
        if self.upsample_schedule is not None:
            sched = tuple(self.upsample_schedule)
            if len(sched) != self.n_blocks or sum(sched) != n_up:
                raise ValueError("upsample_schedule inconsistent with resolutions")
            return sched
        # keep the last block at full resolution when the budget allows
        if n_up < self.n_blocks:
            lead = self.n_blocks - 1 - n_up
            return (False,) * lead + (True,) * n_up + (False,)
        return (True,) * self.n_blocks

    def validate(self):
        if self.conditioning_mode not in CONDITIONING_MODES:
            raise ValueError(f"conditioning_mode must be one of {CONDITIONING_MODES}")
        if self.background_blocks > self.n_blocks:
            raise ValueError("background injection count exceeds block count")
        self.resolved_schedule()


@dataclass
class GeneratorInputs:
    """Batched conditioning bundle for a forward pass.

    coeff_vector: B x coeff_dim concatenated (alpha, rho, kappa, delta, theta).
    render: B x 3 x H x W coarse rendered face in [-1, 1] (detached).
    z_id: B x embed_dim identity embeddings.
    styles: B x N x D region style matrix.
    seg: B x N x H x W one-hot segmentation at output resolution.
    background: B x 3 x H x W target image with the face region zeroed.
    """

    coeff_vector: torch.Tensor | None = None
    render: torch.Tensor | None = None
    z_id: torch.Tensor | None = None
    styles: torch.Tensor | None = None
    seg: torch.Tensor | None = None
    background: torch.Tensor | None = None


class Generator(nn.Module):
    def __init__(self, config: GeneratorConfig):
        super().__init__()
        config.validate()
        self.config = config
        self.schedule = config.resolved_schedule()
        c0 = config.block_channels[0]
        if config.conditioning_mode in ("render", "both"):
            self.stem_render = SNConv2d(3, c0, 3, padding=1)
        if config.conditioning_mode in ("fc", "both"):
            self.stem_fc = SNLinear(config.coeff_dim, c0 * config.initial_resolution ** 2)
        blocks = []
        c_in = c0
        first_bg = config.n_blocks - config.background_blocks
        for i, c_out in enumerate(config.block_channels):
            extra = 3 if i >= first_bg else 0
            blocks.append(
                ISBlock(
                    c_in + extra,
                    c_out,
                    embed_dim=config.embed_dim,
                    style_dim=config.style_dim,
                    hidden=config.norm_hidden,
                    use_identity=config.use_identity,
                    use_styles=config.use_styles,
                    upsample=self.schedule[i],
                )
            )
            c_in = c_out
        self.blocks = nn.ModuleList(blocks)
        self.first_bg = first_bg
        self.final = nn.Conv2d(c_in, 3, 3, padding=1)

    def forward(self, inputs: GeneratorInputs) -> torch.Tensor:
        cfg = self.config
        mode = cfg.conditioning_mode
        r = cfg.initial_resolution
        x = None
        if mode in ("render", "both"):
            if inputs.render is None:
                raise ValueError(f"conditioning mode {mode!r} needs a rendered face")
            coarse = F.adaptive_avg_pool2d(inputs.render, r)
            x = self.stem_render(coarse)
        if mode in ("fc", "both"):
            if inputs.coeff_vector is None:
                raise ValueError(f"conditioning mode {mode!r} needs the coefficient vector")
            fc = self.stem_fc(inputs.coeff_vector).reshape(-1, cfg.block_channels[0], r, r)
            x = fc if x is None else x + fc
        if cfg.use_styles and (inputs.styles is None or inputs.seg is None):
            raise ValueError("style modulation needs styles and a segmentation map")
        if cfg.use_identity and inputs.z_id is None:
            raise ValueError("identity modulation needs z_id")
        seg_cache: dict[int, torch.Tensor] = {}
        for i, block in enumerate(self.blocks):
            res = x.shape[-1]
            if i >= self.first_bg:
                if inputs.background is None:
                    raise ValueError("background injection needs the masked target image")
                bg = inputs.background
                if bg.shape[-1] != res:
                    bg = F.adaptive_avg_pool2d(bg, res)
                x = torch.cat([x, bg], dim=1)
            seg_i = None
            if cfg.use_styles:
                if res not in seg_cache:
                    seg_cache[res] = downsample_segmentation(inputs.seg, res, res)
                seg_i = seg_cache[res]
            x = block(x, inputs.z_id, inputs.styles, seg_i)
        return torch.tanh(self.final(F.leaky_relu(x, 0.2)))
