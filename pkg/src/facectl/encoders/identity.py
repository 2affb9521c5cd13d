"""Frozen identity embedding network and its optional margin fine-tuning.

A small convolutional stack with deterministically seeded weights stands in
for an external pretrained face recognition model. It has no normalization
layers, so outputs are exactly batch-composition invariant; global average
pooling of the last feature maps followed by L2 normalization yields the
unit-norm embedding.
"""

from __future__ import annotations

import math

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F

IDENTITY_SEED = 29681  # fixed so the frozen stand-in is independent of run seeds


def _seeded_init(module: nn.Module, seed: int) -> None:
    g = torch.Generator().manual_seed(seed)
    with torch.no_grad():
        for p in module.parameters():
            if p.ndim > 1:
                fan_in = p[0].numel()
                p.copy_(torch.randn(p.shape, generator=g) * math.sqrt(2.0 / fan_in))
            else:
                p.zero_()


class IdentityEncoder(nn.Module):
    """Conv stack -> global average pool -> L2-normalized embedding."""

    def __init__(self, input_size: int = 64, embed_dim: int = 128,
                 channels: tuple[int, ...] = (32, 64, 128), seed: int = IDENTITY_SEED):
        super().__init__()
        self.input_size = input_size
        self.embed_dim = embed_dim
        layers = []
        c_in = 3
        for c_out in channels:
            layers += [nn.Conv2d(c_in, c_out, 3, stride=2, padding=1), nn.LeakyReLU(0.2)]
            c_in = c_out
        layers += [nn.Conv2d(c_in, embed_dim, 3, stride=2, padding=1)]
        self.features = nn.Sequential(*layers)
        _seeded_init(self, seed)
        self.freeze()

    def freeze(self) -> "IdentityEncoder":
        for p in self.parameters():
            p.requires_grad_(False)
        return self

    def unfreeze(self) -> "IdentityEncoder":
        for p in self.parameters():
            p.requires_grad_(True)
        return self

    def forward(self, image: torch.Tensor) -> torch.Tensor:
        squeeze = image.ndim == 3
        if squeeze:
            image = image[None]
        if image.shape[-2:] != (self.input_size, self.input_size):
            raise ValueError(
                f"identity encoder expects {self.input_size}x{self.input_size} input, "
                f"got {tuple(image.shape[-2:])}"
            )
        feats = self.features(image)
        pooled = feats.mean(dim=(2, 3))
        z = F.normalize(pooled, dim=1, eps=1e-10)
        return z[0] if squeeze else z


def encode_identity(aligned: torch.Tensor, encoder: IdentityEncoder) -> torch.Tensor:
    return encoder(aligned)


def finetune_identity_encoder(
    encoder: IdentityEncoder,
    images: torch.Tensor,
    labels: torch.Tensor,
    n_identities: int,
    steps: int = 200,
    batch_size: int = 32,
    lr: float = 1e-3,
    margin: float = 0.2,
    scale: float = 16.0,
    seed: int = 0,
) -> list[float]:
    """Optional cosine-margin identity classification warm-up.

    Trains the encoder plus a cosine classifier head on the synthetic corpus
    and re-freezes the encoder afterwards. Returns the per-step losses.
    """
    encoder.unfreeze().train()
    head = torch.empty(n_identities, encoder.embed_dim)
    g = torch.Generator().manual_seed(seed)
    with torch.no_grad():
        head.copy_(torch.randn(head.shape, generator=g) * 0.02)
    head.requires_grad_(True)
    opt = torch.optim.Adam(list(encoder.parameters()) + [head], lr=lr)
    rng = np.random.default_rng(seed)
    losses = []
    for _ in range(steps):
        idx = torch.from_numpy(rng.integers(0, images.shape[0], batch_size))
        z = encoder(images[idx])
        w = F.normalize(head, dim=1)
        cos = z @ w.T
        target = labels[idx].long()
        logits = scale * (cos - margin * F.one_hot(target, n_identities))
        loss = F.cross_entropy(logits, target)
        opt.zero_grad()
        loss.backward()
        opt.step()
        losses.append(float(loss))
    encoder.freeze().eval()
    return losses
