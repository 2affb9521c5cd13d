"""Spectral weight normalization via persistent power iteration.

Each normalized layer keeps a running estimate u of the top left singular
vector of its weight (flattened to out x rest). Every training-mode forward
advances the estimate by one power-iteration step and divides the weight by
the current sigma estimate; eval mode reuses the stored vector without
updating it, so inference is deterministic.
"""

from __future__ import annotations

import torch
import torch.nn as nn
import torch.nn.functional as F


def spectral_normalize(
    weight: torch.Tensor, u: torch.Tensor, eps: float = 1e-12
) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """One power-iteration step. Returns (weight / sigma, sigma, updated u).

    u and the implied right vector are treated as constants: gradients flow
    through the weight only, as in standard spectral normalization.
    """
    w = weight.reshape(weight.shape[0], -1)
    with torch.no_grad():
        v = F.normalize(w.t().mv(u), dim=0, eps=eps)
        u_new = F.normalize(w.mv(v), dim=0, eps=eps)
    sigma = torch.dot(u_new, w.mv(v))
    # clamp keeps an all-zero weight at zero instead of 0/0
    return weight / sigma.clamp_min(eps), sigma, u_new.detach()


def estimate_sigma(weight: torch.Tensor, u: torch.Tensor, eps: float = 1e-12) -> torch.Tensor:
    """Sigma estimate from the stored u without advancing it."""
    w = weight.reshape(weight.shape[0], -1)
    with torch.no_grad():
        v = F.normalize(w.t().mv(u), dim=0, eps=eps)
    return torch.dot(u, w.mv(v))


class _SpectralMixin:
    """Shared forward-time weight normalization for SN layers."""

    def _init_u(self):
        out_dim = self.weight.shape[0]
        u = F.normalize(torch.randn(out_dim), dim=0)
        self.register_buffer("sn_u", u)

    def normalized_weight(self) -> torch.Tensor:
        if self.training:
            w_norm, _, u_new = spectral_normalize(self.weight, self.sn_u)
            with torch.no_grad():
                self.sn_u.copy_(u_new)
            return w_norm
        sigma = estimate_sigma(self.weight, self.sn_u)
        return self.weight / sigma


class SNConv2d(nn.Conv2d, _SpectralMixin):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._init_u()

    def forward(self, x):
        return self._conv_forward(x, self.normalized_weight(), self.bias)


class SNLinear(nn.Linear, _SpectralMixin):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._init_u()

    def forward(self, x):
        return F.linear(x, self.normalized_weight(), self.bias)
