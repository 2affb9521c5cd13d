"""Differentiable face alignment via a least-squares similarity transform.

Five landmarks (eye centers, nose tip, mouth corners) are mapped onto fixed
template positions; the image is then bilinearly resampled under the inverse
transform, with zeros outside the source frame. The resampling is the
spatial-transformer step in front of the identity encoder.
"""

from __future__ import annotations

import torch
import torch.nn.functional as F

from ..morphable.synthesis import (
    LEFT_EYE,
    MOUTH_LEFT_INDEX,
    MOUTH_RIGHT_INDEX,
    NOSE_TIP_INDEX,
    RIGHT_EYE,
)

# template positions as fractions of the aligned crop (x, y)
ALIGN_TEMPLATE = (
    (0.30, 0.40),  # left eye center
    (0.70, 0.40),  # right eye center
    (0.50, 0.62),  # nose tip
    (0.35, 0.78),  # left mouth corner
    (0.65, 0.78),  # right mouth corner
)


def five_point_landmarks(landmarks68: torch.Tensor) -> torch.Tensor:
    """Reduce a 68-point set to the 5-point alignment set."""
    if landmarks68.shape != (68, 2):
        raise ValueError(f"expected 68x2 landmarks, got {tuple(landmarks68.shape)}")
    return torch.stack([
        landmarks68[list(LEFT_EYE)].mean(dim=0),
        landmarks68[list(RIGHT_EYE)].mean(dim=0),
        landmarks68[NOSE_TIP_INDEX],
        landmarks68[MOUTH_LEFT_INDEX],
        landmarks68[MOUTH_RIGHT_INDEX],
    ])


def template_points(size: int, dtype=torch.float32) -> torch.Tensor:
    return torch.tensor(ALIGN_TEMPLATE, dtype=dtype) * (size - 1)


def estimate_similarity(src: torch.Tensor, dst: torch.Tensor) -> torch.Tensor:
    """Least-squares similarity (scale+rotation+translation) mapping src to dst.

    Returns a 2x3 matrix [a -b tx; b a ty]. Degenerate landmark sets
    (coincident or collinear) are rejected.
    """
    if src.shape != dst.shape or src.ndim != 2 or src.shape[1] != 2:
        raise ValueError("landmark sets must both be Kx2")
    centered = src - src.mean(dim=0)
    svals = torch.linalg.svdvals(centered.double())
    if float(svals[1]) < 1e-6 * max(float(svals[0]), 1e-12):
        raise ValueError("degenerate landmarks: points are coincident or collinear")
    n = src.shape[0]
    # solve in float64: float32 residuals put visible offsets into the warp grid
    src64 = src.double()
    design = torch.zeros(2 * n, 4, dtype=torch.float64)
    design[0::2, 0] = src64[:, 0]
    design[0::2, 1] = -src64[:, 1]
    design[0::2, 2] = 1.0
    design[1::2, 0] = src64[:, 1]
    design[1::2, 1] = src64[:, 0]
    design[1::2, 3] = 1.0
    rhs = dst.double().reshape(-1, 1)
    sol = torch.linalg.lstsq(design, rhs).solution[:, 0]
    a, b, tx, ty = sol[0], sol[1], sol[2], sol[3]
    return torch.stack([
        torch.stack([a, -b, tx]),
        torch.stack([b, a, ty]),
    ]).to(src.dtype)


def _invert_affine(m: torch.Tensor) -> torch.Tensor:
    lin = m[:, :2]
    inv = torch.linalg.inv(lin)
    t = -inv @ m[:, 2]
    return torch.cat([inv, t[:, None]], dim=1)


def align_face(image: torch.Tensor, landmarks5: torch.Tensor, out_size: int) -> torch.Tensor:
    """Warp a 3xHxW (or Bx3xHxW) image so landmarks5 hits the template.

    Differentiable w.r.t. the image; out-of-frame samples are zero.
    """
    squeeze = image.ndim == 3
    if squeeze:
        image = image[None]
    if landmarks5.shape != (5, 2):
        raise ValueError(f"expected 5x2 landmarks, got {tuple(landmarks5.shape)}")
    h, w = image.shape[-2:]
    if not ((landmarks5[:, 0] >= -0.5) & (landmarks5[:, 0] <= w - 0.5)
            & (landmarks5[:, 1] >= -0.5) & (landmarks5[:, 1] <= h - 0.5)).all():
        raise ValueError("alignment landmarks must lie inside the frame")
    dtype = image.dtype
    fwd = estimate_similarity(landmarks5.to(dtype), template_points(out_size, dtype))
    inv = _invert_affine(fwd)
    ys, xs = torch.meshgrid(
        torch.arange(out_size, dtype=dtype), torch.arange(out_size, dtype=dtype), indexing="ij"
    )
    pts = torch.stack([xs, ys, torch.ones_like(xs)], dim=-1).reshape(-1, 3)
    src = pts @ inv.T  # pixel coords in the input image
    grid_x = (src[:, 0] + 0.5) / w * 2.0 - 1.0
    grid_y = (src[:, 1] + 0.5) / h * 2.0 - 1.0
    grid = torch.stack([grid_x, grid_y], dim=-1).reshape(1, out_size, out_size, 2)
    out = F.grid_sample(
        image, grid.expand(image.shape[0], -1, -1, -1).to(dtype),
        mode="bilinear", padding_mode="zeros", align_corners=False,
    )
    return out[0] if squeeze else out
