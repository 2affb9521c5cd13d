"""Region pooling, style broadcast, and segmentation-map utilities.

Segmentation maps are one-hot BxNxHxW tensors (class 0 = background). Pooling
averages features over each region; broadcast scatters one style vector per
region back onto its pixels. Pooling accumulates in float64 and casts back,
so pooling a broadcast style matrix recovers it bitwise for float32 inputs.
"""

from __future__ import annotations

import torch


def validate_segmentation(seg: torch.Tensor) -> None:
    if seg.ndim != 4:
        raise ValueError(f"segmentation must be BxNxHxW, got shape {tuple(seg.shape)}")
    binary = (seg == 0.0) | (seg == 1.0)
    if not bool(binary.all()):
        raise ValueError("segmentation entries must be exactly 0 or 1")
    sums = seg.sum(dim=1)
    if not bool((sums == 1.0).all()):
        raise ValueError("segmentation must be one-hot: class channels must sum to 1 per pixel")


def one_hot_map(labels: torch.Tensor, n_classes: int) -> torch.Tensor:
    """Integer label map (HxW or BxHxW) to one-hot (Bx)NxHxW float."""
    squeeze = labels.ndim == 2
    if squeeze:
        labels = labels[None]
    if labels.min() < 0 or labels.max() >= n_classes:
        raise ValueError("labels out of range for one-hot encoding")
    out = torch.nn.functional.one_hot(labels.long(), n_classes)
    out = out.permute(0, 3, 1, 2).float()
    return out[0] if squeeze else out


def region_average_pool(features: torch.Tensor, seg: torch.Tensor) -> torch.Tensor:
    """S[b,n,:] = sum_p features[b,:,p] M[b,n,p] / max(sum_p M[b,n,p], 1).

    Empty regions yield zero rows without division errors.
    """
    if features.ndim != 4 or seg.ndim != 4:
        raise ValueError("features and segmentation must be 4-D")
    if features.shape[-2:] != seg.shape[-2:] or features.shape[0] != seg.shape[0]:
        raise ValueError(
            f"spatial/batch mismatch: features {tuple(features.shape)} vs seg {tuple(seg.shape)}"
        )
    acc = torch.float64 if features.dtype != torch.float64 else torch.float64
    f = features.to(acc)
    m = seg.to(acc)
    numer = torch.einsum("bdhw,bnhw->bnd", f, m)
    counts = m.sum(dim=(2, 3)).clamp_min(1.0)
    return (numer / counts[:, :, None]).to(features.dtype)


def broadcast_styles(styles: torch.Tensor, seg: torch.Tensor) -> torch.Tensor:
    """z_style = S^T x M: every pixel receives its region's style vector."""
    if styles.ndim != 3 or seg.ndim != 4:
        raise ValueError("styles must be BxNxD and segmentation BxNxHxW")
    if styles.shape[1] != seg.shape[1]:
        raise ValueError(
            f"class count mismatch: styles N={styles.shape[1]}, seg N={seg.shape[1]}"
        )
    return torch.einsum("bnd,bnhw->bdhw", styles, seg)


def downsample_segmentation(seg: torch.Tensor, h: int, w: int) -> torch.Tensor:
    """Nearest-neighbor label resampling that preserves the one-hot invariant.

    Output pixel (i, j) copies input pixel (floor((i+0.5)*H/h), floor((j+0.5)*W/w));
    the same rule serves upsampling.
    """
    if seg.ndim != 4:
        raise ValueError("segmentation must be BxNxHxW")
    src_h, src_w = seg.shape[-2:]
    iy = ((torch.arange(h, dtype=torch.float64) + 0.5) * src_h / h).floor().long().clamp_(max=src_h - 1)
    ix = ((torch.arange(w, dtype=torch.float64) + 0.5) * src_w / w).floor().long().clamp_(max=src_w - 1)
    return seg[:, :, iy][:, :, :, ix]
