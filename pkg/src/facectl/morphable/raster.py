"""Software z-buffer rasterizer for the coarse face render.

Orthographic projection along -z (larger z is closer). Triangles wound
counter-clockwise in model x-y are front-facing; the y flip into row-major
pixel space makes their screen-space signed area negative, which is the
culling test below. Rasterization is intentionally non-differentiable;
gradients reach coefficients through landmark projection and vertex shading
only.
"""

from __future__ import annotations

import warnings

import numpy as np
import torch
from numba import njit

from .model import ORTHO_HALF_EXTENT, compute_vertex_normals, reconstruct_shape, \
    reconstruct_texture, sh_shade, apply_pose
from .types import FaceCoefficients, MorphableBasis, RenderedFace


@njit(cache=True)
def _raster_fill(sx, sy, z, colors, tris, labels, color_buf, depth_buf, mask_buf, region_buf):
    h, w = depth_buf.shape
    for t in range(tris.shape[0]):
        i0, i1, i2 = tris[t, 0], tris[t, 1], tris[t, 2]
        x0, y0, z0 = sx[i0], sy[i0], z[i0]
        x1, y1, z1 = sx[i1], sy[i1], z[i1]
        x2, y2, z2 = sx[i2], sy[i2], z[i2]
        area = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
        if area >= -1e-12:  # back-facing or degenerate
            continue
        xmin = max(0, int(np.ceil(min(x0, x1, x2))))
        xmax = min(w - 1, int(np.floor(max(x0, x1, x2))))
        ymin = max(0, int(np.ceil(min(y0, y1, y2))))
        ymax = min(h - 1, int(np.floor(max(y0, y1, y2))))
        if xmin > xmax or ymin > ymax:
            continue
        l0, l1, l2 = labels[i0], labels[i1], labels[i2]
        for py in range(ymin, ymax + 1):
            for px in range(xmin, xmax + 1):
                w0 = (x1 - px) * (y2 - py) - (x2 - px) * (y1 - py)
                w1 = (px - x0) * (y2 - y0) - (x2 - x0) * (py - y0)
                b0 = w0 / area
                b1 = w1 / area
                b2 = 1.0 - b0 - b1
                if b0 < 0.0 or b1 < 0.0 or b2 < 0.0:
                    continue
                zp = b0 * z0 + b1 * z1 + b2 * z2
                if zp <= depth_buf[py, px]:
                    continue
                depth_buf[py, px] = zp
                mask_buf[py, px] = 1
                for c in range(3):
                    color_buf[c, py, px] = (
                        b0 * colors[i0, c] + b1 * colors[i1, c] + b2 * colors[i2, c]
                    )
                # majority vertex label; three-way ties go to the closest corner
                if l0 == l1 or l0 == l2:
                    region_buf[py, px] = l0
                elif l1 == l2:
                    region_buf[py, px] = l1
                elif b0 >= b1 and b0 >= b2:
                    region_buf[py, px] = l0
                elif b1 >= b2:
                    region_buf[py, px] = l1
                else:
                    region_buf[py, px] = l2


def rasterize(
    vertices: torch.Tensor,
    colors: torch.Tensor,
    basis: MorphableBasis,
    image_size: int,
) -> RenderedFace:
    """Z-buffer fill of posed vertices with barycentric-interpolated colors."""
    if image_size < 16:
        raise ValueError(f"image_size must be >= 16, got {image_size}")
    h = w = int(image_size)
    e = ORTHO_HALF_EXTENT
    scale = image_size / (2.0 * e)
    v = vertices.detach().cpu().numpy().astype(np.float64)
    sx = (v[:, 0] + e) * scale - 0.5
    sy = (e - v[:, 1]) * scale - 0.5
    z = v[:, 2]
    color_buf = np.zeros((3, h, w))
    depth_buf = np.full((h, w), -np.inf)
    mask_buf = np.zeros((h, w), dtype=np.uint8)
    region_buf = np.zeros((h, w), dtype=np.int64)
    _raster_fill(
        sx, sy, z,
        colors.detach().cpu().numpy().astype(np.float64),
        basis.triangles.numpy().astype(np.int64),
        basis.region_labels.numpy().astype(np.int64),
        color_buf, depth_buf, mask_buf, region_buf,
    )
    if not mask_buf.any():
        warnings.warn("rasterization produced empty coverage (all triangles culled or off-frame)")
    region_map = np.zeros((basis.n_regions, h, w), dtype=np.float32)
    yy, xx = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    region_map[region_buf, yy, xx] = 1.0
    return RenderedFace(
        image=torch.from_numpy(np.clip(color_buf, 0.0, 1.0).astype(np.float32)),
        face_mask=torch.from_numpy(mask_buf.astype(np.float32)),
        region_map=torch.from_numpy(region_map),
        depth=torch.from_numpy(depth_buf.astype(np.float32)),
    )


def render_face(basis: MorphableBasis, coeffs: FaceCoefficients, image_size: int) -> RenderedFace:
    """Reconstruct, pose, shade and rasterize one coefficient set.

    Normals are taken on the posed mesh, so kappa lives in the camera frame.
    """
    vertices = apply_pose(reconstruct_shape(basis, coeffs), coeffs.theta)
    albedo, _ = reconstruct_texture(basis, coeffs)
    normals, _ = compute_vertex_normals(vertices, basis.triangles)
    colors = sh_shade(normals, albedo, coeffs.kappa)
    return rasterize(vertices, colors, basis, image_size)
