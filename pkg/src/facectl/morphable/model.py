"""Differentiable face-model operations: reconstruction, pose, shading, landmarks.

All functions here are pure and differentiable w.r.t. the coefficient inputs
(rasterization lives in raster.py and is explicitly non-differentiable).
Rotation convention: intrinsic Rz @ Ry @ Rx built from theta[0:3] = (rx, ry, rz);
theta[3:6] translates in model units. The camera is orthographic along -z, so
+z faces the viewer; pixel coordinates come from projection.py constants.
"""

from __future__ import annotations

import torch

from .types import FaceCoefficients, MorphableBasis

# first nine real spherical-harmonics basis constants (documented to 6 decimals)
SH_C0 = 0.282095   # Y0 = c0
SH_C1 = 0.488603   # Y1 = c1*y, Y2 = c1*z, Y3 = c1*x
SH_C2 = 1.092548   # Y4 = c2*x*y, Y5 = c2*y*z, Y7 = c2*x*z
SH_C3 = 0.315392   # Y6 = c3*(3z^2 - 1)
SH_C4 = 0.546274   # Y8 = c4*(x^2 - y^2)

# orthographic window: model x/y in [-E, E] map onto the image; pixel centers
# sit at integer coordinates, so x=-E maps to -0.5 and x=+E to W-0.5
ORTHO_HALF_EXTENT = 1.4


def _check_dim(name: str, vec: torch.Tensor, expected: int):
    if vec.numel() != expected:
        raise ValueError(f"{name} has length {vec.numel()}, basis expects {expected}")


def reconstruct_shape(basis: MorphableBasis, coeffs: FaceCoefficients) -> torch.Tensor:
    """Vertices Vx3 = mean_shape + id_basis . alpha + exp_basis . rho."""
    _check_dim("alpha", coeffs.alpha, basis.d_id)
    _check_dim("rho", coeffs.rho, basis.d_exp)
    dtype = torch.promote_types(basis.mean_shape.dtype, coeffs.alpha.dtype)
    return (
        basis.mean_shape.to(dtype)
        + torch.einsum("vcd,d->vc", basis.id_basis.to(dtype), coeffs.alpha.to(dtype))
        + torch.einsum("vcd,d->vc", basis.exp_basis.to(dtype), coeffs.rho.to(dtype))
    )


def reconstruct_texture(
    basis: MorphableBasis, coeffs: FaceCoefficients
) -> tuple[torch.Tensor, int]:
    """Albedo Vx3 in [0,1] plus the number of entries the clamp saturated."""
    _check_dim("delta", coeffs.delta, basis.d_tex)
    dtype = torch.promote_types(basis.mean_texture.dtype, coeffs.delta.dtype)
    raw = basis.mean_texture.to(dtype) + torch.einsum(
        "vcd,d->vc", basis.tex_basis.to(dtype), coeffs.delta.to(dtype)
    )
    clamped = int(((raw < 0.0) | (raw > 1.0)).sum())
    return raw.clamp(0.0, 1.0), clamped


def rotation_matrix(angles: torch.Tensor) -> torch.Tensor:
    """Rz(angles[2]) @ Ry(angles[1]) @ Rx(angles[0]), differentiable."""
    rx, ry, rz = angles[0], angles[1], angles[2]
    one = torch.ones((), dtype=angles.dtype)
    zero = torch.zeros((), dtype=angles.dtype)
    cx, sx = torch.cos(rx), torch.sin(rx)
    cy, sy = torch.cos(ry), torch.sin(ry)
    cz, sz = torch.cos(rz), torch.sin(rz)
    mx = torch.stack([one, zero, zero, zero, cx, -sx, zero, sx, cx]).reshape(3, 3)
    my = torch.stack([cy, zero, sy, zero, one, zero, -sy, zero, cy]).reshape(3, 3)
    mz = torch.stack([cz, -sz, zero, sz, cz, zero, zero, zero, one]).reshape(3, 3)
    return mz @ my @ mx


def apply_pose(vertices: torch.Tensor, theta: torch.Tensor) -> torch.Tensor:
    """Rigidly transform Vx3 vertices: R(theta[0:3]) v + theta[3:6]."""
    dtype = torch.promote_types(vertices.dtype, theta.dtype)
    r = rotation_matrix(theta[:3].to(dtype))
    return vertices.to(dtype) @ r.T + theta[3:6].to(dtype)


def compute_vertex_normals(
    vertices: torch.Tensor, triangles: torch.Tensor
) -> tuple[torch.Tensor, int]:
    """Area-weighted vertex normals; returns (normals, fallback count).

    The cross product of two triangle edges has length 2x area, so summing
    raw cross products per vertex is the area weighting. Vertices whose
    accumulated normal vanishes (no adjacent non-degenerate triangle) fall
    back to (0, 0, 1) and are counted.
    """
    v0 = vertices[triangles[:, 0]]
    v1 = vertices[triangles[:, 1]]
    v2 = vertices[triangles[:, 2]]
    face = torch.cross(v1 - v0, v2 - v0, dim=1)
    acc = torch.zeros_like(vertices)
    for k in range(3):
        acc = acc.index_add(0, triangles[:, k], face)
    norm = acc.norm(dim=1, keepdim=True)
    degenerate = norm[:, 0] < 1e-12
    fallback = torch.zeros_like(acc)
    fallback[:, 2] = 1.0
    normals = torch.where(degenerate[:, None], fallback, acc / norm.clamp_min(1e-12))
    return normals, int(degenerate.sum())


def sh_basis(normals: torch.Tensor) -> torch.Tensor:
    """First 9 real SH basis functions evaluated at unit normals: Vx9."""
    x, y, z = normals[:, 0], normals[:, 1], normals[:, 2]
    return torch.stack(
        [
            torch.full_like(x, SH_C0),
            SH_C1 * y,
            SH_C1 * z,
            SH_C1 * x,
            SH_C2 * x * y,
            SH_C2 * y * z,
            SH_C3 * (3.0 * z * z - 1.0),
            SH_C2 * x * z,
            SH_C4 * (x * x - y * y),
        ],
        dim=1,
    )


def sh_shade(normals: torch.Tensor, albedo: torch.Tensor, kappa: torch.Tensor) -> torch.Tensor:
    """Per-vertex shaded colors: albedo_c * sum_b kappa[9c+b] Y_b(n), clamped to [0,1]."""
    dtype = torch.promote_types(normals.dtype, kappa.dtype)
    basis = sh_basis(normals.to(dtype))
    shading = basis @ kappa.to(dtype).reshape(3, 9).T  # Vx3
    return (albedo.to(dtype) * shading).clamp(0.0, 1.0)


def uniform_light_kappa(dtype=torch.float32) -> torch.Tensor:
    """Illumination whose shading term is exactly 1 (DC = 1/Y0 per channel)."""
    kappa = torch.zeros(27, dtype=dtype)
    kappa[0] = kappa[9] = kappa[18] = 1.0 / SH_C0
    return kappa


def model_to_pixels(xy: torch.Tensor, image_size: int) -> torch.Tensor:
    """Map model x/y to pixel coordinates; y flips because rows grow downward."""
    e = ORTHO_HALF_EXTENT
    scale = image_size / (2.0 * e)
    px = (xy[:, 0] + e) * scale - 0.5
    py = (e - xy[:, 1]) * scale - 0.5
    return torch.stack([px, py], dim=1)


def project_landmarks(
    basis: MorphableBasis, coeffs: FaceCoefficients, image_size: int
) -> torch.Tensor:
    """Kx2 landmark pixel positions for the reconstructed, posed face.

    Reconstruction is restricted to the landmark vertices (slicing the bases
    commutes with the linear combination), so fitting loops stay cheap.
    """
    _check_dim("alpha", coeffs.alpha, basis.d_id)
    _check_dim("rho", coeffs.rho, basis.d_exp)
    idx = basis.landmark_indices
    dtype = torch.promote_types(basis.mean_shape.dtype, coeffs.alpha.dtype)
    pts = (
        basis.mean_shape[idx].to(dtype)
        + torch.einsum("vcd,d->vc", basis.id_basis[idx].to(dtype), coeffs.alpha.to(dtype))
        + torch.einsum("vcd,d->vc", basis.exp_basis[idx].to(dtype), coeffs.rho.to(dtype))
    )
    posed = apply_pose(pts, coeffs.theta.to(dtype))
    return model_to_pixels(posed, image_size)
