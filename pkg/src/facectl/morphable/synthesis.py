"""Procedural construction of a synthetic morphable basis.

Licensed scan-based face models cannot ship with this package, so the basis
is generated: the mean face is a height field over an elliptical domain with
nose/brow/lip relief, the shape and texture bases are smooth random cosine
fields orthonormalized over the flattened vertex dimension, and 68 landmark
vertices follow the standard annotation order (0-16 jaw, 17-26 brows, 27-35
nose, 36-47 eyes, 48-67 lips).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from .types import MorphableBasis

REGION_NAMES = ("background", "skin", "eyebrows", "eyes", "nose", "lips", "forehead", "chin")

# subject-left eye/brow centers; the right side mirrors in u
_EYE_CENTER = (-0.36, 0.28)
_EYE_RX, _EYE_RY = 0.11, 0.045
_BROW_CENTER = (-0.38, 0.44)
_MOUTH_CENTER = (0.0, -0.48)
_MOUTH_RX, _MOUTH_RY = 0.24, 0.09
_NOSE_TIP = (0.0, -0.03)

# landmark template semantic groups (standard 68-point order)
JAW = tuple(range(0, 17))
LEFT_BROW = tuple(range(17, 22))
RIGHT_BROW = tuple(range(22, 27))
NOSE_BRIDGE = tuple(range(27, 31))
NOSE_BASE = tuple(range(31, 36))
LEFT_EYE = tuple(range(36, 42))
RIGHT_EYE = tuple(range(42, 48))
OUTER_LIP = tuple(range(48, 60))
INNER_LIP = tuple(range(60, 68))
NOSE_TIP_INDEX = 30
MOUTH_LEFT_INDEX = 48
MOUTH_RIGHT_INDEX = 54


@dataclass(frozen=True)
class BasisConfig:
    grid_resolution: int = 56
    d_id: int = 16
    d_exp: int = 12
    d_tex: int = 16
    n_regions: int = 8

    @classmethod
    def full_scale(cls) -> "BasisConfig":
        return cls(grid_resolution=120, d_id=80, d_exp=64, d_tex=80)


def landmark_template() -> np.ndarray:
    """68 canonical landmark positions in normalized face coordinates (u, v)."""
    pts = np.zeros((68, 2))
    # jawline traces the lower half of the face outline, left ear to right ear
    psi = np.pi + np.linspace(0.0, np.pi, 17)
    pts[JAW, 0] = 0.90 * np.cos(psi)
    pts[JAW, 1] = 1.02 * np.sin(psi)
    bx, by = _BROW_CENTER
    arc = np.linspace(-0.17, 0.17, 5)
    pts[LEFT_BROW, 0] = bx + arc
    pts[LEFT_BROW, 1] = by + 0.035 * (1 - (arc / 0.17) ** 2)
    pts[RIGHT_BROW, 0] = -bx - arc[::-1]
    pts[RIGHT_BROW, 1] = pts[LEFT_BROW, 1][::-1]
    pts[NOSE_BRIDGE, 0] = 0.0
    pts[NOSE_BRIDGE, 1] = np.linspace(0.30, _NOSE_TIP[1], 4)
    pts[NOSE_BASE, 0] = np.array([-0.12, -0.06, 0.0, 0.06, 0.12])
    pts[NOSE_BASE, 1] = np.array([-0.12, -0.145, -0.155, -0.145, -0.12])
    ex, ey = _EYE_CENTER
    ang = np.array([np.pi, 2 * np.pi / 3, np.pi / 3, 0.0, -np.pi / 3, -2 * np.pi / 3])
    pts[LEFT_EYE, 0] = ex + _EYE_RX * np.cos(ang)
    pts[LEFT_EYE, 1] = ey + _EYE_RY * np.sin(ang)
    # mirror with corner order preserved (outer corner first)
    pts[RIGHT_EYE, 0] = -ex + _EYE_RX * np.cos(ang[::-1] + np.pi)
    pts[RIGHT_EYE, 1] = ey + _EYE_RY * np.sin(ang[::-1] + np.pi)
    mx, my = _MOUTH_CENTER
    ang = np.pi - np.arange(12) * (2 * np.pi / 12)
    pts[OUTER_LIP, 0] = mx + _MOUTH_RX * np.cos(ang)
    pts[OUTER_LIP, 1] = my + _MOUTH_RY * np.sin(ang)
    ang = np.pi - np.arange(8) * (2 * np.pi / 8)
    pts[INNER_LIP, 0] = mx + 0.15 * np.cos(ang)
    pts[INNER_LIP, 1] = my + 0.04 * np.sin(ang)
    return pts


def _height_field(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    dome = 0.55 * np.sqrt(np.clip(1.0 - (u / 1.0) ** 2 - (v / 1.15) ** 2, 0.0, None))
    nose = 0.22 * np.exp(-((u / 0.10) ** 2) - (((v - 0.05) / 0.28) ** 2))
    brow = 0.04 * np.exp(-(((np.abs(u) - 0.38) / 0.18) ** 2) - (((v - 0.44) / 0.08) ** 2))
    socket = -0.05 * np.exp(-(((np.abs(u) - 0.36) / 0.14) ** 2) - (((v - 0.28) / 0.09) ** 2))
    lips = 0.05 * np.exp(-((u / 0.26) ** 2) - (((v + 0.48) / 0.09) ** 2))
    return dome + nose + brow + socket + lips


def _region_of(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    labels = np.ones(u.shape, dtype=np.int64)  # skin
    au = np.abs(u)
    brow = (((au - 0.38) / 0.17) ** 2 + ((v - 0.44) / 0.05) ** 2) <= 1.0
    eye = (((au - 0.36) / 0.13) ** 2 + ((v - 0.28) / 0.065) ** 2) <= 1.0
    nose = ((u / 0.13) ** 2 + ((v - 0.07) / 0.27) ** 2 <= 1.0) | (
        (u / 0.17) ** 2 + ((v + 0.13) / 0.06) ** 2 <= 1.0
    )
    lips = ((u / 0.27) ** 2 + ((v + 0.48) / 0.105) ** 2) <= 1.0
    labels[v >= 0.58] = REGION_NAMES.index("forehead")
    labels[v <= -0.78] = REGION_NAMES.index("chin")
    labels[brow] = REGION_NAMES.index("eyebrows")
    labels[eye] = REGION_NAMES.index("eyes")
    labels[nose] = REGION_NAMES.index("nose")
    labels[lips] = REGION_NAMES.index("lips")
    return labels


def _mean_texture(u: np.ndarray, v: np.ndarray, labels: np.ndarray) -> np.ndarray:
    skin = np.array([0.72, 0.57, 0.49])
    tex = np.tile(skin, (u.shape[0], 1))
    # gentle large-scale shading so skin is not flat
    tex *= (0.92 + 0.08 * np.cos(0.9 * u[:, None]) * np.cos(0.7 * v[:, None] + 0.4))
    tex[labels == REGION_NAMES.index("lips")] = (0.62, 0.34, 0.33)
    tex[labels == REGION_NAMES.index("eyebrows")] = (0.33, 0.26, 0.21)
    tex[labels == REGION_NAMES.index("eyes")] = (0.30, 0.32, 0.36)
    tex[labels == REGION_NAMES.index("nose")] *= 1.05
    return np.clip(tex, 0.0, 1.0)


def _smooth_fields(u, v, n_fields: int, rng: np.random.Generator, weight=None) -> np.ndarray:
    """n_fields random low-frequency cosine mixtures over the vertices, Vx3 each."""
    out = np.zeros((n_fields, u.shape[0], 3))
    for j in range(n_fields):
        for c in range(3):
            f = np.zeros_like(u)
            for _ in range(3):
                wu, wv = rng.uniform(0.5, 3.5, size=2)
                pu, pv = rng.uniform(0.0, 2 * np.pi, size=2)
                f += rng.normal() * np.cos(wu * u + pu) * np.cos(wv * v + pv)
            out[j, :, c] = f
    if weight is not None:
        out *= weight[None, :, None]
    return out


def _gram_schmidt(columns: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt over columns of an MxD matrix."""
    q = columns.astype(np.float64).copy()
    for j in range(q.shape[1]):
        for i in range(j):
            q[:, j] -= (q[:, i] @ q[:, j]) * q[:, i]
        norm = np.linalg.norm(q[:, j])
        if norm < 1e-9:
            raise ValueError("basis field collapsed during orthonormalization")
        q[:, j] /= norm
    return q


def make_synthetic_basis(config: BasisConfig, rng: np.random.Generator) -> MorphableBasis:
    """Build a deterministic synthetic basis from a seeded generator."""
    g = config.grid_resolution
    us = np.linspace(-1.0, 1.0, g)
    vs = np.linspace(-1.2, 1.2, int(round(g * 1.2)))
    uu, vv = np.meshgrid(us, vs, indexing="ij")
    keep = (uu / 0.95) ** 2 + (vv / 1.1) ** 2 <= 1.0
    index = -np.ones(uu.shape, dtype=np.int64)
    index[keep] = np.arange(keep.sum())
    u = uu[keep]
    v = vv[keep]
    n_vertices = u.shape[0]
    dof = 3 * n_vertices
    if config.d_id + config.d_exp > dof or config.d_tex > dof:
        raise ValueError(
            f"requested dimensions exceed available degrees of freedom ({dof})"
        )

    mean_shape = np.stack([u, v, _height_field(u, v)], axis=1)
    labels = _region_of(u, v)
    mean_texture = _mean_texture(u, v, labels)

    # counter-clockwise in the u-v plane so geometric normals face the camera (+z)
    tris = []
    for i in range(uu.shape[0] - 1):
        for j in range(uu.shape[1] - 1):
            a, b = index[i, j], index[i + 1, j]
            c, d = index[i, j + 1], index[i + 1, j + 1]
            if a >= 0 and b >= 0 and d >= 0:
                tris.append((a, b, d))
            if a >= 0 and d >= 0 and c >= 0:
                tris.append((a, d, c))
    triangles = np.array(tris, dtype=np.int64)

    template = landmark_template()
    taken: set[int] = set()
    landmark_indices = np.zeros(68, dtype=np.int64)
    for k, (tu, tv) in enumerate(template):
        order = np.argsort((u - tu) ** 2 + (v - tv) ** 2)
        pick = next(int(i) for i in order if int(i) not in taken)
        taken.add(pick)
        landmark_indices[k] = pick

    # expression fields lean toward the lower face; identity fields are global
    exp_weight = 0.35 + 0.65 * np.exp(-(((v + 0.45) / 0.65) ** 2))
    shape_fields = np.concatenate(
        [
            _smooth_fields(u, v, config.d_id, rng),
            _smooth_fields(u, v, config.d_exp, rng, weight=exp_weight),
        ]
    )
    shape_q = _gram_schmidt(shape_fields.reshape(config.d_id + config.d_exp, -1).T)
    id_basis = shape_q[:, : config.d_id].T.reshape(config.d_id, n_vertices, 3)
    exp_basis = shape_q[:, config.d_id:].T.reshape(config.d_exp, n_vertices, 3)
    tex_fields = _smooth_fields(u, v, config.d_tex, rng)
    tex_q = _gram_schmidt(tex_fields.reshape(config.d_tex, -1).T)
    tex_basis = tex_q.T.reshape(config.d_tex, n_vertices, 3)

    decay = lambda base, d: base * 0.97 ** np.arange(d)
    f32 = lambda a: torch.from_numpy(np.ascontiguousarray(a)).float()
    return MorphableBasis(
        mean_shape=f32(mean_shape),
        mean_texture=f32(mean_texture),
        id_basis=f32(id_basis.transpose(1, 2, 0)),
        exp_basis=f32(exp_basis.transpose(1, 2, 0)),
        tex_basis=f32(tex_basis.transpose(1, 2, 0)),
        triangles=torch.from_numpy(triangles),
        landmark_indices=torch.from_numpy(landmark_indices),
        id_scales=f32(decay(2.5, config.d_id)),
        exp_scales=f32(decay(1.2, config.d_exp)),
        tex_scales=f32(decay(2.2, config.d_tex)),
        region_labels=torch.from_numpy(labels),
        n_regions=config.n_regions,
        region_names=REGION_NAMES[: config.n_regions],
    )
