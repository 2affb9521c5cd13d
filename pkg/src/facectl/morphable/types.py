"""Core data types of the linear face model.

A face is described by five coefficient groups: identity shape (alpha),
expression (rho), per-vertex albedo (delta), spherical-harmonics illumination
(kappa, 9 bands x 3 channels) and rigid pose (theta, 3 rotation angles in
radians followed by 3 translations in model units). The editable attribute
names used throughout the CLI map onto those groups via ATTRIBUTE_FIELDS.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
import torch

from ..container import load_container, save_container

KAPPA_DIM = 27  # 9 SH bands x 3 color channels
THETA_DIM = 6   # rx, ry, rz, tx, ty, tz

ATTRIBUTE_FIELDS = {
    "identity": "alpha",
    "expression": "rho",
    "texture": "delta",
    "illumination": "kappa",
    "pose": "theta",
}
ATTRIBUTE_NAMES = tuple(ATTRIBUTE_FIELDS)


def _as_vector(value, name: str, dtype=None) -> torch.Tensor:
    t = torch.as_tensor(value)
    if dtype is not None:
        t = t.to(dtype)
    if t.ndim != 1:
        raise ValueError(f"{name} must be a 1-D vector, got shape {tuple(t.shape)}")
    if not torch.isfinite(t).all():
        raise ValueError(f"{name} contains non-finite entries")
    return t


@dataclass(frozen=True)
class FaceCoefficients:
    """One face's disentangled coefficient set (alpha, rho, delta, kappa, theta)."""

    alpha: torch.Tensor
    rho: torch.Tensor
    delta: torch.Tensor
    kappa: torch.Tensor
    theta: torch.Tensor

    def __post_init__(self):
        for name in ("alpha", "rho", "delta", "kappa", "theta"):
            object.__setattr__(self, name, _as_vector(getattr(self, name), name))
        if self.kappa.numel() != KAPPA_DIM:
            raise ValueError(f"kappa must have {KAPPA_DIM} entries, got {self.kappa.numel()}")
        if self.theta.numel() != THETA_DIM:
            raise ValueError(f"theta must have {THETA_DIM} entries, got {self.theta.numel()}")

    @classmethod
    def zeros(cls, d_id: int, d_exp: int, d_tex: int, dtype=torch.float32) -> "FaceCoefficients":
        return cls(
            alpha=torch.zeros(d_id, dtype=dtype),
            rho=torch.zeros(d_exp, dtype=dtype),
            delta=torch.zeros(d_tex, dtype=dtype),
            kappa=torch.zeros(KAPPA_DIM, dtype=dtype),
            theta=torch.zeros(THETA_DIM, dtype=dtype),
        )

    def replace(self, **fields) -> "FaceCoefficients":
        return dataclasses.replace(self, **fields)

    def to(self, dtype) -> "FaceCoefficients":
        return FaceCoefficients(*(getattr(self, f).to(dtype) for f in
                                  ("alpha", "rho", "delta", "kappa", "theta")))

    def clone(self) -> "FaceCoefficients":
        return FaceCoefficients(*(getattr(self, f).clone() for f in
                                  ("alpha", "rho", "delta", "kappa", "theta")))

    def concat(self) -> torch.Tensor:
        """All groups joined into one vector (generator FC conditioning order)."""
        return torch.cat([self.alpha, self.rho, self.kappa, self.delta, self.theta])

    def numpy(self) -> dict[str, np.ndarray]:
        return {f: getattr(self, f).detach().cpu().numpy().astype(np.float32)
                for f in ("alpha", "rho", "delta", "kappa", "theta")}


@dataclass
class MorphableBasis:
    """Mean face plus PCA-style bases, topology, landmarks, and region labels.

    Shapes: mean_shape/mean_texture Vx3, id_basis Vx3xd_id, exp_basis Vx3xd_exp,
    tex_basis Vx3xd_tex, triangles Tx3 (vertex indices), landmark_indices K,
    region_labels V with values in [0, n_regions). Region label 0 is reserved
    for the background class of rendered segmentation maps, so vertex labels
    are expected in [1, n_regions).
    """

    mean_shape: torch.Tensor
    mean_texture: torch.Tensor
    id_basis: torch.Tensor
    exp_basis: torch.Tensor
    tex_basis: torch.Tensor
    triangles: torch.Tensor
    landmark_indices: torch.Tensor
    id_scales: torch.Tensor
    exp_scales: torch.Tensor
    tex_scales: torch.Tensor
    region_labels: torch.Tensor
    n_regions: int
    region_names: tuple[str, ...] = ()

    def __post_init__(self):
        v = self.mean_shape.shape[0]
        if self.mean_shape.shape != (v, 3) or self.mean_texture.shape != (v, 3):
            raise ValueError("mean_shape and mean_texture must both be Vx3")
        for name in ("id_basis", "exp_basis", "tex_basis"):
            b = getattr(self, name)
            if b.ndim != 3 or b.shape[0] != v or b.shape[1] != 3:
                raise ValueError(f"{name} must be Vx3xd, got {tuple(b.shape)}")
        tri = self.triangles
        if tri.ndim != 2 or tri.shape[1] != 3:
            raise ValueError(f"triangles must be Tx3, got {tuple(tri.shape)}")
        if tri.numel() and (tri.min() < 0 or tri.max() >= v):
            raise ValueError("triangle indices out of vertex range")
        lm = self.landmark_indices
        if lm.numel() and (lm.min() < 0 or lm.max() >= v):
            raise ValueError("landmark indices out of vertex range")
        if self.region_labels.shape != (v,):
            raise ValueError("region_labels must have one entry per vertex")
        if self.region_labels.min() < 0 or self.region_labels.max() >= self.n_regions:
            raise ValueError("region labels out of [0, n_regions)")
        if self.region_names and len(self.region_names) != self.n_regions:
            raise ValueError("region_names length must equal n_regions")
        self._check_rank()

    def _check_rank(self):
        # id and exp deform the same space; their joint flattened rank must be full
        stacked = torch.cat(
            [self.id_basis.reshape(-1, self.d_id), self.exp_basis.reshape(-1, self.d_exp)], dim=1
        )
        rank = torch.linalg.matrix_rank(stacked.double()).item()
        if rank != self.d_id + self.d_exp:
            raise ValueError(
                f"shape bases are linearly dependent: rank {rank} < {self.d_id + self.d_exp}"
            )
        tex_rank = torch.linalg.matrix_rank(self.tex_basis.reshape(-1, self.d_tex).double()).item()
        if tex_rank != self.d_tex:
            raise ValueError(f"texture basis is rank-deficient: {tex_rank} < {self.d_tex}")

    @property
    def n_vertices(self) -> int:
        return self.mean_shape.shape[0]

    @property
    def d_id(self) -> int:
        return self.id_basis.shape[2]

    @property
    def d_exp(self) -> int:
        return self.exp_basis.shape[2]

    @property
    def d_tex(self) -> int:
        return self.tex_basis.shape[2]

    @property
    def n_landmarks(self) -> int:
        return self.landmark_indices.shape[0]

    def zero_coefficients(self, dtype=torch.float32) -> FaceCoefficients:
        return FaceCoefficients.zeros(self.d_id, self.d_exp, self.d_tex, dtype=dtype)

    def to(self, dtype) -> "MorphableBasis":
        return MorphableBasis(
            mean_shape=self.mean_shape.to(dtype),
            mean_texture=self.mean_texture.to(dtype),
            id_basis=self.id_basis.to(dtype),
            exp_basis=self.exp_basis.to(dtype),
            tex_basis=self.tex_basis.to(dtype),
            triangles=self.triangles,
            landmark_indices=self.landmark_indices,
            id_scales=self.id_scales.to(dtype),
            exp_scales=self.exp_scales.to(dtype),
            tex_scales=self.tex_scales.to(dtype),
            region_labels=self.region_labels,
            n_regions=self.n_regions,
            region_names=self.region_names,
        )


@dataclass
class RenderedFace:
    """Rasterizer output: shaded image, coverage mask, per-pixel regions, depth.

    image is 3xHxW in [0,1]; face_mask is HxW {0,1}; region_map is a one-hot
    NxHxW with class 0 = background; depth is HxW with -inf where uncovered.
    """

    image: torch.Tensor
    face_mask: torch.Tensor
    region_map: torch.Tensor
    depth: torch.Tensor


def save_coefficients(path, coeffs: FaceCoefficients) -> None:
    save_container(path, coeffs.numpy(), metadata={"kind": "coefficients"})


def load_coefficients(path) -> FaceCoefficients:
    arrays, _ = load_container(path)
    try:
        return FaceCoefficients(**{k: torch.from_numpy(arrays[k])
                                   for k in ("alpha", "rho", "delta", "kappa", "theta")})
    except KeyError as exc:
        raise ValueError(f"{path}: not a coefficient file (missing {exc})") from exc


def save_basis(path, basis: MorphableBasis) -> None:
    arrays = {
        "mean_shape": basis.mean_shape.numpy().astype(np.float32),
        "mean_texture": basis.mean_texture.numpy().astype(np.float32),
        "id_basis": basis.id_basis.numpy().astype(np.float32),
        "exp_basis": basis.exp_basis.numpy().astype(np.float32),
        "tex_basis": basis.tex_basis.numpy().astype(np.float32),
        "triangles": basis.triangles.numpy().astype(np.int32),
        "landmark_indices": basis.landmark_indices.numpy().astype(np.int32),
        "id_scales": basis.id_scales.numpy().astype(np.float32),
        "exp_scales": basis.exp_scales.numpy().astype(np.float32),
        "tex_scales": basis.tex_scales.numpy().astype(np.float32),
        "region_labels": basis.region_labels.numpy().astype(np.int32),
    }
    meta = {"kind": "morphable_basis", "n_regions": basis.n_regions,
            "region_names": list(basis.region_names)}
    save_container(path, arrays, metadata=meta)


def load_basis(path) -> MorphableBasis:
    arrays, meta = load_container(path)
    f = lambda k: torch.from_numpy(arrays[k].astype(np.float32))
    i = lambda k: torch.from_numpy(arrays[k].astype(np.int64))
    return MorphableBasis(
        mean_shape=f("mean_shape"),
        mean_texture=f("mean_texture"),
        id_basis=f("id_basis"),
        exp_basis=f("exp_basis"),
        tex_basis=f("tex_basis"),
        triangles=i("triangles"),
        landmark_indices=i("landmark_indices"),
        id_scales=f("id_scales"),
        exp_scales=f("exp_scales"),
        tex_scales=f("tex_scales"),
        region_labels=i("region_labels"),
        n_regions=int(meta["n_regions"]),
        region_names=tuple(meta.get("region_names", ())),
    )
