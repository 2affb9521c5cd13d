"""Random face sampling for the synthetic corpus."""

from __future__ import annotations

import math

import numpy as np
import torch

from .model import SH_C0
from .types import KAPPA_DIM, FaceCoefficients, MorphableBasis

ROTATION_LIMIT = math.pi / 6.0  # +/- 30 degrees per axis
TRANSLATION_LIMIT = 0.12        # model units, keeps the face in frame


def sample_random_face(basis: MorphableBasis, rng: np.random.Generator) -> FaceCoefficients:
    """Draw coefficients with basis scales; deterministic given the generator.

    alpha/rho/delta are zero-mean Gaussians with the per-component basis
    scales. Rotations are uniform within +/-30 degrees, translations uniform
    within +/-0.12 units. Illumination is DC-dominant: the per-channel DC is
    positive (around the uniform-light level 1/Y0) and each higher band is
    bounded by 0.3x its channel's DC.
    """
    alpha = rng.standard_normal(basis.d_id) * basis.id_scales.numpy()
    rho = rng.standard_normal(basis.d_exp) * basis.exp_scales.numpy()
    delta = rng.standard_normal(basis.d_tex) * basis.tex_scales.numpy()
    rot = rng.uniform(-ROTATION_LIMIT, ROTATION_LIMIT, 3)
    trans = rng.uniform(-TRANSLATION_LIMIT, TRANSLATION_LIMIT, 3)
    brightness = rng.uniform(0.75, 1.05)
    tint = brightness * rng.uniform(0.92, 1.08, 3)
    kappa = np.zeros(KAPPA_DIM)
    for c in range(3):
        dc = tint[c] / SH_C0
        kappa[9 * c] = dc
        kappa[9 * c + 1: 9 * c + 9] = rng.uniform(-1.0, 1.0, 8) * 0.3 * dc
    as_t = lambda a: torch.from_numpy(np.asarray(a)).float()
    return FaceCoefficients(
        alpha=as_t(alpha),
        rho=as_t(rho),
        delta=as_t(delta),
        kappa=as_t(kappa),
        theta=as_t(np.concatenate([rot, trans])),
    )
