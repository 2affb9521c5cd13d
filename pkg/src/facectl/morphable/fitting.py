"""Landmark-only coefficient fitting.

Stands in for an external 3D-reconstruction network: recovers (alpha, rho,
theta) from 2-D landmarks by adaptive gradient descent (Adam, 500 steps at
step size 1e-2) on the reprojection error in normalized coordinates, starting
from zeros. kappa and delta stay zero; they are not observable from landmark
geometry.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch

from .model import project_landmarks
from .types import FaceCoefficients, MorphableBasis

FIT_STEPS = 500
FIT_STEP_SIZE = 1e-2


@dataclass
class FitResult:
    coefficients: FaceCoefficients
    final_loss: float
    reprojection_error: float  # mean pixel distance
    converged: bool


def fit_coefficients(
    landmarks: torch.Tensor,
    basis: MorphableBasis,
    image_size: int,
    reg_weights: tuple[float, float] = (1e-3, 1e-3),
    steps: int = FIT_STEPS,
    step_size: float = FIT_STEP_SIZE,
    quality_px: float | None = None,
) -> FitResult:
    """Minimize sum ||project(fit) - landmarks||^2 + sum_j w_j ||coef_j/scale_j||^2.

    The data term uses pixel coordinates divided by image_size. A result whose
    mean reprojection error exceeds quality_px (default 3% of the image side)
    carries converged=False; it is never silently dropped.
    """
    landmarks = torch.as_tensor(landmarks, dtype=torch.float64)
    if landmarks.shape != (basis.n_landmarks, 2):
        raise ValueError(
            f"expected {basis.n_landmarks}x2 landmarks, got {tuple(landmarks.shape)}"
        )
    if quality_px is None:
        quality_px = 0.03 * image_size
    basis64 = basis.to(torch.float64)
    target = landmarks / image_size
    w_alpha, w_rho = reg_weights
    alpha = torch.zeros(basis.d_id, dtype=torch.float64, requires_grad=True)
    rho = torch.zeros(basis.d_exp, dtype=torch.float64, requires_grad=True)
    theta = torch.zeros(6, dtype=torch.float64, requires_grad=True)
    id_scales = basis64.id_scales
    exp_scales = basis64.exp_scales

    def objective() -> torch.Tensor:
        coeffs = FaceCoefficients(
            alpha=alpha, rho=rho,
            delta=torch.zeros(basis.d_tex, dtype=torch.float64),
            kappa=torch.zeros(27, dtype=torch.float64),
            theta=theta,
        )
        proj = project_landmarks(basis64, coeffs, image_size) / image_size
        data = ((proj - target) ** 2).sum()
        reg = w_alpha * ((alpha / id_scales) ** 2).sum() + w_rho * ((rho / exp_scales) ** 2).sum()
        return data + reg

    opt = torch.optim.Adam([alpha, rho, theta], lr=step_size)
    loss = objective()
    for _ in range(steps):
        opt.zero_grad()
        loss = objective()
        loss.backward()
        opt.step()

    with torch.no_grad():
        fitted = FaceCoefficients(
            alpha=alpha.detach().float(),
            rho=rho.detach().float(),
            delta=torch.zeros(basis.d_tex),
            kappa=torch.zeros(27),
            theta=theta.detach().float(),
        )
        final = float(objective())
        proj = project_landmarks(basis64, fitted.to(torch.float64), image_size)
        reproj = float((proj - landmarks).norm(dim=1).mean())
    return FitResult(
        coefficients=fitted,
        final_loss=final,
        reprojection_error=reproj,
        converged=reproj <= quality_px,
    )
