import numpy as np
import pytest
import torch

from facectl.morphable import fit_coefficients, project_landmarks, sample_random_face


def test_round_trip_reprojection(desk_basis):
    # landmarks synthesized from known coefficients refit to < 0.5 px mean
    for seed in (0, 1, 2):
        rng = np.random.default_rng(100 + seed)
        c = sample_random_face(desk_basis, rng)
        c = c.replace(alpha=0.5 * c.alpha, rho=0.5 * c.rho)
        lm = project_landmarks(desk_basis, c, 64)
        fit = fit_coefficients(lm, desk_basis, 64)
        assert fit.converged
        assert fit.reprojection_error < 0.5


def test_mean_face_regularization_pull(desk_basis):
    lm = project_landmarks(desk_basis, desk_basis.zero_coefficients(), 64)
    fit = fit_coefficients(lm, desk_basis, 64)
    assert fit.coefficients.alpha.norm() < 0.1 * desk_basis.id_scales.norm()
    assert fit.coefficients.rho.norm() < 0.1 * desk_basis.exp_scales.norm()


def test_degenerate_landmarks_flagged(desk_basis):
    lm = torch.zeros(desk_basis.n_landmarks, 2)
    fit = fit_coefficients(lm, desk_basis, 64)
    assert not fit.converged
    assert fit.reprojection_error > 0.03 * 64


def test_kappa_delta_stay_zero(desk_basis):
    lm = project_landmarks(desk_basis, desk_basis.zero_coefficients(), 64)
    fit = fit_coefficients(lm, desk_basis, 64, steps=10)
    assert torch.equal(fit.coefficients.kappa, torch.zeros(27))
    assert torch.equal(fit.coefficients.delta, torch.zeros(desk_basis.d_tex))


def test_wrong_landmark_count_rejected(desk_basis):
    with pytest.raises(ValueError, match="landmarks"):
        fit_coefficients(torch.zeros(10, 2), desk_basis, 64)
