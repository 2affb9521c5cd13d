import math

import numpy as np
import pytest
import torch
import torch.nn.functional as F

from facectl.encoders import align_face, estimate_similarity, five_point_landmarks, template_points
from facectl.morphable import project_landmarks, render_face, sample_random_face
from fdcheck import check_gradient


def face_image(basis, seed=3, size=64):
    coeffs = sample_random_face(basis, np.random.default_rng(seed))
    coeffs = coeffs.replace(theta=torch.zeros(6))  # frontal keeps the crop interior
    rendered = render_face(basis, coeffs, size)
    lm5 = five_point_landmarks(project_landmarks(basis, coeffs, size))
    return rendered.image, lm5


def rotate_about_center(image, landmarks, degrees):
    """Independent rotation oracle built directly on grid_sample."""
    h, w = image.shape[-2:]
    a = math.radians(degrees)
    c, s = math.cos(a), math.sin(a)
    cx, cy = (w - 1) / 2, (h - 1) / 2
    ys, xs = torch.meshgrid(torch.arange(h, dtype=torch.float64),
                            torch.arange(w, dtype=torch.float64), indexing="ij")
    # inverse rotation pulls source coords for each output pixel
    sx = c * (xs - cx) + s * (ys - cy) + cx
    sy = -s * (xs - cx) + c * (ys - cy) + cy
    grid = torch.stack([(sx + 0.5) / w * 2 - 1, (sy + 0.5) / h * 2 - 1], dim=-1)[None]
    rot = F.grid_sample(image[None].double(), grid, mode="bilinear",
                        padding_mode="zeros", align_corners=False)[0].float()
    lx = c * (landmarks[:, 0] - cx) - s * (landmarks[:, 1] - cy) + cx
    ly = s * (landmarks[:, 0] - cx) + c * (landmarks[:, 1] - cy) + cy
    return rot, torch.stack([lx, ly], dim=1)


def test_template_landmarks_give_identity_transform(desk_basis):
    image, _ = face_image(desk_basis)
    size = image.shape[-1]
    lm = template_points(size)
    aligned = align_face(image, lm, size)
    assert (aligned - image).abs().max() < 1e-5


def test_rotation_invariance_psnr(desk_basis):
    image, lm5 = face_image(desk_basis)
    rot_img, rot_lm = rotate_about_center(image, lm5, 10.0)
    a = align_face(image, lm5, 48)
    b = align_face(rot_img, rot_lm, 48)
    mse = float(((a - b) ** 2).mean())
    psnr = 10 * math.log10(1.0 / mse)
    assert psnr > 30.0, f"PSNR {psnr:.1f} dB"


def test_gradient_matches_finite_differences(desk_basis):
    image, lm5 = face_image(desk_basis)
    small = image[:, ::4, ::4].double().contiguous()
    lm_small = (lm5 / 4.0).double()

    def f(img):
        return align_face(img, lm_small, 12).mean()

    check_gradient(f, small, rtol=1e-3, n_coords=40)


def test_degenerate_landmarks_rejected():
    img = torch.zeros(3, 32, 32)
    coincident = torch.full((5, 2), 16.0)
    with pytest.raises(ValueError, match="degenerate"):
        align_face(img, coincident, 32)
    collinear = torch.stack([torch.arange(5.0) * 3 + 6, torch.arange(5.0) * 3 + 6], dim=1)
    with pytest.raises(ValueError, match="degenerate"):
        align_face(img, collinear, 32)


def test_out_of_frame_landmarks_rejected():
    img = torch.zeros(3, 32, 32)
    lm = template_points(32)
    lm[0, 0] = -5.0
    with pytest.raises(ValueError, match="inside the frame"):
        align_face(img, lm, 32)


def test_estimate_similarity_recovers_known_transform():
    rng = np.random.default_rng(0)
    src = torch.from_numpy(rng.uniform(5, 25, size=(5, 2))).float()
    a, b, tx, ty = 1.3, 0.4, 2.0, -3.0
    dst = torch.stack([a * src[:, 0] - b * src[:, 1] + tx,
                       b * src[:, 0] + a * src[:, 1] + ty], dim=1)
    m = estimate_similarity(src, dst)
    expected = torch.tensor([[a, -b, tx], [b, a, ty]])
    torch.testing.assert_close(m, expected, atol=1e-4, rtol=1e-4)


def test_five_point_reduction(desk_basis):
    lm68 = project_landmarks(desk_basis, desk_basis.zero_coefficients(), 64)
    lm5 = five_point_landmarks(lm68)
    assert lm5.shape == (5, 2)
    # left eye center left of right eye center; nose between them vertically below
    assert lm5[0, 0] < lm5[1, 0]
    assert lm5[2, 1] > lm5[0, 1]
    assert lm5[3, 0] < lm5[4, 0]
