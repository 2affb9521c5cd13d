import numpy as np
import pytest
import torch

from facectl.encoders import (
    IdentityEncoder,
    align_face,
    encode_identity,
    finetune_identity_encoder,
    five_point_landmarks,
)
from facectl.morphable import project_landmarks, render_face, sample_random_face


@pytest.fixture(scope="module")
def encoder():
    return IdentityEncoder(input_size=64).eval()


def aligned_render(basis, coeffs, size=64):
    img = render_face(basis, coeffs, size).image * 2.0 - 1.0
    lm5 = five_point_landmarks(project_landmarks(basis, coeffs, size))
    return align_face(img, lm5, size)


def test_deterministic(encoder, desk_basis):
    img = aligned_render(desk_basis, desk_basis.zero_coefficients())
    a = encode_identity(img, encoder)
    b = encode_identity(img, encoder)
    assert torch.equal(a, b)


def test_unit_norm(encoder):
    rng = np.random.default_rng(0)
    for _ in range(5):
        img = torch.from_numpy(rng.uniform(-1, 1, size=(3, 64, 64))).float()
        z = encode_identity(img, encoder)
        assert abs(float(z.norm()) - 1.0) <= 1e-5


def test_batch_composition_invariance(encoder):
    rng = np.random.default_rng(1)
    batch = torch.from_numpy(rng.uniform(-1, 1, size=(4, 3, 64, 64))).float()
    batched = encode_identity(batch, encoder)
    for i in range(4):
        single = encode_identity(batch[i], encoder)
        assert (single - batched[i]).abs().max() <= 1e-5


def test_wrong_resolution_rejected(encoder):
    with pytest.raises(ValueError, match="64x64"):
        encode_identity(torch.zeros(3, 32, 32), encoder)


def test_seeded_weights_reproducible():
    a = IdentityEncoder(input_size=64)
    b = IdentityEncoder(input_size=64)
    for pa, pb in zip(a.parameters(), b.parameters()):
        assert torch.equal(pa, pb)
    assert not any(p.requires_grad for p in a.parameters())


def test_same_identity_pairs_score_higher(encoder, desk_basis):
    # 100 same-identity pairs vs 100 cross-identity pairs, mean comparison
    rng = np.random.default_rng(42)
    n_id, per_id = 10, 4
    embeddings = []
    for _ in range(n_id):
        alpha = torch.from_numpy(rng.standard_normal(desk_basis.d_id)
                                 * desk_basis.id_scales.numpy()).float()
        delta = torch.from_numpy(rng.standard_normal(desk_basis.d_tex)
                                 * desk_basis.tex_scales.numpy()).float()
        per = []
        for _ in range(per_id):
            coeffs = sample_random_face(desk_basis, rng).replace(alpha=alpha, delta=delta)
            per.append(encode_identity(aligned_render(desk_basis, coeffs), encoder))
        embeddings.append(torch.stack(per))
    same, diff = [], []
    for i in range(n_id):
        for j in range(per_id):
            for k in range(j + 1, per_id):
                same.append(float(embeddings[i][j] @ embeddings[i][k]))
        for i2 in range(i + 1, n_id):
            for j in range(2):
                diff.append(float(embeddings[i][j] @ embeddings[i2][j]))
    assert len(same) >= 50 and len(diff) >= 50
    assert np.mean(same) > np.mean(diff)


def test_finetune_runs_and_refreezes(desk_basis):
    rng = np.random.default_rng(5)
    images, labels = [], []
    for ident in range(3):
        alpha = torch.from_numpy(rng.standard_normal(desk_basis.d_id)
                                 * desk_basis.id_scales.numpy()).float()
        for _ in range(4):
            coeffs = sample_random_face(desk_basis, rng).replace(alpha=alpha)
            images.append(render_face(desk_basis, coeffs, 64).image * 2 - 1)
            labels.append(ident)
    images = torch.stack(images)
    labels = torch.tensor(labels)
    enc = IdentityEncoder(input_size=64)
    before = [p.clone() for p in enc.parameters()]
    losses = finetune_identity_encoder(enc, images, labels, 3, steps=12, batch_size=8)
    assert len(losses) == 12
    assert all(np.isfinite(losses))
    assert any(not torch.equal(a, b) for a, b in zip(before, enc.parameters()))
    assert not any(p.requires_grad for p in enc.parameters())
