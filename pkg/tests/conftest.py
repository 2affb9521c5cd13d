import numpy as np
import pytest

from facectl.morphable import BasisConfig, make_synthetic_basis

BASIS_SEED = 7


@pytest.fixture(scope="session")
def desk_basis():
    return make_synthetic_basis(BasisConfig(), np.random.default_rng(BASIS_SEED))


@pytest.fixture(scope="session")
def tiny_basis():
    # coarse grid keeps render-heavy tests quick
    return make_synthetic_basis(
        BasisConfig(grid_resolution=24, d_id=6, d_exp=5, d_tex=6),
        np.random.default_rng(BASIS_SEED),
    )
