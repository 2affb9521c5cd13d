from .types import (
    ATTRIBUTE_FIELDS,
    ATTRIBUTE_NAMES,
    FaceCoefficients,
    MorphableBasis,
    RenderedFace,
    load_basis,
    load_coefficients,
    save_basis,
    save_coefficients,
)
from .synthesis import BasisConfig, make_synthetic_basis, landmark_template, REGION_NAMES
from .model import (
    ORTHO_HALF_EXTENT,
    SH_C0,
    apply_pose,
    compute_vertex_normals,
    model_to_pixels,
    project_landmarks,
    reconstruct_shape,
    reconstruct_texture,
    rotation_matrix,
    sh_basis,
    sh_shade,
    uniform_light_kappa,
)
from .raster import rasterize, render_face
from .edit import interpolate_coefficients, remap_coefficients, wrap_angle
from .fitting import FitResult, fit_coefficients
from .sampling import sample_random_face

__all__ = [
    "ATTRIBUTE_FIELDS", "ATTRIBUTE_NAMES", "FaceCoefficients", "MorphableBasis",
    "RenderedFace", "load_basis", "load_coefficients", "save_basis",
    "save_coefficients", "BasisConfig", "make_synthetic_basis", "landmark_template",
    "REGION_NAMES", "ORTHO_HALF_EXTENT", "SH_C0", "apply_pose",
    "compute_vertex_normals", "model_to_pixels", "project_landmarks",
    "reconstruct_shape", "reconstruct_texture", "rotation_matrix", "sh_basis",
    "sh_shade", "uniform_light_kappa", "rasterize", "render_face",
    "interpolate_coefficients", "remap_coefficients", "wrap_angle", "FitResult",
    "fit_coefficients", "sample_random_face",
]
