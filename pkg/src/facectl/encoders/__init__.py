from .regions import (
    broadcast_styles,
    downsample_segmentation,
    one_hot_map,
    region_average_pool,
    validate_segmentation,
)
from .align import (
    ALIGN_TEMPLATE,
    align_face,
    estimate_similarity,
    five_point_landmarks,
    template_points,
)
from .identity import IdentityEncoder, encode_identity, finetune_identity_encoder
from .style import StyleEncoder, encode_region_styles

__all__ = [
    "broadcast_styles", "downsample_segmentation", "one_hot_map",
    "region_average_pool", "validate_segmentation", "ALIGN_TEMPLATE",
    "align_face", "estimate_similarity", "five_point_landmarks",
    "template_points", "IdentityEncoder", "encode_identity",
    "finetune_identity_encoder", "StyleEncoder", "encode_region_styles",
]
