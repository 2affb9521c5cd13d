from .spectral import SNConv2d, SNLinear, estimate_sigma, spectral_normalize
from .isnorm import ISBlock, ISNorm
from .discriminator import MultiScaleDiscriminator, PatchDiscriminator
from .network import CONDITIONING_MODES, Generator, GeneratorConfig, GeneratorInputs

__all__ = [
    "SNConv2d", "SNLinear", "estimate_sigma", "spectral_normalize", "ISBlock",
    "ISNorm", "MultiScaleDiscriminator", "PatchDiscriminator",
    "CONDITIONING_MODES", "Generator", "GeneratorConfig", "GeneratorInputs",
]
