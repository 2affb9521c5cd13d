"""facectl: disentangled face attribute editing on a synthetic face corpus.

3DMM-style coefficients, an identity embedding and region-wise style codes
are remapped and decoded by an identity-style-normalized generator; the CLI
performs face swapping, attribute interpolation and region-wise style edits.
"""

__version__ = "0.1.0"
