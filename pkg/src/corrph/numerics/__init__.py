"""Numerical kernels: error functions, quartic roots, quadrature, Laplace inversion."""
from .special import faddeeva, zeta, zeta_complex
from .roots import quartic_roots
from .inversion import (InversionConfig, InversionResult, euler_invert, laplace_invert,
                        laplace_invert_checked, talbot_invert)
from .quadrature import (ContinuousLaw, TabulatedTail, adaptive_gauss_legendre, conv_tail,
                         conv_tail_multi, heavy_sum_table)

__all__ = [
    "ContinuousLaw", "InversionConfig", "InversionResult", "TabulatedTail",
    "adaptive_gauss_legendre", "conv_tail", "conv_tail_multi", "euler_invert", "faddeeva",
    "heavy_sum_table", "laplace_invert", "laplace_invert_checked", "quartic_roots",
    "talbot_invert", "zeta", "zeta_complex",
]
