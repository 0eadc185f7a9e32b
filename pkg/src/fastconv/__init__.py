"""Bilinear algorithms for discrete convolution.

Build algorithms (Toom-Cook, Winograd, DFT/DCT, nested compositions), check them
against the convolution tensor, run them, and count their operations.
"""
from .bilinear import (
    BilinearAlgorithm,
    ConvVariant,
    ValidationError,
    apply,
    apply_2d,
    apply_nd,
    interchange,
    kron_nest,
    validate,
)
from .generators import (
    GenerationError,
    default_nodes,
    dct_linear_alg,
    dft_cyclic_alg,
    dft_linear_alg,
    fixed_algs,
    toom_cook,
    winograd,
)
from .adapters import agarwal_cooley_nest, overlap_add_nest, small_filter_conv
from .fastexec import BACKEND, direct_conv, direct_conv_nd, fft, fft_conv, hankel_sym_conv

__version__ = "0.1.0"
