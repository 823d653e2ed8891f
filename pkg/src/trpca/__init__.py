"""Tensor robust PCA under invertible mode-3 linear transforms.

Low-tubal-rank plus sparse decomposition built on the transform-domain
t-product: tensor SVD, tubal rank, tensor nuclear norm, the tensor singular
value thresholding operator, and an ADMM solver, with synthetic-recovery,
phase-transition, and image-denoising harnesses.
"""

__version__ = "0.1.0"

from .prox import soft_threshold, tsvt
from .solver import (
    NonFiniteIterateError,
    SolverConfig,
    TrpcaSolution,
    default_lambda,
    solve,
)
from .tensor3 import Tensor3, from_flat, from_slices, inner, norm, zeros
from .tlinalg import (
    IncoherenceReport,
    TSvdFactors,
    column_basis,
    identity_tensor,
    incoherence,
    nuclear_norm,
    spectral_norm,
    tprod,
    tsvd,
    ttranspose,
    tubal_rank,
    tube_basis,
)
from .transform import (
    Transform,
    TransformValidationError,
    make_dct,
    make_identity,
    make_random_orthogonal,
    make_scaled_hadamard,
    validate,
)

__all__ = [
    "Tensor3",
    "Transform",
    "TransformValidationError",
    "TSvdFactors",
    "IncoherenceReport",
    "SolverConfig",
    "TrpcaSolution",
    "NonFiniteIterateError",
    "from_flat",
    "from_slices",
    "inner",
    "norm",
    "zeros",
    "make_dct",
    "make_identity",
    "make_random_orthogonal",
    "make_scaled_hadamard",
    "validate",
    "tprod",
    "ttranspose",
    "identity_tensor",
    "tsvd",
    "tubal_rank",
    "spectral_norm",
    "nuclear_norm",
    "column_basis",
    "tube_basis",
    "incoherence",
    "tsvt",
    "soft_threshold",
    "default_lambda",
    "solve",
]
