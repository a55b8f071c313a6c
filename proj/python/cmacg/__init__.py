"""Matrix angular central Gaussian distributions on the complex Stiefel manifold.

Matrices are complex128 numpy arrays. Samplers return an (n, m, r) stack of
semi-unitary frames; every random call takes an explicit ``RngState``.
"""

from ._cmacg import (
    CmacgError,
    RngState,
    __version__,
    corollary_check,
    derive_seed,
    general_class_check,
    inv_sqrt,
    ks_two_sample,
    log_cmv_gamma,
    log_density,
    log_density_transformed,
    log_stiefel_volume,
    logdet_hpd,
    normal_covariance_check,
    normalization_check,
    polar,
    projection_matrix,
    sample_cmacg,
    sample_complex_normal,
    sample_uniform,
    sqrt_eig,
    sqrt_newton,
    unitary_invariance_check,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
