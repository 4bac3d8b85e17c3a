"""Laplacian-kernel extended dynamic mode decomposition toolkit.

Reconstructs spatial-temporal snapshots from irregular, sparse data via
kernel DMD, and numerically verifies the operator theory of the
Laplacian-weighted Hilbert space H_L (orthonormal basis, kernel norm bound,
compactness statistic, closability probes).
"""

from .data import DataMatrix
from .errors import (
    GramRankError,
    IntegrationError,
    LapdmdError,
    NumericalError,
    StabilityError,
    ValidationError,
)
from .kedmd import KernelDmd, ReconstructionResult, load_model, save_model
from .kernels import (
    KernelSpec,
    cross_gram,
    eval_exp_power,
    eval_hl_kernel,
    gram_matrix,
    kernel_column,
    matern_half_covariance,
    spectral_density,
)
from .metrics import (
    EweReport,
    ModeDifferenceReport,
    SpectralBounds,
    ewe,
    faithful_difference,
    frobenius_gap_identity,
    mode_difference,
    spectral_bounds,
)
from .rkhs import (
    AffineMap,
    HlFunction,
    McEstimate,
    McIntegrator,
    closability_probe_grbf,
    closability_probe_hl,
    kernel_series_check,
    laplacian_kernel_norm,
    mc_inner_product,
    mc_norm,
    measure_density,
    measure_mass,
    orthonormal_basis_1d,
    pi_statistic,
    sample_chunks,
    sample_measure,
)
from .sampling import (
    SamplingPlan,
    build_pairs,
    invert_permutation,
    reshape_series,
    shuffle_columns,
    take_partial,
)
from .dynamics import (
    DUFFING_INITIAL_STATE,
    OdeSystem,
    burgers_solve,
    duffing,
    integrate_rk4,
    lorenz63,
    rossler,
)

__version__ = "0.1.0"

__all__ = [
    "AffineMap",
    "DataMatrix",
    "DUFFING_INITIAL_STATE",
    "EweReport",
    "GramRankError",
    "HlFunction",
    "IntegrationError",
    "KernelDmd",
    "KernelSpec",
    "LapdmdError",
    "McEstimate",
    "McIntegrator",
    "ModeDifferenceReport",
    "NumericalError",
    "OdeSystem",
    "ReconstructionResult",
    "SamplingPlan",
    "SpectralBounds",
    "StabilityError",
    "ValidationError",
    "build_pairs",
    "burgers_solve",
    "closability_probe_grbf",
    "closability_probe_hl",
    "cross_gram",
    "duffing",
    "eval_exp_power",
    "eval_hl_kernel",
    "ewe",
    "faithful_difference",
    "frobenius_gap_identity",
    "gram_matrix",
    "integrate_rk4",
    "invert_permutation",
    "kernel_column",
    "kernel_series_check",
    "laplacian_kernel_norm",
    "load_model",
    "lorenz63",
    "matern_half_covariance",
    "mc_inner_product",
    "mc_norm",
    "measure_density",
    "measure_mass",
    "mode_difference",
    "orthonormal_basis_1d",
    "pi_statistic",
    "reshape_series",
    "rossler",
    "sample_chunks",
    "sample_measure",
    "save_model",
    "shuffle_columns",
    "spectral_bounds",
    "spectral_density",
    "take_partial",
]
