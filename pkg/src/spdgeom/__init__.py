"""Riemannian and information geometry of symmetric positive definite matrices."""

from .deformed import (
    MetricHandle,
    affine_invariant,
    alpha_procrustes,
    bkm,
    bures_wasserstein,
    bures_wasserstein_inner,
    deform_metric,
    deformed_distance,
    deformed_geodesic,
    deformed_log,
    deformed_parallel_transport,
    euclidean,
    kernel_metric,
    log_euclidean,
    power_affine,
    power_euclidean,
    power_family_limit_check,
    power_wasserstein,
    pullback_kernel,
    sylvester_solve,
)
from .divergences import (
    DivergenceSpec,
    PotentialValue,
    ab_divergence,
    ab_potential,
    divergence,
    dual_divergence,
    induced_metric_fd,
    mpe_divergence_spec,
    uv_divergence,
    uv_potential,
)
from .errors import *  # noqa: F401,F403
from .experiments import GridConfig, GridCell, curvature_grid, grid_csv, scan_csv
from .kernels import (
    KernelMap,
    MeanKernelSpec,
    builtin_kernels,
    cometric_kernel,
    completeness_of,
    kernel_metric_eval,
    mean_kernel_check,
    mean_kernel_scan,
    power_wasserstein_kernel,
    power_wasserstein_mean,
)
from .linalg import (
    Eigh,
    ScalarFunction,
    divided_diff_1,
    divided_diff_2,
    exp_map,
    identity,
    log_map,
    mpe_map,
    power,
    random_orthogonal,
    random_spd,
    random_symmetric,
    sym_eigendecompose,
    univariate_apply,
    univariate_differential,
    univariate_differential_inverse,
    univariate_hessian,
)
from .mixed import (
    MixedEuclideanMetric,
    affine_curvature_at_identity,
    balanced_form,
    curvature_coefficients,
    identity_curvature_factor,
    me_connection,
    me_curvature,
    me_kernel,
    me_metric_eval,
    mpe_distance_commuting,
    mpe_geodesic_commuting,
    mpe_log_commuting,
    sectional_curvature,
    sectional_curvature_diagonal,
)

__version__ = "0.1.0"
