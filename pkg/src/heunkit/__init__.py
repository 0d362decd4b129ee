"""heunkit: local solutions of the general Heun equation.

Independent evaluation routes for the same object, built to check each
other: the direct three-term-recurrence series (the oracle), the
regrouped nested-sum expansion, frozen-coefficient asymptotic closed
forms with a convergence-region classifier, quadrature/residue
realizations of the sub-integral representations, and a registry of
prefactor/parameter/variable transforms generating further local
solutions.
"""

__version__ = "0.1.0"

from .asymptotics import (
    ABranch,
    AsymptoticLimit,
    RegionReport,
    classify_region,
    geometric_tail,
    limit_coeffs,
    tail_large_a,
    tail_near_minus_one,
)
from .errors import HeunkitError
from .hyper2f1 import gauss_2f1, pochhammer
from .integralform import (
    KernelEvalConfig,
    OperatorWeights,
    beta_kernel_identity_check,
    eval_subintegral_infinite_structural,
    eval_subintegral_poly,
    operator_weighted_2f1,
)
from .params import (
    HeunParams,
    IndicialRoot,
    Normalization,
    RootKind,
    default_normalization,
    indicial_roots,
    make_params,
)
from .recurrence import (
    SeriesSolution,
    build_series,
    coeff_A,
    coeff_B,
    eval_series,
    ode_residual,
)
from .series3trf import (
    Variant,
    build_3trf_infinite,
    build_3trf_poly_Bterm,
    coefficient_of_order,
    zeta_eta,
)
from .transforms import (
    AsymptoticBranch,
    Engine,
    LocalTransform,
    apply_transform,
    builtin_registry,
    residual_verify,
    transform_asymptotic,
)

__all__ = [
    "ABranch",
    "AsymptoticBranch",
    "AsymptoticLimit",
    "Engine",
    "HeunkitError",
    "HeunParams",
    "IndicialRoot",
    "KernelEvalConfig",
    "LocalTransform",
    "Normalization",
    "OperatorWeights",
    "RegionReport",
    "RootKind",
    "SeriesSolution",
    "Variant",
    "apply_transform",
    "beta_kernel_identity_check",
    "build_3trf_infinite",
    "build_3trf_poly_Bterm",
    "build_series",
    "builtin_registry",
    "classify_region",
    "coeff_A",
    "coeff_B",
    "coefficient_of_order",
    "default_normalization",
    "eval_series",
    "eval_subintegral_infinite_structural",
    "eval_subintegral_poly",
    "gauss_2f1",
    "geometric_tail",
    "indicial_roots",
    "limit_coeffs",
    "make_params",
    "ode_residual",
    "operator_weighted_2f1",
    "pochhammer",
    "residual_verify",
    "tail_large_a",
    "tail_near_minus_one",
    "transform_asymptotic",
    "zeta_eta",
]
