"""Brownian motion on kernel-induced landmark spaces.

Simulates the Riemannian Brownian motion of n landmark points whose
cometric comes from a radial kernel, reduces the two-landmark case to
its exact one-dimensional distance diffusion, and classifies whether
the landmarks can collide in finite time.
"""

from .classifier import (
    InconclusiveError,
    NumericalClassification,
    RhoFunction,
    SingularityClassification,
    SingularityKind,
    classify,
    classify_numerically,
    integrability_exponent,
)
from .distance_sde import (
    DistanceCoefficients,
    DistanceEnsemble,
    DistancePath,
    drift,
    sigma,
    simulate_distance,
)
from .geometry import (
    LandmarkConfig,
    MetricFactorizationError,
    christoffel,
    cometric_matrix,
    cometric_partials,
    metric_matrix,
    sqrt_psd,
)
from .kernels import (
    AsymptoticData,
    RadialKernel,
    make_gaussian,
    make_matern,
    parse_kernel_spec,
    shipped_kernels,
)
from .simulator import (
    PathResult,
    StopReason,
    StopRecord,
    StopThresholds,
    TrajectoryEnsemble,
    collision_monitor,
    em_step,
    min_pairwise_distance,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticData",
    "DistanceCoefficients",
    "DistanceEnsemble",
    "DistancePath",
    "InconclusiveError",
    "LandmarkConfig",
    "MetricFactorizationError",
    "NumericalClassification",
    "PathResult",
    "RadialKernel",
    "RhoFunction",
    "SingularityClassification",
    "SingularityKind",
    "StopReason",
    "StopRecord",
    "StopThresholds",
    "TrajectoryEnsemble",
    "christoffel",
    "classify",
    "classify_numerically",
    "collision_monitor",
    "cometric_matrix",
    "cometric_partials",
    "drift",
    "em_step",
    "integrability_exponent",
    "make_gaussian",
    "make_matern",
    "metric_matrix",
    "min_pairwise_distance",
    "parse_kernel_spec",
    "shipped_kernels",
    "sigma",
    "simulate",
    "simulate_distance",
    "sqrt_psd",
]
