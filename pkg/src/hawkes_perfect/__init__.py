"""Exact (perfect) sampling of stationary multivariate Hawkes processes."""

from .branching import (
    EffectiveClusterParams,
    PathSample,
    generate_cluster,
    naive_transient_estimate,
    simulate_forward,
)
from .errors import (
    ClusterSizeCap,
    ConfigError,
    DimensionMismatch,
    EmptyInput,
    HawkesError,
    Infeasible,
    TiltTooLarge,
    Unstable,
)
from .model import (
    Cluster,
    Event,
    ExponentialKernel,
    ModelParams,
    hbar,
    load_model,
    psi_f,
    sample_tilted_birth,
    stationary_intensity,
    validate_model,
)
from .optimize import optimize_eta
from .perfect import PerfectSampler, sample_cluster_arrivals, sample_N0, sample_stationary_path
from .rng import RandomStream
from .stats import ci95
from .tilt import TiltSolution, complexity_X, solve_psi_B, theta0_upper, tilted_cluster_params

__version__ = "0.1.0"
