"""Sensing-aware downlink beamforming via uplink-downlink duality.

Minimizes the trace of the inverse Bayesian Fisher information of a sensing
task over transmit beamformers, subject to per-user SINR constraints and a
total power budget, without lifting the problem to the covariance domain.
"""

from .errors import (
    DimensionMismatch,
    IndefiniteNumerator,
    Infeasible,
    IsacBeamError,
    NoFeasiblePoint,
    ParseError,
    QuadratureOrderTooSmall,
    SingularCoupling,
    SingularFIM,
    Stalled,
    ValidationError,
    ZeroChannel,
    ZeroDesiredGain,
)
from .fim import bcrb, beta_optimal, bfim, inner_objective, qbeta, total_power
from .problem import Scenario, downlink_sinr
from .scenario import ScenarioConfig, load_scenario, save_scenario
from .sensing import (
    AoAModel,
    SensingStatistics,
    channel_derivative,
    compute_statistics,
    steering_derivative,
    steering_vector,
)
from .solver import SolveReport, SolverOptions, check_feasibility, solve
from .uplink import (
    SubproblemResult,
    SubproblemStatus,
    UplinkResult,
    effective_noise_matrix,
    max_sinr_combiner,
    power_update,
    recover_downlink,
    solve_uplink,
)

__version__ = "0.1.0"
