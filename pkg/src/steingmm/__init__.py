"""Stein method-of-moments / generalized score matching estimators combined by GMM."""

from .errors import (
    DegenerateProblem,
    DimensionMismatch,
    DomainError,
    EmptyBasis,
    EmptyInput,
    EstimationError,
    NonPositiveData,
    SingularSystem,
    SupportError,
)
from .estimators import (
    EstimatorResult,
    basis_estimate,
    classical_moments,
    gamma_mle,
    gamma_mle_two_param,
    minimize_empirical_objective,
    single_weight_estimate,
)
from .gmm import GmmEstimate, GmmProblem, estimate_optimal_weight, objective, one_step_gmm, solve_gmm, two_step_gmm
from .models import (
    BasisModel,
    GammaParams,
    ScoreModel,
    gamma_one_param_model,
    gamma_two_param_model,
    get_model,
    model_from_basis,
    score,
    score_x_derivative,
)
from .moments import MomentBlocks, blocks, lambda_at, stacked_contribution
from .numerics import RngStream, digamma, sample_gamma, solve_linear, summary_stats
from .simulation import SimulationConfig, SimulationReport, figure1_config, mse_standard_error, run_simulation, table1_config
from .weights import WeightSpec, check_boundary_vanishing, power_weight

__version__ = "0.1.0"
