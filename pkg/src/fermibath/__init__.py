"""Non-Markovian relaxation of a two-level collective mode in a Drude-cutoff
Fermi or Bose heat bath: exact occupation dynamics, transport coefficients,
and a discretized-bath validation oracle."""

from .errors import (DegenerateRootsError, FermibathError,
                     IntegrandEvaluationError, OccupationDomainError,
                     QuadratureConvergenceError, QuadratureError,
                     ResonancePoleError)
from .model import (UNITS, BathStatistics, ModelParams, UnitSystem,
                    anti_occupation_factor, bare_frequency, occupation_factor,
                    spectral_density)
from .response import (CharacteristicRoots, amplitude, amplitude_derivative,
                       amplitude_sq, bath_response, bath_response_derivative,
                       characteristic_residual, compute_roots, memory_kernel,
                       memory_kernel_integral)
from .quadrature import (QuadratureResult, QuadratureSpec, default_w_max,
                         integrate_semi_infinite)
from .observables import (MINUS_PLUS, PLUS_MINUS, EquilibriumSummary,
                          OccupationTrajectory, TransportTrajectory,
                          default_time_grid, diffusion, equilibrium_summary,
                          f_constants, friction, friction_asymptotic,
                          low_temperature_asymptote, noise_moment,
                          noise_moment_asymptotic, noise_moment_derivative,
                          occupation, occupation_asymptotic,
                          occupation_trajectory, occupation_weak_compact,
                          occupation_weak_coupling, statistics_ratio,
                          transport_trajectory, weak_coupling_asymptote)
from .bath_oracle import (DiscreteBath, OneBodyState, discretize_bath,
                          kernel_fdr_check, propagate_occupation)

__version__ = "0.1.0"

__all__ = [
    "BathStatistics", "ModelParams", "UnitSystem", "UNITS",
    "bare_frequency", "spectral_density", "occupation_factor",
    "anti_occupation_factor",
    "CharacteristicRoots", "compute_roots", "characteristic_residual",
    "memory_kernel", "memory_kernel_integral",
    "amplitude", "amplitude_derivative", "amplitude_sq",
    "bath_response", "bath_response_derivative",
    "QuadratureSpec", "QuadratureResult", "integrate_semi_infinite",
    "default_w_max",
    "PLUS_MINUS", "MINUS_PLUS",
    "noise_moment", "noise_moment_derivative", "noise_moment_asymptotic",
    "occupation", "occupation_asymptotic", "occupation_trajectory",
    "occupation_weak_coupling", "occupation_weak_compact",
    "weak_coupling_asymptote", "low_temperature_asymptote",
    "statistics_ratio", "f_constants",
    "friction", "friction_asymptotic", "diffusion", "transport_trajectory",
    "equilibrium_summary", "default_time_grid",
    "OccupationTrajectory", "TransportTrajectory", "EquilibriumSummary",
    "DiscreteBath", "OneBodyState", "discretize_bath",
    "propagate_occupation", "kernel_fdr_check",
    "FermibathError", "DegenerateRootsError", "ResonancePoleError",
    "OccupationDomainError", "QuadratureError", "QuadratureConvergenceError",
    "IntegrandEvaluationError",
]
