"""Quantum Otto engines driven by nonequilibrium (engineered) reservoirs."""

__version__ = "0.1.0"

from .cycle import CycleResult, CycleSpec, efficiency, evaluate_cycle, power
from .errors import (
    DegenerateCycle,
    DomainError,
    IntegrationFailure,
    NoInteriorMaximum,
    NonphysicalOccupation,
    OttoError,
    TruncationError,
    UseClosedForm,
)
from .optimize import EMPReport, PowerProblem, curzon_ahlborn, emp_coherent, emp_correlated, maximize_power
from .protocols import Covariance, FrequencyProtocol, adiabaticity_Q, propagate_covariance, solve_classical_pair
from .second_law import (
    GaussianState,
    SecondLawReport,
    entropy_production,
    fock_oracle_relative_entropy,
    max_efficiency,
    relative_entropy_gaussian,
    second_law_report,
)
from .thermo_core import (
    NATURAL,
    Coherent,
    Conventions,
    CorrelatedPair,
    CustomPowerLaw,
    CustomTabulated,
    ReservoirSpec,
    Thermal,
    delta_n,
    effective_temperature,
    mean_occupation,
    regime_check,
)
