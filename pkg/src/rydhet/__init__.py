"""Steady-state model of a heterodyne Rydberg-atom microwave receiver."""

from .config import ConfigError, RunConfig
from .errors import (
    ConsistencyError,
    ContractViolation,
    IntegrationError,
    NonPerturbativeWarning,
    NonphysicalRangeError,
    NumericalError,
    ObjectiveError,
    RegimeWarning,
    SettlingTimeout,
)
from .liouvillian import (
    DensityMatrix,
    build_hamiltonian,
    build_liouvillian,
    evolve,
    settling_time,
    steady_state,
)
from .model import (
    CODATA,
    TWO_PI,
    AtomSystem,
    DetectionMode,
    DriveConfig,
    PhysicalConstants,
    ReadoutConfig,
    optimal_local_rabi,
    transit_rate,
)
from .optimize import (
    OptimizationReport,
    delta_L_star,
    delta_L_star_star,
    grid_refine_argmax,
    solve_p1,
    solve_p2,
    solve_p3,
    solve_p4,
    solve_p5,
)
from .readout import conversion, conversion_general, conversion_high_transmittance, gain_db
from .susceptibility import (
    Axis,
    DetuningScenario,
    SusceptibilityDecomposition,
    chi_decompose_closed,
    chi_decompose_numeric,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "RunConfig",
    "conversion",
    "conversion_general",
    "conversion_high_transmittance",
    "gain_db",
    "AtomSystem",
    "Axis",
    "build_hamiltonian",
    "build_liouvillian",
    "chi_decompose_closed",
    "chi_decompose_numeric",
    "CODATA",
    "ConsistencyError",
    "ContractViolation",
    "delta_L_star",
    "delta_L_star_star",
    "DensityMatrix",
    "DetectionMode",
    "DetuningScenario",
    "DriveConfig",
    "evolve",
    "grid_refine_argmax",
    "IntegrationError",
    "NonPerturbativeWarning",
    "NonphysicalRangeError",
    "NumericalError",
    "ObjectiveError",
    "optimal_local_rabi",
    "OptimizationReport",
    "PhysicalConstants",
    "ReadoutConfig",
    "RegimeWarning",
    "settling_time",
    "SettlingTimeout",
    "solve_p1",
    "solve_p2",
    "solve_p3",
    "solve_p4",
    "solve_p5",
    "steady_state",
    "SusceptibilityDecomposition",
    "transit_rate",
    "TWO_PI",
]
