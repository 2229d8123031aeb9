"""Search on star graphs by coined quantum walks and multivalued-oracle Grover iteration."""

from .errors import (
    ConvergenceError,
    InvalidArgumentError,
    InvalidConfigError,
    InvalidDataError,
    InvalidDimensionError,
    InvalidInstanceError,
    NoSpeedupError,
    NumericalError,
    PoleError,
    RegimeWarning,
    ResourceError,
    StarSearchError,
)
from .harness import (
    SweepConfig,
    SweepRecord,
    compare_walk_oracle,
    fit_scaling,
    generate_instance,
    run_sweep,
)
from .oracle import (
    OracleInstance,
    build_oracle,
    oracle_eigensystem,
    predicted_trace,
    run_search,
    verify_solution,
)
from .phases import parse_phase, parse_phase_classes
from .roots import solve_polynomial
from .spectral import (
    GroupedPhaseSpec,
    analytic_spectrum,
    dense_unitary,
    perturbative_double_root,
    principal_eigenvalues,
)
from .trace import PredictionRecord, SearchTrace
from .walk import (
    PhaseProfile,
    WalkState,
    edge_probabilities,
    evolve,
    grover_profile,
    localization_curve,
    step,
    three_phase_profile,
    uniform_initial,
)

__version__ = "0.1.0"
