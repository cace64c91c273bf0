"""Spectral geometry and Lyapunov exponents of adiabatic quasi-periodic Schrodinger operators."""

__version__ = "0.1.0"

from .actions import ActionSet, collapsed_action, contour_actions, tunneling_actions
from .cocycle import (
    CocycleEstimate,
    MatrixFunction,
    cocycle_lyapunov,
    lyapunov_relation_identity,
    schrodinger_lyapunov,
    verify_lyapunov_asymptotics,
)
from .config import RunConfig, load_config, parse_config
from .errors import (
    AccuracyError,
    AdiabaticError,
    ConfigError,
    ContinuationError,
    DegenerateGeometryError,
    InconsistencyError,
    InvalidInputError,
    NearBranchPointWarning,
    UnsupportedOrderError,
)
from .geometry import (
    AdiabaticProblem,
    SlowPotential,
    check_H4,
    complex_momentum,
    epsilon_from_family,
    locate_branch_points,
    real_decomposition,
)
from .indices import (
    fourier_indices,
    interval_index,
    period_index_bruteforce,
    period_index_formula,
)
from .periodic import (
    BandStructure,
    PotentialSpec,
    band_edges,
    bloch_solution,
    discriminant,
    quasi_momentum_main,
    transfer_matrix,
)
from .stokes import trace_stokes_lines
