"""Pseudospectral Riesz-Feller and Weyl-Marchaud fractional operators on the
real line, via a mapped Fourier basis and an operational matrix."""

from .basis import CoeffVector, SpectralGrid, analyze, make_grid, mode_numbers, synthesize
from .closedform import (
    CLOSED_FORMS,
    ClosedFormFunction,
    OperatorKind,
    frac_lap_lambda,
    frac_lap_lambda_s,
    op_lambda,
    op_mu,
    reference_operator,
)
from .errors import (
    BudgetError,
    ConvergenceError,
    DivergenceError,
    FormatError,
    NumericError,
    StateError,
    TrackingError,
)
from .evolve import (
    EvolutionConfig,
    FisherSystem,
    FrontTrace,
    RegressionResult,
    fit_exponential,
    front_position,
    initial_condition,
    rk4_evolve,
)
from .operators import (
    DEFAULT_AUX,
    ApplyReport,
    AuxDecomposition,
    apply_periodic,
    apply_reference,
    apply_with_aux,
    sweep_errors,
)
from .opmatrix import (
    OperatorMatrix,
    apply,
    build_base_matrix,
    deserialize,
    scale_to_operator,
    serialize,
)
from .oracle import QuadratureConfig, quad_operator
from .specfun import (
    RatioKind,
    RatioTable,
    RieszFellerCoeffs,
    SignedLogGamma,
    c_alpha,
    gamma,
    hyp2f1_terminating,
    kummer_1f1,
    ratio_table,
    rf_coeffs,
    signed_log_gamma,
)

__version__ = "0.1.0"
