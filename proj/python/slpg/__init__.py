"""Python bindings for the SLPG solver for optimization with orthogonality constraints."""

from ._core import (  # noqa: F401
    DimensionError,
    EntrywiseL1,
    Error,
    FeasibilityReport,
    GeneratedInstance,
    InnerSolver,
    InstanceSpec,
    IterRecord,
    MeritConstants,
    NormalKind,
    NumericalFailure,
    ParameterError,
    QuadraticTraceObjective,
    RowwiseL21,
    SingularityError,
    SolveOptions,
    SolveResult,
    TangentialResult,
    Termination,
    UnsupportedError,
    ZeroRegularizer,
    bb_stepsize,
    certified_constants,
    cmd_compare,
    cmd_multistart,
    cmd_solve,
    explicit_multiplier,
    feasibility,
    gen_covariance,
    leading_eigenvectors,
    make_instance,
    merit,
    multiplier_residual,
    normal_step,
    parse_config,
    polar_project,
    projected_gradient,
    prox,
    random_orthonormal,
    reg_value,
    slpg_solve,
    smooth_eval,
    smooth_stationarity_residual,
    solve_explicit,
    solve_fixed_point,
    substationarity,
    sym,
    tangential_objective,
    theoretical_stepsize,
    trace_csv,
    ts_feasibility,
)

__all__ = [name for name in dir() if not name.startswith("_")]
