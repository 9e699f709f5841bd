"""psdroot: dense SPD matrix square roots, the geometry behind them, and a
benchmark harness for comparing the solvers."""

from .errors import (
    ConvergenceFailureError,
    DimensionMismatchError,
    DivergenceError,
    DomainError,
    IndefiniteInputError,
    MatrixMarketError,
    NotPositiveDefiniteError,
    OverflowWarning,
    ParseError,
    SchemaError,
    SingularIterateError,
)
from .gallery import (
    ConditionReport,
    MatrixSpec,
    build_matrix,
    condition_report,
    hilbert,
    inv_hilbert,
    lowrank_psd,
    parse_spec,
    randcorr,
    spiked_identity,
)
from .geometry import (
    GammaBound,
    gamma_bound,
    geodesic,
    geometric_mean,
    s_divergence,
    s_divergence_lowrank,
    thompson_metric,
)
from .matcore import (
    Definiteness,
    DefinitenessClass,
    EigDecomp,
    Norms,
    SymMatrix,
    cholesky,
    classify,
    eig_sym,
    in_psd_interval,
    norms,
    read_matrix_market,
    solve_spd,
    sqrt_eig,
    write_matrix_market,
)
from .solvers import (
    LineSearchParams,
    SolverConfig,
    SolverResult,
    TraceRecord,
    binomial,
    gradient_descent,
    initial_interval,
    lsgd,
    polar_newton,
    residual_gradient,
    yamsr,
    yamsr_step,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "ConvergenceFailureError",
    "DimensionMismatchError",
    "DivergenceError",
    "DomainError",
    "IndefiniteInputError",
    "MatrixMarketError",
    "NotPositiveDefiniteError",
    "OverflowWarning",
    "ParseError",
    "SchemaError",
    "SingularIterateError",
    # matcore
    "SymMatrix",
    "EigDecomp",
    "Definiteness",
    "DefinitenessClass",
    "Norms",
    "classify",
    "cholesky",
    "solve_spd",
    "eig_sym",
    "sqrt_eig",
    "norms",
    "in_psd_interval",
    "read_matrix_market",
    "write_matrix_market",
    # geometry
    "GammaBound",
    "gamma_bound",
    "geodesic",
    "geometric_mean",
    "s_divergence",
    "s_divergence_lowrank",
    "thompson_metric",
    # solvers
    "LineSearchParams",
    "SolverConfig",
    "SolverResult",
    "TraceRecord",
    "yamsr",
    "yamsr_step",
    "gradient_descent",
    "residual_gradient",
    "lsgd",
    "polar_newton",
    "binomial",
    "initial_interval",
    # gallery
    "ConditionReport",
    "MatrixSpec",
    "build_matrix",
    "condition_report",
    "hilbert",
    "inv_hilbert",
    "lowrank_psd",
    "parse_spec",
    "randcorr",
    "spiked_identity",
]
