"""The five square-root solvers behind one configuration and stopping rule.

Methods
-------
``yamsr``
    Fixed-point iteration driven by SPD solves; contracts in the Thompson
    metric with the certificate from :func:`psdroot.geometry.gamma_bound`.
    Robust to (even singular) ill-conditioned input.
``gradient_descent`` / ``lsgd``
    Minimize ``||X^2 - A||_F^2`` with a fixed step, respectively Armijo
    backtracking line search.
``polar_newton``
    Cholesky-then-polar approach: scaled Newton iteration for the orthogonal
    polar factor of the Cholesky factor; converges superlinearly.
``binomial``
    Quadratic recurrence for the series expansion of ``(I - C)^{1/2}`` on a
    spectrally shifted copy of the input.
``sqrt_eig`` (in :mod:`psdroot.matcore`) is the direct reference method.

All solvers stop on ``||X^2 - A||_F / ||A||_F <= tol``, on iterate
stagnation where stated, or at ``max_iter``; hitting the cap returns a
result with ``converged=False`` rather than raising.  A result is marked
converged only if its final relative residual is within ``10 * tol``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np
import scipy.linalg as sla

from .errors import (
    DivergenceError,
    DomainError,
    NotPositiveDefiniteError,
    SingularIterateError,
)
from .geometry import GammaBound, gamma_bound, s_divergence, thompson_metric
from .matcore import MatrixLike, SymMatrix, as_array, cholesky, sym_part

__all__ = [
    "LineSearchParams",
    "SolverConfig",
    "TraceRecord",
    "SolverResult",
    "yamsr",
    "yamsr_step",
    "gradient_descent",
    "residual_gradient",
    "lsgd",
    "polar_newton",
    "binomial",
    "initial_interval",
]

_STALL_FLOOR = 1e-18  # line-search steps below this count as a stall
_DIVERGENCE_FACTOR = 1e6
_CONVERGED_SAFETY = 10.0


@dataclass(frozen=True)
class LineSearchParams:
    """Armijo backtracking constants: sufficient-decrease coefficient,
    shrink factor, and the growth factor applied to the previously
    accepted step when opening a new search."""

    c: float = 1e-4
    shrink: float = 0.5
    growth: float = 2.0


@dataclass(frozen=True)
class SolverConfig:
    """Shared solver configuration.

    Parameters
    ----------
    tol
        Relative residual target (and stagnation threshold where used).
    max_iter
        Iteration cap; exceeding it yields ``converged=False``, no exception.
    scale_mode
        ``"none"``, ``"auto"`` (iterate on ``A / alpha`` with
        ``alpha = tr(A)/sqrt(n)`` and rescale the root by ``sqrt(alpha)``),
        or an explicit positive float alpha.  Fixed-point solver only.
    gd_step
        Fixed step for ``gradient_descent``; ``None`` selects the
        Lipschitz-style default ``1 / (8 ||A||_2^2)``.
    ls_params
        Armijo constants for ``lsgd``.
    newton_scaling
        ``"optimal_1inf"`` (the cheap 1/inf-norm surrogate for optimal
        scaling) or ``"none"`` for the unscaled polar Newton iteration.
    record_trace
        Record per-iteration :class:`TraceRecord` entries.  Off by default;
        tracing adds work (extra factorizations for objectives, generalized
        eigenvalues for distances to the oracle).
    """

    tol: float = 1e-12
    max_iter: int = 1000
    scale_mode: Union[str, float] = "none"
    gd_step: Optional[float] = None
    ls_params: LineSearchParams = field(default_factory=LineSearchParams)
    newton_scaling: str = "optimal_1inf"
    record_trace: bool = False

    def __post_init__(self) -> None:
        if not (isinstance(self.tol, (int, float)) and self.tol > 0):
            raise DomainError(f"tol must be positive, got {self.tol!r}")
        if not (isinstance(self.max_iter, int) and self.max_iter >= 1):
            raise DomainError(f"max_iter must be a positive int, got {self.max_iter!r}")
        if isinstance(self.scale_mode, str):
            if self.scale_mode not in ("none", "auto"):
                raise DomainError(
                    f"scale_mode must be 'none', 'auto', or a positive float, "
                    f"got {self.scale_mode!r}"
                )
        elif not (
            isinstance(self.scale_mode, (int, float))
            and math.isfinite(self.scale_mode)
            and self.scale_mode > 0
        ):
            raise DomainError(f"explicit scale alpha must be > 0, got {self.scale_mode!r}")
        if self.gd_step is not None and not self.gd_step > 0:
            raise DomainError(f"gd_step must be positive, got {self.gd_step!r}")
        if self.newton_scaling not in ("optimal_1inf", "none"):
            raise DomainError(
                f"newton_scaling must be 'optimal_1inf' or 'none', "
                f"got {self.newton_scaling!r}"
            )


@dataclass(frozen=True)
class TraceRecord:
    """One per-iteration snapshot.

    ``delta_T`` is the Thompson distance from the current root estimate to a
    caller-supplied oracle root (NaN when no oracle was given or the distance
    is undefined).  ``objective`` is method specific: the divergence-sum for
    the fixed-point solver, ``||X^2 - A||_F^2`` for the gradient methods,
    ``||U^T U - I||_F`` for polar Newton, and the update norm for the
    binomial recurrence.
    """

    k: int
    elapsed_seconds: float
    rel_residual: float
    delta_T: float
    objective: float


@dataclass(frozen=True)
class SolverResult:
    root: SymMatrix
    iterations: int
    converged: bool
    final_residual: float
    trace: List[TraceRecord]
    gamma_certificate: Optional[GammaBound] = None


def _cfg_or_default(cfg: Optional[SolverConfig]) -> SolverConfig:
    return SolverConfig() if cfg is None else cfg


def _denom(arr: np.ndarray) -> float:
    v = float(np.linalg.norm(arr))
    return v if v > 0.0 else 1.0


def _opnorm(arr: np.ndarray) -> float:
    w = sla.eigh(arr, eigvals_only=True)
    return float(max(abs(w[0]), abs(w[-1])))


def _spd_solve_eye(m: np.ndarray, eye: np.ndarray) -> np.ndarray:
    # check_finite is off: every solver validates its input once on entry,
    # and these factorizations sit inside per-iteration hot loops
    try:
        c = sla.cho_factor(m, lower=False, check_finite=False)
    except sla.LinAlgError as exc:
        raise NotPositiveDefiniteError(f"inner SPD solve failed: {exc}") from exc
    return sla.cho_solve(c, eye, check_finite=False)


def _trace_add(
    trace: List[TraceRecord],
    t0: float,
    k: int,
    resid: float,
    objective: float,
    root_est: Optional[np.ndarray],
    oracle_arr: Optional[np.ndarray],
) -> None:
    if oracle_arr is None or root_est is None:
        dt = math.nan
    else:
        try:
            dt = thompson_metric(root_est, oracle_arr)
        except NotPositiveDefiniteError:
            dt = math.nan
    trace.append(
        TraceRecord(
            k=k,
            elapsed_seconds=time.perf_counter() - t0,
            rel_residual=resid,
            delta_T=dt,
            objective=objective,
        )
    )


def _final_residual(root_arr: np.ndarray, arr: np.ndarray) -> float:
    return float(np.linalg.norm(root_arr @ root_arr - arr)) / _denom(arr)


# ---------------------------------------------------------------------------
# fixed-point iteration
# ---------------------------------------------------------------------------


def yamsr_step(x: MatrixLike, a: MatrixLike) -> SymMatrix:
    """One fixed-point update ``X -> [(X+A)^{-1} + (X+I)^{-1}]^{-1}``.

    Implemented as two SPD solves against the identity plus one SPD solve of
    their sum; the result is symmetrized.  Exposed for step-level testing and
    for driving the iteration manually.
    """
    xa, aa = as_array(x), as_array(a)
    if xa.shape != aa.shape:
        raise DomainError(f"dimension mismatch: {xa.shape} vs {aa.shape}")
    eye = np.eye(xa.shape[0])
    s = _spd_solve_eye(xa + aa, eye) + _spd_solve_eye(xa + eye, eye)
    return SymMatrix(_spd_solve_eye(s, eye))


def _resolve_alpha(arr: np.ndarray, scale_mode: Union[str, float]) -> float:
    if scale_mode == "none":
        return 1.0
    if scale_mode == "auto":
        alpha = float(np.trace(arr)) / math.sqrt(arr.shape[0])
        # a zero or non-finite trace (e.g. the zero matrix) disables scaling
        return alpha if math.isfinite(alpha) and alpha > 0 else 1.0
    return float(scale_mode)


def yamsr(
    a: MatrixLike,
    cfg: Optional[SolverConfig] = None,
    oracle: Optional[MatrixLike] = None,
) -> SolverResult:
    """Fixed-point square-root iteration via SPD solves.

    Starts from ``X_0 = (A + I)/2`` and repeats
    ``X <- [(X + A)^{-1} + (X + I)^{-1}]^{-1}`` with every iterate
    symmetrized.  With ``scale_mode`` set, the iteration runs on
    ``A / alpha`` and the root is rescaled by ``sqrt(alpha)`` at the end
    (the relative residual is invariant under this change).

    Accepts any PSD input, singular included.  Stops on the relative
    residual, on Thompson-metric stagnation of consecutive iterates
    (checked every step early on, then on a geometrically thinned schedule
    to keep the check from dominating iteration cost), or at ``max_iter``.

    The result carries a contraction certificate for the (scaled) input
    when that input is PD.
    """
    cfg = _cfg_or_default(cfg)
    arr = as_array(a)
    n = arr.shape[0]
    eye = np.eye(n)
    alpha = _resolve_alpha(arr, cfg.scale_mode)
    a_s = arr / alpha
    sq_alpha = math.sqrt(alpha)
    denom_s = _denom(a_s)

    try:
        cert: Optional[GammaBound] = gamma_bound(a_s)
    except NotPositiveDefiniteError:
        cert = None

    def objective(x_arr: np.ndarray) -> float:
        if not cfg.record_trace:
            return math.nan
        try:
            return s_divergence(x_arr, a_s) + s_divergence(x_arr, eye)
        except NotPositiveDefiniteError:
            return math.inf

    oracle_arr = as_array(oracle) if (oracle is not None and cfg.record_trace) else None
    t0 = time.perf_counter()
    trace: List[TraceRecord] = []
    x = 0.5 * (a_s + eye)
    resid = float(np.linalg.norm(x @ x - a_s)) / denom_s
    if cfg.record_trace:
        _trace_add(trace, t0, 0, resid, objective(x), sq_alpha * x, oracle_arr)

    converged = resid <= cfg.tol
    iterations = 0
    if not converged:
        next_check = 1  # stagnation-check schedule: dense to 32, then x9/8
        k = 0
        while k < cfg.max_iter:
            k += 1
            x_new = sym_part(
                _spd_solve_eye(
                    _spd_solve_eye(x + a_s, eye) + _spd_solve_eye(x + eye, eye),
                    eye,
                )
            )
            resid = float(np.linalg.norm(x_new @ x_new - a_s)) / denom_s
            if cfg.record_trace:
                _trace_add(trace, t0, k, resid, objective(x_new),
                           sq_alpha * x_new, oracle_arr)
            if resid <= cfg.tol:
                x = x_new
                iterations = k
                converged = True
                break
            if k >= next_check:
                # near a singular root the metric can fail; treat that probe
                # as "no stagnation" rather than aborting a healthy run
                try:
                    stag = thompson_metric(x_new, x)
                except (NotPositiveDefiniteError, sla.LinAlgError):
                    stag = math.inf
                next_check = k + 1 if k < 32 else int(math.ceil(k * 9 / 8))
                if stag <= cfg.tol:
                    x = x_new
                    iterations = k
                    converged = resid <= _CONVERGED_SAFETY * cfg.tol
                    break
            x = x_new
            iterations = k

    root_arr = sq_alpha * x
    return SolverResult(
        root=SymMatrix(root_arr),
        iterations=iterations,
        converged=converged,
        final_residual=_final_residual(root_arr, arr),
        trace=trace,
        gamma_certificate=cert,
    )


# ---------------------------------------------------------------------------
# gradient methods
# ---------------------------------------------------------------------------


def residual_gradient(x: MatrixLike, a: MatrixLike) -> np.ndarray:
    """Gradient of ``f(X) = ||X^2 - A||_F^2`` at symmetric X.

    ``2 [(X^2 - A) X + X (X^2 - A)]``; matches central finite differences of
    f entrywise (a tested invariant).
    """
    xa, aa = as_array(x), as_array(a)
    e = xa @ xa - aa
    return 2.0 * (e @ xa + xa @ e)


def gradient_descent(
    a: MatrixLike,
    cfg: Optional[SolverConfig] = None,
    oracle: Optional[MatrixLike] = None,
) -> SolverResult:
    """Fixed-step gradient descent on ``||X^2 - A||_F^2`` from ``(A + I)/2``.

    The step is ``cfg.gd_step`` or the conservative default
    ``1 / (8 ||A||_2^2)``.  Raises :class:`DivergenceError` if the relative
    residual grows past ``1e6`` times its initial value (the step is too
    large); returns ``converged=False`` when the iteration cap runs out,
    which on badly conditioned input it routinely does.
    """
    cfg = _cfg_or_default(cfg)
    arr = as_array(a)
    n = arr.shape[0]
    eye = np.eye(n)
    denom = _denom(arr)
    oracle_arr = as_array(oracle) if (oracle is not None and cfg.record_trace) else None

    if cfg.gd_step is not None:
        eta = cfg.gd_step
    else:
        nop = _opnorm(arr)
        eta = 1.0 / (8.0 * nop * nop) if nop > 0 else 0.125

    t0 = time.perf_counter()
    trace: List[TraceRecord] = []
    x = 0.5 * (arr + eye)
    xsq = x @ x
    fn = float(np.linalg.norm(xsq - arr))
    resid0 = fn / denom
    resid = resid0
    if cfg.record_trace:
        _trace_add(trace, t0, 0, resid, fn * fn, x, oracle_arr)

    converged = resid <= cfg.tol
    iterations = 0
    if not converged:
        limit = _DIVERGENCE_FACTOR * resid0
        for k in range(1, cfg.max_iter + 1):
            e = xsq - arr
            x = sym_part(x - eta * (2.0 * (e @ x + x @ e)))
            xsq = x @ x
            fn = float(np.linalg.norm(xsq - arr))
            resid = fn / denom
            iterations = k
            if cfg.record_trace:
                _trace_add(trace, t0, k, resid, fn * fn, x, oracle_arr)
            if not math.isfinite(resid) or resid > limit:
                raise DivergenceError(
                    f"residual {resid:.3e} exceeded {_DIVERGENCE_FACTOR:.0e} x "
                    f"its initial value {resid0:.3e} at iteration {k}; "
                    f"the step {eta:.3e} is too large"
                )
            if resid <= cfg.tol:
                converged = True
                break

    return SolverResult(
        root=SymMatrix(x),
        iterations=iterations,
        converged=converged,
        final_residual=_final_residual(x, arr),
        trace=trace,
    )


def lsgd(
    a: MatrixLike,
    cfg: Optional[SolverConfig] = None,
    oracle: Optional[MatrixLike] = None,
) -> SolverResult:
    """Gradient descent with Armijo backtracking on ``||X^2 - A||_F^2``.

    The first search opens at ``1 / ||A||_2``; each later search opens at
    ``growth`` times the previously accepted step.  The step shrinks until
    the sufficient-decrease test ``f(X - eta G) <= f(X) - c eta ||G||_F^2``
    passes, so the objective decreases monotonically.  Trial points are
    symmetrized before evaluation.  If the step underflows ``1e-18`` the
    search has stalled and the run ends with ``converged=False``.
    """
    cfg = _cfg_or_default(cfg)
    ls = cfg.ls_params
    arr = as_array(a)
    n = arr.shape[0]
    eye = np.eye(n)
    denom = _denom(arr)
    oracle_arr = as_array(oracle) if (oracle is not None and cfg.record_trace) else None
    nop = _opnorm(arr)
    # so that the first search opens at exactly 1 / ||A||_2
    step = (1.0 / nop if nop > 0 else 1.0) / ls.growth

    t0 = time.perf_counter()
    trace: List[TraceRecord] = []
    x = 0.5 * (arr + eye)
    xsq = x @ x
    fn = float(np.linalg.norm(xsq - arr))
    f = fn * fn
    resid = fn / denom
    if cfg.record_trace:
        _trace_add(trace, t0, 0, resid, f, x, oracle_arr)

    converged = resid <= cfg.tol
    iterations = 0
    if not converged:
        for k in range(1, cfg.max_iter + 1):
            e = xsq - arr
            g = 2.0 * (e @ x + x @ e)
            gn2 = float(np.linalg.norm(g)) ** 2
            eta = step * ls.growth
            accepted = False
            while eta >= _STALL_FLOOR:
                xt = sym_part(x - eta * g)
                x2t = xt @ xt
                fnt = float(np.linalg.norm(x2t - arr))
                ft = fnt * fnt
                if ft <= f - ls.c * eta * gn2:
                    accepted = True
                    break
                eta *= ls.shrink
            if not accepted:
                break  # stalled: no step gives sufficient decrease
            x, xsq, fn, f = xt, x2t, fnt, ft
            step = eta
            resid = fn / denom
            iterations = k
            if cfg.record_trace:
                _trace_add(trace, t0, k, resid, f, x, oracle_arr)
            if resid <= cfg.tol:
                converged = True
                break

    return SolverResult(
        root=SymMatrix(x),
        iterations=iterations,
        converged=converged,
        final_residual=_final_residual(x, arr),
        trace=trace,
    )


# ---------------------------------------------------------------------------
# polar Newton
# ---------------------------------------------------------------------------


def polar_newton(
    a: MatrixLike,
    cfg: Optional[SolverConfig] = None,
    oracle: Optional[MatrixLike] = None,
) -> SolverResult:
    """Square root via the scaled Newton iteration for the polar factor.

    Factors ``A = R^T R`` (R upper triangular), then iterates
    ``U <- (mu U + mu^{-1} U^{-T}) / 2`` from ``U_0 = R`` with the
    (1, inf)-norm scaling ``mu = (||U^{-1}||_1 ||U^{-1}||_inf /
    (||U||_1 ||U||_inf))^{1/4}`` unless ``newton_scaling="none"``.  U
    converges superlinearly to the orthogonal polar factor of R; the root is
    the symmetrized ``(U^T R + R^T U) / 2``.  Stops when
    ``||U_{k+1} - U_k||_1 <= tol ||U_{k+1}||_1``.

    Raises
    ------
    NotPositiveDefiniteError
        If the Cholesky factorization fails (input must be PD).
    SingularIterateError
        If an iterate loses invertibility.
    """
    cfg = _cfg_or_default(cfg)
    arr = as_array(a)
    oracle_arr = as_array(oracle) if (oracle is not None and cfg.record_trace) else None
    r = cholesky(arr)
    u = r.copy()

    def one_norm(m: np.ndarray) -> float:
        return float(np.abs(m).sum(axis=0).max())

    def inf_norm(m: np.ndarray) -> float:
        return float(np.abs(m).sum(axis=1).max())

    t0 = time.perf_counter()
    trace: List[TraceRecord] = []
    if cfg.record_trace:
        x0 = sym_part(u.T @ r)
        _trace_add(trace, t0, 0, _final_residual(x0, arr),
                   float(np.linalg.norm(u.T @ u - np.eye(arr.shape[0]))),
                   None, oracle_arr)

    converged = False
    iterations = 0
    for k in range(1, cfg.max_iter + 1):
        try:
            ui = sla.inv(u, check_finite=False)
        except sla.LinAlgError as exc:
            raise SingularIterateError(
                f"iterate at step {k} is numerically singular"
            ) from exc
        if not np.all(np.isfinite(ui)):
            raise SingularIterateError(
                f"iterate at step {k} produced a non-finite inverse"
            )
        if cfg.newton_scaling == "optimal_1inf":
            mu = ((one_norm(ui) * inf_norm(ui)) / (one_norm(u) * inf_norm(u))) ** 0.25
        else:
            mu = 1.0
        u_new = 0.5 * (mu * u + ui.T / mu)
        diff = one_norm(u_new - u)
        u = u_new
        iterations = k
        if cfg.record_trace:
            xk = sym_part(u.T @ r)
            _trace_add(trace, t0, k, _final_residual(xk, arr),
                       float(np.linalg.norm(u.T @ u - np.eye(arr.shape[0]))),
                       xk, oracle_arr)
        if diff <= cfg.tol * one_norm(u):
            converged = True
            break

    x = sym_part(u.T @ r)
    final = _final_residual(x, arr)
    return SolverResult(
        root=SymMatrix(x),
        iterations=iterations,
        converged=converged and final <= _CONVERGED_SAFETY * cfg.tol,
        final_residual=final,
        trace=trace,
    )


# ---------------------------------------------------------------------------
# binomial recurrence
# ---------------------------------------------------------------------------


def binomial(
    a: MatrixLike,
    cfg: Optional[SolverConfig] = None,
    oracle: Optional[MatrixLike] = None,
) -> SolverResult:
    """Square root via the quadratic recurrence for ``(I - C)^{1/2}``.

    Shifts the spectrum with ``s = (lambda_max + lambda_min)/2`` so that
    ``C = I - A/s`` has spectral radius ``(kappa - 1)/(kappa + 1) < 1``, then
    iterates ``Y <- (C + Y^2)/2`` from ``Y_0 = 0``; the limit satisfies
    ``I - Y = (I - C)^{1/2}`` and the root is ``sqrt(s) (I - Y)``.  The
    residual comes for free from the ``Y^2`` product already needed by the
    update.  Stops on residual, on ``||Y_{k+1} - Y_k||_F <= tol``, or at
    ``max_iter`` — the linear rate degrades toward 1 as conditioning worsens,
    so expect large iteration counts on stiff input.

    Raises
    ------
    NotPositiveDefiniteError
        If ``lambda_min(a) <= 0``.
    """
    cfg = _cfg_or_default(cfg)
    arr = as_array(a)
    n = arr.shape[0]
    eye = np.eye(n)
    denom = _denom(arr)
    oracle_arr = as_array(oracle) if (oracle is not None and cfg.record_trace) else None
    w = sla.eigh(arr, eigvals_only=True)
    lam_min, lam_max = float(w[0]), float(w[-1])
    if lam_min <= 0.0:
        raise NotPositiveDefiniteError(
            f"binomial recurrence needs PD input; lambda_min = {lam_min:.3e}"
        )
    s = 0.5 * (lam_max + lam_min)
    sq_s = math.sqrt(s)
    c = eye - arr / s

    t0 = time.perf_counter()
    trace: List[TraceRecord] = []
    y = np.zeros_like(arr)
    delta = math.nan  # update norm; nan before the first update
    converged = False
    iterations = 0
    while True:
        ysq = y @ y
        resid = float(np.linalg.norm(s * (eye - 2.0 * y + ysq) - arr)) / denom
        if cfg.record_trace:
            _trace_add(trace, t0, iterations, resid, delta,
                       sq_s * (eye - y), oracle_arr)
        if resid <= cfg.tol:
            converged = True
            break
        if delta <= cfg.tol:  # False for the initial nan
            converged = resid <= _CONVERGED_SAFETY * cfg.tol
            break
        if iterations >= cfg.max_iter:
            break
        y_new = sym_part(0.5 * (c + ysq))
        delta = float(np.linalg.norm(y_new - y))
        y = y_new
        iterations += 1

    root_arr = sq_s * (eye - y)
    return SolverResult(
        root=SymMatrix(root_arr),
        iterations=iterations,
        converged=converged,
        final_residual=_final_residual(root_arr, arr),
        trace=trace,
    )


def initial_interval(a: MatrixLike) -> tuple:
    """PSD interval ``[2 (I + A^{-1})^{-1}, (A + I)/2]`` bracketing the root.

    The endpoints are the harmonic and arithmetic means of A and I; the
    square root (their geometric mean) always lies between them.  Requires
    PD input since the lower endpoint involves ``A^{-1}``.
    """
    arr = as_array(a)
    cholesky(arr)  # PD gate; raises NotPositiveDefiniteError otherwise
    n = arr.shape[0]
    eye = np.eye(n)
    try:
        cf = sla.cho_factor(arr + eye, lower=False)
    except sla.LinAlgError as exc:  # pragma: no cover - A PSD makes A+I PD
        raise NotPositiveDefiniteError(str(exc)) from exc
    lo = 2.0 * sla.cho_solve(cf, arr)
    hi = 0.5 * (arr + eye)
    return SymMatrix(sym_part(lo)), SymMatrix(hi)
