"""SPD-manifold quantities: divergences, the Thompson metric, geodesics.

The log-det divergence here is the similarity measure the fixed-point solver
minimizes; the Thompson metric is the metric in which that solver's update map
contracts, with :func:`gamma_bound` producing the explicit per-step rate
certificate.  Geodesics and the geometric mean are ground-truth facilities
(computed through the eigendecomposition oracle, not tuned for speed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DomainError, NotPositiveDefiniteError
from .matcore import MatrixLike, SymMatrix, as_array, cholesky, eig_sym, sym_part

__all__ = [
    "s_divergence",
    "s_divergence_lowrank",
    "thompson_metric",
    "geodesic",
    "geometric_mean",
    "GammaBound",
    "gamma_bound",
]

# Tiny negative values produced by round-off are clamped to exact zero; a
# genuine negative divergence can only mean a bug, so the clamp is narrow.
_ZERO_CLAMP = 1e-12


def _logdet_chol(arr: np.ndarray) -> float:
    """log(det(A)) for SPD A via 2 * sum(log(diag(R))) with A = R^T R."""
    r = cholesky(arr)
    return 2.0 * float(np.sum(np.log(np.diag(r))))


def _clamp_zero(v: float) -> float:
    if -_ZERO_CLAMP < v < 0.0:
        return 0.0
    return v


def s_divergence(x: MatrixLike, y: MatrixLike) -> float:
    """Symmetric log-det divergence between two SPD matrices.

    ``logdet((X + Y)/2) - logdet(X)/2 - logdet(Y)/2``, computed via Cholesky
    log-determinants so it stays finite for n in the hundreds.  Nonnegative,
    symmetric in its arguments, and zero iff ``X == Y``.

    Raises
    ------
    NotPositiveDefiniteError
        If either argument (or, by extension, the midpoint) fails Cholesky.
    """
    xa, ya = as_array(x), as_array(y)
    if xa.shape != ya.shape:
        raise NotPositiveDefiniteError(
            f"dimension mismatch: {xa.shape} vs {ya.shape}"
        )
    mid = 0.5 * (xa + ya)
    v = _logdet_chol(mid) - 0.5 * _logdet_chol(xa) - 0.5 * _logdet_chol(ya)
    return _clamp_zero(v)


def s_divergence_lowrank(
    x: MatrixLike, y: MatrixLike, rank_tol: float = 1e-10
) -> float:
    """Rank-aware extension of :func:`s_divergence` to PSD matrices.

    Ranks are counted as eigenvalues above ``rank_tol * lambda_max``.  If the
    two ranks differ the result is ``+inf``.  Otherwise the log-dets are
    replaced by the log of the product of the ``r`` largest eigenvalues, with
    the midpoint's truncated determinant taken at the common rank ``r``
    (the midpoint itself may have higher rank; its trailing eigenvalues are
    simply not counted).
    """
    xa, ya = as_array(x), as_array(y)
    if xa.shape != ya.shape:
        return math.inf

    def rank_and_logdet(arr: np.ndarray) -> tuple[int, np.ndarray]:
        w = sla.eigh(arr, eigvals_only=True)[::-1]  # descending
        wmax = float(w[0]) if w[0] > 0 else 0.0
        r = int(np.sum(w > rank_tol * wmax)) if wmax > 0 else 0
        return r, w

    rx, wx = rank_and_logdet(xa)
    ry, wy = rank_and_logdet(ya)
    if rx != ry:
        return math.inf
    r = rx
    if r == 0:
        return 0.0
    _, wm = rank_and_logdet(0.5 * (xa + ya))

    def logdet_r(w: np.ndarray) -> float:
        top = w[:r]
        if np.any(top <= 0):
            return -math.inf
        return float(np.sum(np.log(top)))

    v = logdet_r(wm) - 0.5 * logdet_r(wx) - 0.5 * logdet_r(wy)
    return _clamp_zero(v)


def thompson_metric(x: MatrixLike, y: MatrixLike) -> float:
    """Thompson part metric ``max_i |log lambda_i(x^{-1} y)|`` for SPD x, y.

    Computed from the generalized symmetric eigenvalues of the pencil
    ``(y, x)``, which equal the eigenvalues of the whitened product.

    Raises
    ------
    NotPositiveDefiniteError
        If either argument is not positive definite.
    """
    xa, ya = as_array(x), as_array(y)
    if xa.shape != ya.shape:
        raise NotPositiveDefiniteError(
            f"dimension mismatch: {xa.shape} vs {ya.shape}"
        )
    try:
        w = sla.eigh(ya, xa, eigvals_only=True)
    except sla.LinAlgError as exc:
        raise NotPositiveDefiniteError(
            f"generalized eigenproblem failed (x not PD?): {exc}"
        ) from exc
    if w[0] <= 0.0:
        raise NotPositiveDefiniteError(
            f"y is not PD: smallest generalized eigenvalue {w[0]:.3e}"
        )
    return float(np.max(np.abs(np.log(w))))


def _require_pd(arr: np.ndarray, what: str) -> None:
    w = sla.eigh(arr, eigvals_only=True)
    if w[0] <= 0.0:
        raise NotPositiveDefiniteError(
            f"{what} must be PD; lambda_min = {w[0]:.3e}"
        )


def _eig_power(arr: np.ndarray, p: float) -> np.ndarray:
    """``A^p`` for SPD A through the eig oracle; raises if not PD."""
    dec = eig_sym(arr)
    w = dec.values
    if w[-1] <= 0.0:
        raise NotPositiveDefiniteError(
            f"matrix power {p} needs PD input; lambda_min = {w[-1]:.3e}"
        )
    return (dec.vectors * w**p) @ dec.vectors.T


def geodesic(x: MatrixLike, y: MatrixLike, t: float) -> SymMatrix:
    """Point at parameter ``t`` on the affine-invariant geodesic from x to y.

    ``x^{1/2} (x^{-1/2} y x^{-1/2})^t x^{1/2}``, with the endpoints returned
    directly for ``t`` of exactly 0 or 1.

    Raises
    ------
    DomainError
        If ``t`` is outside [0, 1].
    NotPositiveDefiniteError
        If either endpoint is not PD.
    """
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"geodesic parameter t={t} outside [0, 1]")
    xm = x if isinstance(x, SymMatrix) else SymMatrix(x)
    ym = y if isinstance(y, SymMatrix) else SymMatrix(y)
    if xm.n != ym.n:
        raise NotPositiveDefiniteError(f"dimension mismatch: {xm.n} vs {ym.n}")
    if t == 0.0 or t == 1.0:
        # endpoints are returned as-is, but both must still be PD
        _require_pd(xm.array, "geodesic endpoint x")
        _require_pd(ym.array, "geodesic endpoint y")
        return xm if t == 0.0 else ym
    xh = _eig_power(xm.array, 0.5)
    xih = _eig_power(xm.array, -0.5)
    inner = sym_part(xih @ ym.array @ xih)
    powered = _eig_power(inner, t)
    return SymMatrix(xh @ powered @ xh)


def geometric_mean(a: MatrixLike, b: MatrixLike) -> SymMatrix:
    """Matrix geometric mean: the geodesic midpoint of two SPD matrices.

    The unique PD solution X of the Riccati equation ``X A^{-1} X = B``; it
    is equidistant from a and b in the log-det divergence.
    """
    return geodesic(a, b, 0.5)


@dataclass(frozen=True)
class GammaBound:
    """Per-step contraction certificate for the fixed-point solver.

    ``gamma = (1 + ||A||) / (1 + ||A|| + 2 min(lambda_min(A), 1))``, which is
    < 1 exactly when A is PD.  One solver step shrinks Thompson distances
    between iterates by at least this factor.
    """

    norm_a: float
    lambda_min_a: float
    gamma: float


def gamma_bound(a: MatrixLike) -> GammaBound:
    """Contraction-rate certificate for the fixed-point iteration on ``a``.

    Raises
    ------
    NotPositiveDefiniteError
        If ``lambda_min(a) <= 0``.
    """
    arr = as_array(a)
    w = sla.eigh(arr, eigvals_only=True)
    lam_min = float(w[0])
    if lam_min <= 0.0:
        raise NotPositiveDefiniteError(
            f"contraction certificate needs PD input; lambda_min = {lam_min:.3e}"
        )
    norm_a = float(max(abs(w[0]), abs(w[-1])))
    gamma = (1.0 + norm_a) / (1.0 + norm_a + 2.0 * min(lam_min, 1.0))
    return GammaBound(norm_a=norm_a, lambda_min_a=lam_min, gamma=gamma)
