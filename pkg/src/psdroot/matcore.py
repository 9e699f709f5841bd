"""Dense symmetric-matrix value type and the shared linear-algebra primitives.

Everything downstream (divergences, solvers, generators, CLI) goes through
this module for Cholesky factorizations, SPD solves, the eigendecomposition
oracle, norms, and Matrix Market I/O.  Matrices are dense float64, symmetrized
on ingest, and immutable afterwards.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
import scipy.linalg as sla

from .errors import (
    ConvergenceFailureError,
    DimensionMismatchError,
    IndefiniteInputError,
    MatrixMarketError,
    NotPositiveDefiniteError,
)

__all__ = [
    "SymMatrix",
    "EigDecomp",
    "DefinitenessClass",
    "Definiteness",
    "classify",
    "cholesky",
    "solve_spd",
    "eig_sym",
    "sqrt_eig",
    "Norms",
    "norms",
    "in_psd_interval",
    "sym_part",
    "write_matrix_market",
    "read_matrix_market",
]

MatrixLike = Union["SymMatrix", np.ndarray]


def sym_part(m: np.ndarray) -> np.ndarray:
    """Symmetric part ``(M + M^T)/2`` of a square array."""
    return 0.5 * (m + m.T)


class SymMatrix:
    """Immutable dense real symmetric matrix.

    The input array is symmetrized via ``(M + M^T)/2`` on construction, so
    ``entry(i, j)`` and ``entry(j, i)`` are bit-identical afterwards.  The
    backing array is write-protected; treat instances as values.

    Raises
    ------
    ValueError
        If the input is not a square 2-d array of finite values with n >= 1.
    """

    __slots__ = ("_a",)

    def __init__(self, data) -> None:
        a = np.array(data, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square 2-d array, got shape {a.shape}")
        if a.shape[0] < 1:
            raise ValueError("matrix dimension must be at least 1")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix entries must be finite (no NaN/Inf)")
        a = sym_part(a)
        a.setflags(write=False)
        self._a = a

    @property
    def n(self) -> int:
        return self._a.shape[0]

    @property
    def array(self) -> np.ndarray:
        """Read-only view of the underlying (n, n) float64 array."""
        return self._a

    def entry(self, i: int, j: int) -> float:
        return float(self._a[i, j])

    def __array__(self, dtype=None, copy=None):
        if dtype is not None:
            return np.asarray(self._a, dtype=dtype)
        return self._a

    def __repr__(self) -> str:
        return f"SymMatrix(n={self.n})"


def as_array(a: MatrixLike) -> np.ndarray:
    """Coerce a SymMatrix or array-like to a validated symmetric ndarray."""
    if isinstance(a, SymMatrix):
        return a.array
    return SymMatrix(a).array


@dataclass(frozen=True)
class EigDecomp:
    """Spectral decomposition ``A = Q diag(values) Q^T``.

    ``values`` are sorted descending; ``vectors`` holds the matching
    eigenvectors as columns of an orthogonal matrix.
    """

    values: np.ndarray
    vectors: np.ndarray


class DefinitenessClass(enum.Enum):
    PD = "pd"
    PSD = "psd"
    INDEFINITE = "indefinite"


@dataclass(frozen=True)
class Definiteness:
    """Definiteness classification with its witness smallest eigenvalue."""

    kind: DefinitenessClass
    lambda_min: float


def classify(a: MatrixLike, tol: float = 1e-12) -> Definiteness:
    """Classify a symmetric matrix as PD, PSD, or indefinite.

    The threshold is relative: ``lambda_min > tol * max(1, lambda_max)``
    means PD, ``lambda_min >= -tol * max(1, lambda_max)`` means PSD,
    anything lower is indefinite.
    """
    arr = as_array(a)
    w = sla.eigh(arr, eigvals_only=True)
    lo, hi = float(w[0]), float(w[-1])
    cut = tol * max(1.0, hi)
    if lo > cut:
        kind = DefinitenessClass.PD
    elif lo >= -cut:
        kind = DefinitenessClass.PSD
    else:
        kind = DefinitenessClass.INDEFINITE
    return Definiteness(kind=kind, lambda_min=lo)


def cholesky(a: MatrixLike) -> np.ndarray:
    """Cholesky factor R of an SPD matrix, with ``A = R^T R``.

    R is upper triangular; this is the convention used throughout the
    package (the polar solver factors A this way before iterating).

    Raises
    ------
    NotPositiveDefiniteError
        If a nonpositive pivot is hit during factorization.
    """
    arr = as_array(a)
    try:
        return sla.cholesky(arr, lower=False)
    except sla.LinAlgError as exc:
        raise NotPositiveDefiniteError(
            f"Cholesky factorization failed: {exc}"
        ) from exc


def solve_spd(a: MatrixLike, b: np.ndarray) -> np.ndarray:
    """Solve ``A X = B`` for SPD A via Cholesky (never explicit inversion).

    Raises
    ------
    NotPositiveDefiniteError
        Propagated from the factorization.
    """
    arr = as_array(a)
    b = np.asarray(b, dtype=np.float64)
    try:
        c = sla.cho_factor(arr, lower=False)
    except sla.LinAlgError as exc:
        raise NotPositiveDefiniteError(
            f"Cholesky factorization failed: {exc}"
        ) from exc
    return sla.cho_solve(c, b)


def eig_sym(a: MatrixLike) -> EigDecomp:
    """Full spectral decomposition with eigenvalues sorted descending.

    Raises
    ------
    ConvergenceFailureError
        If the underlying eigensolver fails to converge.
    """
    arr = as_array(a)
    try:
        w, v = sla.eigh(arr)
    except sla.LinAlgError as exc:
        raise ConvergenceFailureError(f"eigendecomposition failed: {exc}") from exc
    w = np.ascontiguousarray(w[::-1])
    v = np.ascontiguousarray(v[:, ::-1])
    w.setflags(write=False)
    v.setflags(write=False)
    return EigDecomp(values=w, vectors=v)


def sqrt_eig(a: MatrixLike, clamp_tol: float = 1e-10) -> SymMatrix:
    """Reference square root via eigendecomposition.

    Eigenvalues in ``[-clamp_tol * ||a||_2, 0)`` are clamped to zero so that
    numerically PSD inputs are accepted; anything more negative raises.
    This is the ground-truth oracle the iterative solvers are tested against.

    Raises
    ------
    IndefiniteInputError
        If ``lambda_min < -clamp_tol * ||a||_2``.
    """
    dec = eig_sym(a)
    w = dec.values
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    if w[-1] < -clamp_tol * scale:
        raise IndefiniteInputError(
            f"matrix is not PSD: lambda_min = {w[-1]:.3e} "
            f"< -{clamp_tol:g} * ||a||_2"
        )
    w = np.clip(w, 0.0, None)
    root = (dec.vectors * np.sqrt(w)) @ dec.vectors.T
    return SymMatrix(root)


class Norms(NamedTuple):
    frobenius: float
    operator2: float
    one_norm: float
    inf_norm: float


def norms(a: MatrixLike) -> Norms:
    """Frobenius, operator-2 (via the eig oracle), 1-, and inf-norms.

    For symmetric input the 1- and inf-norms coincide.
    """
    arr = as_array(a)
    w = sla.eigh(arr, eigvals_only=True)
    return Norms(
        frobenius=float(np.linalg.norm(arr)),
        operator2=float(np.max(np.abs(w))),
        one_norm=float(np.abs(arr).sum(axis=0).max()),
        inf_norm=float(np.abs(arr).sum(axis=1).max()),
    )


def in_psd_interval(
    x: MatrixLike, lo: MatrixLike, hi: MatrixLike, tol: float = 0.0
) -> bool:
    """True iff ``lo <= x <= hi`` in the PSD order, up to ``-tol`` slack.

    Checks ``lambda_min(x - lo) >= -tol`` and ``lambda_min(hi - x) >= -tol``.

    Raises
    ------
    DimensionMismatchError
        If the three matrices do not share a dimension.
    """
    xa, la, ha = as_array(x), as_array(lo), as_array(hi)
    if not (xa.shape == la.shape == ha.shape):
        raise DimensionMismatchError(
            f"dimension mismatch: {xa.shape}, {la.shape}, {ha.shape}"
        )
    lo_min = sla.eigh(xa - la, eigvals_only=True)[0]
    hi_min = sla.eigh(ha - xa, eigvals_only=True)[0]
    return bool(lo_min >= -tol and hi_min >= -tol)


# ---------------------------------------------------------------------------
# Matrix Market dense array I/O
# ---------------------------------------------------------------------------

_MM_HEADER = "%%MatrixMarket matrix array real symmetric"


def write_matrix_market(path, a: MatrixLike) -> None:
    """Write a symmetric matrix in Matrix Market dense array format.

    Header ``%%MatrixMarket matrix array real symmetric``, then ``n n``,
    then the lower triangle in column-major order, one entry per line at
    17 significant digits (lossless for float64).
    """
    arr = as_array(a)
    n = arr.shape[0]
    lines = [_MM_HEADER, f"{n} {n}"]
    for j in range(n):
        for i in range(j, n):
            lines.append("%.16e" % arr[i, j])
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_matrix_market(path) -> SymMatrix:
    """Read a symmetric matrix written by :func:`write_matrix_market`.

    Accepts comment lines (``%``) after the header, per the format.

    Raises
    ------
    MatrixMarketError
        On a bad header, bad dimensions, or a wrong entry count.
    """
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().rstrip("\n")
        fields = header.split()
        want = _MM_HEADER.split()
        if len(fields) != 5 or fields[0] != want[0] or [
            f.lower() for f in fields[1:]
        ] != want[1:]:
            raise MatrixMarketError(
                f"unsupported Matrix Market header: {header!r} "
                f"(need {_MM_HEADER!r})"
            )
        dims = None
        values = []
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("%"):
                continue
            if dims is None:
                parts = line.split()
                if len(parts) != 2:
                    raise MatrixMarketError(f"bad size line: {line!r}")
                try:
                    rows, cols = int(parts[0]), int(parts[1])
                except ValueError as exc:
                    raise MatrixMarketError(f"bad size line: {line!r}") from exc
                if rows != cols or rows < 1:
                    raise MatrixMarketError(
                        f"symmetric array must be square with n >= 1, "
                        f"got {rows} x {cols}"
                    )
                dims = (rows, cols)
                continue
            try:
                values.append(float(line))
            except ValueError as exc:
                raise MatrixMarketError(f"bad entry: {line!r}") from exc
    if dims is None:
        raise MatrixMarketError("missing size line")
    n = dims[0]
    expect = n * (n + 1) // 2
    if len(values) != expect:
        raise MatrixMarketError(
            f"expected {expect} entries for n={n}, got {len(values)}"
        )
    out = np.empty((n, n), dtype=np.float64)
    k = 0
    for j in range(n):
        for i in range(j, n):
            out[i, j] = values[k]
            out[j, i] = values[k]
            k += 1
    return SymMatrix(out)
