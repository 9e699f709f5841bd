"""Deterministic generators for the benchmark matrix classes.

Randomized generators draw from ``numpy.random.default_rng`` (PCG64 behind
``SeedSequence``), so a given ``(kind, parameters, seed)`` tuple produces a
bit-identical matrix on every call and platform.  Spec strings such as
``spiked:50:5:63:42`` name these matrices on the CLI; see
:func:`parse_spec` for the grammar.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla

from .errors import DomainError, OverflowWarning, ParseError
from .matcore import MatrixLike, SymMatrix, as_array, sym_part

__all__ = [
    "hilbert",
    "inv_hilbert",
    "randcorr",
    "spiked_identity",
    "lowrank_psd",
    "ConditionReport",
    "condition_report",
    "MatrixSpec",
    "parse_spec",
    "build_matrix",
]

_EXACT_INT_LIMIT = float(2**53)  # largest range where doubles hold integers exactly


def _check_dim(n: int) -> None:
    if not (isinstance(n, int) and n >= 1):
        raise DomainError(f"dimension must be a positive int, got {n!r}")


def hilbert(n: int) -> SymMatrix:
    """Hilbert matrix ``H[i, j] = 1/(i + j - 1)`` (1-based), the classic
    ill-conditioned test case: its condition number grows like ``e^{3.5 n}``
    and exceeds double precision already around n = 13."""
    _check_dim(n)
    i = np.arange(1, n + 1)
    return SymMatrix(1.0 / (i[:, None] + i[None, :] - 1))


def inv_hilbert(n: int) -> SymMatrix:
    """Exact inverse of the Hilbert matrix, computed in integer arithmetic.

    Entries are the closed-form integers
    ``(-1)^{i+j} (i+j-1) C(n+i-1, n-j) C(n+j-1, n-i) C(i+j-2, i-1)^2``;
    they grow so fast that they leave the exactly-representable double range
    (2^53) near n = 12 — an :class:`OverflowWarning` flags that — and
    overflow doubles entirely around n = 180, which raises.

    Raises
    ------
    ValueError
        If an entry exceeds the double-precision range altogether.
    """
    _check_dim(n)
    out = np.empty((n, n), dtype=np.float64)
    biggest = 0
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            v = (
                (i + j - 1)
                * math.comb(n + i - 1, n - j)
                * math.comb(n + j - 1, n - i)
                * math.comb(i + j - 2, i - 1) ** 2
            )
            if (i + j) % 2:
                v = -v
            biggest = max(biggest, abs(v))
            try:
                fv = float(v)
            except OverflowError:
                raise ValueError(
                    f"inverse Hilbert entries for n={n} overflow double precision"
                ) from None
            out[i - 1, j - 1] = fv
            out[j - 1, i - 1] = fv
    if biggest > _EXACT_INT_LIMIT:
        warnings.warn(
            f"inverse Hilbert entries for n={n} exceed 2^53; "
            "the matrix is no longer exact in double precision",
            OverflowWarning,
            stacklevel=2,
        )
    return SymMatrix(out)


def _haar_orthogonal(rng: np.random.Generator, n: int, cols: Optional[int] = None) -> np.ndarray:
    """Orthogonal(-column) matrix from sign-fixed QR of a Gaussian draw."""
    g = rng.standard_normal((n, cols if cols is not None else n))
    q, r = np.linalg.qr(g)
    return q * np.sign(np.diag(r))


def randcorr(n: int, seed: int) -> SymMatrix:
    """Random correlation matrix: PSD with unit diagonal and trace n.

    Eigenvalues are drawn uniformly and rescaled to sum to n, rotated by a
    seeded random orthogonal matrix, and the diagonal is then driven to 1 by
    Givens rotations (each rotation fixes one diagonal entry while preserving
    the spectrum).  Diagonal entries land within 1e-12 of 1.
    """
    _check_dim(n)
    rng = np.random.default_rng(seed)
    lam = rng.uniform(size=n)
    lam *= n / lam.sum()
    q = _haar_orthogonal(rng, n)
    a = sym_part((q * lam) @ q.T)
    for _ in range(4 * n):
        d = np.diag(a) - 1.0
        if np.abs(d).max() <= 1e-13:
            break
        i = int(np.argmin(d))
        j = int(np.argmax(d))
        # rotation angle t = tan(theta) solving the quadratic that sets the
        # (i, i) entry to 1; the copysign form picks the stable root
        c2, c1, c0 = a[j, j] - 1.0, 2.0 * a[i, j], a[i, i] - 1.0
        disc = math.sqrt(c1 * c1 - 4.0 * c2 * c0)
        qq = -(c1 + math.copysign(disc, c1)) / 2.0
        t = c0 / qq if qq != 0.0 else math.sqrt(-c0 / c2)
        c = 1.0 / math.sqrt(1.0 + t * t)
        s = t * c
        g = np.array([[c, -s], [s, c]])
        a[:, [i, j]] = a[:, [i, j]] @ g
        a[[i, j], :] = g.T @ a[[i, j], :]
        a = sym_part(a)
    return SymMatrix(a)


def spiked_identity(n: int, r: int, beta: float, seed: int) -> SymMatrix:
    """``I + beta U U^T`` with U a seeded n x r orthonormal-column matrix.

    The spectrum is exactly {1 + beta (x r), 1 (x n-r)}, so the condition
    number is 1 + beta by construction.
    """
    _check_dim(n)
    if not 1 <= r <= n:
        raise DomainError(f"rank r={r} must satisfy 1 <= r <= n={n}")
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta!r}")
    rng = np.random.default_rng(seed)
    u = _haar_orthogonal(rng, n, r)
    return SymMatrix(np.eye(n) + beta * (u @ u.T))


def lowrank_psd(n: int, r: int, seed: int) -> SymMatrix:
    """Rank-r PSD covariance ``B B^T`` with B a seeded n x r Gaussian."""
    _check_dim(n)
    if not 1 <= r <= n:
        raise DomainError(f"rank r={r} must satisfy 1 <= r <= n={n}")
    rng = np.random.default_rng(seed)
    b = rng.standard_normal((n, r))
    return SymMatrix(b @ b.T)


@dataclass(frozen=True)
class ConditionReport:
    """Extremal eigenvalues and their ratio from the eig oracle.

    ``kappa`` is ``+inf`` when ``lambda_min <= 1e-300``.  ``saturated``
    flags ``lambda_min <= n * eps * lambda_max``, where the computed ratio
    has exhausted double precision and is indicative only.
    """

    kappa: float
    lambda_max: float
    lambda_min: float
    saturated: bool


def condition_report(a: MatrixLike) -> ConditionReport:
    arr = as_array(a)
    w = sla.eigh(arr, eigvals_only=True)
    lam_min, lam_max = float(w[0]), float(w[-1])
    kappa = math.inf if lam_min <= 1e-300 else lam_max / lam_min
    saturated = lam_min <= arr.shape[0] * np.finfo(np.float64).eps * lam_max
    return ConditionReport(
        kappa=kappa, lambda_max=lam_max, lambda_min=lam_min, saturated=saturated
    )


# ---------------------------------------------------------------------------
# spec strings
# ---------------------------------------------------------------------------

_GRAMMAR = (
    "hilb:<n> | invhilb:<n> | randcorr:<n>:<seed> | "
    "spiked:<n>:<r>:<beta>:<seed> | lowrank:<n>:<r>:<seed>"
)


@dataclass(frozen=True)
class MatrixSpec:
    """Parsed description of a gallery matrix."""

    kind: str
    n: int
    r: Optional[int] = None
    beta: Optional[float] = None
    seed: Optional[int] = None

    def __str__(self) -> str:
        if self.kind in ("hilb", "invhilb"):
            return f"{self.kind}:{self.n}"
        if self.kind == "randcorr":
            return f"{self.kind}:{self.n}:{self.seed}"
        if self.kind == "spiked":
            return f"{self.kind}:{self.n}:{self.r}:{self.beta:g}:{self.seed}"
        return f"{self.kind}:{self.n}:{self.r}:{self.seed}"


def _parse_int(tok: str, what: str, spec: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"bad {what} {tok!r} in spec {spec!r}") from None


def parse_spec(spec: str) -> MatrixSpec:
    """Parse a matrix spec string.

    Grammar: ``hilb:<n>``, ``invhilb:<n>``, ``randcorr:<n>:<seed>``,
    ``spiked:<n>:<r>:<beta>:<seed>``, ``lowrank:<n>:<r>:<seed>``.

    Raises
    ------
    ParseError
        Naming the offending token on any deviation from the grammar.
    """
    parts = spec.split(":")
    kind = parts[0]
    arity = {"hilb": 2, "invhilb": 2, "randcorr": 3, "spiked": 5, "lowrank": 4}
    if kind not in arity:
        raise ParseError(f"unknown matrix kind {kind!r} in spec {spec!r} (grammar: {_GRAMMAR})")
    if len(parts) != arity[kind]:
        raise ParseError(
            f"spec {spec!r} has {len(parts) - 1} parameters, "
            f"{kind!r} takes {arity[kind] - 1} (grammar: {_GRAMMAR})"
        )
    n = _parse_int(parts[1], "dimension", spec)
    if n < 1:
        raise ParseError(f"dimension must be >= 1 in spec {spec!r}")
    if kind in ("hilb", "invhilb"):
        return MatrixSpec(kind=kind, n=n)
    if kind == "randcorr":
        return MatrixSpec(kind=kind, n=n, seed=_parse_int(parts[2], "seed", spec))
    r = _parse_int(parts[2], "rank", spec)
    if not 1 <= r <= n:
        raise ParseError(f"rank {r} outside 1..{n} in spec {spec!r}")
    if kind == "lowrank":
        return MatrixSpec(kind=kind, n=n, r=r, seed=_parse_int(parts[3], "seed", spec))
    try:
        beta = float(parts[3])
    except ValueError:
        raise ParseError(f"bad beta {parts[3]!r} in spec {spec!r}") from None
    if not beta > 0:
        raise ParseError(f"beta must be positive in spec {spec!r}")
    return MatrixSpec(kind=kind, n=n, r=r, beta=beta, seed=_parse_int(parts[4], "seed", spec))


def build_matrix(spec: MatrixSpec) -> SymMatrix:
    """Instantiate the matrix a :class:`MatrixSpec` describes."""
    if spec.kind == "hilb":
        return hilbert(spec.n)
    if spec.kind == "invhilb":
        return inv_hilbert(spec.n)
    if spec.kind == "randcorr":
        return randcorr(spec.n, spec.seed)
    if spec.kind == "spiked":
        return spiked_identity(spec.n, spec.r, spec.beta, spec.seed)
    if spec.kind == "lowrank":
        return lowrank_psd(spec.n, spec.r, spec.seed)
    raise ParseError(f"unknown matrix kind {spec.kind!r}")
