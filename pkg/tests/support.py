"""Shared helpers for the test suite: seeded random SPD matrices with a
controlled spectrum, and points drawn inside a PSD interval."""

from __future__ import annotations

import numpy as np

from psdroot import sqrt_eig


def haar_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed orthogonal matrix (sign-fixed QR of a Gaussian)."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def pd_with_spectrum(rng: np.random.Generator, lam: np.ndarray) -> np.ndarray:
    """Symmetric PD matrix with the given eigenvalues and a random basis."""
    q = haar_orthogonal(rng, lam.size)
    a = (q * lam) @ q.T
    return 0.5 * (a + a.T)


def pd_ladder(
    rng: np.random.Generator, n: int, kappa: float, scale: float = 1.0
) -> np.ndarray:
    """Random PD matrix with log-spaced eigenvalues, lambda_max = scale,
    and condition number exactly kappa."""
    lam = scale * np.logspace(-np.log10(kappa), 0.0, n)
    return pd_with_spectrum(rng, lam)


def random_pd(rng: np.random.Generator, n: int, kappa_max: float = 100.0) -> np.ndarray:
    """Random PD matrix with condition number drawn log-uniformly
    in [1, kappa_max] and unit spectral norm."""
    kappa = 10.0 ** rng.uniform(0.0, np.log10(kappa_max))
    return pd_ladder(rng, n, kappa)


def mixed_conditioning_draws() -> list[np.ndarray]:
    """The frozen 100-matrix sample used by the random-input accuracy check.

    Seeded once and never re-tuned: unit-operator-norm log-spaced spectra
    under Haar rotations, 95 draws with condition number 10**U(0, 3) and five
    harder draws with 10**U(3, 4).  The matrices are a deterministic function
    of this exact generator-consumption order, so do not reorder the calls.
    """
    rng = np.random.default_rng(0)

    def draw(kappa_lo: float, kappa_hi: float) -> np.ndarray:
        n = int(rng.integers(2, 31))
        kappa = 10.0 ** rng.uniform(kappa_lo, kappa_hi)
        lam = np.logspace(-np.log10(kappa), 0.0, n)
        q, r = np.linalg.qr(rng.standard_normal((n, n)))
        q = q * np.sign(np.diag(r))
        a = (q * lam) @ q.T
        return 0.5 * (a + a.T)

    return [draw(0.0, 3.0) for _ in range(95)] + [draw(3.0, 4.0) for _ in range(5)]


def interval_point(
    rng: np.random.Generator, lo: np.ndarray, hi: np.ndarray
) -> np.ndarray:
    """Random point inside the PSD interval [lo, hi].

    Draws ``lo + C^{1/2} M C^{1/2}`` with ``C = hi - lo`` and M a random
    symmetric matrix with spectrum in (0, 1), which is inside the interval
    because the congruence preserves PSD ordering.
    """
    c = hi - lo
    ch = np.asarray(sqrt_eig(c))
    n = lo.shape[0]
    m = pd_with_spectrum(rng, rng.uniform(0.05, 0.95, size=n))
    x = lo + ch @ m @ ch
    return 0.5 * (x + x.T)
