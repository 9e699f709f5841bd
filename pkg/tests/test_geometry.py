"""Tests for the divergence, metric, geodesic, and contraction-bound helpers."""

import math

import numpy as np
import pytest

from psdroot import (
    DomainError,
    NotPositiveDefiniteError,
    gamma_bound,
    geodesic,
    geometric_mean,
    s_divergence,
    s_divergence_lowrank,
    sqrt_eig,
    thompson_metric,
)
from support import haar_orthogonal, random_pd

# S(1, 4) = log 2.5 - (1/2) log 4, exact to the last digit
SDIV_1_4 = 0.2231435513142098


# ---------------------------------------------------------------------------
# s_divergence
# ---------------------------------------------------------------------------


def test_s_divergence_scalar_oracle():
    a = np.array([[1.0]])
    b = np.array([[4.0]])
    assert s_divergence(a, b) == pytest.approx(SDIV_1_4, rel=1e-13)


def test_s_divergence_diagonal_splits_across_modes():
    a = np.diag([1.0, 1.0])
    b = np.diag([4.0, 4.0])
    assert s_divergence(a, b) == pytest.approx(2 * SDIV_1_4, rel=1e-13)


def test_s_divergence_zero_iff_equal():
    rng = np.random.default_rng(1)
    a = random_pd(rng, 5)
    b = random_pd(rng, 5)
    assert s_divergence(a, a) == pytest.approx(0.0, abs=1e-13)
    assert s_divergence(a, b) > 0.0


def test_s_divergence_symmetry_and_congruence_invariance():
    rng = np.random.default_rng(2)
    a = random_pd(rng, 4)
    b = random_pd(rng, 4)
    assert s_divergence(a, b) == pytest.approx(s_divergence(b, a), rel=1e-12)
    m = rng.standard_normal((4, 4)) + 4 * np.eye(4)
    assert s_divergence(m @ a @ m.T, m @ b @ m.T) == pytest.approx(
        s_divergence(a, b), rel=1e-10
    )


def test_s_divergence_rejects_non_pd():
    with pytest.raises(NotPositiveDefiniteError):
        s_divergence(np.diag([1.0, -1.0]), np.eye(2))
    with pytest.raises(NotPositiveDefiniteError):
        s_divergence(np.eye(2), np.diag([1.0, 0.0]))


# ---------------------------------------------------------------------------
# s_divergence_lowrank
# ---------------------------------------------------------------------------


def test_s_divergence_lowrank_matches_full_rank_value():
    rng = np.random.default_rng(3)
    a = random_pd(rng, 4)
    b = random_pd(rng, 4)
    assert s_divergence_lowrank(a, b) == pytest.approx(
        s_divergence(a, b), rel=1e-11
    )


def test_s_divergence_lowrank_common_range_scalar_oracle():
    u = np.array([[0.6], [0.8], [0.0]])
    a = u @ u.T
    b = 4.0 * (u @ u.T)
    assert s_divergence_lowrank(a, b) == pytest.approx(SDIV_1_4, rel=1e-12)


def test_s_divergence_lowrank_rank_or_shape_mismatch_is_inf():
    u = np.array([[1.0], [0.0]])
    rank1 = u @ u.T
    assert s_divergence_lowrank(rank1, np.eye(2)) == math.inf
    assert s_divergence_lowrank(np.eye(2), np.eye(3)) == math.inf


def test_s_divergence_lowrank_identical_singular_inputs():
    u = np.array([[0.6], [0.8]])
    a = u @ u.T
    assert s_divergence_lowrank(a, a) == pytest.approx(0.0, abs=1e-13)


# ---------------------------------------------------------------------------
# thompson_metric
# ---------------------------------------------------------------------------


def test_thompson_metric_scalar_and_diagonal_oracles():
    assert thompson_metric(np.eye(3), 4 * np.eye(3)) == pytest.approx(
        math.log(4.0), rel=1e-14
    )
    # max over modes of |log ratio|: max(log 2, log 2) = log 2
    assert thompson_metric(np.diag([1.0, 4.0]), np.diag([2.0, 2.0])) == pytest.approx(
        math.log(2.0), rel=1e-14
    )


def test_thompson_metric_is_a_metric_on_samples():
    rng = np.random.default_rng(4)
    a = random_pd(rng, 5)
    b = random_pd(rng, 5)
    c = random_pd(rng, 5)
    dab = thompson_metric(a, b)
    assert thompson_metric(a, a) == pytest.approx(0.0, abs=1e-12)
    assert dab == pytest.approx(thompson_metric(b, a), rel=1e-12)
    assert dab <= thompson_metric(a, c) + thompson_metric(c, b) + 1e-12


def test_thompson_metric_invariances():
    rng = np.random.default_rng(5)
    a = random_pd(rng, 4)
    b = random_pd(rng, 4)
    d = thompson_metric(a, b)
    # congruence invariance
    m = rng.standard_normal((4, 4)) + 4 * np.eye(4)
    assert thompson_metric(m @ a @ m.T, m @ b @ m.T) == pytest.approx(d, rel=1e-9)
    # inversion invariance
    assert thompson_metric(np.linalg.inv(a), np.linalg.inv(b)) == pytest.approx(
        d, rel=1e-9
    )
    # scale shifts by |log c| when applied to one argument only
    assert thompson_metric(2 * a, 2 * b) == pytest.approx(d, rel=1e-12)


def test_thompson_metric_rejects_non_pd():
    with pytest.raises(NotPositiveDefiniteError):
        thompson_metric(np.diag([1.0, 0.0]), np.eye(2))
    with pytest.raises(NotPositiveDefiniteError):
        thompson_metric(np.eye(2), np.diag([1.0, -2.0]))


# ---------------------------------------------------------------------------
# geodesic / geometric_mean
# ---------------------------------------------------------------------------


def test_geodesic_endpoints():
    rng = np.random.default_rng(6)
    a = random_pd(rng, 4)
    b = random_pd(rng, 4)
    np.testing.assert_allclose(np.asarray(geodesic(a, b, 0.0)), a, atol=1e-13)
    np.testing.assert_allclose(np.asarray(geodesic(a, b, 1.0)), b, atol=1e-13)


def test_geodesic_commuting_case_is_elementwise_power():
    a = np.diag([1.0, 9.0])
    b = np.diag([4.0, 16.0])
    np.testing.assert_allclose(
        np.asarray(geodesic(a, b, 0.5)), np.diag([2.0, 12.0]), rtol=1e-14
    )
    np.testing.assert_allclose(
        np.asarray(geodesic(a, b, 0.25)), np.diag([4.0**0.25, 9.0**0.75 * 2.0]),
        rtol=1e-13,
    )


def test_geodesic_rejects_bad_t_and_non_pd_endpoints():
    with pytest.raises(DomainError):
        geodesic(np.eye(2), np.eye(2), -0.1)
    with pytest.raises(DomainError):
        geodesic(np.eye(2), np.eye(2), 1.1)
    with pytest.raises(NotPositiveDefiniteError):
        geodesic(np.eye(2), np.diag([1.0, -1.0]), 0.0)
    with pytest.raises(NotPositiveDefiniteError):
        geodesic(np.diag([0.0, 1.0]), np.eye(2), 1.0)


def test_geodesic_parametrizes_by_metric_arc_length():
    rng = np.random.default_rng(7)
    a = random_pd(rng, 4)
    b = random_pd(rng, 4)
    total = thompson_metric(a, b)
    for t in (0.25, 0.5, 0.75):
        g = geodesic(a, b, t)
        assert thompson_metric(a, g) == pytest.approx(t * total, rel=1e-9)
        assert thompson_metric(g, b) == pytest.approx((1 - t) * total, rel=1e-9)


def test_geometric_mean_oracles():
    np.testing.assert_allclose(
        np.asarray(geometric_mean(np.diag([1.0, 4.0]), np.diag([9.0, 16.0]))),
        np.diag([3.0, 8.0]),
        rtol=1e-14,
    )
    np.testing.assert_allclose(
        np.asarray(geometric_mean(4 * np.eye(3), np.eye(3))), 2 * np.eye(3),
        rtol=1e-14,
    )


def test_geometric_mean_with_identity_is_principal_root():
    rng = np.random.default_rng(8)
    a = random_pd(rng, 5)
    np.testing.assert_allclose(
        np.asarray(geometric_mean(np.eye(5), a)),
        np.asarray(sqrt_eig(a)),
        atol=1e-12,
    )


def test_geometric_mean_solves_quadratic_matrix_equation():
    # the mean X of (a, b) is the positive solution of X a^{-1} X = b
    rng = np.random.default_rng(9)
    a = random_pd(rng, 5)
    b = random_pd(rng, 5)
    x = np.asarray(geometric_mean(a, b))
    resid = x @ np.linalg.solve(a, x) - b
    assert np.linalg.norm(resid) <= 1e-10 * np.linalg.norm(b)
    assert np.all(np.linalg.eigvalsh(x) > 0)


def test_geometric_mean_symmetry_and_equidistance():
    rng = np.random.default_rng(10)
    a = random_pd(rng, 4)
    b = random_pd(rng, 4)
    g1 = np.asarray(geometric_mean(a, b))
    g2 = np.asarray(geometric_mean(b, a))
    assert np.linalg.norm(g1 - g2) <= 1e-11 * np.linalg.norm(g1)
    assert thompson_metric(a, g1) == pytest.approx(thompson_metric(g1, b), rel=1e-9)


# ---------------------------------------------------------------------------
# gamma_bound
# ---------------------------------------------------------------------------


def test_gamma_bound_oracles():
    assert gamma_bound(np.eye(3)).gamma == pytest.approx(0.5, rel=1e-15)
    assert gamma_bound(np.diag([4.0, 4.0])).gamma == pytest.approx(5.0 / 7.0, rel=1e-14)
    assert gamma_bound(np.array([[0.01]])).gamma == pytest.approx(
        1.01 / 1.03, rel=1e-14
    )


def test_gamma_bound_reports_its_ingredients():
    g = gamma_bound(np.diag([4.0, 1.0]))
    assert g.norm_a == pytest.approx(4.0)
    assert g.lambda_min_a == pytest.approx(1.0)
    assert g.gamma == pytest.approx(5.0 / 7.0, rel=1e-14)


def test_gamma_bound_strictly_inside_unit_interval():
    rng = np.random.default_rng(11)
    for n in (1, 3, 8):
        g = gamma_bound(random_pd(rng, n, kappa_max=1e6))
        assert 0.0 < g.gamma < 1.0
