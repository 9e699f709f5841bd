"""Tests for the test-matrix gallery, conditioning reports, and spec strings."""

import warnings

import numpy as np
import pytest

from psdroot import (
    DomainError,
    MatrixSpec,
    OverflowWarning,
    ParseError,
    build_matrix,
    condition_report,
    hilbert,
    inv_hilbert,
    lowrank_psd,
    parse_spec,
    randcorr,
    spiked_identity,
)

# ---------------------------------------------------------------------------
# hilbert / inv_hilbert
# ---------------------------------------------------------------------------


def test_hilbert_entries_are_exact_reciprocals():
    h = hilbert(3)
    expect = [[1.0, 1 / 2, 1 / 3], [1 / 2, 1 / 3, 1 / 4], [1 / 3, 1 / 4, 1 / 5]]
    assert np.array_equal(h.array, np.array(expect))
    with pytest.raises(DomainError):
        hilbert(0)


def test_inv_hilbert_small_case_is_integer_exact():
    expect = np.array(
        [[9.0, -36.0, 30.0], [-36.0, 192.0, -180.0], [30.0, -180.0, 180.0]]
    )
    assert np.array_equal(inv_hilbert(3).array, expect)


def test_inv_hilbert_inverts_hilbert():
    # rounding the Hilbert entries to doubles is amplified by the condition
    # number, so the achievable identity error scales with kappa * eps
    for n in (2, 5, 8, 10):
        prod = hilbert(n).array @ inv_hilbert(n).array
        err = np.linalg.norm(prod - np.eye(n), np.inf)
        kappa = condition_report(hilbert(n)).kappa
        assert err <= 50.0 * n * np.finfo(float).eps * kappa


def test_inv_hilbert_warns_once_integers_exceed_the_exact_range():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        inv_hilbert(8)  # all entries exactly representable: must stay silent
    with pytest.warns(OverflowWarning):
        inv_hilbert(13)


def test_inv_hilbert_rejects_entries_beyond_double_range():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(ValueError):
            inv_hilbert(205)


# ---------------------------------------------------------------------------
# randcorr
# ---------------------------------------------------------------------------


def test_randcorr_is_a_correlation_matrix():
    c = np.asarray(randcorr(8, seed=3))
    assert np.abs(np.diag(c) - 1.0).max() <= 1e-12
    assert c.trace() == pytest.approx(8.0, abs=1e-10)
    assert np.linalg.eigvalsh(c)[0] >= -1e-12
    assert np.abs(c).max() <= 1.0 + 1e-12


def test_randcorr_is_deterministic_per_seed():
    a = np.asarray(randcorr(10, seed=2))
    b = np.asarray(randcorr(10, seed=2))
    c = np.asarray(randcorr(10, seed=3))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_randcorr_rejects_bad_sizes():
    with pytest.raises(DomainError):
        randcorr(0, seed=1)


# ---------------------------------------------------------------------------
# spiked_identity / lowrank_psd
# ---------------------------------------------------------------------------


def test_spiked_identity_spectrum_is_two_level():
    s = np.asarray(spiked_identity(10, 3, 63.0, seed=21))
    ev = np.linalg.eigvalsh(s)
    np.testing.assert_allclose(ev[:7], 1.0, rtol=1e-10)
    np.testing.assert_allclose(ev[7:], 64.0, rtol=1e-10)


def test_spiked_identity_is_deterministic_and_validated():
    a = np.asarray(spiked_identity(6, 2, 4.0, seed=5))
    assert np.array_equal(a, np.asarray(spiked_identity(6, 2, 4.0, seed=5)))
    with pytest.raises(DomainError):
        spiked_identity(3, 5, 1.0, seed=0)
    with pytest.raises(DomainError):
        spiked_identity(3, 1, -0.5, seed=0)
    with pytest.raises(DomainError):
        spiked_identity(0, 0, 1.0, seed=0)


def test_lowrank_psd_has_requested_rank():
    a = np.asarray(lowrank_psd(12, 4, seed=7))
    ev = np.linalg.eigvalsh(a)
    assert ev[0] >= -1e-12 * ev[-1]
    assert int((ev > 1e-8 * ev[-1]).sum()) == 4
    with pytest.raises(DomainError):
        lowrank_psd(4, 9, seed=0)


# ---------------------------------------------------------------------------
# condition_report
# ---------------------------------------------------------------------------


def test_condition_report_identity():
    r = condition_report(np.eye(3))
    assert r.kappa == 1.0
    assert r.lambda_max == r.lambda_min == 1.0
    assert not r.saturated


def test_condition_report_diagonal():
    r = condition_report(np.diag([4.0, 1.0]))
    assert r.kappa == pytest.approx(4.0, rel=1e-14)
    assert r.lambda_max == pytest.approx(4.0)
    assert r.lambda_min == pytest.approx(1.0)


def test_condition_report_moderate_hilbert_value():
    r = condition_report(hilbert(6))
    assert r.kappa == pytest.approx(1.4951e7, rel=1e-3)
    assert not r.saturated


def test_condition_report_flags_saturation_past_double_precision():
    r = condition_report(hilbert(50))
    assert r.saturated
    assert r.kappa == np.inf or r.kappa > 1e15


# ---------------------------------------------------------------------------
# spec strings
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "text",
    ["hilb:7", "invhilb:5", "randcorr:10:2", "spiked:50:5:63:21", "lowrank:100:10:7"],
)
def test_parse_spec_round_trips(text):
    spec = parse_spec(text)
    assert isinstance(spec, MatrixSpec)
    assert str(spec) == text


@pytest.mark.parametrize(
    "text",
    [
        "nope:3",
        "hilb",
        "hilb:x",
        "hilb:-3",
        "hilb:3:4",
        "randcorr:5",
        "spiked:5:2:1",
        "lowrank:5:2",
        "",
        ":",
    ],
)
def test_parse_spec_rejects_malformed_text(text):
    with pytest.raises(ParseError):
        parse_spec(text)


def test_build_matrix_dispatches_to_the_constructors():
    pairs = [
        ("hilb:4", hilbert(4)),
        ("invhilb:4", inv_hilbert(4)),
        ("randcorr:6:3", randcorr(6, 3)),
        ("spiked:8:2:4.0:5", spiked_identity(8, 2, 4.0, 5)),
        ("lowrank:9:3:1", lowrank_psd(9, 3, 1)),
    ]
    for text, direct in pairs:
        built = build_matrix(parse_spec(text))
        assert np.array_equal(np.asarray(built), np.asarray(direct)), text
