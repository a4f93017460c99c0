"""Decoy-state BB84 rate formula and its building blocks."""

import math

import numpy as np
import pytest

from fsoqkd.qkd import (
    ModeLoad,
    QkdSystemParams,
    binary_entropy,
    decoy_bb84_rate,
    effective_dark_count,
    mode_rate,
    rate_per_pulse,
)

import oracles


def test_binary_entropy_landmarks():
    assert binary_entropy(0.5) == pytest.approx(1.0, rel=1e-15)
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.11) == pytest.approx(0.499915958164528, rel=1e-12)
    assert binary_entropy(0.01) == pytest.approx(0.08079313589591118, rel=1e-12)


def test_binary_entropy_symmetry_and_vectorization():
    x = np.linspace(0.0, 1.0, 101)
    np.testing.assert_allclose(binary_entropy(x), binary_entropy(1.0 - x), atol=1e-14)
    assert np.all(binary_entropy(x) <= 1.0 + 1e-15)


def test_effective_dark_count_frozen_value():
    # mu_c = 1e-3 crosstalk photons per pulse on top of 1e-6 dark counts.
    got = effective_dark_count(1e-6, 1e7, 1e10)
    assert got == pytest.approx(0.0010005001666248958, rel=1e-13)
    assert effective_dark_count(1e-6, 0.0, 1e10) == pytest.approx(1e-6, rel=1e-9)


def test_ideal_collapse_rate():
    # Lossless channel, perfect visibility, no dark counts: the rate is
    # sift * mu * exp(-mu) at mu = 0.5.
    params = QkdSystemParams(
        visibility=1.0,
        dark_count=0.0,
        pulse_rate=1e10,
        error_correction_factor=1.0,
        sifting_factor=0.5,
    )
    got = rate_per_pulse(1.0, 0.5, 0.0, params)
    assert got == pytest.approx(0.5 * 0.5 * math.exp(-0.5), rel=1e-12)
    assert got == pytest.approx(0.15163266492815836, rel=1e-12)


def test_rate_matches_scalar_reference_on_random_grid():
    params = QkdSystemParams()
    rng = np.random.default_rng(20260814)
    for _ in range(300):
        eta = float(rng.uniform(0.0, 1.0))
        mu = float(rng.uniform(0.0, 1.5))
        mu_c = float(rng.uniform(0.0, 0.05))
        expected = oracles.decoy_rate_reference(
            eta,
            mu,
            mu_c,
            params.visibility,
            params.dark_count,
            params.error_correction_factor,
            params.sifting_factor,
        )
        got = float(rate_per_pulse(eta, mu, mu_c, params))
        assert got == pytest.approx(expected, rel=1e-12, abs=1e-15)


def test_rate_vectorizes_over_mu():
    params = QkdSystemParams()
    mu = np.linspace(0.01, 1.2, 40)
    vec = rate_per_pulse(0.3, mu, 1e-4, params)
    scalar = np.array([float(rate_per_pulse(0.3, m, 1e-4, params)) for m in mu])
    np.testing.assert_allclose(vec, scalar, rtol=1e-14)


def test_rate_nonincreasing_in_crosstalk_and_dark_counts():
    mu_c = np.linspace(0.0, 0.1, 30)
    rates = rate_per_pulse(0.2, 0.4, mu_c, QkdSystemParams())
    assert np.all(np.diff(rates) <= 1e-15)
    darker = [
        float(rate_per_pulse(0.2, 0.4, 0.0, QkdSystemParams(dark_count=p)))
        for p in (1e-8, 1e-6, 1e-4, 1e-2)
    ]
    assert all(a >= b - 1e-15 for a, b in zip(darker, darker[1:]))


def test_rate_zero_when_signal_buried():
    # Detection dominated by dark counts: error rate saturates and the
    # clamped rate is exactly zero.
    params = QkdSystemParams(dark_count=1e-3)
    assert float(rate_per_pulse(1e-9, 0.1, 0.0, params)) == 0.0
    assert float(rate_per_pulse(0.0, 0.5, 0.0, QkdSystemParams())) == 0.0


def test_rate_dominated_by_channel_capacity():
    # Per-pulse key yield cannot beat -log2(1 - eta) for any mu, mu_c.
    rng = np.random.default_rng(7)
    params = QkdSystemParams()
    for _ in range(1000):
        eta = float(rng.uniform(1e-6, 0.999))
        mu = float(rng.uniform(0.0, 1.5))
        mu_c = float(rng.uniform(0.0, 0.05))
        got = float(rate_per_pulse(eta, mu, mu_c, params))
        assert got <= -math.log2(1.0 - eta) + 1e-12


def test_decoy_bb84_rate_and_mode_rate_scale_with_pulse_rate():
    base = QkdSystemParams(pulse_rate=1e9)
    double = QkdSystemParams(pulse_rate=2e9)
    load_base = ModeLoad(eta=0.3, transmit_power=0.4 * 1e9, crosstalk_power=1e-4 * 1e9)
    load_double = ModeLoad(eta=0.3, transmit_power=0.4 * 2e9, crosstalk_power=1e-4 * 2e9)
    r1 = mode_rate(load_base, base)
    r2 = mode_rate(load_double, double)
    assert r1 > 0.0
    assert r2 == pytest.approx(2.0 * r1, rel=1e-12)
    # Equal per-pulse yields at equal (eta, mu, mu_c) operating points.
    assert decoy_bb84_rate(load_double, double) == pytest.approx(
        decoy_bb84_rate(load_base, base), rel=1e-14
    )
    assert mode_rate(load_base, base) == pytest.approx(
        base.pulse_rate * decoy_bb84_rate(load_base, base), rel=1e-14
    )


def test_mode_rate_zero_power_is_zero():
    params = QkdSystemParams()
    load = ModeLoad(eta=0.5, transmit_power=0.0, crosstalk_power=0.0)
    assert mode_rate(load, params) == 0.0


def test_param_validation():
    with pytest.raises(ValueError):
        QkdSystemParams(visibility=1.2)
    with pytest.raises(ValueError):
        QkdSystemParams(dark_count=-1e-9)
    with pytest.raises(ValueError):
        QkdSystemParams(pulse_rate=0.0)
    with pytest.raises(ValueError):
        QkdSystemParams(error_correction_factor=0.9)
    with pytest.raises(ValueError):
        QkdSystemParams(sifting_factor=0.0)
    with pytest.raises(ValueError):
        ModeLoad(eta=1.5, transmit_power=1.0, crosstalk_power=0.0)
    with pytest.raises(ValueError):
        ModeLoad(eta=0.5, transmit_power=-1.0, crosstalk_power=0.0)
