#!/usr/bin/env python
"""Tests de DFT, características de frecuencia y residuo estacional.

Ejecutar: python tests/test_features.py  (o pytest tests/)
"""

import sys
from pathlib import Path

# Añadir src al path
sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np
import pytest

from src.errors import ParameterError, ShapeError
from src.features.spectral import Spectrum, dft, freq_features
from src.features.tri_features import (
    DOMAIN_CHANNELS,
    DomainFeatures,
    extract,
    residual_features,
    stack_features,
    standardize_channels,
)


def _naive_dft(x: np.ndarray) -> np.ndarray:
    n = len(x)
    k = np.arange(n)[:, None]
    t = np.arange(n)[None, :]
    return (x[None, :] * np.exp(-2j * np.pi * k * t / n)).sum(axis=1)


# =============================================================================
# DFT
# =============================================================================

def test_dft_constant():
    """[1,1,1,1] → sólo componente DC (4, 0)."""
    s = dft(np.ones(4))
    assert s[0] == pytest.approx((4.0, 0.0), abs=1e-12)
    for k in range(1, 4):
        assert s[k] == pytest.approx((0.0, 0.0), abs=1e-12)


def test_dft_cosine():
    """[1,0,−1,0] → X[1] = X[3] = (2, 0)."""
    s = dft(np.array([1.0, 0.0, -1.0, 0.0]))
    assert s[1] == pytest.approx((2.0, 0.0), abs=1e-12)
    assert s[3] == pytest.approx((2.0, 0.0), abs=1e-12)
    assert s[0] == pytest.approx((0.0, 0.0), abs=1e-12)
    assert s[2] == pytest.approx((0.0, 0.0), abs=1e-12)


def test_dft_matches_naive_sum():
    x = np.random.default_rng(7).standard_normal(16)
    s = dft(x)
    ref = _naive_dft(x)
    np.testing.assert_allclose(s.real, ref.real, atol=1e-9)
    np.testing.assert_allclose(s.imag, ref.imag, atol=1e-9)
    assert len(s) == 16


def test_dft_random_windows_and_parseval():
    """200 ventanas aleatorias: igual a la suma directa y Σx² = Σ|X|²/L."""
    rng = np.random.default_rng(11)
    for _ in range(200):
        n = int(rng.integers(4, 129))
        x = rng.standard_normal(n) * rng.uniform(0.1, 10.0)
        s = dft(x)
        ref = _naive_dft(x)
        np.testing.assert_allclose(s.real, ref.real, atol=1e-9 * n)
        np.testing.assert_allclose(s.imag, ref.imag, atol=1e-9 * n)
        energy = float(np.sum(x ** 2))
        spectral = float(np.sum(s.real ** 2 + s.imag ** 2)) / n
        assert abs(energy - spectral) <= 1e-6 * max(1.0, energy)


def test_dft_conjugate_symmetry():
    """Entrada real: X[L−k] = conj(X[k])."""
    x = np.random.default_rng(5).standard_normal(25)
    s = dft(x)
    for k in range(1, 25):
        assert s.real[25 - k] == pytest.approx(s.real[k], abs=1e-9)
        assert s.imag[25 - k] == pytest.approx(-s.imag[k], abs=1e-9)


# =============================================================================
# CARACTERÍSTICAS DE FRECUENCIA
# =============================================================================

def test_freq_features_examples():
    s = Spectrum(real=np.array([3.0, 0.0, 2.0]), imag=np.array([4.0, 0.0, 0.0]))
    f = freq_features(s)
    assert f.shape == (3, 3)
    assert f[0, 0] == pytest.approx(5.0)
    assert f[0, 2] == pytest.approx(25.0)
    assert f[1].tolist() == [0.0, 0.0, 0.0]
    # X = (2, 0): fase atan2(Re, Im) = π/2
    assert f[2, 1] == pytest.approx(np.pi / 2)


def test_frequency_extract_amplitude():
    feats = extract(np.ones(4), 'frequency', period=2)
    np.testing.assert_allclose(feats.channels[:, 0], [4.0, 0.0, 0.0, 0.0], atol=1e-12)


def test_amplitude_squared_is_power():
    x = np.random.default_rng(9).standard_normal(40)
    f = freq_features(dft(x))
    np.testing.assert_allclose(f[:, 0] ** 2, f[:, 2], rtol=1e-12, atol=1e-12)
    assert np.all(f[:, 0] >= 0)
    assert np.all(np.abs(f[:, 1]) <= np.pi)


# =============================================================================
# RESIDUO
# =============================================================================

def test_residual_periodic_is_zero():
    x = np.tile([1.0, 3.0, -2.0, 0.5], 5)
    np.testing.assert_allclose(residual_features(x, 4), 0.0, atol=1e-12)


def test_residual_spike():
    """Un pico de +5 deja 5·(1 − 1/repeticiones) en su posición."""
    base = np.tile([0.0, 1.0, 0.0, -1.0], 4)
    x = base.copy()
    x[5] += 5.0
    res = residual_features(x, 4)
    assert res[5] == pytest.approx(5.0 * (1 - 1 / 4))
    # las demás posiciones de la misma fase absorben −5/4
    for i in (1, 9, 13):
        assert res[i] == pytest.approx(-5.0 / 4)
    for i in range(16):
        if i % 4 != 1:
            assert res[i] == pytest.approx(0.0, abs=1e-12)


def test_residual_period_two_matches_brute_force():
    x = np.random.default_rng(3).standard_normal(11)
    even, odd = x[0::2].mean(), x[1::2].mean()
    expected = np.array([v - (even if i % 2 == 0 else odd) for i, v in enumerate(x)])
    np.testing.assert_allclose(residual_features(x, 2), expected, atol=1e-12)


def test_residual_bad_period():
    with pytest.raises(ParameterError):
        residual_features(np.ones(8), 1)


def test_residual_is_idempotent():
    rng = np.random.default_rng(4)
    for period in (2, 5, 12):
        x = rng.standard_normal(60)
        once = residual_features(x, period)
        np.testing.assert_allclose(residual_features(once, period), once, atol=1e-12)


# =============================================================================
# EXTRACCIÓN
# =============================================================================

def test_extract_domains():
    temporal = extract(np.array([1.0, 2.0, 3.0]), 'temporal', period=2)
    assert temporal.channels.tolist() == [[1.0], [2.0], [3.0]]

    window = np.sin(2 * np.pi * np.arange(16) / 4)
    residual = extract(window, 'residual', period=4)
    np.testing.assert_allclose(residual.channels, 0.0, atol=1e-12)

    for domain, channels in DOMAIN_CHANNELS.items():
        assert extract(window, domain, period=4).channels.shape == (16, channels)


def test_unknown_domain():
    with pytest.raises(ShapeError):
        extract(np.ones(8), 'wavelet', period=2)
    with pytest.raises(ShapeError):
        DomainFeatures('temporal', np.ones((8, 2)))


def test_standardize_frequency_only():
    window = np.random.default_rng(1).standard_normal(32)
    freq = standardize_channels(extract(window, 'frequency', period=8))
    np.testing.assert_allclose(freq.channels.mean(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(freq.channels.std(axis=0), 1.0, atol=1e-12)
    temporal = extract(window, 'temporal', period=8)
    assert standardize_channels(temporal) is temporal


def test_stack_features_shape():
    windows = np.random.default_rng(2).standard_normal((5, 20))
    assert stack_features(windows, 'temporal', 5).shape == (5, 20, 1)
    assert stack_features(windows, 'frequency', 5).shape == (5, 20, 3)
    assert stack_features(windows, 'residual', 5).shape == (5, 20, 1)


if __name__ == "__main__":
    from harness import main
    main("Tests de características tri-dominio", dict(globals()))
