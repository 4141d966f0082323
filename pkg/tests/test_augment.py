#!/usr/bin/env python
"""Tests del aumento por jitter y por filtrado Butterworth.

Ejecutar: python tests/test_augment.py  (o pytest tests/)
"""

import sys
from pathlib import Path

# Añadir src al path
sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np
import pytest

from src.errors import ParameterError
from src.features.augment import (
    CUTOFF_RANGE,
    NOISE_RANGE,
    AugmentationSpec,
    butterworth_coefficients,
    butterworth_lowpass,
    jitter_segment,
    random_augment,
    sample_spec,
    warp_segment,
)


# =============================================================================
# JITTER
# =============================================================================

def test_jitter_touches_only_segment():
    """j=2, l=3 en L=8: sólo cambian las posiciones 2, 3 y 4."""
    window = np.arange(8, dtype=np.float64)
    spec = AugmentationSpec('jitter', start=2, length=3, noise_scale=1.0)
    out = jitter_segment(window, spec, np.random.default_rng(0))
    changed = np.flatnonzero(out != window).tolist()
    assert changed == [2, 3, 4]
    assert np.array_equal(out[[0, 1, 5, 6, 7]], window[[0, 1, 5, 6, 7]])


def test_jitter_vanishing_noise():
    window = np.sin(np.linspace(0, 6, 32))
    spec = AugmentationSpec('jitter', start=0, length=32, noise_scale=1e-12)
    out = jitter_segment(window, spec, np.random.default_rng(0))
    np.testing.assert_allclose(out, window, atol=1e-9)


def test_jitter_full_window_reproducible():
    window = np.zeros(16)
    spec = AugmentationSpec('jitter', start=0, length=16, noise_scale=0.5)
    a = jitter_segment(window, spec, np.random.default_rng(42))
    b = jitter_segment(window, spec, np.random.default_rng(42))
    assert np.array_equal(a, b)
    assert np.all(a != 0)


def test_invalid_specs():
    with pytest.raises(ParameterError):
        AugmentationSpec('jitter', start=6, length=4, noise_scale=1.0).validate(8)
    with pytest.raises(ParameterError):
        AugmentationSpec('jitter', start=0, length=4, noise_scale=0.0).validate(8)
    with pytest.raises(ParameterError):
        AugmentationSpec('shuffle', start=0, length=4).validate(8)
    with pytest.raises(ParameterError):
        AugmentationSpec('warp', start=0, length=4, cutoff=0.0).validate(8)


# =============================================================================
# BUTTERWORTH
# =============================================================================

def test_butterworth_dc_gain():
    x = np.full(64, 2.5)
    np.testing.assert_allclose(butterworth_lowpass(x, 0.1), x, atol=1e-6)


def test_butterworth_attenuates_nyquist():
    x = np.tile([1.0, -1.0], 64)
    out = butterworth_lowpass(x, 0.05, order=2)
    assert np.max(np.abs(out[30:-30])) < 0.05


def _single_pass_gain(b: np.ndarray, a: np.ndarray, cutoff: float) -> float:
    """|H(e^{jω})| con ω = 2π·cutoff."""
    z = np.exp(-1j * 2 * np.pi * cutoff * np.arange(max(len(b), len(a))))
    return float(abs(np.dot(b, z[:len(b)]) / np.dot(a, z[:len(a)])))


def test_butterworth_gain_at_cutoff():
    """Una sola pasada: ganancia 1/√2 en la frecuencia de corte para cualquier orden."""
    for order in (1, 2, 3, 4):
        for cutoff in (0.02, 0.1, 0.25, 0.4):
            b, a = butterworth_coefficients(cutoff, order)
            assert abs(_single_pass_gain(b, a, cutoff) - 1 / np.sqrt(2)) < 1e-3
            assert _single_pass_gain(b, a, 1e-9) == pytest.approx(1.0, abs=1e-6)


def test_butterworth_zero_phase_keeps_symmetry():
    t = np.arange(101) - 50
    x = np.exp(-(t / 12.0) ** 2) + 0.3 * np.cos(2 * np.pi * t / 9)
    out = butterworth_lowpass(x, 0.08, order=2)
    np.testing.assert_allclose(out, out[::-1], atol=1e-9)
    # sin retardo: el máximo sigue en el centro
    assert int(np.argmax(out)) == 50


def test_butterworth_boundary_cutoff():
    for cutoff in (0.0, 0.5, -0.1):
        with pytest.raises(ParameterError):
            butterworth_coefficients(cutoff)
    with pytest.raises(ParameterError):
        butterworth_coefficients(0.1, order=7)


def test_warp_passband_near_identity():
    window = np.sin(2 * np.pi * np.arange(200) / 100)
    spec = AugmentationSpec('warp', start=50, length=100, cutoff=0.15)
    out = warp_segment(window, spec)
    assert np.max(np.abs(out - window)) < 1e-2
    assert np.array_equal(out[:50], window[:50])


def test_warp_smooths_noise():
    window = np.random.default_rng(5).standard_normal(128)
    spec = AugmentationSpec('warp', start=32, length=64, cutoff=0.03)
    out = warp_segment(window, spec)
    assert out[32:96].var() < window[32:96].var()


def test_warp_full_window():
    window = np.random.default_rng(6).standard_normal(64)
    spec = AugmentationSpec('warp', start=0, length=64, cutoff=0.05)
    np.testing.assert_allclose(warp_segment(window, spec), butterworth_lowpass(window, 0.05), atol=1e-12)


# =============================================================================
# MUESTREO
# =============================================================================

def test_random_augment_deterministic():
    window = np.random.default_rng(9).standard_normal(64)
    a, spec_a = random_augment(window, np.random.default_rng(11))
    b, spec_b = random_augment(window, np.random.default_rng(11))
    assert spec_a == spec_b
    assert np.array_equal(a, b)
    assert not np.array_equal(a, window)


def test_random_augment_constant_window_changes():
    window = np.zeros(40)
    for seed in range(20):
        out, _ = random_augment(window, np.random.default_rng(seed))
        assert not np.allclose(out, window)


def test_sample_spec_bounds():
    rng = np.random.default_rng(0)
    kinds = set()
    for _ in range(10_000):
        spec = sample_spec(100, rng)
        kinds.add(spec.kind)
        assert 10 <= spec.length <= 50
        assert 0 <= spec.start and spec.start + spec.length <= 100
        assert NOISE_RANGE[0] <= spec.noise_scale <= NOISE_RANGE[1]
        assert CUTOFF_RANGE[0] <= spec.cutoff <= CUTOFF_RANGE[1]
    assert kinds == {'jitter', 'warp'}


def test_sample_spec_short_window():
    with pytest.raises(ParameterError):
        sample_spec(4, np.random.default_rng(0))


if __name__ == "__main__":
    from harness import main
    main("Tests de aumento de ventanas", dict(globals()))
