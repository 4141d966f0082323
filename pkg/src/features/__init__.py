"""Características tri-dominio y aumento de datos."""

from .augment import (
    AugmentationSpec,
    butterworth_coefficients,
    butterworth_lowpass,
    jitter_segment,
    random_augment,
    warp_segment,
)
from .spectral import Spectrum, dft, freq_features
from .tri_features import (
    DOMAINS,
    DomainFeatures,
    extract,
    residual_features,
    stack_features,
    standardize_channels,
)

__all__ = [
    'AugmentationSpec',
    'DOMAINS',
    'DomainFeatures',
    'Spectrum',
    'butterworth_coefficients',
    'butterworth_lowpass',
    'dft',
    'extract',
    'freq_features',
    'jitter_segment',
    'random_augment',
    'residual_features',
    'stack_features',
    'standardize_channels',
    'warp_segment',
]
