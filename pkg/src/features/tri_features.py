"""Extracción de características en los tres dominios.

| Dominio   | Canales | Contenido                                   |
|-----------|---------|---------------------------------------------|
| temporal  | 1       | ventana cruda                               |
| frequency | 3       | amplitud, fase y potencia de la DFT         |
| residual  | 1       | ventana menos el perfil estacional por fase |
"""

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from ..data.series import WindowSlice
from ..errors import ParameterError, ShapeError
from .spectral import dft, freq_features

DOMAINS = ('temporal', 'frequency', 'residual')
DOMAIN_CHANNELS = {'temporal': 1, 'frequency': 3, 'residual': 1}


@dataclass(frozen=True)
class DomainFeatures:
    """Bloque L×C de un dominio."""
    domain: str
    channels: np.ndarray

    def __post_init__(self):
        if self.domain not in DOMAIN_CHANNELS:
            raise ShapeError(f"dominio desconocido '{self.domain}'", stage='features')
        channels = np.asarray(self.channels, dtype=np.float64)
        if channels.ndim != 2 or channels.shape[1] != DOMAIN_CHANNELS[self.domain]:
            raise ShapeError(
                f"{self.domain}: se esperaban {DOMAIN_CHANNELS[self.domain]} canales, forma {channels.shape}",
                stage='features',
            )
        object.__setattr__(self, 'channels', channels)

    @property
    def window_len(self) -> int:
        return self.channels.shape[0]


def residual_features(window: np.ndarray, period: int) -> np.ndarray:
    """Residuo = ventana − media de las posiciones con igual fase (mod periodo)."""
    if period < 2:
        raise ParameterError(f"periodo {period} < 2", stage='features')
    x = np.asarray(window, dtype=np.float64).ravel()
    phase = np.arange(len(x)) % period
    counts = np.bincount(phase, minlength=period)
    sums = np.bincount(phase, weights=x, minlength=period)
    profile = sums / np.maximum(counts, 1)
    return x - profile[phase]


def _values(window: Union[WindowSlice, np.ndarray]) -> np.ndarray:
    if isinstance(window, WindowSlice):
        return np.asarray(window.values, dtype=np.float64)
    return np.asarray(window, dtype=np.float64).ravel()


def extract(window: Union[WindowSlice, np.ndarray], domain: str, period: int) -> DomainFeatures:
    """Características crudas de un dominio para una ventana."""
    x = _values(window)
    if domain == 'temporal':
        channels = x[:, None]
    elif domain == 'frequency':
        channels = freq_features(dft(x))
    elif domain == 'residual':
        channels = residual_features(x, period)[:, None]
    else:
        raise ShapeError(f"dominio desconocido '{domain}'", stage='features')
    return DomainFeatures(domain, channels)


def standardize_channels(features: DomainFeatures) -> DomainFeatures:
    """Media cero y varianza unidad por canal; canales constantes quedan a cero.

    Sólo se aplica al dominio de frecuencia: temporal y residual ya vienen de
    una serie normalizada con los estadísticos de entrenamiento.
    """
    if features.domain != 'frequency':
        return features
    c = features.channels
    mean = c.mean(axis=0, keepdims=True)
    std = c.std(axis=0, keepdims=True)
    centered = c - mean
    scaled = np.divide(centered, std, out=np.zeros_like(c), where=std > 1e-12)
    return DomainFeatures(features.domain, scaled)


def stack_features(
    windows: Union[np.ndarray, Sequence[WindowSlice]],
    domain: str,
    period: int,
) -> np.ndarray:
    """Entrada del codificador B×L×C, ya estandarizada."""
    return np.stack([
        standardize_channels(extract(w, domain, period)).channels for w in windows
    ])
