"""Tipos de serie temporal y operaciones comunes a todas las etapas.

- Normalización z con estadísticos del split de entrenamiento
- Estimación del periodo por el bin dominante de la DFT
- Segmentación en ventanas con cobertura de cola
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np

from ..config import get_logger
from ..errors import (
    ConfigError,
    DegeneratePeriodError,
    InsufficientDataError,
)

logger = get_logger('series')

ArrayLike = Union[np.ndarray, List[float]]


# =============================================================================
# TIPOS
# =============================================================================

@dataclass(frozen=True)
class TimeSeries:
    """Serie univariante con su identificador."""
    values: np.ndarray
    name: str = ""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64).ravel()
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class DatasetMeta:
    """Metadatos de un dataset UCR.

    train_end es exclusivo; anomaly_end es inclusivo. Los tres índices
    son absolutos sobre la serie completa.
    """
    train_end: int
    anomaly_begin: int
    anomaly_end: int

    def test_span(self) -> Tuple[int, int]:
        """Anomalía en coordenadas del test: (inicio, fin inclusivo)."""
        return self.anomaly_begin - self.train_end, self.anomaly_end - self.train_end

    def test_labels(self, n_test: int) -> np.ndarray:
        """Verdad de terreno binaria sobre el split de test."""
        begin, end = self.test_span()
        labels = np.zeros(n_test, dtype=np.int64)
        labels[begin:end + 1] = 1
        return labels


@dataclass(frozen=True)
class SegmentationConfig:
    """Longitud de ventana, stride y periodo (en muestras)."""
    window_len: int
    stride: int
    period: int

    def __post_init__(self):
        if self.window_len < 4:
            raise ConfigError(f"window_len={self.window_len} < 4", stage='series')
        if not 1 <= self.stride <= self.window_len:
            raise ConfigError(
                f"stride={self.stride} fuera de [1, {self.window_len}]", stage='series'
            )

    @classmethod
    def from_period(
        cls,
        period: int,
        window_len: Optional[int] = None,
        stride: Optional[int] = None,
        window_factor: float = 2.5,
        stride_fraction: float = 0.25,
    ) -> 'SegmentationConfig':
        """L = round(2.5·periodo) y stride = L/4 salvo que se indiquen."""
        if window_len is None:
            window_len = int(np.floor(window_factor * period + 0.5))
        if stride is None:
            stride = max(1, int(window_len * stride_fraction))
        return cls(window_len=int(window_len), stride=int(stride), period=int(period))

    def to_dict(self) -> dict:
        return {'window_len': self.window_len, 'stride': self.stride, 'period': self.period}


@dataclass(frozen=True)
class WindowSlice:
    """Ventana X_{i,L} de la serie origen."""
    start: int
    values: np.ndarray = field(repr=False)

    @property
    def end(self) -> int:
        return self.start + len(self.values)


# =============================================================================
# NORMALIZACIÓN
# =============================================================================

def _as_array(ts: Union[TimeSeries, ArrayLike]) -> np.ndarray:
    if isinstance(ts, TimeSeries):
        return ts.values
    return np.asarray(ts, dtype=np.float64).ravel()


def train_stats(train: Union[TimeSeries, ArrayLike]) -> Tuple[float, float]:
    """Media y desviación (poblacional) del split de entrenamiento."""
    values = _as_array(train)
    return float(values.mean()), float(values.std())


def znormalize(ts: TimeSeries, mean: float, std: float) -> TimeSeries:
    """(x − mean) / std elemento a elemento.

    Con std = 0 (serie constante) la salida es todo ceros.
    """
    values = _as_array(ts)
    if std == 0:
        return TimeSeries(np.zeros_like(values), getattr(ts, 'name', ''))
    return TimeSeries((values - mean) / std, getattr(ts, 'name', ''))


def denormalize(ts: TimeSeries, mean: float, std: float) -> TimeSeries:
    """Inversa de znormalize."""
    values = _as_array(ts)
    return TimeSeries(values * std + mean, getattr(ts, 'name', ''))


def split(ts: TimeSeries, meta: DatasetMeta) -> Tuple[TimeSeries, TimeSeries]:
    """Separa entrenamiento [0, train_end) y test [train_end, N)."""
    return (
        TimeSeries(ts.values[:meta.train_end], f"{ts.name}:train"),
        TimeSeries(ts.values[meta.train_end:], f"{ts.name}:test"),
    )


# =============================================================================
# PERIODO
# =============================================================================

MIN_PERIOD = 4


def estimate_period(train: Union[TimeSeries, ArrayLike]) -> int:
    """Periodo = round(N / k*) con k* el bin de máxima potencia en [1, N/2).

    El resultado se acota a [4, N/4].
    """
    values = _as_array(train)
    n = len(values)
    if n < 16:
        raise InsufficientDataError(f"se necesitan ≥16 muestras para estimar el periodo (hay {n})")

    centered = values - values.mean()
    power = np.abs(np.fft.rfft(centered)) ** 2
    k_max = (n + 1) // 2  # k < N/2
    candidates = power[1:k_max]
    if candidates.size == 0 or not np.any(candidates > 1e-12 * max(1.0, float(np.sum(values ** 2)))):
        raise DegeneratePeriodError("espectro nulo: la serie de entrenamiento es constante")

    k_star = int(np.argmax(candidates)) + 1
    period = int(np.floor(n / k_star + 0.5))
    clamped = int(min(max(period, MIN_PERIOD), max(MIN_PERIOD, n // 4)))
    logger.debug(f"Periodo estimado: k*={k_star}, bruto={period}, acotado={clamped}")
    return clamped


# =============================================================================
# SEGMENTACIÓN
# =============================================================================

def window_starts(n: int, window_len: int, stride: int) -> List[int]:
    """Inicios 0, stride, 2·stride… con ventana extra anclada en N−L si falta cola."""
    if n < window_len:
        raise InsufficientDataError(f"serie de {n} muestras más corta que la ventana L={window_len}")
    starts = list(range(0, n - window_len + 1, stride))
    if starts[-1] + window_len != n:
        starts.append(n - window_len)
    return starts


def segment(ts: Union[TimeSeries, ArrayLike], cfg: SegmentationConfig) -> List[WindowSlice]:
    """Divide la serie en ventanas de longitud L."""
    values = _as_array(ts)
    starts = window_starts(len(values), cfg.window_len, cfg.stride)
    return [WindowSlice(s, values[s:s + cfg.window_len]) for s in starts]


def windows_matrix(ts: Union[TimeSeries, ArrayLike], cfg: SegmentationConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Igual que segment() pero como matriz M×L y vector de inicios."""
    values = _as_array(ts)
    starts = np.asarray(window_starts(len(values), cfg.window_len, cfg.stride), dtype=np.int64)
    view = np.lib.stride_tricks.sliding_window_view(values, cfg.window_len)
    return np.array(view[starts]), starts
