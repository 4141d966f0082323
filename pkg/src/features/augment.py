"""Aumento de ventanas de entrenamiento por corrupción de un segmento.

Dos tipos:
- jitter: ruido gaussiano sobre [j, j+l)
- warp: el segmento [j, j+l) se sustituye por la ventana filtrada con un
  Butterworth paso bajo de fase cero

Toda la aleatoriedad entra por un np.random.Generator inyectado.
"""

from dataclasses import asdict, dataclass
from typing import Tuple

import numpy as np
from scipy import signal

from ..config import get_logger
from ..errors import ParameterError

logger = get_logger('augment')

AUGMENT_KINDS = ('jitter', 'warp')

# Rangos de muestreo (unidades z-normalizadas)
SEGMENT_FRACTION = (0.1, 0.5)
NOISE_RANGE = (0.5, 2.0)
CUTOFF_RANGE = (0.02, 0.15)
DEFAULT_ORDER = 2


@dataclass(frozen=True)
class AugmentationSpec:
    """Parámetros de una corrupción: tipo, segmento y ruido o corte."""
    kind: str
    start: int
    length: int
    noise_scale: float = 0.0
    cutoff: float = 0.0
    order: int = DEFAULT_ORDER

    def validate(self, window_len: int) -> None:
        if self.kind not in AUGMENT_KINDS:
            raise ParameterError(f"tipo de aumento desconocido '{self.kind}'")
        if self.start < 0 or self.length < 1 or self.start + self.length > window_len:
            raise ParameterError(
                f"segmento [{self.start}, {self.start + self.length}) fuera de la ventana L={window_len}"
            )
        if self.kind == 'jitter' and self.noise_scale <= 0:
            raise ParameterError(f"noise_scale={self.noise_scale} debe ser > 0")
        if self.kind == 'warp' and not 0 < self.cutoff <= 0.5:
            raise ParameterError(f"cutoff={self.cutoff} fuera de (0, 0.5]")

    def to_dict(self) -> dict:
        return asdict(self)


# =============================================================================
# JITTER
# =============================================================================

def jitter_segment(window: np.ndarray, spec: AugmentationSpec, rng: np.random.Generator) -> np.ndarray:
    """Suma ruido N(0, σ²) independiente en [j, j+l); el resto queda intacto."""
    x = np.asarray(window, dtype=np.float64)
    spec.validate(len(x))
    out = x.copy()
    out[spec.start:spec.start + spec.length] += rng.normal(0.0, spec.noise_scale, spec.length)
    return out


# =============================================================================
# WARP (Butterworth)
# =============================================================================

def butterworth_coefficients(cutoff: float, order: int = DEFAULT_ORDER) -> Tuple[np.ndarray, np.ndarray]:
    """Coeficientes (b, a) del paso bajo digital.

    Prototipo analógico + transformada bilineal con pre-warping
    (scipy.signal.butter). `cutoff` en ciclos/muestra, Nyquist = 0.5.
    """
    if not 0 < cutoff < 0.5:
        raise ParameterError(f"cutoff={cutoff} fuera de (0, 0.5)")
    if order not in (1, 2, 3, 4):
        raise ParameterError(f"orden {order} fuera de 1..4")
    b, a = signal.butter(order, cutoff / 0.5, btype='low', analog=False)
    if not np.all(np.abs(np.roots(a)) < 1):
        raise ParameterError(f"filtro inestable para cutoff={cutoff}, orden={order}")
    return b, a


def butterworth_lowpass(x: np.ndarray, cutoff: float, order: int = DEFAULT_ORDER) -> np.ndarray:
    """Filtrado hacia delante y hacia atrás (fase cero, ganancia DC 1).

    Las condiciones iniciales de Gustafsson hacen que el orden de las
    pasadas no importe, por lo que una señal simétrica sale simétrica.
    """
    b, a = butterworth_coefficients(cutoff, order)
    x = np.asarray(x, dtype=np.float64)
    if len(x) < 2:
        return x.copy()
    return signal.filtfilt(b, a, x, method='gust')


def warp_segment(window: np.ndarray, spec: AugmentationSpec) -> np.ndarray:
    """Sustituye [j, j+l) por la ventana completa filtrada en ese tramo."""
    x = np.asarray(window, dtype=np.float64)
    spec.validate(len(x))
    filtered = butterworth_lowpass(x, spec.cutoff, spec.order)
    out = x.copy()
    out[spec.start:spec.start + spec.length] = filtered[spec.start:spec.start + spec.length]
    return out


# =============================================================================
# MUESTREO
# =============================================================================

def sample_spec(window_len: int, rng: np.random.Generator) -> AugmentationSpec:
    """Sortea tipo, segmento y parámetros."""
    if window_len < 8:
        raise ParameterError(f"ventana L={window_len} < 8 para aumentar")
    kind = AUGMENT_KINDS[int(rng.integers(len(AUGMENT_KINDS)))]
    low = max(1, int(np.ceil(window_len * SEGMENT_FRACTION[0])))
    high = max(low, int(window_len * SEGMENT_FRACTION[1]))
    length = int(rng.integers(low, high + 1))
    start = int(rng.integers(0, window_len - length + 1))
    noise_scale = float(rng.uniform(*NOISE_RANGE))
    cutoff = float(rng.uniform(*CUTOFF_RANGE))
    return AugmentationSpec(kind, start, length, noise_scale, cutoff, DEFAULT_ORDER)


def apply_spec(window: np.ndarray, spec: AugmentationSpec, rng: np.random.Generator) -> np.ndarray:
    if spec.kind == 'jitter':
        return jitter_segment(window, spec, rng)
    return warp_segment(window, spec)


def random_augment(window: np.ndarray, rng: np.random.Generator) -> Tuple[np.ndarray, AugmentationSpec]:
    """Contraparte aumentada X′ de una ventana y la especificación usada.

    Un warp sobre un tramo ya suave (ventana constante) puede no cambiar
    nada; en ese caso se aplica jitter al mismo segmento.
    """
    x = np.asarray(window, dtype=np.float64)
    spec = sample_spec(len(x), rng)
    out = apply_spec(x, spec, rng)
    if spec.kind == 'warp' and np.allclose(out, x, rtol=0.0, atol=1e-12):
        spec = AugmentationSpec('jitter', spec.start, spec.length, spec.noise_scale, spec.cutoff, spec.order)
        out = jitter_segment(x, spec, rng)
    logger.debug(f"Aumento {spec.kind} j={spec.start} l={spec.length}")
    return out, spec
