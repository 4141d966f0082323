"""Generación de datasets sintéticos en convención UCR.

Serie base: sinusoide de periodo `period` con ruido gaussiano leve, y una
única anomalía plantada en el test de uno de seis tipos:

| Tipo        | Efecto sobre el tramo                                  |
|-------------|--------------------------------------------------------|
| noise       | ruido gaussiano fuerte                                 |
| duration    | ciclos alargados (frecuencia ×1/1.6, fase continua)    |
| seasonal    | frecuencia doblada (fase continua)                     |
| trend       | rampa lineal que sube y vuelve al nivel                |
| level_shift | desplazamiento constante de `magnitude` desviaciones   |
| contextual  | forma invertida: valores normales en contexto erróneo  |
"""

from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from ..config import get_logger
from ..errors import ConfigError
from .series import DatasetMeta
from .ucr import write_manifest, write_ucr

logger = get_logger('synth')

ANOMALY_KINDS = ('noise', 'duration', 'seasonal', 'trend', 'level_shift', 'contextual')


@dataclass(frozen=True)
class AnomalySpec:
    """Anomalía plantada: tipo, inicio relativo al test y longitud."""
    kind: str
    offset: int
    length: int
    magnitude: float = 3.0

    def validate(self, n_test: int) -> None:
        if self.kind not in ANOMALY_KINDS:
            raise ConfigError(f"tipo de anomalía desconocido '{self.kind}' (válidos: {', '.join(ANOMALY_KINDS)})", stage='cli')
        if self.length < 1:
            raise ConfigError(f"longitud de anomalía {self.length} < 1", stage='cli')
        if self.offset < 0 or self.offset + self.length > n_test:
            raise ConfigError(
                f"la anomalía [{self.offset}, {self.offset + self.length}) no cabe en el test ({n_test})",
                stage='cli',
            )


def _base_signal(n: int, period: int, rng: np.random.Generator, noise: float) -> Tuple[np.ndarray, np.ndarray]:
    """Sinusoide con ruido y su fase acumulada."""
    phase = 2 * np.pi * np.arange(n) / period
    return np.sin(phase) + noise * rng.standard_normal(n), phase


def _plant(
    values: np.ndarray,
    phase: np.ndarray,
    begin: int,
    spec: AnomalySpec,
    period: int,
    rng: np.random.Generator,
) -> None:
    """Aplica la anomalía in situ sobre [begin, begin + length)."""
    end = begin + spec.length
    idx = np.arange(spec.length)
    scale = float(np.std(np.sin(phase[:max(period, 2)]))) or 1.0

    if spec.kind == 'noise':
        values[begin:end] += rng.normal(0.0, spec.magnitude * scale / 2, spec.length)
    elif spec.kind in ('duration', 'seasonal'):
        factor = 1 / 1.6 if spec.kind == 'duration' else 2.0
        start_phase = phase[begin]
        warped = start_phase + 2 * np.pi * factor * idx / period
        values[begin:end] += np.sin(warped) - np.sin(phase[begin:end])
        # recoloca la fase del resto para que no haya salto en el cierre
        shift = warped[-1] + 2 * np.pi / period - phase[end] if end < len(values) else 0.0
        if end < len(values):
            tail = np.arange(end, len(values))
            values[tail] += np.sin(phase[tail] + shift) - np.sin(phase[tail])
    elif spec.kind == 'trend':
        half = max(1, spec.length // 2)
        ramp = np.minimum(idx, spec.length - 1 - idx) / half
        values[begin:end] += spec.magnitude * scale * ramp
    elif spec.kind == 'level_shift':
        values[begin:end] += spec.magnitude * scale
    elif spec.kind == 'contextual':
        values[begin:end] -= 2 * np.sin(phase[begin:end])


def generate(
    kind: str,
    n_train: int = 4000,
    n_test: int = 3000,
    anomaly_length: int = 100,
    anomaly_offset: Optional[int] = None,
    period: int = 50,
    magnitude: float = 3.0,
    noise: float = 0.05,
    seed: int = 0,
) -> Tuple[np.ndarray, DatasetMeta]:
    """Genera (valores, metadatos) deterministas para la semilla dada."""
    rng = np.random.default_rng(seed)
    if anomaly_offset is None:
        low = min(n_test // 4, max(0, n_test - anomaly_length))
        high = max(low + 1, n_test - anomaly_length - n_test // 4)
        anomaly_offset = int(rng.integers(low, high))
    spec = AnomalySpec(kind=kind, offset=int(anomaly_offset), length=int(anomaly_length), magnitude=magnitude)
    spec.validate(n_test)

    values, phase = _base_signal(n_train + n_test, period, rng, noise)
    begin = n_train + spec.offset
    _plant(values, phase, begin, spec, period, rng)

    meta = DatasetMeta(train_end=n_train, anomaly_begin=begin, anomaly_end=begin + spec.length - 1)
    return values, meta


def synth(
    kind: str,
    out_dir: Path,
    n_train: int = 4000,
    n_test: int = 3000,
    anomaly_length: int = 100,
    anomaly_offset: Optional[int] = None,
    period: int = 50,
    magnitude: float = 3.0,
    seed: int = 0,
    index: int = 1,
) -> Path:
    """Escribe un dataset sintético en convención UCR y devuelve su ruta."""
    values, meta = generate(
        kind,
        n_train=n_train,
        n_test=n_test,
        anomaly_length=anomaly_length,
        anomaly_offset=anomaly_offset,
        period=period,
        magnitude=magnitude,
        seed=seed,
    )
    name = f"{index:03d}_UCR_Anomaly_synth{kind.replace('_', '')}"
    path = write_ucr(values, meta, out_dir, name)
    logger.info(f"Sintético '{kind}' escrito en {path.name}")
    return path


# Longitudes de la suite fija: dos por tipo, entre 20 y 200
SUITE_LENGTHS = {
    'noise': (20, 120),
    'duration': (100, 200),
    'seasonal': (60, 150),
    'trend': (80, 200),
    'level_shift': (40, 160),
    'contextual': (30, 90),
}


def synth_suite(out_dir: Path, seed: int = 0, period: int = 50) -> Tuple[List[Path], Path]:
    """Suite de 12 datasets (2 por tipo) con su manifiesto."""
    out_dir = Path(out_dir)
    paths: List[Path] = []
    index = 1
    for kind in ANOMALY_KINDS:
        for length in SUITE_LENGTHS[kind]:
            paths.append(synth(kind, out_dir, anomaly_length=length, period=period, seed=seed + index, index=index))
            index += 1
    manifest = write_manifest(paths, out_dir / 'manifest.txt')
    return paths, manifest
