"""Localización de la ventana anómala a partir de los embeddings tri-dominio.

1. Desviación por dominio: −media de la similitud con el resto de ventanas
2. tri_window: top-Z ventanas por dominio (Z=1 por defecto), sin duplicados
3. select_single: la candidata más lejana (NN z-normalizado) del entrenamiento
4. make_search_region: ventana elegida con `pad` muestras a cada lado
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from ..config import get, get_logger
from ..data.series import TimeSeries
from ..errors import InsufficientDataError
from ..training.trainer import TrainedModel, embed, windows_for

logger = get_logger('detect')


# =============================================================================
# TIPOS
# =============================================================================

@dataclass(frozen=True)
class CandidateWindows:
    """Ventanas nominadas por dominio y conjunto de inicios distintos."""
    per_domain: Dict[str, List[Tuple[int, float]]]
    starts: Tuple[int, ...]
    window_len: int

    def domains_for(self, start: int) -> List[str]:
        return [d for d, items in self.per_domain.items() if any(s == start for s, _ in items)]


@dataclass(frozen=True)
class SearchRegion:
    """Ventana elegida [t, t+L) con padding, acotada al test: [begin, end)."""
    start: int
    window_len: int
    pad: int
    begin: int
    end: int

    @property
    def length(self) -> int:
        return self.end - self.begin

    @property
    def window(self) -> Tuple[int, int]:
        return self.start, self.start + self.window_len

    def contains_window(self) -> bool:
        return self.begin <= self.start and self.start + self.window_len <= self.end


@dataclass
class DetectionTrace:
    """Registro interpretable de la detección (se escribe como JSON)."""
    window_starts: List[int] = field(default_factory=list)
    deviance: Dict[str, List[float]] = field(default_factory=dict)
    nominated: Dict[str, List[int]] = field(default_factory=dict)
    candidates: List[int] = field(default_factory=list)
    nn_distances: Dict[int, float] = field(default_factory=dict)
    chosen: Optional[int] = None
    region: Optional[Tuple[int, int]] = None

    def to_dict(self) -> dict:
        return {
            'window_starts': [int(s) for s in self.window_starts],
            'deviance': {d: [float(v) for v in vals] for d, vals in self.deviance.items()},
            'nominated': {d: [int(s) for s in starts] for d, starts in self.nominated.items()},
            'candidates': [int(s) for s in self.candidates],
            'nn_distances': {str(k): float(v) for k, v in self.nn_distances.items()},
            'chosen': None if self.chosen is None else int(self.chosen),
            'region': None if self.region is None else [int(self.region[0]), int(self.region[1])],
        }


# =============================================================================
# DESVIACIÓN Y NOMINACIÓN
# =============================================================================

def domain_deviance(embeddings: np.ndarray) -> np.ndarray:
    """deviance(m) = −mean_{m'≠m} r_m·r_m'. Mayor = más distinta del resto."""
    r = np.asarray(embeddings, dtype=np.float64)
    m = r.shape[0]
    if m < 2:
        raise InsufficientDataError(f"{m} ventanas: hacen falta ≥ 2 para compararlas", stage='detect')
    sim = r @ r.T
    off_diag = sim.sum(axis=1) - np.diag(sim)
    return -off_diag / (m - 1)


def top_z(scores: np.ndarray, z: int) -> List[int]:
    """Índices de las Z mayores puntuaciones; en empate gana el más temprano."""
    order = np.lexsort((np.arange(len(scores)), -np.asarray(scores)))
    return [int(i) for i in order[:max(1, z)]]


def tri_window(
    test_series: Union[TimeSeries, np.ndarray],
    model: TrainedModel,
    z: int = 1,
    trace: Optional[DetectionTrace] = None,
) -> CandidateWindows:
    """Nomina hasta 3·Z ventanas del test (crudo) con el modelo entrenado."""
    values = test_series.values if isinstance(test_series, TimeSeries) else np.asarray(test_series)
    windows, starts = windows_for(model, values)
    if len(windows) < 2:
        raise InsufficientDataError(f"el test sólo admite {len(windows)} ventana(s)", stage='detect')

    per_domain: Dict[str, List[Tuple[int, float]]] = {}
    ordered: List[int] = []
    for domain in model.domains:
        scores = domain_deviance(embed(model, windows, domain))
        picks = top_z(scores, z)
        per_domain[domain] = [(int(starts[i]), float(scores[i])) for i in picks]
        for i in picks:
            if int(starts[i]) not in ordered:
                ordered.append(int(starts[i]))
        if trace is not None:
            trace.deviance[domain] = scores.tolist()
            trace.nominated[domain] = [int(starts[i]) for i in picks]
        logger.info(f"Dominio {domain}: ventana {[s for s, _ in per_domain[domain]]}")

    if trace is not None:
        trace.window_starts = starts.tolist()
        trace.candidates = sorted(ordered)
    return CandidateWindows(per_domain=per_domain, starts=tuple(sorted(ordered)), window_len=model.seg.window_len)


# =============================================================================
# SELECCIÓN DE UNA VENTANA
# =============================================================================

def _znorm_rows(x: np.ndarray) -> np.ndarray:
    mean = x.mean(axis=-1, keepdims=True)
    std = x.std(axis=-1, keepdims=True)
    return np.divide(x - mean, std, out=np.zeros_like(x), where=std > 0)


def nn_distance_to_train(window: np.ndarray, train: np.ndarray, probe_stride: int = 1) -> float:
    """Distancia euclídea z-normalizada al vecino más cercano del entrenamiento."""
    length = len(window)
    if len(train) < length:
        raise InsufficientDataError(f"entrenamiento ({len(train)}) más corto que L={length}", stage='detect')
    subs = np.lib.stride_tricks.sliding_window_view(train, length)[::max(1, probe_stride)]
    diffs = _znorm_rows(subs) - _znorm_rows(window[None, :])
    return float(np.sqrt((diffs ** 2).sum(axis=1)).min())


def select_single(
    cands: CandidateWindows,
    train_series: Union[TimeSeries, np.ndarray],
    test_series: Union[TimeSeries, np.ndarray],
    probe_stride: Optional[int] = None,
    trace: Optional[DetectionTrace] = None,
) -> int:
    """Inicio t de la candidata con mayor distancia NN al entrenamiento."""
    train = np.asarray(train_series.values if isinstance(train_series, TimeSeries) else train_series, dtype=np.float64)
    test = np.asarray(test_series.values if isinstance(test_series, TimeSeries) else test_series, dtype=np.float64)
    length = cands.window_len
    if probe_stride is None:
        probe_stride = get('detection.probe_stride') or max(1, length // 4)

    if len(cands.starts) == 1:
        chosen = cands.starts[0]
        if trace is not None:
            trace.chosen = chosen
        return chosen

    best_start, best_dist = None, -np.inf
    for start in sorted(cands.starts):
        dist = nn_distance_to_train(test[start:start + length], train, probe_stride)
        if trace is not None:
            trace.nn_distances[start] = dist
        if dist > best_dist:
            best_start, best_dist = start, dist
    logger.info(f"Ventana elegida: t={best_start} (NN={best_dist:.4f})")
    if trace is not None:
        trace.chosen = best_start
    return int(best_start)


def make_search_region(t: int, window_len: int, pad: Optional[int] = None, test_len: Optional[int] = None) -> SearchRegion:
    """Región [max(0, t−pad), min(N_test, t+L+pad)); pad = L por defecto."""
    pad = window_len if pad is None else pad
    if test_len is None:
        test_len = t + window_len + pad
    begin = max(0, t - pad)
    end = min(test_len, t + window_len + pad)
    return SearchRegion(start=t, window_len=window_len, pad=pad, begin=begin, end=end)


def detect_window(
    train_series: Union[TimeSeries, np.ndarray],
    test_series: Union[TimeSeries, np.ndarray],
    model: TrainedModel,
    z: int = 1,
    probe_stride: Optional[int] = None,
    pad: Optional[int] = None,
) -> Tuple[CandidateWindows, SearchRegion, DetectionTrace]:
    """Encadena tri_window, select_single y make_search_region."""
    trace = DetectionTrace()
    test_len = len(test_series)
    cands = tri_window(test_series, model, z=z, trace=trace)
    t = select_single(cands, train_series, test_series, probe_stride=probe_stride, trace=trace)
    region = make_search_region(t, model.seg.window_len, pad, test_len)
    trace.region = (region.begin, region.end)
    return cands, region, trace
