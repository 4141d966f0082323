"""Métricas punto a punto, point adjustment y PA%K.

| Métrica   | Transformación previa                                   |
|-----------|---------------------------------------------------------|
| F1(PW)    | ninguna                                                 |
| F1(PA)    | segmento completo si se detecta algún punto             |
| PA%K      | segmento completo si detectados·100 > K·|segmento|      |
| PA%K-AUC  | media de precision/recall/F1 sobre K = 1..100           |
"""

from dataclasses import asdict, dataclass
from typing import List, Sequence, Tuple

import numpy as np
import pandas as pd

from ..errors import ConfigError, LengthMismatchError
from .affiliation import affiliation

K_GRID = tuple(range(1, 101))


def _arrays(pred: Sequence[int], truth: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    p = np.asarray(pred).astype(np.int64).ravel()
    t = np.asarray(truth).astype(np.int64).ravel()
    if p.shape != t.shape:
        raise LengthMismatchError(f"predicción ({len(p)}) y verdad ({len(t)}) con longitudes distintas")
    return (p > 0).astype(np.int64), (t > 0).astype(np.int64)


def anomaly_segments(truth: Sequence[int]) -> List[Tuple[int, int]]:
    """Tramos [inicio, fin) de unos consecutivos."""
    t = (np.asarray(truth).ravel() > 0).astype(np.int8)
    edges = np.diff(np.concatenate([[0], t, [0]]))
    return list(zip(np.flatnonzero(edges == 1).tolist(), np.flatnonzero(edges == -1).tolist()))


# =============================================================================
# PUNTO A PUNTO
# =============================================================================

def f1_pointwise(pred: Sequence[int], truth: Sequence[int]) -> Tuple[float, float, float]:
    """(precision, recall, F1) sobre la matriz de confusión punto a punto."""
    p, t = _arrays(pred, truth)
    tp = int(np.sum(p & t))
    fp = int(np.sum(p & (1 - t)))
    fn = int(np.sum((1 - p) & t))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


# =============================================================================
# POINT ADJUSTMENT
# =============================================================================

def pa_percent_k(pred: Sequence[int], truth: Sequence[int], k: float) -> np.ndarray:
    """Rellena cada segmento cuya fracción detectada supera K% estrictamente."""
    if not 0 <= k <= 100:
        raise ConfigError(f"K={k} fuera de [0, 100]", stage='eval')
    p, t = _arrays(pred, truth)
    adjusted = p.copy()
    for begin, end in anomaly_segments(t):
        detected = int(p[begin:end].sum())
        if detected * 100 > k * (end - begin):
            adjusted[begin:end] = 1
    return adjusted


def point_adjust(pred: Sequence[int], truth: Sequence[int]) -> np.ndarray:
    """Rellena el segmento completo si contiene al menos un positivo."""
    return pa_percent_k(pred, truth, 0)


def pak_curve(pred: Sequence[int], truth: Sequence[int], ks: Sequence[int] = K_GRID) -> pd.DataFrame:
    """precision, recall y F1 tras PA%K para cada K."""
    _, t = _arrays(pred, truth)
    rows = []
    for k in ks:
        precision, recall, f1 = f1_pointwise(pa_percent_k(pred, t, k), t)
        rows.append({'k': int(k), 'precision': precision, 'recall': recall, 'f1': f1})
    return pd.DataFrame(rows, columns=['k', 'precision', 'recall', 'f1'])


def pa_k_auc(pred: Sequence[int], truth: Sequence[int]) -> Tuple[float, float, float]:
    """AUC (media sobre K = 1..100) de precision, recall y F1."""
    curve = pak_curve(pred, truth)
    return float(curve['precision'].mean()), float(curve['recall'].mean()), float(curve['f1'].mean())


# =============================================================================
# ACIERTOS DE VENTANA
# =============================================================================

def window_hit(starts: Sequence[int], window_len: int, span: Tuple[int, int]) -> bool:
    """¿Alguna ventana [s, s+L) solapa la anomalía [b, e] (fin inclusivo)?"""
    begin, end = span
    return any(s <= end and s + window_len > begin for s in starts)


def margin_hit(pred: Sequence[int], span: Tuple[int, int], margin: int = 100) -> bool:
    """¿Algún positivo a ≤ margin puntos de la anomalía [b, e]?"""
    positives = np.flatnonzero(np.asarray(pred).ravel() > 0)
    if positives.size == 0:
        return False
    begin, end = span
    dist = np.maximum(0, np.maximum(begin - positives, positives - end))
    return bool(dist.min() <= margin)


# =============================================================================
# INFORME
# =============================================================================

@dataclass(frozen=True)
class MetricReport:
    """Columnas de la tabla de resultados por dataset."""
    precision_pw: float
    recall_pw: float
    f1_pw: float
    f1_pa: float
    pak_precision_auc: float
    pak_recall_auc: float
    pak_f1_auc: float
    aff_precision: float
    aff_recall: float
    aff_f1: float
    no_predictions: bool = False

    def to_dict(self) -> dict:
        return asdict(self)

    def values(self) -> List[float]:
        return [v for k, v in asdict(self).items() if k != 'no_predictions']


def evaluate(pred: Sequence[int], truth: Sequence[int]) -> MetricReport:
    """Todas las métricas de una predicción frente a la verdad de terreno."""
    p, t = _arrays(pred, truth)
    precision, recall, f1 = f1_pointwise(p, t)
    _, _, f1_pa = f1_pointwise(point_adjust(p, t), t)
    pak_p, pak_r, pak_f1 = pa_k_auc(p, t)
    aff_p, aff_r, aff_f1, empty = affiliation(p, t)
    return MetricReport(
        precision_pw=precision,
        recall_pw=recall,
        f1_pw=f1,
        f1_pa=f1_pa,
        pak_precision_auc=pak_p,
        pak_recall_auc=pak_r,
        pak_f1_auc=pak_f1,
        aff_precision=aff_p,
        aff_recall=aff_r,
        aff_f1=aff_f1,
        no_predictions=empty,
    )
