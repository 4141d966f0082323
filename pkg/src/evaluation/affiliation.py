"""Métricas de afiliación para un único evento.

Zona de afiliación = todo el intervalo de test [0, N).

precision: media sobre cada predicho y de P(dist(x, 𝒜) ≥ dist(y, 𝒜)), x uniforme en la zona
recall:    media sobre cada punto a del evento de P(|x − a| ≥ dist(a, Ŷ)), x uniforme en la zona
"""

from typing import Sequence, Tuple

import numpy as np

from ..errors import ConfigError, LengthMismatchError, NoEventError


def _event(truth: np.ndarray) -> Tuple[int, int]:
    idx = np.flatnonzero(truth > 0)
    if idx.size == 0:
        raise NoEventError("la verdad de terreno no contiene ningún evento")
    begin, end = int(idx[0]), int(idx[-1])
    if idx.size != end - begin + 1:
        raise ConfigError("la afiliación espera un único evento contiguo", stage='eval')
    return begin, end


def distance_to_event(points: np.ndarray, begin: int, end: int) -> np.ndarray:
    return np.maximum(0, np.maximum(begin - points, points - end))


def precision_survival(d: np.ndarray, begin: int, end: int, n: int) -> np.ndarray:
    """Fracción de la zona a distancia ≥ d del evento [begin, end]."""
    zone = np.sort(distance_to_event(np.arange(n), begin, end))
    return (n - np.searchsorted(zone, d, side='left')) / n


def recall_survival(d: np.ndarray, a: np.ndarray, n: int) -> np.ndarray:
    """Fracción de la zona con |x − a| ≥ d."""
    d = np.asarray(d)
    a = np.asarray(a)
    left = np.maximum(0, a - d + 1)
    right = np.maximum(0, n - a - d)
    return np.where(d <= 0, n, left + right) / n


def affiliation(pred: Sequence[int], truth: Sequence[int]) -> Tuple[float, float, float, bool]:
    """(precision, recall, F1, sin_predicciones)."""
    p = np.asarray(pred).ravel() > 0
    t = np.asarray(truth).ravel() > 0
    if p.shape != t.shape:
        raise LengthMismatchError(f"predicción ({len(p)}) y verdad ({len(t)}) con longitudes distintas")
    n = len(t)
    begin, end = _event(t)
    predicted = np.flatnonzero(p)
    if predicted.size == 0:
        return 0.0, 0.0, 0.0, True

    precision = float(precision_survival(distance_to_event(predicted, begin, end), begin, end, n).mean())

    event = np.arange(begin, end + 1)
    pos = np.searchsorted(predicted, event)
    left = predicted[np.clip(pos - 1, 0, predicted.size - 1)]
    right = predicted[np.clip(pos, 0, predicted.size - 1)]
    nearest = np.minimum(np.abs(event - left), np.abs(event - right))
    recall = float(recall_survival(nearest, event, n).mean())

    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1, False
