"""Votos por punto, umbral y etiquetas finales.

s(x_n) = 1[x_n ∈ ventana] + Σ_hits 1[x_n ∈ hit]

Umbral δ: media (o percentil q) de los votos de los puntos con ≥ 1 voto.
Etiqueta 1 si s(x_n) > δ estrictamente. Si ningún hit toca la ventana o el
umbral no deja ningún positivo, se etiqueta la ventana completa.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ..config import get, get_logger
from ..errors import ConfigError, CoordinateError, NoSignalError
from .discord import DiscordHit

logger = get_logger('score')

THRESHOLD_RULES = ('mean', 'percentile')


@dataclass(frozen=True)
class ScoreVector:
    """Votos, umbral y etiquetas sobre el split de test."""
    votes: np.ndarray
    threshold: float
    labels: np.ndarray
    rule: str
    exception_fired: bool

    def summary(self) -> dict:
        return {
            'threshold': float(self.threshold),
            'rule': self.rule,
            'exception_fired': bool(self.exception_fired),
            'voted_points': int((self.votes > 0).sum()),
            'positives': int(self.labels.sum()),
            'max_votes': int(self.votes.max()) if len(self.votes) else 0,
        }


def vote(test_len: int, window: Tuple[int, int], hits: Sequence[DiscordHit]) -> np.ndarray:
    """Cuenta de votos por punto; ventana [t, t+L) y hits en coordenadas del test."""
    t0, t1 = window
    if not 0 <= t0 < t1 <= test_len:
        raise CoordinateError(f"ventana [{t0}, {t1}) fuera del test ({test_len})")
    votes = np.zeros(test_len, dtype=np.int64)
    votes[t0:t1] += 1
    for hit in hits:
        if hit.start < 0 or hit.end > test_len:
            raise CoordinateError(f"hit [{hit.start}, {hit.end}) fuera del test ({test_len})")
        votes[hit.start:hit.end] += 1
    return votes


def threshold(votes: np.ndarray) -> float:
    """δ = media de los votos de los puntos votados."""
    voted = np.asarray(votes)[np.asarray(votes) >= 1]
    if voted.size == 0:
        raise NoSignalError("ningún punto recibió votos")
    return float(voted.mean())


def percentile_threshold(votes: np.ndarray, q: float) -> float:
    """δ_q = percentil q (interpolación lineal) de los votos de los puntos votados."""
    if not 0.0 <= q <= 100.0:
        raise ConfigError(f"percentil q={q} fuera de [0, 100]", stage='score')
    voted = np.asarray(votes)[np.asarray(votes) >= 1]
    if voted.size == 0:
        raise NoSignalError("ningún punto recibió votos")
    return float(np.percentile(voted, q))


def hits_touch_window(hits: Sequence[DiscordHit], window: Tuple[int, int]) -> bool:
    t0, t1 = window
    return any(h.start < t1 and h.end > t0 for h in hits)


def classify(
    votes: np.ndarray,
    delta: float,
    window: Tuple[int, int],
    hits: Optional[Sequence[DiscordHit]] = None,
) -> Tuple[np.ndarray, bool]:
    """Etiquetas binarias y si se activó la regla de excepción.

    Sin `hits` no se evalúa la intersección y sólo cuenta el caso de cero positivos.
    """
    votes = np.asarray(votes)
    labels = (votes > delta).astype(np.int64)
    no_overlap = hits is not None and not hits_touch_window(hits, window)
    fired = bool(no_overlap or labels.sum() == 0)
    if fired:
        labels = np.zeros_like(labels)
        labels[window[0]:window[1]] = 1
    return labels, fired


def score(
    test_len: int,
    window: Tuple[int, int],
    hits: Sequence[DiscordHit],
    rule: Optional[str] = None,
    q: Optional[float] = None,
) -> ScoreVector:
    """vote → threshold → classify con la regla configurada."""
    rule = rule or get('scoring.rule', 'mean')
    if rule not in THRESHOLD_RULES:
        raise ConfigError(f"regla de umbral desconocida '{rule}'", stage='score')
    votes = vote(test_len, window, hits)
    if rule == 'mean':
        delta = threshold(votes)
    else:
        delta = percentile_threshold(votes, get('scoring.percentile', 90) if q is None else q)
    labels, fired = classify(votes, delta, window, hits)
    logger.info(
        f"Umbral δ={delta:.3f} ({rule}), {int(labels.sum())} positivos"
        + (", excepción activada" if fired else "")
    )
    return ScoreVector(votes=votes, threshold=delta, labels=labels, rule=rule, exception_fired=fired)
