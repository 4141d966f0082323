"""Descubrimiento exacto de discordias de longitud variable.

- brute_force_discord: oráculo O(n²·l)
- drag: fase 1 reúne candidatas con umbral r, fase 2 refina sólo las supervivientes
- merlin: barrido de longitudes adaptando r a partir de las distancias previas

Todas las distancias NN salen de `nn_profile`, de modo que DRAG y la fuerza
bruta producen exactamente los mismos números para la misma subsecuencia.
Una subsecuencia sin ningún vecino no solapado (|i−j| ≥ l) no es elegible.
"""

from dataclasses import asdict, dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config import get_logger
from ..errors import ConfigError, SegmentTooShortError

logger = get_logger('discord')

MIN_LENGTH = 3
# Por debajo de este r se recurre directamente al oráculo exacto
R_FLOOR = 1e-9
# Longitudes con paso 1 hasta aquí; después el paso se ensancha
DENSE_UNTIL = 64
SWEEP_DIVISIONS = 256


@dataclass(frozen=True)
class DiscordHit:
    """Discordia de longitud `length` en `start` con su distancia NN."""
    length: int
    start: int
    distance: float
    neighbor: int

    @property
    def end(self) -> int:
        return self.start + self.length

    def to_dict(self) -> dict:
        return asdict(self)


# =============================================================================
# DISTANCIAS
# =============================================================================

def znorm(x: np.ndarray) -> np.ndarray:
    """Z-normalización con desviación poblacional; constante → ceros."""
    x = np.asarray(x, dtype=np.float64)
    std = x.std(axis=-1, keepdims=True)
    centered = x - x.mean(axis=-1, keepdims=True)
    return np.divide(centered, std, out=np.zeros_like(x), where=std > 0)


def znorm_dist(a: Sequence[float], b: Sequence[float]) -> float:
    """Distancia euclídea entre las versiones z-normalizadas de a y b."""
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ConfigError(f"longitudes distintas: {a.shape} vs {b.shape}", stage='discord')
    return float(np.sqrt(np.sum((znorm(a) - znorm(b)) ** 2)))


def subsequences(segment: Sequence[float], length: int) -> np.ndarray:
    """Matriz (n−l+1)×l de subsecuencias z-normalizadas."""
    values = np.asarray(segment, dtype=np.float64)
    return znorm(np.lib.stride_tricks.sliding_window_view(values, length))


def _distances(subs: np.ndarray, i: int, rows) -> np.ndarray:
    return np.sqrt(np.sum((subs[rows] - subs[i]) ** 2, axis=-1))


def nn_profile(subs: np.ndarray, i: int, length: int) -> Tuple[float, int]:
    """(distancia, índice) del vecino no solapado más cercano de i; (inf, −1) si no hay."""
    dist = _distances(subs, i, slice(None))
    lo, hi = max(0, i - length + 1), min(len(subs), i + length)
    dist[lo:hi] = np.inf
    j = int(np.argmin(dist))
    if not np.isfinite(dist[j]):
        return float('inf'), -1
    return float(dist[j]), j


def _check_query(segment_len: int, length: int) -> None:
    if length < MIN_LENGTH:
        raise ConfigError(f"longitud l={length} < {MIN_LENGTH}", stage='discord')
    if segment_len < 2 * length:
        raise SegmentTooShortError(f"segmento de {segment_len} puntos < 2l = {2 * length}")


# =============================================================================
# ORÁCULO
# =============================================================================

def brute_force_discord(segment: Sequence[float], length: int) -> DiscordHit:
    """Discordia exacta: argmax de la distancia NN; en empate, el inicio más temprano."""
    values = np.asarray(segment, dtype=np.float64)
    _check_query(len(values), length)
    subs = subsequences(values, length)
    best = DiscordHit(length, -1, -np.inf, -1)
    for i in range(len(subs)):
        dist, j = nn_profile(subs, i, length)
        if np.isfinite(dist) and dist > best.distance:
            best = DiscordHit(length, i, dist, j)
    return best


# =============================================================================
# DRAG
# =============================================================================

def gather_candidates(subs: np.ndarray, length: int, r: float) -> np.ndarray:
    """Fase 1: candidatas sin ningún vecino no solapado a distancia < r visto en el barrido."""
    candidates = np.empty(0, dtype=np.int64)
    for i in range(len(subs)):
        if len(candidates):
            far = np.abs(candidates - i) >= length
            close = far.copy()
            close[far] = _distances(subs, i, candidates[far]) < r
            if close.any():
                candidates = candidates[~close]
                continue
        candidates = np.append(candidates, i)
    return candidates


def drag(segment: Sequence[float], length: int, r: float) -> Optional[DiscordHit]:
    """Discordia exacta si su distancia es ≥ r; None si no queda ninguna candidata."""
    values = np.asarray(segment, dtype=np.float64)
    _check_query(len(values), length)
    if r <= 0:
        raise ConfigError(f"r={r} debe ser > 0", stage='discord')
    subs = subsequences(values, length)
    candidates = gather_candidates(subs, length, r)

    best: Optional[DiscordHit] = None
    for i in candidates:
        dist, j = nn_profile(subs, int(i), length)
        if not np.isfinite(dist) or dist < r:
            continue
        if best is None or dist > best.distance or (dist == best.distance and i < best.start):
            best = DiscordHit(length, int(i), dist, j)
    logger.debug(f"DRAG l={length} r={r:.4g}: {len(candidates)} candidatas, hit={best is not None}")
    return best


# =============================================================================
# MERLIN
# =============================================================================

def default_l_max(window_len: int, segment_len: int) -> int:
    return min(window_len, segment_len // 2 - 1)


def length_schedule(l_min: int, l_max: int, l_step: Optional[int] = None) -> List[int]:
    """Longitudes a barrer: paso 1 hasta 64, luego max(1, (l_max−l_min)/256)."""
    if l_min < MIN_LENGTH or l_max < l_min:
        raise ConfigError(f"rango de longitudes [{l_min}, {l_max}] no válido", stage='discord')
    if l_step is not None:
        if l_step < 1:
            raise ConfigError(f"l_step={l_step} < 1", stage='discord')
        return list(range(l_min, l_max + 1, l_step))
    dense = list(range(l_min, min(l_max, DENSE_UNTIL) + 1))
    if l_max <= DENSE_UNTIL:
        return dense
    coarse_step = max(1, (l_max - l_min) // SWEEP_DIVISIONS)
    return dense + list(range(DENSE_UNTIL + coarse_step, l_max + 1, coarse_step))


def _initial_r(k: int, length: int, distances: List[float]) -> float:
    if k == 0:
        return 2.0 * np.sqrt(length)
    if k < 5:
        return 0.99 * distances[-1]
    recent = np.asarray(distances[-5:])
    return max(float(recent.mean() - 2.0 * recent.std()), R_FLOOR)


def merlin(
    segment: Sequence[float],
    l_min: int,
    l_max: int,
    l_step: Optional[int] = None,
) -> List[DiscordHit]:
    """Una discordia exacta por longitud del calendario, en orden de longitud."""
    values = np.asarray(segment, dtype=np.float64)
    if l_max > len(values) // 2:
        raise ConfigError(f"l_max={l_max} > segmento/2 = {len(values) // 2}", stage='discord')
    lengths = length_schedule(l_min, l_max, l_step)

    hits: List[DiscordHit] = []
    distances: List[float] = []
    for k, length in enumerate(lengths):
        r = _initial_r(k, length, distances)
        hit = drag(values, length, r) if r > R_FLOOR else None
        retries = 0
        while hit is None:
            r /= 2.0
            retries += 1
            if r < R_FLOOR:
                hit = brute_force_discord(values, length)
                break
            hit = drag(values, length, r)
        if retries:
            logger.debug(f"l={length}: {retries} reintentos, r final={r:.4g}")
        hits.append(hit)
        distances.append(hit.distance)

    logger.info(f"MERLIN: {len(hits)} longitudes en [{lengths[0]}, {lengths[-1]}] sobre {len(values)} puntos")
    return hits


def translate(hits: Sequence[DiscordHit], offset: int) -> List[DiscordHit]:
    """Lleva los hits de coordenadas del segmento a coordenadas del test."""
    return [replace(h, start=h.start + offset, neighbor=h.neighbor + offset) for h in hits]
