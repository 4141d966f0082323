"""Validación de datasets antes de ejecutar el pipeline.

Este módulo implementa la validación "dura" de los invariantes:
- TimeSeries: longitud ≥ 1, todos los valores finitos
- DatasetMeta: 0 < train_end ≤ anomaly_begin ≤ anomaly_end < N
- Segmentación: entrenamiento y test admiten al menos las ventanas necesarias
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np

from ..config import get_logger
from .series import DatasetMeta, TimeSeries

logger = get_logger('validator')


@dataclass
class ValidationResult:
    """Resultado de una validación."""
    is_valid: bool
    message: str
    issues: List[str] = field(default_factory=list)

    @classmethod
    def from_issues(cls, issues: List[str], ok_message: str = "OK") -> 'ValidationResult':
        if issues:
            return cls(is_valid=False, message="; ".join(issues), issues=list(issues))
        return cls(is_valid=True, message=ok_message)


def validate_series(ts: TimeSeries) -> ValidationResult:
    """Invariantes de TimeSeries."""
    issues = []
    if len(ts) < 1:
        issues.append("serie vacía")
    elif not np.all(np.isfinite(ts.values)):
        bad = int(np.count_nonzero(~np.isfinite(ts.values)))
        issues.append(f"{bad} valores no finitos")
    return ValidationResult.from_issues(issues, f"Serie válida ({len(ts)} muestras)")


def validate_meta(meta: DatasetMeta, n: int) -> ValidationResult:
    """Invariantes de DatasetMeta frente a la longitud N de la serie."""
    issues = []
    if not 0 < meta.train_end:
        issues.append(f"train_end={meta.train_end} debe ser > 0")
    if meta.train_end > meta.anomaly_begin:
        issues.append(f"la anomalía ({meta.anomaly_begin}) empieza antes del test ({meta.train_end})")
    if meta.anomaly_begin > meta.anomaly_end:
        issues.append(f"anomaly_begin={meta.anomaly_begin} > anomaly_end={meta.anomaly_end}")
    if meta.anomaly_end >= n:
        issues.append(f"anomaly_end={meta.anomaly_end} fuera de la serie (N={n})")
    return ValidationResult.from_issues(issues, "Metadatos válidos")


def validate_dataset(
    ts: TimeSeries,
    meta: DatasetMeta,
    window_len: Optional[int] = None,
) -> ValidationResult:
    """Valida serie, metadatos y, si se conoce L, la longitud de los splits."""
    issues = []
    issues += validate_series(ts).issues
    issues += validate_meta(meta, len(ts)).issues

    if window_len and not issues:
        n_test = len(ts) - meta.train_end
        if meta.train_end < window_len:
            issues.append(f"entrenamiento ({meta.train_end}) más corto que L={window_len}")
        if n_test < window_len + 1:
            issues.append(f"test ({n_test}) no admite 2 ventanas de L={window_len}")

    result = ValidationResult.from_issues(issues, f"Dataset '{ts.name}' válido")
    if not result.is_valid:
        logger.warning(f"Dataset '{ts.name}' inválido: {result.message}")
    return result


def validate_paths(paths: List[Path]) -> ValidationResult:
    """Comprueba que las rutas de un manifiesto existen."""
    missing = [str(p) for p in paths if not Path(p).exists()]
    return ValidationResult.from_issues(
        [f"no existe: {m}" for m in missing], f"{len(paths)} rutas válidas"
    )
