"""Excepciones del detector TriAD.

Cada excepción lleva la etiqueta de la etapa que la produce (`stage`),
que la CLI imprime como `[etapa] mensaje`.
"""

from typing import Optional


class TriADError(Exception):
    """Error base del proyecto."""

    stage = 'core'

    def __init__(self, message: str, stage: Optional[str] = None):
        super().__init__(message)
        if stage:
            self.stage = stage

    def __str__(self) -> str:
        return f"[{self.stage}] {super().__str__()}"


# =============================================================================
# SERIES
# =============================================================================

class ParseError(TriADError):
    """Fichero UCR ilegible: bytes no UTF-8, token no numérico o no finito."""

    stage = 'series'

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(message if line is None else f"línea {line}: {message}")
        self.line = line


class MetadataParseError(TriADError):
    """El nombre del fichero no sigue la convención UCR."""

    stage = 'series'


class InsufficientDataError(TriADError):
    """No hay muestras o ventanas suficientes."""

    stage = 'series'


class DegeneratePeriodError(TriADError):
    """Espectro nulo: la serie es constante."""

    stage = 'series'


# =============================================================================
# FEATURES / NN / TRAIN
# =============================================================================

class ParameterError(TriADError):
    """Parámetro fuera de dominio (filtro, aumento)."""

    stage = 'augment'


class ShapeError(TriADError):
    stage = 'nn'


class UsageError(TriADError):
    """Uso incorrecto del motor de autodiferenciación."""

    stage = 'nn'


class CheckpointError(TriADError):
    stage = 'nn'


class ConfigError(TriADError):
    stage = 'config'


# =============================================================================
# DETECCIÓN / PUNTUACIÓN / EVALUACIÓN
# =============================================================================

class SegmentTooShortError(TriADError):
    stage = 'discord'


class CoordinateError(TriADError):
    stage = 'score'


class NoSignalError(TriADError):
    """Ningún punto recibió votos."""

    stage = 'score'


class LengthMismatchError(TriADError):
    stage = 'eval'


class NoEventError(TriADError):
    """La verdad de terreno no contiene ningún evento."""

    stage = 'eval'


class StageError(TriADError):
    """Fallo de una etapa del pipeline, con la causa original."""

    def __init__(self, stage: str, cause: BaseException):
        message = cause.args[0] if isinstance(cause, TriADError) and cause.args else str(cause)
        super().__init__(f"{type(cause).__name__}: {message}", stage=stage)
        self.cause = cause
