"""Métricas de evaluación: punto a punto, PA%K y afiliación."""

from .affiliation import affiliation
from .metrics import (
    MetricReport,
    anomaly_segments,
    evaluate,
    f1_pointwise,
    margin_hit,
    pa_k_auc,
    pa_percent_k,
    pak_curve,
    point_adjust,
    window_hit,
)

__all__ = [
    'f1_pointwise',
    'point_adjust',
    'pa_percent_k',
    'pa_k_auc',
    'pak_curve',
    'affiliation',
    'window_hit',
    'margin_hit',
    'anomaly_segments',
    'MetricReport',
    'evaluate',
]
