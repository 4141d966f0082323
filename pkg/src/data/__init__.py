"""Módulo de datos - Series temporales, ficheros UCR y sintéticos."""

from .series import (
    DatasetMeta,
    SegmentationConfig,
    TimeSeries,
    WindowSlice,
    denormalize,
    estimate_period,
    segment,
    split,
    train_stats,
    window_starts,
    znormalize,
)
from .ucr import load_manifest, load_ucr, write_ucr

__all__ = [
    'DatasetMeta',
    'SegmentationConfig',
    'TimeSeries',
    'WindowSlice',
    'denormalize',
    'estimate_period',
    'load_manifest',
    'load_ucr',
    'segment',
    'split',
    'train_stats',
    'window_starts',
    'write_ucr',
    'znormalize',
]
