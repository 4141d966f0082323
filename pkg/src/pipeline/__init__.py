"""Orquestación: pipeline por dataset, lotes, benchmark y artefactos."""

from .runner import (
    Dataset,
    bench,
    detect_stage,
    evaluate_stage,
    load_dataset,
    run_batch,
    run_pipeline,
    summarize,
    train_stage,
)

__all__ = [
    'Dataset',
    'load_dataset',
    'train_stage',
    'detect_stage',
    'evaluate_stage',
    'run_pipeline',
    'run_batch',
    'summarize',
    'bench',
]
