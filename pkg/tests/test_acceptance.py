#!/usr/bin/env python
"""Pruebas de aceptación a escala de escritorio (lentas).

Sólo se ejecutan con TRIAD_ACCEPTANCE=1:
    TRIAD_ACCEPTANCE=1 pytest tests/test_acceptance.py
    TRIAD_ACCEPTANCE=1 python tests/test_acceptance.py
"""

import os
import sys
import tempfile
import time
from pathlib import Path

# Añadir src al path
sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np
import pytest

from src.data.synth import synth, synth_suite
from src.detection.discord import brute_force_discord, merlin
from src.pipeline import artifacts
from src.pipeline.runner import bench, run_batch, run_pipeline
from src.policies import RunConfig

ENABLED = os.environ.get('TRIAD_ACCEPTANCE') == '1'

pytestmark = pytest.mark.skipif(not ENABLED, reason="define TRIAD_ACCEPTANCE=1 para ejecutarlas")

# Presupuesto de la suite: 5 épocas por dataset y hasta 4 procesos
SUITE_EPOCHS = 5
SUITE_JOBS = min(4, os.cpu_count() or 1)


def test_merlin_matches_oracle_on_random_segments():
    """50 segmentos aleatorios, un barrido l = 3..64 cada uno: cada hit iguala al oráculo de su longitud."""
    rng = np.random.default_rng(2024)
    for _ in range(50):
        n = int(rng.integers(200, 600))
        segment = np.cumsum(rng.standard_normal(n))
        hits = merlin(segment, 3, 64)
        assert [h.length for h in hits] == list(range(3, 65))
        for hit in hits:
            exact = brute_force_discord(segment, hit.length)
            assert abs(hit.distance - exact.distance) <= 1e-12
            assert hit.start == exact.start or hit.distance == exact.distance


def test_suite_window_accuracy_and_affiliation():
    """Suite fija de 12 sintéticos: la tri-ventana acierta ≥ 9/12, Aff-F1 medio ≥ 0.70, < 30 min."""
    run = RunConfig().merged({'epochs': SUITE_EPOCHS, 'jobs': SUITE_JOBS})
    started = time.perf_counter()
    with tempfile.TemporaryDirectory() as tmp:
        paths, _ = synth_suite(Path(tmp) / 'data', seed=0, period=50)
        frame = run_batch(paths, run, Path(tmp) / 'runs', seeds=1, jobs=run.jobs, plot=False)
    elapsed = time.perf_counter() - started
    assert (frame['status'] == 'ok').all(), frame['error'].tolist()
    assert frame['tri_window_hit'].sum() >= 9
    assert frame['aff_f1'].mean() >= 0.70
    assert elapsed < 30 * 60, f"suite en {elapsed:.0f} s"


def test_constrained_search_is_shorter_and_faster():
    """N_test = 40·L: región ≥ 13 veces más corta y búsqueda ≥ 10× más rápida."""
    with tempfile.TemporaryDirectory() as tmp:
        path = synth('seasonal', Path(tmp) / 'data', n_train=4000, n_test=5000,
                     anomaly_length=100, anomaly_offset=2500, period=50, seed=1)
        result = bench(path, RunConfig(), Path(tmp) / 'bench')
    assert result['search_ratio'] >= 13
    assert result['speedup'] is not None and result['speedup'] >= 10


def test_reports_are_byte_identical():
    with tempfile.TemporaryDirectory() as tmp:
        path = synth('noise', Path(tmp) / 'data', anomaly_length=60, seed=4)
        run = RunConfig().merged({'epochs': 3})
        run_pipeline(path, run, Path(tmp) / 'a', plot=False)
        run_pipeline(path, run, Path(tmp) / 'b', plot=False)
        first = (Path(tmp) / 'a' / artifacts.REPORT_FILE).read_bytes()
        second = (Path(tmp) / 'b' / artifacts.REPORT_FILE).read_bytes()
    assert first == second


if __name__ == "__main__":
    if not ENABLED:
        print("Define TRIAD_ACCEPTANCE=1 para ejecutar las pruebas de aceptación.")
        sys.exit(0)
    from harness import main
    main("Pruebas de aceptación", dict(globals()))
