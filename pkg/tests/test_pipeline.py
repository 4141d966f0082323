#!/usr/bin/env python
"""Tests de configuración de ejecución, artefactos, pipeline y CLI.

Ejecutar: python tests/test_pipeline.py  (o pytest tests/)
"""

import sys
import tempfile
from pathlib import Path

# Añadir src al path
sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np
import pytest
import yaml
from typer.testing import CliRunner

from src import __version__
from src.data.synth import generate, synth, synth_suite
from src.data.ucr import load_manifest, load_ucr
from src.errors import ConfigError, StageError, TriADError
from src.main import EXIT_INVALID_CONFIG, app
from src.pipeline import artifacts
from src.detection.detector import make_search_region
from src.pipeline.runner import load_dataset, run_batch, run_pipeline, search_region, stage, summarize
from src.policies import RunConfig, RunManifest, read_config_file, validate_run_config

# Configuración mínima: entrena y detecta en unos segundos
TINY = {'period': 20, 'depth': 2, 'hidden_dim': 4, 'epochs': 1, 'batch_size': 4}

runner = CliRunner()


def _tiny_run(**extra) -> RunConfig:
    return RunConfig().merged({**TINY, **extra})


def _tiny_dataset(directory: Path, kind: str = 'seasonal', seed: int = 0, index: int = 1) -> Path:
    return synth(
        kind, directory, n_train=600, n_test=400, anomaly_length=40, anomaly_offset=200,
        period=20, seed=seed, index=index,
    )


def _write_yaml(path: Path, data) -> Path:
    path.write_text(yaml.safe_dump(data), encoding='utf-8')
    return path


# =============================================================================
# SINTÉTICOS
# =============================================================================

def test_synth_is_deterministic():
    with tempfile.TemporaryDirectory() as tmp:
        a = _tiny_dataset(Path(tmp) / 'a', seed=3)
        b = _tiny_dataset(Path(tmp) / 'b', seed=3)
        assert a.name == b.name == '001_UCR_Anomaly_synthseasonal_600_800_839.txt'
        assert a.read_bytes() == b.read_bytes()

        series, meta = load_ucr(a)
        assert len(series) == 1000
        assert meta.test_span() == (200, 239)


def test_generate_respects_anomaly_placement():
    values, meta = generate('level_shift', n_train=500, n_test=300, anomaly_length=30,
                            anomaly_offset=100, period=25, magnitude=3.0, noise=0.0, seed=0)
    reference = np.sin(2 * np.pi * np.arange(800) / 25)
    assert np.allclose(values[:600], reference[:600])
    assert np.all(values[600:630] - reference[600:630] > 1.0)
    assert np.allclose(values[630:], reference[630:])
    assert (meta.anomaly_begin, meta.anomaly_end) == (600, 629)


def test_generate_rejects_bad_specs():
    with pytest.raises(ConfigError):
        generate('spike')
    with pytest.raises(ConfigError):
        generate('noise', n_test=100, anomaly_length=50, anomaly_offset=80)


def test_synth_suite_manifest():
    with tempfile.TemporaryDirectory() as tmp:
        paths, manifest = synth_suite(Path(tmp), seed=0, period=50)
        assert len(paths) == 12
        assert [p.resolve() for p in load_manifest(manifest)] == [p.resolve() for p in paths]
        kinds = {p.name.split('_')[3] for p in paths}
        assert len(kinds) == 6


# =============================================================================
# CONFIGURACIÓN DE EJECUCIÓN
# =============================================================================

def test_run_config_precedence():
    with tempfile.TemporaryDirectory() as tmp:
        path = _write_yaml(Path(tmp) / 'run.yaml', {'alpha': 0.5, 'epochs': 3})
        run = RunConfig.load(path, {'alpha': 0.7, 'pad': None})
    assert run.alpha == 0.7
    assert run.epochs == 3
    assert run.pad is None
    assert run.batch_size == 8


def test_read_config_file_sections():
    with tempfile.TemporaryDirectory() as tmp:
        sectioned = _write_yaml(Path(tmp) / 'a.yaml', {'training': {'alpha': 0.2}, 'discord': {'l_max': 40}})
        assert read_config_file(sectioned) == {'alpha': 0.2, 'l_max': 40}

        unknown = _write_yaml(Path(tmp) / 'b.yaml', {'training': {'momentum': 0.9}})
        with pytest.raises(ConfigError):
            read_config_file(unknown)

        scalar = _write_yaml(Path(tmp) / 'c.yaml', [1, 2])
        with pytest.raises(ConfigError):
            read_config_file(scalar)

        with pytest.raises(ConfigError):
            read_config_file(Path(tmp) / 'missing.yaml')


def test_merged_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        RunConfig().merged({'learning_rate': 0.1})


def test_validate_run_config():
    assert validate_run_config(RunConfig()).is_valid
    result = validate_run_config(RunConfig(alpha=1.5, kernel_size=4, l_min=2))
    assert not result.is_valid
    assert len(result.issues) == 3


def test_domains_from_text_and_validation():
    assert RunConfig().domains == ['temporal', 'frequency', 'residual']
    assert RunConfig().merged({'domains': 'temporal, frequency'}).domains == ['temporal', 'frequency']
    assert not validate_run_config(RunConfig().merged({'domains': 'temporal,wavelet'})).is_valid
    assert not validate_run_config(RunConfig().merged({'domains': 'residual,residual'})).is_valid


# =============================================================================
# ETAPAS E INFORME
# =============================================================================

def test_stage_wraps_errors():
    with pytest.raises(StageError) as info:
        with stage('discord'):
            raise ValueError("l fuera de rango")
    assert str(info.value) == "[discord] ValueError: l fuera de rango"
    assert isinstance(info.value.cause, ValueError)

    inner = StageError('train', RuntimeError("x"))
    with pytest.raises(StageError) as again:
        with stage('eval'):
            raise inner
    assert again.value is inner


def _valid_report() -> dict:
    return artifacts.build_report(
        'demo',
        metrics={**{k: 0.5 for k in artifacts.METRIC_KEYS}, 'no_predictions': False},
        detection={
            'window_len': 50, 'candidates': [10, 20], 'chosen': 10, 'region': [0, 110],
            'tri_window_hit': True, 'single_window_hit': False, 'margin_hit': True,
        },
        scoring={'threshold': 1.5, 'rule': 'mean', 'exception_fired': False, 'positives': np.int64(4)},
        discord={'lengths': 48, 'l_min': 3, 'l_max': 50, 'hits_on_anomaly': 40},
    )


def test_validate_report():
    report = _valid_report()
    assert report['scoring']['positives'] == 4 and type(report['scoring']['positives']) is int
    assert artifacts.validate_report(report).is_valid

    missing = _valid_report()
    del missing['detection']['chosen']
    assert not artifacts.validate_report(missing).is_valid

    wrong_type = _valid_report()
    wrong_type['discord']['lengths'] = True
    assert not artifacts.validate_report(wrong_type).is_valid

    out_of_range = _valid_report()
    out_of_range['metrics']['aff_f1'] = 1.2
    assert not artifacts.validate_report(out_of_range).is_valid


def test_load_dataset_tags_series_stage():
    with tempfile.TemporaryDirectory() as tmp:
        bad = Path(tmp) / 'bad.txt'
        bad.write_text("1\n2\n", encoding='utf-8')
        with pytest.raises(StageError) as info:
            load_dataset(bad)
    assert info.value.stage == 'series'


def test_exception_labels_exactly_the_window():
    """Un tramo periódico sin ruido cubre la ventana: cada subsecuencia que la toca
    tiene una copia exacta a 20 puntos, las discordias caen fuera y se etiqueta [t, t+L)."""
    n = 400
    test_values = np.random.default_rng(31).standard_normal(n)
    test_values[120:230] = np.sin(2 * np.pi * np.arange(120, 230) / 10)
    region = make_search_region(150, 50, pad=50, test_len=n)
    assert (region.begin, region.end) == (100, 250)

    found = search_region(test_values, region, RunConfig().merged({'l_max': 12}))

    assert (found.l_min, found.l_max) == (3, 12)
    assert len(found.hits) == 10
    assert not any(h.start < 200 and h.end > 150 for h in found.hits)
    assert found.scores.exception_fired
    expected = np.zeros(n, dtype=np.int64)
    expected[150:200] = 1
    np.testing.assert_array_equal(found.scores.labels, expected)


# =============================================================================
# PIPELINE
# =============================================================================

def test_run_pipeline_end_to_end():
    """Sintético pequeño: todos los artefactos, informe válido y reproducible."""
    with tempfile.TemporaryDirectory() as tmp:
        path = _tiny_dataset(Path(tmp) / 'data')
        run = _tiny_run()
        report = run_pipeline(path, run, Path(tmp) / 'run1', plot=True)
        run_dir = Path(tmp) / 'run1'
        for name in (
            artifacts.MODEL_FILE, artifacts.RUN_MANIFEST, artifacts.TRACE_FILE, artifacts.HITS_FILE,
            artifacts.SCORES_FILE, artifacts.SCORE_SUMMARY_FILE, artifacts.REPORT_FILE,
            artifacts.PAK_CURVE_FILE, artifacts.PLOT_FILE,
        ):
            assert (run_dir / name).exists(), name

        assert artifacts.validate_report(report).is_valid
        assert artifacts.read_json(run_dir / artifacts.REPORT_FILE) == report
        assert 1 <= len(report['detection']['candidates']) <= 3

        votes, labels = artifacts.read_scores(run_dir / artifacts.SCORES_FILE)
        assert len(votes) == len(labels) == 400
        assert labels.sum() > 0

        manifest = RunManifest(**artifacts.read_json(run_dir / artifacts.RUN_MANIFEST))
        assert manifest.seed == 0 and manifest.config['period'] == 20
        assert manifest.segmentation['window_len'] == 50
        assert len(manifest.epochs) == 2
        assert manifest.version == __version__

        run_pipeline(path, run, Path(tmp) / 'run2', plot=False)
        first = (run_dir / artifacts.REPORT_FILE).read_bytes()
        assert (Path(tmp) / 'run2' / artifacts.REPORT_FILE).read_bytes() == first


def test_run_batch_isolates_failures():
    with tempfile.TemporaryDirectory() as tmp:
        good = _tiny_dataset(Path(tmp) / 'data')
        bad = Path(tmp) / 'data' / 'broken.txt'
        bad.write_text("0.1\n0.2\n", encoding='utf-8')
        frame = run_batch([good, bad], _tiny_run(), Path(tmp) / 'runs', seeds=1, jobs=1, plot=False)

        assert len(frame) == 2
        statuses = dict(zip(frame['dataset'], frame['status']))
        assert statuses['broken'] == 'failed'
        failed = frame[frame['status'] == 'failed'].iloc[0]
        assert failed['error'].startswith('[series]')

        summary = artifacts.read_json(Path(tmp) / 'runs' / 'summary.json')
        assert summary['runs'] == 2 and summary['failed'] == 1
        assert 'aff_f1' in summary['mean']
        assert (Path(tmp) / 'runs' / 'summary.csv').exists()


def test_summarize_mean_and_std():
    import pandas as pd

    frame = pd.DataFrame([
        {'dataset': 'a', 'seed': 0, 'status': 'ok', 'error': '', 'f1_pw': 0.2, 'tri_window_hit': 1.0, 'single_window_hit': 0.0},
        {'dataset': 'a', 'seed': 1, 'status': 'ok', 'error': '', 'f1_pw': 0.4, 'tri_window_hit': 0.0, 'single_window_hit': 0.0},
        {'dataset': 'b', 'seed': 0, 'status': 'failed', 'error': '[train] x'},
    ])
    summary = summarize(frame)
    assert summary['runs'] == 3 and summary['failed'] == 1
    assert summary['mean']['f1_pw'] == pytest.approx(0.3)
    assert summary['std']['f1_pw'] == pytest.approx(0.1)
    assert 'seed' not in summary['mean']
    assert summary['tri_window_accuracy'] == 0.5


# =============================================================================
# CLI
# =============================================================================

def test_cli_version():
    result = runner.invoke(app, ['version'])
    assert result.exit_code == 0
    assert __version__ in result.output


def test_cli_invalid_config_exits_2():
    assert runner.invoke(app, ['--alpha', '1.5', 'version']).exit_code == EXIT_INVALID_CONFIG
    assert runner.invoke(app, ['--config', 'no-existe.yaml', 'version']).exit_code == EXIT_INVALID_CONFIG
    assert runner.invoke(app, ['pipeline']).exit_code == EXIT_INVALID_CONFIG
    assert runner.invoke(app, ['pipeline', 'no-existe.txt']).exit_code == EXIT_INVALID_CONFIG
    assert runner.invoke(app, ['--lang', 'xx', 'version']).exit_code == EXIT_INVALID_CONFIG
    assert runner.invoke(app, ['--domains', 'temporal,xx', 'version']).exit_code == EXIT_INVALID_CONFIG


def test_cli_synth():
    with tempfile.TemporaryDirectory() as tmp:
        result = runner.invoke(app, [
            '--seed', '2', 'synth', 'trend', '--out', tmp,
            '--n-train', '600', '--n-test', '400', '--length', '40', '--offset', '100', '--synth-period', '20',
        ])
        assert result.exit_code == 0, result.output
        files = list(Path(tmp).glob('*.txt'))
        assert [f.name for f in files] == ['001_UCR_Anomaly_synthtrend_600_700_739.txt']

        bad = runner.invoke(app, ['synth', 'spike', '--out', tmp])
        assert bad.exit_code == EXIT_INVALID_CONFIG


def test_cli_stage_failure_exits_1():
    with tempfile.TemporaryDirectory() as tmp:
        bad = Path(tmp) / 'broken.txt'
        bad.write_text("1\n2\n", encoding='utf-8')
        result = runner.invoke(app, ['eval', str(bad), '--run-dir', tmp])
        assert result.exit_code == 1
        assert '[series]' in result.output


def test_errors_share_base_class():
    assert issubclass(StageError, TriADError)
    assert str(ConfigError("x")) == "[config] x"


if __name__ == "__main__":
    from harness import main
    main("Tests del pipeline y la CLI", dict(globals()))
