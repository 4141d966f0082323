"""Orquestación del pipeline por dataset, por lotes y benchmark.

    load ─► validate ─► segment ─► train ─► tri_window ─► select_single
         ─► search region ─► merlin ─► vote/threshold/classify ─► evaluate

Cada etapa se ejecuta dentro de `stage(nombre)`: cualquier fallo sale como
StageError con la etiqueta de la etapa. Las tres fases (train, detect, eval)
escriben sus artefactos y pueden lanzarse por separado desde la CLI.
"""

import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from .. import __version__
from ..config import get_logger
from ..data.series import DatasetMeta, SegmentationConfig, TimeSeries, estimate_period, split
from ..data.ucr import file_sha256, load_ucr
from ..data.validator import validate_dataset
from ..detection.detector import SearchRegion, detect_window
from ..detection.discord import default_l_max, merlin, translate
from ..detection.scorer import ScoreVector, score
from ..errors import SegmentTooShortError, StageError, TriADError
from ..evaluation.metrics import evaluate, margin_hit, pak_curve, window_hit
from ..policies import RunConfig, RunManifest
from ..training.trainer import LossConfig, TrainedModel, train
from . import artifacts
from .plots import plot_run

logger = get_logger('pipeline')


@contextmanager
def stage(name: str) -> Iterator[None]:
    """Envuelve cualquier excepción de la etapa en StageError(name, causa)."""
    try:
        yield
    except StageError:
        raise
    except Exception as e:
        raise StageError(name, e) from e


# =============================================================================
# DATASET Y SEGMENTACIÓN
# =============================================================================

@dataclass(frozen=True)
class Dataset:
    """Dataset UCR cargado y partido."""
    path: Path
    name: str
    meta: DatasetMeta
    train: TimeSeries
    test: TimeSeries
    sha256: str

    @property
    def truth(self) -> np.ndarray:
        return self.meta.test_labels(len(self.test))


def load_dataset(path: Path) -> Dataset:
    with stage('series'):
        series, meta = load_ucr(path)
        result = validate_dataset(series, meta)
        if not result.is_valid:
            raise TriADError(result.message, stage='series')
        train_part, test_part = split(series, meta)
        return Dataset(
            path=Path(path),
            name=series.name,
            meta=meta,
            train=train_part,
            test=test_part,
            sha256=file_sha256(path),
        )


def resolve_segmentation(dataset: Dataset, run: RunConfig) -> SegmentationConfig:
    """Periodo (estimado si no se fija) y configuración de ventana."""
    with stage('series'):
        period = run.period or estimate_period(dataset.train)
        seg = SegmentationConfig.from_period(
            period,
            window_len=run.window_len,
            window_factor=run.window_factor,
            stride_fraction=run.stride_fraction,
        )
        result = validate_dataset(TimeSeries(np.concatenate([dataset.train.values, dataset.test.values])),
                                  dataset.meta, window_len=seg.window_len)
        if not result.is_valid:
            raise TriADError(result.message, stage='series')
        logger.info(f"{dataset.name}: periodo={seg.period}, L={seg.window_len}, stride={seg.stride}")
        return seg


def loss_config(run: RunConfig) -> LossConfig:
    return LossConfig(
        alpha=run.alpha,
        batch_size=run.batch_size,
        epochs=run.epochs,
        lr=run.lr,
        val_fraction=run.val_fraction,
        seed=run.seed,
    )


# =============================================================================
# FASES
# =============================================================================

def train_stage(dataset: Dataset, run: RunConfig, out_dir: Path) -> TrainedModel:
    """Entrena, guarda model.npz y escribe el manifiesto de ejecución."""
    seg = resolve_segmentation(dataset, run)
    with stage('train'):
        model = train(
            dataset.train,
            loss_config(run),
            seg,
            depth=run.depth,
            hidden_dim=run.hidden_dim,
            kernel_size=run.kernel_size,
            domains=run.domains,
        )
    with stage('artifacts'):
        out_dir.mkdir(parents=True, exist_ok=True)
        model.save(out_dir / artifacts.MODEL_FILE)
        manifest = RunManifest(
            dataset=dataset.name,
            dataset_sha256=dataset.sha256,
            seed=run.seed,
            config=run.to_dict(),
            segmentation=seg.to_dict(),
            normalization={'mean': model.norm_mean, 'std': model.norm_std},
            encoder={'domains': model.encoder_configs(), 'init': 'uniform_fan_in', 'activation': 'gelu_tanh'},
            epochs=[asdict(rec) for rec in model.history],
            version=__version__,
        )
        artifacts.write_json(out_dir / artifacts.RUN_MANIFEST, manifest.to_dict())
    return model


@dataclass
class DetectionOutcome:
    window: Tuple[int, int]
    region: Tuple[int, int]
    candidates: List[int]
    hits: list
    summary: Dict[str, Any]


def discord_range(run: RunConfig, window_len: int, region_len: int) -> Tuple[int, int]:
    """(l_min, l_max) efectivos para una región de búsqueda."""
    l_max = run.l_max if run.l_max is not None else default_l_max(window_len, region_len)
    l_max = min(l_max, region_len // 2)
    if l_max < run.l_min:
        raise SegmentTooShortError(
            f"región de {region_len} puntos: l_max={l_max} < l_min={run.l_min}"
        )
    return run.l_min, l_max


@dataclass
class RegionSearch:
    hits: list
    scores: ScoreVector
    l_min: int
    l_max: int


def search_region(test_values: np.ndarray, region: SearchRegion, run: RunConfig) -> RegionSearch:
    """MERLIN dentro de la región y votos sobre todo el test."""
    with stage('discord'):
        l_min, l_max = discord_range(run, region.window_len, region.length)
        local = merlin(test_values[region.begin:region.end], l_min, l_max, run.l_step)
        hits = translate(local, region.begin)
    with stage('score'):
        scores = score(len(test_values), region.window, hits, rule=run.threshold_rule, q=run.percentile)
    return RegionSearch(hits=hits, scores=scores, l_min=l_min, l_max=l_max)


def detect_stage(dataset: Dataset, model: TrainedModel, run: RunConfig, out_dir: Path) -> DetectionOutcome:
    """Ventana, región, discordias y votos; escribe traza, hits y scores."""
    with stage('detect'):
        cands, region, trace = detect_window(
            dataset.train, dataset.test, model, z=run.z, probe_stride=run.probe_stride, pad=run.pad
        )
    found = search_region(dataset.test.values, region, run)
    hits, scores = found.hits, found.scores

    summary = {
        **scores.summary(),
        'window': list(region.window),
        'region': [region.begin, region.end],
        'candidates': list(cands.starts),
        'window_len': model.seg.window_len,
        'l_min': found.l_min,
        'l_max': found.l_max,
        'lengths': len(hits),
    }
    with stage('artifacts'):
        out_dir.mkdir(parents=True, exist_ok=True)
        artifacts.write_json(out_dir / artifacts.TRACE_FILE, trace.to_dict())
        artifacts.write_hits(out_dir / artifacts.HITS_FILE, hits)
        artifacts.write_scores(out_dir / artifacts.SCORES_FILE, scores.votes, scores.labels)
        artifacts.write_json(out_dir / artifacts.SCORE_SUMMARY_FILE, summary)
    return DetectionOutcome(
        window=region.window,
        region=(region.begin, region.end),
        candidates=list(cands.starts),
        hits=hits,
        summary=summary,
    )


def evaluate_stage(dataset: Dataset, run_dir: Path, plot: bool = True) -> Dict[str, Any]:
    """Métricas a partir de los artefactos de detect; escribe report.json."""
    with stage('eval'):
        votes, labels = artifacts.read_scores(run_dir / artifacts.SCORES_FILE)
        hits = artifacts.read_hits(run_dir / artifacts.HITS_FILE)
        summary = artifacts.read_json(run_dir / artifacts.SCORE_SUMMARY_FILE)
        truth = dataset.truth
        metrics = evaluate(labels, truth)
        span = dataset.meta.test_span()
        window_len = int(summary['window_len'])
        chosen = int(summary['window'][0])
        report = artifacts.build_report(
            dataset.name,
            metrics=metrics.to_dict(),
            detection={
                'window_len': window_len,
                'candidates': summary['candidates'],
                'chosen': chosen,
                'region': summary['region'],
                'tri_window_hit': window_hit(summary['candidates'], window_len, span),
                'single_window_hit': window_hit([chosen], window_len, span),
                'margin_hit': margin_hit(labels, span),
            },
            scoring={k: summary[k] for k in ('threshold', 'rule', 'exception_fired', 'positives')},
            discord={
                **{k: summary[k] for k in ('lengths', 'l_min', 'l_max')},
                'hits_on_anomaly': sum(1 for h in hits if h.start <= span[1] and h.end > span[0]),
            },
        )
        check = artifacts.validate_report(report)
        if not check.is_valid:
            raise TriADError(f"informe fuera de esquema: {check.message}", stage='eval')

    with stage('artifacts'):
        artifacts.write_json(run_dir / artifacts.REPORT_FILE, report)
        artifacts.write_pak_curve(run_dir / artifacts.PAK_CURVE_FILE, pak_curve(labels, truth))
        if plot:
            plot_run(
                run_dir / artifacts.PLOT_FILE,
                dataset.test.values,
                votes,
                labels,
                truth,
                window=tuple(summary['window']),
                region=tuple(summary['region']),
                title=dataset.name,
            )
    logger.info(
        f"{dataset.name}: F1(PW)={metrics.f1_pw:.3f} PA%K-F1-AUC={metrics.pak_f1_auc:.3f} "
        f"Aff-F1={metrics.aff_f1:.3f}"
    )
    return report


def run_pipeline(path: Path, run: RunConfig, out_dir: Path, plot: bool = True) -> Dict[str, Any]:
    """Pipeline completo de un dataset; devuelve el informe."""
    dataset = load_dataset(path)
    run_dir = Path(out_dir)
    model = train_stage(dataset, run, run_dir)
    detect_stage(dataset, model, run, run_dir)
    return evaluate_stage(dataset, run_dir, plot=plot)


# =============================================================================
# LOTES Y SEMILLAS
# =============================================================================

def report_row(report: Dict[str, Any], seed: int) -> Dict[str, Any]:
    """Fila plana para el resumen agregado."""
    row = {'dataset': report['dataset'], 'seed': seed, 'status': 'ok', 'error': ''}
    row.update({k: v for k, v in report['metrics'].items() if k != 'no_predictions'})
    for key in ('tri_window_hit', 'single_window_hit', 'margin_hit'):
        row[key] = float(report['detection'][key])
    row['exception_fired'] = float(report['scoring']['exception_fired'])
    return row


def _run_task(path: Path, run: RunConfig, run_dir: Path, plot: bool) -> Dict[str, Any]:
    try:
        return report_row(run_pipeline(path, run, run_dir, plot=plot), run.seed)
    except TriADError as e:
        logger.error(f"{Path(path).name}: {e}")
        return {'dataset': Path(path).stem, 'seed': run.seed, 'status': 'failed', 'error': str(e)}


def run_batch(
    paths: Sequence[Path],
    run: RunConfig,
    out_dir: Path,
    seeds: int = 1,
    jobs: Optional[int] = None,
    plot: bool = True,
) -> pd.DataFrame:
    """Un pipeline por (dataset, semilla), en paralelo con joblib."""
    out_dir = Path(out_dir)
    tasks = []
    for path in paths:
        for k in range(seeds):
            seeded = run.merged({'seed': run.seed + k})
            run_dir = out_dir / Path(path).stem
            if seeds > 1:
                run_dir = run_dir / f"seed_{seeded.seed}"
            tasks.append((Path(path), seeded, run_dir))

    n_jobs = jobs or run.jobs
    logger.info(f"Lote: {len(tasks)} ejecuciones, {n_jobs} worker(s)")
    rows = Parallel(n_jobs=n_jobs)(delayed(_run_task)(p, r, d, plot) for p, r, d in tasks)
    frame = pd.DataFrame(rows)
    write_summary(frame, out_dir)
    return frame


def summarize(frame: pd.DataFrame) -> Dict[str, Any]:
    """Media ± desviación de cada columna numérica sobre las ejecuciones correctas."""
    ok = frame[frame['status'] == 'ok'] if 'status' in frame else frame
    numeric = ok.select_dtypes(include=[np.number]).drop(columns=['seed'], errors='ignore')
    summary: Dict[str, Any] = {
        'runs': int(len(frame)),
        'failed': int(len(frame) - len(ok)),
        'mean': {k: float(v) for k, v in numeric.mean().items()} if len(ok) else {},
        'std': {k: float(v) for k, v in numeric.std(ddof=0).items()} if len(ok) else {},
    }
    if len(ok) and 'tri_window_hit' in ok:
        summary['tri_window_accuracy'] = float(ok['tri_window_hit'].mean())
        summary['single_window_accuracy'] = float(ok['single_window_hit'].mean())
    return summary


def write_summary(frame: pd.DataFrame, out_dir: Path) -> Dict[str, Any]:
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = summarize(frame)
    frame.to_csv(out_dir / 'summary.csv', index=False, float_format='%.6f')
    artifacts.write_json(out_dir / 'summary.json', summary)
    return summary


# =============================================================================
# BENCHMARK
# =============================================================================

def _timed(fn, *args, **kwargs):
    start = time.perf_counter()
    result = fn(*args, **kwargs)
    return result, time.perf_counter() - start


def bench(path: Path, run: RunConfig, out_dir: Path) -> Dict[str, Any]:
    """Tiempos por etapa y comparación de la búsqueda restringida frente a la completa."""
    dataset, t_load = _timed(load_dataset, path)
    seg = resolve_segmentation(dataset, run)
    with stage('train'):
        model, t_train = _timed(
            train, dataset.train, loss_config(run), seg,
            depth=run.depth, hidden_dim=run.hidden_dim, kernel_size=run.kernel_size,
        )
    with stage('detect'):
        (_, region, _), t_detect = _timed(
            detect_window, dataset.train, dataset.test, model,
            z=run.z, probe_stride=run.probe_stride, pad=run.pad,
        )

    test_values = dataset.test.values
    pad = region.pad
    with stage('discord'):
        l_max = min(run.bench_l_max, region.length // 2)
        if l_max < run.l_min:
            raise SegmentTooShortError(f"región de {region.length} puntos demasiado corta para l_min={run.l_min}")
        local, t_constrained = _timed(merlin, test_values[region.begin:region.end], run.l_min, l_max, run.l_step)
        _, t_full = _timed(merlin, test_values, run.l_min, l_max, run.l_step)
    with stage('score'):
        _, t_score = _timed(score, len(test_values), region.window, translate(local, region.begin),
                            rule=run.threshold_rule, q=run.percentile)

    result = {
        'dataset': dataset.name,
        'n_test': len(test_values),
        'window_len': seg.window_len,
        'pad': pad,
        'search_ratio': len(test_values) / (seg.window_len + 2 * pad),
        'l_range': [run.l_min, l_max],
        'timings': {
            'load': t_load,
            'train': t_train,
            'detect': t_detect,
            'discord_constrained': t_constrained,
            'discord_full': t_full,
            'score': t_score,
        },
        'speedup': t_full / t_constrained if t_constrained > 0 else None,
    }
    with stage('artifacts'):
        artifacts.write_json(Path(out_dir) / 'bench.json', result)
    return result
