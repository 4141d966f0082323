"""TriAD Detector - CLI Principal.

Uso:
    python -m src.main synth seasonal --out data/          # Un dataset sintético
    python -m src.main synth --suite --out data/suite      # Suite fija de 12 datasets
    python -m src.main train data/X.txt                    # Entrenar y guardar model.npz
    python -m src.main detect data/X.txt --model runs/X/model.npz
    python -m src.main eval data/X.txt --run-dir runs/X
    python -m src.main pipeline data/X.txt                 # Todo de una vez
    python -m src.main pipeline --manifest data/suite/manifest.txt --jobs 4 --seeds 5
    python -m src.main bench data/X.txt

Opciones globales (antes del comando): --config, --seed, --lang y los overrides
de cada módulo (--alpha, --epochs, --pad, --l-max, ...).
"""

from pathlib import Path
from typing import List, Optional

import typer
from rich.console import Console
from rich.markdown import Markdown
from rich.markup import escape
from rich.panel import Panel
from rich.table import Table

from . import __version__
from .config import output_dir, setup_logging
from .data.synth import ANOMALY_KINDS, synth as synth_dataset, synth_suite
from .data.ucr import load_manifest
from .data.validator import validate_paths
from .errors import ConfigError, TriADError
from .i18n import get_available_languages, set_language, t
from .pipeline import artifacts
from .pipeline.runner import (
    bench as run_bench,
    detect_stage,
    evaluate_stage,
    load_dataset,
    run_batch,
    run_pipeline,
    stage,
    train_stage,
)
from .policies import RunConfig, RunManifest, validate_run_config
from .training.trainer import TrainedModel

# CLI app
app = typer.Typer(
    name="triad",
    help="Detección de anomalías tri-dominio en series temporales",
    add_completion=False,
)

# Console para rich output
console = Console()

EXIT_STAGE_FAILURE = 1
EXIT_INVALID_CONFIG = 2


def _run(ctx: typer.Context) -> RunConfig:
    return ctx.obj['run']


def _fail(error: TriADError) -> None:
    """Imprime el error con su etiqueta de etapa y sale."""
    console.print(f"[red]❌ {escape(str(error))}[/red]")
    code = EXIT_INVALID_CONFIG if isinstance(error, ConfigError) and error.stage in ('config', 'cli') else EXIT_STAGE_FAILURE
    raise typer.Exit(code)


def _out_dir(out: Optional[Path], name: str) -> Path:
    return out if out is not None else output_dir() / name


@app.callback()
def main_options(
    ctx: typer.Context,
    config_file: Optional[Path] = typer.Option(None, "--config", "-c", help="Fichero YAML de ejecución"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Semilla"),
    lang: str = typer.Option("es", "--lang", "-l", help="Idioma (es/en)"),
    log_level: Optional[str] = typer.Option(None, "--log-level", help="DEBUG, INFO, WARNING, ERROR"),
    window_len: Optional[int] = typer.Option(None, "--window-len", help="L fija (si no, 2.5·periodo)"),
    period: Optional[int] = typer.Option(None, "--period", help="Periodo fijo (si no, DFT)"),
    alpha: Optional[float] = typer.Option(None, "--alpha", help="Peso de ℓ_inter"),
    batch_size: Optional[int] = typer.Option(None, "--batch-size", help="Tamaño de lote B"),
    epochs: Optional[int] = typer.Option(None, "--epochs", help="Épocas"),
    lr: Optional[float] = typer.Option(None, "--lr", help="Tasa de aprendizaje"),
    depth: Optional[int] = typer.Option(None, "--depth", help="Bloques residuales"),
    hidden_dim: Optional[int] = typer.Option(None, "--hidden-dim", help="Dimensión oculta h_d"),
    domains: Optional[str] = typer.Option(None, "--domains", help="Dominios a entrenar, separados por comas"),
    z: Optional[int] = typer.Option(None, "--z", help="Ventanas nominadas por dominio"),
    probe_stride: Optional[int] = typer.Option(None, "--probe-stride", help="Stride de sondeo de select_single"),
    pad: Optional[int] = typer.Option(None, "--pad", help="Padding de la región de búsqueda"),
    l_min: Optional[int] = typer.Option(None, "--l-min", help="Longitud mínima de discordia"),
    l_max: Optional[int] = typer.Option(None, "--l-max", help="Longitud máxima de discordia"),
    l_step: Optional[int] = typer.Option(None, "--l-step", help="Paso fijo de longitudes"),
    threshold_rule: Optional[str] = typer.Option(None, "--threshold-rule", help="mean o percentile"),
    percentile: Optional[float] = typer.Option(None, "--percentile", help="q para la regla percentile"),
):
    """Resuelve la configuración: flags > --config > settings.yaml > defaults."""
    if not set_language(lang):
        languages = ", ".join(get_available_languages())
        console.print(f"[red]❌ {t('config.unknown_language', lang=escape(lang), languages=languages)}[/red]")
        raise typer.Exit(EXIT_INVALID_CONFIG)
    setup_logging(log_level)
    overrides = {
        'seed': seed,
        'window_len': window_len,
        'period': period,
        'alpha': alpha,
        'batch_size': batch_size,
        'epochs': epochs,
        'lr': lr,
        'depth': depth,
        'hidden_dim': hidden_dim,
        'domains': domains,
        'z': z,
        'probe_stride': probe_stride,
        'pad': pad,
        'l_min': l_min,
        'l_max': l_max,
        'l_step': l_step,
        'threshold_rule': threshold_rule,
        'percentile': percentile,
    }
    try:
        run = RunConfig.load(config_file, overrides)
    except ConfigError as e:
        console.print(f"[red]❌ {t('config.invalid', message=escape(str(e)))}[/red]")
        raise typer.Exit(EXIT_INVALID_CONFIG)
    result = validate_run_config(run)
    if not result.is_valid:
        console.print(f"[red]❌ {t('config.invalid', message=escape(result.message))}[/red]")
        raise typer.Exit(EXIT_INVALID_CONFIG)
    if config_file is not None:
        console.print(f"[dim]{t('config.loaded', path=config_file)}[/dim]")
    ctx.obj = {'run': run}


# =============================================================================
# SYNTH
# =============================================================================

@app.command()
def synth(
    ctx: typer.Context,
    kind: Optional[str] = typer.Argument(None, help=f"Tipo: {', '.join(ANOMALY_KINDS)}"),
    out: Path = typer.Option(Path("data"), "--out", "-o", help="Directorio de salida"),
    suite: bool = typer.Option(False, "--suite", help="Suite fija de 12 datasets"),
    n_train: int = typer.Option(4000, "--n-train"),
    n_test: int = typer.Option(3000, "--n-test"),
    length: int = typer.Option(100, "--length", help="Longitud de la anomalía"),
    offset: Optional[int] = typer.Option(None, "--offset", help="Inicio de la anomalía en el test"),
    synth_period: int = typer.Option(50, "--synth-period", help="Periodo de la sinusoide base"),
    magnitude: float = typer.Option(3.0, "--magnitude"),
    index: int = typer.Option(1, "--index", help="Prefijo numérico del fichero"),
):
    """Genera datasets sintéticos en convención UCR."""
    run = _run(ctx)
    try:
        if suite:
            paths, manifest = synth_suite(out, seed=run.seed, period=synth_period)
            console.print(f"[green]✅ {t('synth.suite_written', count=len(paths), manifest=manifest)}[/green]")
            return
        if kind is None:
            raise ConfigError(f"indica un tipo ({', '.join(ANOMALY_KINDS)}) o --suite", stage='cli')
        path = synth_dataset(
            kind,
            out,
            n_train=n_train,
            n_test=n_test,
            anomaly_length=length,
            anomaly_offset=offset,
            period=synth_period,
            magnitude=magnitude,
            seed=run.seed,
            index=index,
        )
        console.print(f"[green]✅ {t('synth.written', path=path)}[/green]")
    except TriADError as e:
        _fail(e)


# =============================================================================
# TRAIN / DETECT / EVAL
# =============================================================================

def _print_history(model: TrainedModel) -> None:
    table = Table(title=t('train.epochs_title'))
    table.add_column(t('train.epoch'), style="cyan", justify="right")
    table.add_column(t('train.train_loss'), justify="right")
    table.add_column(t('train.val_loss'), justify="right")
    best = model.best_epoch
    for rec in model.history:
        train_loss = "—" if rec.train_loss is None else f"{rec.train_loss:.4f}"
        style = "bold green" if rec.epoch == best else None
        table.add_row(str(rec.epoch), train_loss, f"{rec.val_loss:.4f}", style=style)
    console.print(table)


def _print_report(report: dict) -> None:
    table = Table(title=t('eval.title', dataset=report['dataset']))
    table.add_column(t('eval.metric'), style="cyan")
    table.add_column(t('eval.value'), justify="right")
    for key in artifacts.METRIC_KEYS:
        table.add_row(key, f"{report['metrics'][key]:.4f}")
    for key in ('tri_window_hit', 'single_window_hit', 'margin_hit'):
        table.add_row(key, "✅" if report['detection'][key] else "❌")
    console.print(table)
    if report['scoring']['exception_fired']:
        console.print(f"[yellow]{t('detect.exception')}[/yellow]")


@app.command()
def train(
    ctx: typer.Context,
    dataset: Path = typer.Argument(..., help="Fichero UCR"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Directorio de la ejecución"),
):
    """Entrena los codificadores y guarda model.npz + run_manifest.json."""
    run = _run(ctx)
    try:
        data = load_dataset(dataset)
        run_dir = _out_dir(out, data.name)
        console.print(f"[dim]{t('train.start', dataset=data.name)}[/dim]")
        model = train_stage(data, run, run_dir)
        _print_history(model)
        manifest = RunManifest(**artifacts.read_json(run_dir / artifacts.RUN_MANIFEST))
        console.print(Markdown(manifest.to_markdown()))
        console.print(f"[green]✅ {t('train.done', path=run_dir / artifacts.MODEL_FILE)}[/green]")
    except TriADError as e:
        _fail(e)


@app.command()
def detect(
    ctx: typer.Context,
    dataset: Path = typer.Argument(..., help="Fichero UCR"),
    model_path: Path = typer.Option(..., "--model", "-m", help="Checkpoint model.npz"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Directorio de la ejecución"),
):
    """Ventana, discordias y votos con un modelo ya entrenado."""
    run = _run(ctx)
    try:
        data = load_dataset(dataset)
        with stage('nn'):
            model = TrainedModel.load(model_path)
        run_dir = _out_dir(out, data.name)
        console.print(f"[dim]{t('detect.start', dataset=data.name)}[/dim]")
        outcome = detect_stage(data, model, run, run_dir)
        console.print(t('detect.window', start=outcome.window[0], end=outcome.window[1]))
        console.print(t('detect.region', begin=outcome.region[0], end=outcome.region[1]))
        console.print(f"[green]✅ {t('pipeline.done', path=run_dir)}[/green]")
    except TriADError as e:
        _fail(e)


@app.command(name="eval")
def eval_command(
    dataset: Path = typer.Argument(..., help="Fichero UCR (verdad de terreno)"),
    run_dir: Path = typer.Option(..., "--run-dir", "-r", help="Directorio con scores.csv de detect"),
    plot: bool = typer.Option(True, "--plot/--no-plot", help="Escribir plot.svg"),
):
    """Métricas (PW, PA, PA%K, afiliación) y report.json."""
    try:
        data = load_dataset(dataset)
        report = evaluate_stage(data, run_dir, plot=plot)
        _print_report(report)
    except TriADError as e:
        _fail(e)


# =============================================================================
# PIPELINE / BENCH
# =============================================================================

def _print_summary(summary: dict) -> None:
    table = Table(title=t('pipeline.summary_title', runs=summary['runs'], failed=summary['failed']))
    table.add_column(t('eval.metric'), style="cyan")
    table.add_column(t('eval.value'), justify="right")
    for key, mean in summary['mean'].items():
        table.add_row(key, f"{mean:.3f} ± {summary['std'][key]:.3f}")
    console.print(table)


@app.command()
def pipeline(
    ctx: typer.Context,
    dataset: Optional[Path] = typer.Argument(None, help="Fichero UCR"),
    manifest: Optional[Path] = typer.Option(None, "--manifest", help="Manifiesto: una ruta por línea"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Directorio de salida"),
    seeds: int = typer.Option(1, "--seeds", help="Repeticiones con semillas consecutivas"),
    jobs: Optional[int] = typer.Option(None, "--jobs", "-j", help="Workers en paralelo"),
    plot: bool = typer.Option(True, "--plot/--no-plot", help="Escribir plot.svg"),
):
    """train → detect → eval, para un dataset o un manifiesto."""
    run = _run(ctx)
    try:
        if seeds < 1 or (jobs is not None and jobs < 1):
            raise ConfigError(f"--seeds={seeds} y --jobs={jobs} deben ser ≥ 1", stage='cli')
        if manifest is None and dataset is None:
            raise ConfigError(t('cli.no_dataset'), stage='cli')
        source = manifest if manifest is not None else dataset
        if not source.exists():
            raise ConfigError(t('cli.not_found', path=source), stage='cli')
        paths: List[Path] = load_manifest(manifest) if manifest is not None else [dataset]
        found = validate_paths(paths)
        if not found.is_valid:
            raise ConfigError(found.message, stage='cli')

        if manifest is None and seeds == 1:
            run_dir = _out_dir(out, dataset.stem)
            report = run_pipeline(dataset, run, run_dir, plot=plot)
            _print_report(report)
            console.print(f"[green]✅ {t('pipeline.done', path=run_dir)}[/green]")
            return

        batch_out = out if out is not None else output_dir()
        console.print(f"[dim]{t('pipeline.start', count=len(paths) * seeds)}[/dim]")
        frame = run_batch(paths, run, batch_out, seeds=seeds, jobs=jobs, plot=plot)
        for row in frame[frame['status'] != 'ok'].itertuples(index=False):
            console.print(f"[red]❌ {t('pipeline.failed', dataset=row.dataset, error=escape(str(row.error)))}[/red]")
        _print_summary(artifacts.read_json(batch_out / 'summary.json'))
        console.print(f"[green]✅ {t('pipeline.done', path=batch_out)}[/green]")
        if (frame['status'] != 'ok').all():
            raise typer.Exit(EXIT_STAGE_FAILURE)
    except TriADError as e:
        _fail(e)


@app.command()
def bench(
    ctx: typer.Context,
    dataset: Path = typer.Argument(..., help="Fichero UCR"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Directorio de salida"),
):
    """Tiempos por etapa y aceleración de la búsqueda restringida."""
    run = _run(ctx)
    try:
        run_dir = _out_dir(out, dataset.stem)
        result = run_bench(dataset, run, run_dir)
    except TriADError as e:
        _fail(e)
        return

    table = Table(title=t('bench.title', dataset=result['dataset']))
    table.add_column(t('bench.stage'), style="cyan")
    table.add_column(t('bench.seconds'), justify="right")
    for name, seconds in result['timings'].items():
        table.add_row(name, f"{seconds:.3f}")
    console.print(table)
    console.print(t('bench.ratio', ratio=result['search_ratio']))
    if result['speedup'] is not None:
        console.print(t('bench.speedup', speedup=result['speedup']))


@app.command()
def version():
    """Muestra la versión."""
    console.print(Panel(f"{t('app_name')} v{__version__}", border_style="blue"))


def main():
    """Punto de entrada."""
    app()


if __name__ == "__main__":
    main()
