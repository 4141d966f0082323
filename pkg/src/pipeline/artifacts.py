"""Escritura de artefactos de una ejecución y esquema del informe.

| Fichero               | Contenido                                        |
|-----------------------|--------------------------------------------------|
| run_manifest.json     | semilla, config, hash del dataset, pérdidas      |
| model.npz             | checkpoint de los codificadores                  |
| detection_trace.json  | desviaciones por dominio, candidatas, elegida    |
| hits.csv              | length, start, distance (coordenadas del test)   |
| scores.csv            | timestamp, votes, label                          |
| score_summary.json    | δ, regla, excepción                              |
| report.json           | métricas y aciertos de ventana                   |
| pak_curve.csv         | k, precision, recall, f1                         |
| plot.svg              | serie, votos, etiquetas y verdad                 |

Todo JSON se escribe con claves ordenadas y sin marcas de tiempo para que dos
ejecuciones idénticas produzcan bytes idénticos.
"""

import json
from pathlib import Path
from typing import Any, Dict, Sequence, Tuple

import numpy as np
import pandas as pd

from ..data.validator import ValidationResult
from ..detection.discord import DiscordHit
from ..errors import ParseError

REPORT_SCHEMA_VERSION = 1

RUN_MANIFEST = 'run_manifest.json'
MODEL_FILE = 'model.npz'
TRACE_FILE = 'detection_trace.json'
HITS_FILE = 'hits.csv'
SCORES_FILE = 'scores.csv'
SCORE_SUMMARY_FILE = 'score_summary.json'
REPORT_FILE = 'report.json'
PAK_CURVE_FILE = 'pak_curve.csv'
PLOT_FILE = 'plot.svg'


# =============================================================================
# ESCRITORES
# =============================================================================

def _plain(value: Any) -> Any:
    """Convierte tipos de numpy a tipos JSON nativos."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, Path):
        return str(value)
    return value


def write_json(path: Path, payload: Dict[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(json.dumps(_plain(payload), sort_keys=True, indent=2, ensure_ascii=False))
        f.write('\n')
    return path


def read_json(path: Path) -> Dict[str, Any]:
    with open(path, 'r', encoding='utf-8') as f:
        return json.load(f)


def hits_frame(hits: Sequence[DiscordHit]) -> pd.DataFrame:
    return pd.DataFrame(
        [{'length': h.length, 'start': h.start, 'distance': h.distance} for h in hits],
        columns=['length', 'start', 'distance'],
    )


def write_hits(path: Path, hits: Sequence[DiscordHit]) -> Path:
    hits_frame(hits).to_csv(path, index=False, float_format='%.12g')
    return Path(path)


def read_hits(path: Path) -> list:
    """Hits de un hits.csv (el vecino no se guarda y queda a −1)."""
    frame = pd.read_csv(path)
    missing = {'length', 'start', 'distance'} - set(frame.columns)
    if missing:
        raise ParseError(f"{Path(path).name}: faltan columnas {sorted(missing)}")
    return [
        DiscordHit(length=int(r.length), start=int(r.start), distance=float(r.distance), neighbor=-1)
        for r in frame.itertuples(index=False)
    ]


def write_scores(path: Path, votes: np.ndarray, labels: np.ndarray) -> Path:
    frame = pd.DataFrame({
        'timestamp': np.arange(len(votes), dtype=np.int64),
        'votes': np.asarray(votes, dtype=np.int64),
        'label': np.asarray(labels, dtype=np.int64),
    })
    frame.to_csv(path, index=False)
    return Path(path)


def read_scores(path: Path) -> Tuple[np.ndarray, np.ndarray]:
    """(votes, labels) de un scores.csv."""
    frame = pd.read_csv(path)
    missing = {'timestamp', 'votes', 'label'} - set(frame.columns)
    if missing:
        raise ParseError(f"{Path(path).name}: faltan columnas {sorted(missing)}")
    frame = frame.sort_values('timestamp')
    return frame['votes'].to_numpy(dtype=np.int64), frame['label'].to_numpy(dtype=np.int64)


def write_pak_curve(path: Path, curve: pd.DataFrame) -> Path:
    curve.to_csv(path, index=False, float_format='%.12g')
    return Path(path)


# =============================================================================
# ESQUEMA DEL INFORME
# =============================================================================

METRIC_KEYS = (
    'precision_pw', 'recall_pw', 'f1_pw', 'f1_pa',
    'pak_precision_auc', 'pak_recall_auc', 'pak_f1_auc',
    'aff_precision', 'aff_recall', 'aff_f1',
)

# sección -> {clave: tipos admitidos}
REPORT_SCHEMA = {
    'metrics': {**{k: (int, float) for k in METRIC_KEYS}, 'no_predictions': (bool,)},
    'detection': {
        'window_len': (int,),
        'candidates': (list,),
        'chosen': (int,),
        'region': (list,),
        'tri_window_hit': (bool,),
        'single_window_hit': (bool,),
        'margin_hit': (bool,),
    },
    'scoring': {
        'threshold': (int, float),
        'rule': (str,),
        'exception_fired': (bool,),
        'positives': (int,),
    },
    'discord': {
        'lengths': (int,),
        'l_min': (int,),
        'l_max': (int,),
        'hits_on_anomaly': (int,),
    },
}


def build_report(
    dataset: str,
    metrics: Dict[str, Any],
    detection: Dict[str, Any],
    scoring: Dict[str, Any],
    discord: Dict[str, Any],
) -> Dict[str, Any]:
    return _plain({
        'schema_version': REPORT_SCHEMA_VERSION,
        'dataset': dataset,
        'metrics': metrics,
        'detection': detection,
        'scoring': scoring,
        'discord': discord,
    })


def validate_report(report: Dict[str, Any]) -> ValidationResult:
    """Comprueba claves, tipos y rangos del informe frente a REPORT_SCHEMA."""
    issues = []
    if report.get('schema_version') != REPORT_SCHEMA_VERSION:
        issues.append(f"schema_version={report.get('schema_version')} (esperada {REPORT_SCHEMA_VERSION})")
    if not isinstance(report.get('dataset'), str):
        issues.append("falta 'dataset'")

    for section, keys in REPORT_SCHEMA.items():
        block = report.get(section)
        if not isinstance(block, dict):
            issues.append(f"falta la sección '{section}'")
            continue
        for key, types in keys.items():
            if key not in block:
                issues.append(f"{section}.{key}: falta")
                continue
            value = block[key]
            # bool es subclase de int: sólo se acepta donde se declara
            if isinstance(value, bool) and bool not in types:
                issues.append(f"{section}.{key}: tipo bool no admitido")
            elif not isinstance(value, types):
                issues.append(f"{section}.{key}: tipo {type(value).__name__} no admitido")

    metrics = report.get('metrics')
    if isinstance(metrics, dict):
        for key in METRIC_KEYS:
            value = metrics.get(key)
            if isinstance(value, (int, float)) and not isinstance(value, bool) and not 0.0 <= value <= 1.0:
                issues.append(f"metrics.{key}={value} fuera de [0, 1]")

    return ValidationResult.from_issues(issues, ok_message="Informe válido")
