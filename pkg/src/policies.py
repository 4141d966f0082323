"""Configuración de ejecución y manifiesto de reproducibilidad.

Este módulo define las reglas de cada ejecución del detector:
- RunConfig: todos los parámetros ajustables, en un único registro plano
- Precedencia: flags de CLI > fichero --config > settings.yaml > defaults
- RunManifest: semilla + configuración + hash del dataset + pérdidas por época

Un manifiesto basta para repetir una ejecución de forma exacta.
"""

from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from . import config
from .data.validator import ValidationResult
from .errors import ConfigError
from .features.tri_features import DOMAINS


# =============================================================================
# CONFIGURACIÓN DE EJECUCIÓN
# =============================================================================

# Campo de RunConfig -> clave de settings.yaml
SETTINGS_KEYS = {
    'window_len': 'series.window_len',
    'period': 'series.period',
    'window_factor': 'series.window_factor',
    'stride_fraction': 'series.stride_fraction',
    'depth': 'encoder.depth',
    'hidden_dim': 'encoder.hidden_dim',
    'kernel_size': 'encoder.kernel_size',
    'domains': 'encoder.domains',
    'alpha': 'training.alpha',
    'batch_size': 'training.batch_size',
    'epochs': 'training.epochs',
    'lr': 'training.lr',
    'val_fraction': 'training.val_fraction',
    'seed': 'training.seed',
    'z': 'detection.z',
    'probe_stride': 'detection.probe_stride',
    'pad': 'detection.pad',
    'l_min': 'discord.l_min',
    'l_max': 'discord.l_max',
    'l_step': 'discord.l_step',
    'threshold_rule': 'scoring.rule',
    'percentile': 'scoring.percentile',
    'bench_l_max': 'bench.l_max',
    'jobs': 'batch.jobs',
}


@dataclass
class RunConfig:
    """Parámetros de una ejecución (None = derivado en tiempo de ejecución)."""

    # Segmentación
    window_len: Optional[int] = None
    period: Optional[int] = None
    window_factor: float = 2.5
    stride_fraction: float = 0.25

    # Codificador
    depth: int = 6
    hidden_dim: int = 32
    kernel_size: int = 3
    domains: List[str] = field(default_factory=lambda: list(DOMAINS))

    # Entrenamiento
    alpha: float = 0.4
    batch_size: int = 8
    epochs: int = 20
    lr: float = 0.001
    val_fraction: float = 0.10
    seed: int = 0

    # Detección
    z: int = 1
    probe_stride: Optional[int] = None
    pad: Optional[int] = None

    # Discordias
    l_min: int = 3
    l_max: Optional[int] = None
    l_step: Optional[int] = None

    # Puntuación
    threshold_rule: str = 'mean'
    percentile: float = 90.0

    # Benchmark y lotes
    bench_l_max: int = 32
    jobs: int = 1

    @classmethod
    def from_settings(cls) -> 'RunConfig':
        """Valores de settings.yaml sobre los defaults del dataclass."""
        return cls().merged({name: config.get(key) for name, key in SETTINGS_KEYS.items()})

    @classmethod
    def load(
        cls,
        path: Optional[Path] = None,
        overrides: Optional[Dict[str, Any]] = None,
    ) -> 'RunConfig':
        """Resuelve la configuración con la precedencia flags > fichero > settings."""
        run = cls.from_settings()
        if path is not None:
            run = run.merged(read_config_file(path))
        if overrides:
            run = run.merged(overrides)
        return run

    def merged(self, values: Dict[str, Any]) -> 'RunConfig':
        """Copia con los valores no nulos de `values` aplicados."""
        known = {f.name for f in fields(self)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ConfigError(f"claves de configuración desconocidas: {', '.join(unknown)}")
        data = asdict(self)
        data.update({k: v for k, v in values.items() if v is not None})
        if isinstance(data['domains'], str):
            data['domains'] = parse_domains(data['domains'])
        else:
            data['domains'] = list(data['domains'])
        return RunConfig(**data)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def parse_domains(text: str) -> List[str]:
    """'temporal,frequency' -> ['temporal', 'frequency']."""
    return [part.strip() for part in text.split(',') if part.strip()]


def read_config_file(path: Path) -> Dict[str, Any]:
    """Lee un fichero de ejecución YAML: plano o con las secciones de settings.yaml."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"no existe el fichero de configuración {path}")
    with open(path, 'r', encoding='utf-8') as f:
        raw = yaml.safe_load(f) or {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path.name}: se esperaba un mapa clave: valor")

    by_setting = {key: name for name, key in SETTINGS_KEYS.items()}
    flat: Dict[str, Any] = {}
    for key, value in raw.items():
        if isinstance(value, dict):
            for sub, sub_value in value.items():
                dotted = f"{key}.{sub}"
                if dotted not in by_setting:
                    raise ConfigError(f"{path.name}: clave desconocida '{dotted}'")
                flat[by_setting[dotted]] = sub_value
        else:
            flat[key] = value
    return flat


# =============================================================================
# VALIDACIÓN
# =============================================================================

def validate_run_config(run: RunConfig) -> ValidationResult:
    """Comprueba que cada parámetro está en el dominio de su módulo."""
    issues: List[str] = []

    if run.window_len is not None and run.window_len < 4:
        issues.append(f"window_len={run.window_len} < 4")
    if run.period is not None and run.period < 2:
        issues.append(f"period={run.period} < 2")
    if run.window_factor <= 0:
        issues.append(f"window_factor={run.window_factor} debe ser > 0")
    if not 0 < run.stride_fraction <= 1:
        issues.append(f"stride_fraction={run.stride_fraction} fuera de (0, 1]")

    if run.depth < 1:
        issues.append(f"depth={run.depth} < 1")
    if run.hidden_dim < 1:
        issues.append(f"hidden_dim={run.hidden_dim} < 1")
    if run.kernel_size < 1 or run.kernel_size % 2 == 0:
        issues.append(f"kernel_size={run.kernel_size} debe ser impar")
    unknown = [d for d in run.domains if d not in DOMAINS]
    if not run.domains or unknown:
        issues.append(f"domains={run.domains} (válidos: {', '.join(DOMAINS)})")
    elif len(set(run.domains)) != len(run.domains):
        issues.append(f"domains={run.domains} con repetidos")

    if not 0 <= run.alpha <= 1:
        issues.append(f"alpha={run.alpha} fuera de [0, 1]")
    if run.batch_size < 2:
        issues.append(f"batch_size={run.batch_size} < 2")
    if run.epochs < 0:
        issues.append(f"epochs={run.epochs} < 0")
    if run.lr <= 0:
        issues.append(f"lr={run.lr} debe ser > 0")
    if not 0 < run.val_fraction < 1:
        issues.append(f"val_fraction={run.val_fraction} fuera de (0, 1)")

    if run.z < 1:
        issues.append(f"z={run.z} < 1")
    if run.probe_stride is not None and run.probe_stride < 1:
        issues.append(f"probe_stride={run.probe_stride} < 1")
    if run.pad is not None and run.pad < 0:
        issues.append(f"pad={run.pad} < 0")

    if run.l_min < 3:
        issues.append(f"l_min={run.l_min} < 3")
    if run.l_max is not None and run.l_max < run.l_min:
        issues.append(f"l_max={run.l_max} < l_min={run.l_min}")
    if run.l_step is not None and run.l_step < 1:
        issues.append(f"l_step={run.l_step} < 1")

    if run.threshold_rule not in ('mean', 'percentile'):
        issues.append(f"threshold_rule='{run.threshold_rule}' (válidas: mean, percentile)")
    if not 0 <= run.percentile <= 100:
        issues.append(f"percentile={run.percentile} fuera de [0, 100]")
    if run.bench_l_max < run.l_min:
        issues.append(f"bench_l_max={run.bench_l_max} < l_min={run.l_min}")
    if run.jobs < 1:
        issues.append(f"jobs={run.jobs} < 1")

    return ValidationResult.from_issues(issues, ok_message="Configuración válida")


# =============================================================================
# MANIFIESTO DE EJECUCIÓN (reproducibilidad)
# =============================================================================

@dataclass
class RunManifest:
    """Todo lo necesario para repetir una ejecución.

    TODA ejecución del pipeline escribe este bloque como run_manifest.json.
    """

    dataset: str
    dataset_sha256: str
    seed: int
    config: Dict[str, Any]
    segmentation: Dict[str, int] = field(default_factory=dict)
    normalization: Dict[str, float] = field(default_factory=dict)
    encoder: Dict[str, Any] = field(default_factory=dict)
    epochs: List[Dict[str, Any]] = field(default_factory=list)
    version: str = ''

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def to_markdown(self) -> str:
        """Resumen legible del manifiesto."""
        lines = [
            "---",
            f"**Dataset**: {self.dataset}",
            f"- SHA-256: `{self.dataset_sha256[:16]}…`",
            f"- Semilla: {self.seed}",
        ]
        if self.segmentation:
            lines.append(
                f"- Ventana L={self.segmentation.get('window_len')}, "
                f"stride={self.segmentation.get('stride')}, periodo={self.segmentation.get('period')}"
            )
        if self.epochs:
            last = self.epochs[-1]
            lines.append(f"- Épocas: {len(self.epochs) - 1}, última val={last.get('val_loss'):.4f}")
        lines.append("---")
        return "\n".join(lines)
