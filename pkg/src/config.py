"""Configuración global del detector TriAD.

Valores por defecto de cada etapa (segmentación, codificador, entrenamiento,
detección, discordias, votos, evaluación) leídos de config/settings.yaml.
RunConfig (src/policies.py) parte de aquí y aplica encima --config y los flags.

El entorno se completa con un fichero .env opcional (python-dotenv) antes
de expandir las referencias ${VAR} o ${VAR:-defecto} del YAML.
"""

import logging
import os
import re
from pathlib import Path
from typing import Any, Optional

import yaml
from dotenv import load_dotenv


# Rutas base
PROJECT_ROOT = Path(__file__).parent.parent
CONFIG_PATH = PROJECT_ROOT / 'config' / 'settings.yaml'
DEFAULT_OUTPUT_PATH = PROJECT_ROOT / 'runs'

# Variable de entorno con el directorio de salida por defecto
OUTPUT_ENV_VAR = 'TRIAD_OUTPUT_DIR'

_ENV_PATTERN = re.compile(r'^\$\{([A-Za-z_][A-Za-z0-9_]*)(?::-(.*))?\}$')

# Configuración cargada
_config: dict = {}
_config_path: Optional[Path] = None


def load_config(config_path: Optional[Path] = None) -> dict:
    """Lee settings.yaml (u otro YAML con la misma forma) y lo deja activo.

    Un fichero inexistente equivale a configuración vacía: todos los
    `get()` devolverán su defecto.
    """
    global _config, _config_path

    load_dotenv(PROJECT_ROOT / '.env', override=False)

    path = Path(config_path) if config_path else CONFIG_PATH

    if path.exists():
        with open(path, 'r', encoding='utf-8') as f:
            _config = yaml.safe_load(f) or {}
    else:
        _config = {}
    _config_path = path

    _expand_env_vars(_config)

    return _config


def _expand_env_vars(d: dict) -> None:
    """Expande ${VAR} y ${VAR:-defecto} en los valores de texto."""
    for key, value in d.items():
        if isinstance(value, dict):
            _expand_env_vars(value)
        elif isinstance(value, str):
            match = _ENV_PATTERN.match(value.strip())
            if match:
                env_var, fallback = match.groups()
                d[key] = os.environ.get(env_var) or fallback or None


def get(key: str, default: Any = None) -> Any:
    """Valor por ruta con puntos; `default` si falta o es null.

    Example:
        >>> get('training.batch_size')
        8
        >>> get('encoder.depth')
        6
    """
    if not _config and _config_path is None:
        load_config()

    value: Any = _config
    for k in key.split('.'):
        if isinstance(value, dict) and k in value:
            value = value[k]
        else:
            return default

    return default if value is None else value


def output_dir() -> Path:
    """Directorio de salida por defecto.

    Orden: variable de entorno TRIAD_OUTPUT_DIR, `output.dir` del YAML,
    y por último ./runs en la raíz del proyecto.
    """
    env_value = os.environ.get(OUTPUT_ENV_VAR)
    if env_value:
        return Path(env_value)
    configured = get('output.dir')
    if configured:
        return Path(configured)
    return DEFAULT_OUTPUT_PATH


# settings.yaml queda cargado al importar
load_config()


# =============================================================================
# Logging
# =============================================================================

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(level: Optional[str] = None) -> logging.Logger:
    """Configura y devuelve el logger principal.

    Es idempotente: volver a llamarla sólo cambia el nivel.
    """
    log_level = (level or get('logging.level', 'INFO')).upper()
    log_file = get('logging.file')

    logger = logging.getLogger('triad')
    logger.setLevel(getattr(logging, log_level, logging.INFO))
    logger.propagate = False

    if logger.handlers:
        return logger

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(console_handler)

    if log_file:
        log_path = Path(log_file)
        if not log_path.is_absolute():
            log_path = PROJECT_ROOT / log_path
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_path)
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(file_handler)

    return logger


def get_logger(name: str) -> logging.Logger:
    """Logger hijo de 'triad' para un módulo (ej: 'triad.discord')."""
    return logging.getLogger(f'triad.{name}')


logger = setup_logging()
