"""Checkpoint de parámetros en `.npz` versionado.

Contenido del fichero:
    __format__   -> versión del formato (entero)
    __config__   -> eco de configuración serializado en JSON
    <clave>      -> un array por parámetro ('temporal.block0.w1', 'head.w2', ...)
"""

import json
from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple, Union

import numpy as np

from ..config import get_logger
from ..errors import CheckpointError

logger = get_logger('checkpoint')

FORMAT_VERSION = 1
_RESERVED = ('__format__', '__config__')

PathLike = Union[str, Path]


def save_checkpoint(path: PathLike, arrays: Mapping[str, np.ndarray], config: dict) -> Path:
    """Escribe arrays + eco de configuración. Devuelve la ruta final."""
    path = Path(path)
    if path.suffix != '.npz':
        path = path.with_suffix('.npz')
    for key in arrays:
        if key in _RESERVED:
            raise CheckpointError(f"clave reservada '{key}'")
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {k: np.asarray(v, dtype=np.float64) for k, v in arrays.items()}
    np.savez(
        path,
        __format__=np.array(FORMAT_VERSION),
        __config__=np.array(json.dumps(config, sort_keys=True)),
        **payload,
    )
    logger.debug(f"Checkpoint guardado: {path} ({len(payload)} arrays)")
    return path


def load_checkpoint(
    path: PathLike,
    expected_shapes: Optional[Mapping[str, Tuple[int, ...]]] = None,
) -> Tuple[Dict[str, np.ndarray], dict]:
    """Lee un checkpoint y valida versión y, si se dan, las formas esperadas."""
    path = Path(path)
    if not path.exists():
        raise CheckpointError(f"no existe el checkpoint {path}")
    try:
        with np.load(path, allow_pickle=False) as data:
            files = set(data.files)
            if '__format__' not in files or '__config__' not in files:
                raise CheckpointError(f"{path.name}: faltan las claves de formato")
            version = int(data['__format__'])
            config = json.loads(str(data['__config__']))
            arrays = {k: data[k].copy() for k in data.files if k not in _RESERVED}
    except CheckpointError:
        raise
    except (OSError, ValueError) as e:
        raise CheckpointError(f"{path.name}: no se pudo leer ({e})")

    if version != FORMAT_VERSION:
        raise CheckpointError(f"{path.name}: versión {version} no soportada (esperada {FORMAT_VERSION})")

    if expected_shapes is not None:
        missing = sorted(set(expected_shapes) - set(arrays))
        if missing:
            raise CheckpointError(f"{path.name}: faltan parámetros {missing[:5]}")
        for key, shape in expected_shapes.items():
            if tuple(arrays[key].shape) != tuple(shape):
                raise CheckpointError(f"{path.name}: '{key}' tiene forma {arrays[key].shape}, se esperaba {tuple(shape)}")
    for key, value in arrays.items():
        if not np.all(np.isfinite(value)):
            raise CheckpointError(f"{path.name}: '{key}' contiene valores no finitos")
    return arrays, config
