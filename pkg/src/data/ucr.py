"""Lectura y escritura de ficheros en la convención del archivo UCR.

Nombre: <id>_..._<train_end>_<anomaly_begin>_<anomaly_end>.txt
Cuerpo: números decimales separados por espacios o saltos de línea.
"""

import hashlib
import re
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np

from ..config import get_logger
from ..errors import MetadataParseError, ParseError
from .series import DatasetMeta, TimeSeries

logger = get_logger('ucr')

PathLike = Union[str, Path]

_INT_TOKEN = re.compile(r'^\d+$')


def parse_ucr_name(path: PathLike) -> Tuple[str, DatasetMeta]:
    """Extrae (nombre, metadatos) de los tres últimos enteros del nombre."""
    stem = Path(path).stem
    tokens = stem.split('_')
    tail = tokens[-3:]
    if len(tokens) < 4 or not all(_INT_TOKEN.match(t) for t in tail):
        raise MetadataParseError(
            f"'{Path(path).name}' no termina en _<train_end>_<anomaly_begin>_<anomaly_end>"
        )
    train_end, begin, end = (int(t) for t in tail)
    return '_'.join(tokens[:-3]), DatasetMeta(train_end, begin, end)


def load_ucr(path: PathLike) -> Tuple[TimeSeries, DatasetMeta]:
    """Carga un dataset UCR y sus metadatos.

    Args:
        path: Ruta al fichero .txt

    Returns:
        Tupla (TimeSeries, DatasetMeta).

    Raises:
        MetadataParseError: nombre sin los tres enteros finales.
        ParseError: bytes no UTF-8, token no numérico o no finito (con número de línea).
    """
    path = Path(path)
    name, meta = parse_ucr_name(path)

    values: List[float] = []
    with open(path, 'rb') as f:
        for line_no, raw in enumerate(f, start=1):
            try:
                line = raw.decode('utf-8')
            except UnicodeDecodeError:
                raise ParseError(f"bytes no UTF-8 en {path.name}", line=line_no) from None
            for token in line.split():
                try:
                    value = float(token)
                except ValueError:
                    raise ParseError(f"token no numérico '{token}' en {path.name}", line=line_no) from None
                if not np.isfinite(value):
                    raise ParseError(f"valor no finito '{token}' en {path.name}", line=line_no)
                values.append(value)

    ts = TimeSeries(np.asarray(values, dtype=np.float64), name=name)
    logger.debug(f"Cargado {path.name}: N={len(ts)}, meta={meta}")
    return ts, meta


def write_ucr(values: Sequence[float], meta: DatasetMeta, directory: PathLike, name: str) -> Path:
    """Escribe un fichero UCR con formato fijo (bytes deterministas)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{name}_{meta.train_end}_{meta.anomaly_begin}_{meta.anomaly_end}.txt"
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.writelines(f"{v:.6f}\n" for v in np.asarray(values, dtype=np.float64))
    return path


def load_manifest(path: PathLike) -> List[Path]:
    """Lee un manifiesto: una ruta por línea; vacías y '#' se ignoran.

    Las rutas relativas se resuelven respecto al directorio del manifiesto.
    """
    path = Path(path)
    entries: List[Path] = []
    with open(path, 'r', encoding='utf-8') as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            entry = Path(line)
            entries.append(entry if entry.is_absolute() else (path.parent / entry))
    return entries


def write_manifest(paths: Sequence[PathLike], path: PathLike) -> Path:
    """Escribe un manifiesto con rutas relativas al propio fichero cuando es posible."""
    path = Path(path)
    lines = []
    for p in paths:
        p = Path(p)
        try:
            lines.append(str(p.resolve().relative_to(path.parent.resolve())))
        except ValueError:
            lines.append(str(p))
    path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
    return path


def file_sha256(path: PathLike) -> str:
    """Hash del fichero, para el manifiesto de ejecución."""
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 16), b''):
            digest.update(chunk)
    return digest.hexdigest()
