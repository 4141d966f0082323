"""Mensajes de la CLI en varios idiomas.

Uso:
    from src.i18n import t, set_language

    set_language('en')
    print(t('train.done', path='runs/model.npz'))  # "Model saved to runs/model.npz"

Las claves que faltan en el idioma activo se buscan en español; si tampoco
existen, se devuelve la propia clave.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional

_I18N_DIR = Path(__file__).parent
DEFAULT_LANGUAGE = 'es'

_current_language: str = DEFAULT_LANGUAGE
_catalogs: Dict[str, dict] = {}


def _catalog(lang: str) -> dict:
    """Catálogo de un idioma (cacheado); vacío si no existe."""
    if lang not in _catalogs:
        file_path = _I18N_DIR / f'{lang}.json'
        if not file_path.exists():
            return {}
        with open(file_path, 'r', encoding='utf-8') as f:
            _catalogs[lang] = json.load(f)
    return _catalogs[lang]


def set_language(lang: str) -> bool:
    """Activa un idioma. Devuelve False si no hay catálogo para él."""
    global _current_language
    if not _catalog(lang):
        return False
    _current_language = lang
    return True


def get_available_languages() -> List[str]:
    return sorted(f.stem for f in _I18N_DIR.glob('*.json'))


def _lookup(catalog: dict, key: str) -> Optional[str]:
    node: Any = catalog
    for part in key.split('.'):
        if not isinstance(node, dict) or part not in node:
            return None
        node = node[part]
    return node if isinstance(node, str) else None


def t(key: str, **kwargs: Any) -> str:
    """Texto traducido para `key` (notación de puntos) con variables sustituidas.

    Example:
        >>> t('detect.window', start=100, end=225)
        'Ventana elegida: [100, 225)'
    """
    value = _lookup(_catalog(_current_language), key)
    if value is None and _current_language != DEFAULT_LANGUAGE:
        value = _lookup(_catalog(DEFAULT_LANGUAGE), key)
    if value is None:
        return key
    if kwargs:
        try:
            value = value.format(**kwargs)
        except (KeyError, ValueError):
            pass
    return value
