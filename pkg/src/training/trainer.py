"""Bucle de entrenamiento contrastivo por dataset.

Pasos por época:
1. Remuestrear un aumento por ventana de entrenamiento
2. Barajar y recorrer lotes de B ventanas
3. Embeddings de originales y aumentadas en cada dominio entrenado
4. ℓ_total = α·ℓ_inter + (1−α)·ℓ_intra, backward y paso de Adam
5. Pérdida de validación sobre el último 10% contiguo de ventanas

Se devuelven los pesos de la época con menor pérdida de validación.
"""

from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import get, get_logger
from ..data.series import SegmentationConfig, TimeSeries, train_stats, windows_matrix, znormalize
from ..errors import ConfigError, InsufficientDataError
from ..features.augment import random_augment
from ..features.tri_features import DOMAIN_CHANNELS, DOMAINS, stack_features
from ..nn.checkpoint import load_checkpoint, save_checkpoint
from ..nn.layers import EncoderConfig, EncoderParams, init_encoder, init_head, encode, restore, snapshot
from ..nn.optim import Adam
from .losses import batch_loss

logger = get_logger('train')


# =============================================================================
# CONFIGURACIÓN Y RESULTADOS
# =============================================================================

@dataclass(frozen=True)
class LossConfig:
    """Hiperparámetros del entrenamiento contrastivo."""
    alpha: float = 0.4
    batch_size: int = 8
    epochs: int = 20
    lr: float = 1e-3
    val_fraction: float = 0.10
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha={self.alpha} fuera de [0, 1]", stage='train')
        if self.batch_size < 2:
            raise ConfigError(f"batch_size={self.batch_size} < 2", stage='train')
        if self.epochs < 0:
            raise ConfigError(f"epochs={self.epochs} < 0", stage='train')
        if self.lr <= 0:
            raise ConfigError(f"lr={self.lr} debe ser > 0", stage='train')
        if not 0.0 < self.val_fraction < 1.0:
            raise ConfigError(f"val_fraction={self.val_fraction} fuera de (0, 1)", stage='train')

    @classmethod
    def from_settings(cls, **overrides) -> 'LossConfig':
        values = {
            'alpha': get('training.alpha', 0.4),
            'batch_size': get('training.batch_size', 8),
            'epochs': get('training.epochs', 20),
            'lr': get('training.lr', 1e-3),
            'val_fraction': get('training.val_fraction', 0.10),
            'seed': get('training.seed', 0),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class EpochRecord:
    """Pérdidas medias de una época. La época 0 es el estado inicial."""
    epoch: int
    train_loss: Optional[float]
    val_loss: float


@dataclass
class TrainedModel:
    """Codificadores por dominio con cabeza compartida y ecos de configuración."""
    encoders: Dict[str, EncoderParams]
    seg: SegmentationConfig
    norm_mean: float
    norm_std: float
    loss_config: LossConfig
    history: List[EpochRecord] = field(default_factory=list)

    @property
    def domains(self) -> Tuple[str, ...]:
        return tuple(self.encoders)

    @property
    def best_epoch(self) -> int:
        if not self.history:
            return 0
        return min(self.history, key=lambda rec: (rec.val_loss, rec.epoch)).epoch

    def encoder_configs(self) -> Dict[str, dict]:
        return {d: enc.config.to_dict() for d, enc in self.encoders.items()}

    def normalize(self, values) -> np.ndarray:
        """Lleva valores crudos al espacio del entrenamiento."""
        ts = values if isinstance(values, TimeSeries) else TimeSeries(values)
        return znormalize(ts, self.norm_mean, self.norm_std).values

    def config_echo(self) -> dict:
        return {
            'domains': list(self.domains),
            'segmentation': self.seg.to_dict(),
            'normalization': {'mean': self.norm_mean, 'std': self.norm_std},
            'encoders': self.encoder_configs(),
            'training': self.loss_config.to_dict(),
            'init': 'uniform_fan_in',
            'activation': 'gelu_tanh',
            'history': [asdict(rec) for rec in self.history],
        }

    def save(self, path: Union[str, Path]) -> Path:
        return save_checkpoint(path, snapshot(self.encoders), self.config_echo())

    @classmethod
    def load(cls, path: Union[str, Path]) -> 'TrainedModel':
        """Reconstruye el modelo desde un checkpoint, validando formas."""
        _, config = load_checkpoint(path)
        try:
            seg = SegmentationConfig(**config['segmentation'])
            # el JSON guarda las claves ordenadas; el orden de dominios sale de la lista
            encoders = _build_encoders(
                {d: EncoderConfig(**config['encoders'][d]) for d in config['domains']},
                np.random.default_rng(0),
            )
        except (KeyError, TypeError) as e:
            raise ConfigError(f"eco de configuración incompleto en {Path(path).name}: {e}", stage='nn')
        expected = {k: v.shape for k, v in snapshot(encoders).items()}
        arrays, _ = load_checkpoint(path, expected_shapes=expected)
        restore(encoders, arrays)
        return cls(
            encoders=encoders,
            seg=seg,
            norm_mean=float(config['normalization']['mean']),
            norm_std=float(config['normalization']['std']),
            loss_config=LossConfig(**config['training']),
            history=[EpochRecord(**rec) for rec in config.get('history', [])],
        )


# =============================================================================
# UTILIDADES
# =============================================================================

def _build_encoders(configs: Dict[str, EncoderConfig], rng: np.random.Generator) -> Dict[str, EncoderParams]:
    hidden = {c.hidden_dim for c in configs.values()}
    if len(hidden) != 1:
        raise ConfigError(f"la cabeza compartida exige un único hidden_dim, hay {sorted(hidden)}", stage='train')
    head = init_head(hidden.pop(), rng)
    return {d: init_encoder(cfg, rng, head=head) for d, cfg in configs.items()}


def _parameters(encoders: Dict[str, EncoderParams]) -> list:
    params = []
    for enc in encoders.values():
        params.extend(enc.parameters(include_head=False))
    head = next(iter(encoders.values())).head
    params.extend(t for _, t in head.tensors())
    return params


def make_batches(indices: np.ndarray, batch_size: int) -> List[np.ndarray]:
    """Trocea en lotes de B; un último lote de tamaño 1 se une al anterior."""
    batches = [indices[i:i + batch_size] for i in range(0, len(indices), batch_size)]
    if len(batches) > 1 and len(batches[-1]) < 2:
        tail = batches.pop()
        batches[-1] = np.concatenate([batches[-1], tail])
    return batches


def resolve_domains(domains: Optional[Sequence[str]] = None) -> Tuple[str, ...]:
    """Subconjunto de dominios a entrenar, en el orden dado; None = los tres."""
    if domains is None:
        return tuple(DOMAINS)
    chosen = tuple(domains)
    unknown = [d for d in chosen if d not in DOMAINS]
    if not chosen or unknown:
        raise ConfigError(f"dominios no válidos: {list(chosen)} (válidos: {', '.join(DOMAINS)})", stage='train')
    if len(set(chosen)) != len(chosen):
        raise ConfigError(f"dominios repetidos: {list(chosen)}", stage='train')
    return chosen


def _domain_features(windows: np.ndarray, period: int, domains: Sequence[str]) -> Dict[str, np.ndarray]:
    return {d: stack_features(windows, d, period) for d in domains}


def _embed_pair(
    encoders: Dict[str, EncoderParams],
    orig: Dict[str, np.ndarray],
    aug: Dict[str, np.ndarray],
    idx: np.ndarray,
) -> Tuple[list, list]:
    """Originales y aumentadas del lote en una sola pasada por dominio."""
    r, r_aug = [], []
    n = len(idx)
    for d in encoders:
        both = encode(np.concatenate([orig[d][idx], aug[d][idx]]), encoders[d])
        r.append(both[:n])
        r_aug.append(both[n:])
    return r, r_aug


def _mean_loss(encoders, orig, aug, batches, alpha) -> float:
    total, count = 0.0, 0
    for idx in batches:
        _, _, loss = batch_loss(*_embed_pair(encoders, orig, aug, idx), alpha)
        total += loss.item() * len(idx)
        count += len(idx)
    return total / count


# =============================================================================
# ENTRENAMIENTO
# =============================================================================

def train(
    train_series: Union[TimeSeries, np.ndarray],
    cfg: LossConfig,
    seg: SegmentationConfig,
    depth: Optional[int] = None,
    hidden_dim: Optional[int] = None,
    kernel_size: Optional[int] = None,
    domains: Optional[Sequence[str]] = None,
) -> TrainedModel:
    """Entrena un codificador por dominio sobre el split de entrenamiento crudo.

    La serie se z-normaliza aquí con sus propios estadísticos, que quedan
    guardados en el modelo para normalizar el test. Con un único dominio no
    hay término inter-dominio y α se fija a 0.

    Raises:
        InsufficientDataError: Menos de 2B ventanas de entrenamiento.
    """
    domains = resolve_domains(domains)
    if len(domains) == 1 and cfg.alpha != 0.0:
        logger.warning(f"Un solo dominio ({domains[0]}): alpha={cfg.alpha} → 0")
        cfg = replace(cfg, alpha=0.0)
    ts = train_series if isinstance(train_series, TimeSeries) else TimeSeries(train_series)
    mean, std = train_stats(ts)
    values = znormalize(ts, mean, std).values
    windows, _ = windows_matrix(values, seg)
    n_windows = len(windows)
    if n_windows < 2 * cfg.batch_size:
        raise InsufficientDataError(
            f"{n_windows} ventanas de entrenamiento < 2B = {2 * cfg.batch_size}", stage='train'
        )
    n_val = max(2, int(np.floor(cfg.val_fraction * n_windows + 0.5)))
    fit_windows, val_windows = windows[:-n_val], windows[-n_val:]

    init_rng, aug_rng, shuffle_rng, val_rng = [
        np.random.default_rng(s) for s in np.random.SeedSequence(cfg.seed).spawn(4)
    ]
    configs = {
        d: EncoderConfig.from_settings(
            DOMAIN_CHANNELS[d], seg.window_len, depth=depth, hidden_dim=hidden_dim, kernel_size=kernel_size
        )
        for d in domains
    }
    encoders = _build_encoders(configs, init_rng)
    optimizer = Adam(_parameters(encoders), lr=cfg.lr)

    period = seg.period
    fit_feats = _domain_features(fit_windows, period, domains)
    val_feats = _domain_features(val_windows, period, domains)
    val_aug = np.stack([random_augment(w, val_rng)[0] for w in val_windows])
    val_aug_feats = _domain_features(val_aug, period, domains)
    val_batches = make_batches(np.arange(len(val_windows)), cfg.batch_size)

    logger.info(
        f"Entrenando: {len(fit_windows)} ventanas + {n_val} de validación, "
        f"L={seg.window_len}, B={cfg.batch_size}, épocas={cfg.epochs}, dominios={','.join(domains)}"
    )

    best_val = _mean_loss(encoders, val_feats, val_aug_feats, val_batches, cfg.alpha)
    best = snapshot(encoders)
    history = [EpochRecord(epoch=0, train_loss=None, val_loss=best_val)]
    logger.info(f"Época 0: val={best_val:.4f}")

    for epoch in range(1, cfg.epochs + 1):
        augmented = np.stack([random_augment(w, aug_rng)[0] for w in fit_windows])
        aug_feats = _domain_features(augmented, period, domains)
        order = shuffle_rng.permutation(len(fit_windows))

        running, seen = 0.0, 0
        for idx in make_batches(order, cfg.batch_size):
            if len(idx) < 2:
                continue
            optimizer.zero_grad()
            _, _, loss = batch_loss(*_embed_pair(encoders, fit_feats, aug_feats, idx), cfg.alpha)
            loss.backward()
            optimizer.step()
            running += loss.item() * len(idx)
            seen += len(idx)

        val_loss = _mean_loss(encoders, val_feats, val_aug_feats, val_batches, cfg.alpha)
        train_loss = running / max(seen, 1)
        history.append(EpochRecord(epoch=epoch, train_loss=train_loss, val_loss=val_loss))
        logger.info(f"Época {epoch}: train={train_loss:.4f} val={val_loss:.4f}")
        if val_loss < best_val:
            best_val = val_loss
            best = snapshot(encoders)

    restore(encoders, best)
    model = TrainedModel(
        encoders=encoders,
        seg=seg,
        norm_mean=mean,
        norm_std=std,
        loss_config=cfg,
        history=history,
    )
    logger.info(f"Mejor época: {model.best_epoch} (val={best_val:.4f})")
    return model


# =============================================================================
# INFERENCIA
# =============================================================================

def embed(model: TrainedModel, windows: np.ndarray, domain: str, batch_size: int = 64) -> np.ndarray:
    """Embeddings M×L de ventanas ya normalizadas para un dominio."""
    windows = np.atleast_2d(np.asarray(windows, dtype=np.float64))
    feats = stack_features(windows, domain, model.seg.period)
    out = [
        encode(feats[i:i + batch_size], model.encoders[domain]).data
        for i in range(0, len(feats), batch_size)
    ]
    return np.concatenate(out, axis=0)


def batch_losses(
    model: TrainedModel,
    windows: np.ndarray,
    augmented: np.ndarray,
) -> Tuple[float, float, float]:
    """(ℓ_intra, ℓ_inter, ℓ_total) de un lote con los pesos del modelo."""
    period = model.seg.period
    orig = _domain_features(windows, period, model.domains)
    aug = _domain_features(augmented, period, model.domains)
    idx = np.arange(len(windows))
    intra, inter, total = batch_loss(*_embed_pair(model.encoders, orig, aug, idx), model.loss_config.alpha)
    return intra.item(), inter.item(), total.item()


def windows_for(model: TrainedModel, values: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """Ventanas normalizadas M×L y sus inicios para una serie cruda."""
    return windows_matrix(model.normalize(values), model.seg)
