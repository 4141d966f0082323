"""Pérdidas contrastivas intra-dominio e inter-dominio.

Notación: r[d] es la matriz B×L de embeddings unitarios del dominio d para
las ventanas originales del lote, r_aug[d] la de sus versiones aumentadas.

    pos(i, d)        = Σ_{j≠i} exp(r[d][i]·r[d][j])
    neg_intra(i, d)  = Σ_{j}   exp(r[d][i]·r_aug[d][j])      (j = i incluido)
    neg_inter(i, d)  = Σ_{d'≠d} exp(r[d][i]·r[d'][i])
    ℓ = −log(pos / (pos + neg))

Las pérdidas de lote promedian sobre i y d.
"""

from typing import Sequence, Tuple, Union

import numpy as np

from ..errors import ConfigError
from ..nn.tensor import Tensor, as_tensor, exp, log, matmul, tsum

Embeddings = Sequence[Union[Tensor, np.ndarray]]


def _check_batch(r: Embeddings) -> int:
    if len(r) == 0:
        raise ConfigError("no hay embeddings", stage='train')
    batch = as_tensor(r[0]).shape[0]
    if batch < 2:
        raise ConfigError(f"B={batch} < 2: el término positivo necesita otra ventana del lote", stage='train')
    return batch


def _off_diagonal(batch: int) -> np.ndarray:
    return 1.0 - np.eye(batch)


def _positives(rd: Tensor) -> Tensor:
    """Vector B con Σ_{j≠i} exp(r_i·r_j)."""
    sim = matmul(rd, rd.T)
    return tsum(exp(sim) * _off_diagonal(rd.shape[0]), axis=1)


def _contrast(pos: Tensor, neg: Tensor) -> Tensor:
    return -log(pos / (pos + neg))


# =============================================================================
# PÉRDIDAS POR (i, d)
# =============================================================================

def intra_loss(r: Embeddings, r_aug: Embeddings, i: int, d: int) -> Tensor:
    """ℓ_intra para la muestra i del dominio d."""
    _check_batch(r)
    rd, ra = as_tensor(r[d]), as_tensor(r_aug[d])
    return _contrast(_positives(rd)[i], tsum(exp(matmul(rd, ra.T)), axis=1)[i])


def inter_loss(r: Embeddings, i: int, d: int) -> Tensor:
    """ℓ_inter para la muestra i del dominio d."""
    if len(r) < 2:
        raise ConfigError(f"ℓ_inter necesita ≥ 2 dominios, hay {len(r)}", stage='train')
    _check_batch(r)
    rd = as_tensor(r[d])
    neg = None
    for other in range(len(r)):
        if other == d:
            continue
        term = exp(tsum(rd[i] * as_tensor(r[other])[i]))
        neg = term if neg is None else neg + term
    return _contrast(_positives(rd)[i], neg)


def total_loss(intra, inter, alpha: float):
    """α·ℓ_inter + (1−α)·ℓ_intra."""
    if not 0.0 <= alpha <= 1.0:
        raise ConfigError(f"α={alpha} fuera de [0, 1]", stage='train')
    return inter * alpha + intra * (1.0 - alpha)


# =============================================================================
# PÉRDIDAS DE LOTE (media sobre i y d)
# =============================================================================

def intra_loss_mean(r: Embeddings, r_aug: Embeddings) -> Tensor:
    _check_batch(r)
    per_domain = []
    for rd, ra in zip(r, r_aug):
        rd, ra = as_tensor(rd), as_tensor(ra)
        neg = tsum(exp(matmul(rd, ra.T)), axis=1)
        per_domain.append(_contrast(_positives(rd), neg).mean())
    return _mean(per_domain)


def inter_loss_mean(r: Embeddings) -> Tensor:
    if len(r) < 2:
        raise ConfigError(f"ℓ_inter necesita ≥ 2 dominios, hay {len(r)}", stage='train')
    _check_batch(r)
    tensors = [as_tensor(x) for x in r]
    per_domain = []
    for d, rd in enumerate(tensors):
        neg = None
        for other, ro in enumerate(tensors):
            if other == d:
                continue
            term = exp(tsum(rd * ro, axis=1))
            neg = term if neg is None else neg + term
        per_domain.append(_contrast(_positives(rd), neg).mean())
    return _mean(per_domain)


def batch_loss(r: Embeddings, r_aug: Embeddings, alpha: float) -> Tuple[Tensor, Tensor, Tensor]:
    """(ℓ_intra, ℓ_inter, ℓ_total) medios del lote.

    Con un solo dominio ℓ_inter vale 0 y sólo se admite α = 0.
    """
    intra = intra_loss_mean(r, r_aug)
    if len(r) == 1:
        if alpha != 0.0:
            raise ConfigError(f"un solo dominio exige α = 0 (α={alpha})", stage='train')
        return intra, Tensor(0.0), intra
    inter = inter_loss_mean(r)
    return intra, inter, total_loss(intra, inter, alpha)


def loss_upper_bound(batch_size: int) -> float:
    """Cota superior de cualquier pérdida con embeddings unitarios."""
    return float(np.log(1.0 + (batch_size + 2) * np.e ** 2))


def _mean(values) -> Tensor:
    acc = values[0]
    for v in values[1:]:
        acc = acc + v
    return acc * (1.0 / len(values))
