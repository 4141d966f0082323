"""Optimizador Adam (β₁=0.9, β₂=0.999, eps=1e-8, con corrección de sesgo)."""

from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from ..errors import ShapeError
from .tensor import Tensor

BETA1 = 0.9
BETA2 = 0.999
EPS = 1e-8


@dataclass
class AdamState:
    """Momentos por parámetro y contador de pasos."""
    m: List[np.ndarray] = field(default_factory=list)
    v: List[np.ndarray] = field(default_factory=list)
    t: int = 0

    @classmethod
    def zeros_like(cls, params: Sequence[np.ndarray]) -> 'AdamState':
        return cls(
            m=[np.zeros_like(p, dtype=np.float64) for p in params],
            v=[np.zeros_like(p, dtype=np.float64) for p in params],
        )


def adam_step(
    params: Sequence[np.ndarray],
    grads: Sequence[np.ndarray],
    state: AdamState,
    lr: float,
) -> List[np.ndarray]:
    """Un paso de Adam. Devuelve parámetros nuevos y actualiza `state` in situ."""
    if len(params) != len(grads) or len(params) != len(state.m):
        raise ShapeError(
            f"adam: {len(params)} parámetros, {len(grads)} gradientes, {len(state.m)} momentos",
            stage='train',
        )
    state.t += 1
    bc1 = 1.0 - BETA1 ** state.t
    bc2 = 1.0 - BETA2 ** state.t
    updated = []
    for i, (p, g) in enumerate(zip(params, grads)):
        if p.shape != g.shape or p.shape != state.m[i].shape:
            raise ShapeError(f"adam: forma {p.shape} vs gradiente {g.shape}", stage='train')
        state.m[i] = BETA1 * state.m[i] + (1.0 - BETA1) * g
        state.v[i] = BETA2 * state.v[i] + (1.0 - BETA2) * g * g
        m_hat = state.m[i] / bc1
        v_hat = state.v[i] / bc2
        updated.append(p - lr * m_hat / (np.sqrt(v_hat) + EPS))
    return updated


class Adam:
    """Envoltorio con estado sobre una lista de Tensors."""

    def __init__(self, params: Sequence[Tensor], lr: float = 1e-3):
        self.params = list(params)
        self.lr = lr
        self.state = AdamState.zeros_like([p.data for p in self.params])

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()

    def step(self) -> None:
        grads = [p.grad_or_zeros() for p in self.params]
        new = adam_step([p.data for p in self.params], grads, self.state, self.lr)
        for p, data in zip(self.params, new):
            p.data = data
