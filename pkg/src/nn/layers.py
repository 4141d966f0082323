"""Codificador residual con convoluciones dilatadas y cabeza de proyección.

Arquitectura por dominio:

    entrada L×C ─► bloque_0 (d=1) ─► bloque_1 (d=2) ─► ... ─► bloque_{depth-1} (d=2^(depth-1))
                                                                   │
                              cabeza compartida h_d → h_d → 1 ◄────┘
                                                                   │
                                               r ∈ R^L, ‖r‖₂ = 1 ◄─┘

Cada bloque: gelu(conv2(gelu(conv1(x)))) + skip(x), con skip = identidad si
C_in = h_d o una convolución 1×1 en otro caso.
"""

from dataclasses import asdict, dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from ..config import get, get_logger
from ..errors import ShapeError
from .tensor import Tensor, conv1d_same, gelu, l2_normalize, matmul

logger = get_logger('nn')


# =============================================================================
# CONFIGURACIÓN
# =============================================================================

@dataclass(frozen=True)
class EncoderConfig:
    """Hiperparámetros de un codificador de dominio."""
    in_channels: int
    window_len: int
    depth: int = 6
    hidden_dim: int = 32
    kernel_size: int = 3

    def __post_init__(self):
        if self.depth < 1:
            raise ShapeError(f"depth={self.depth} < 1")
        if self.hidden_dim < 1:
            raise ShapeError(f"hidden_dim={self.hidden_dim} < 1")
        if self.kernel_size < 1 or self.kernel_size % 2 == 0:
            raise ShapeError(f"kernel_size={self.kernel_size} debe ser impar")
        if self.in_channels < 1 or self.window_len < 1:
            raise ShapeError(f"in_channels={self.in_channels}, window_len={self.window_len} no válidos")
        span = self.receptive_span(self.depth - 1)
        if span >= 2 * self.window_len:
            logger.warning(
                f"Alcance dilatado {span} ≥ 2L ({2 * self.window_len}): "
                f"los últimos bloques sólo ven padding"
            )

    @classmethod
    def from_settings(cls, in_channels: int, window_len: int, **overrides) -> 'EncoderConfig':
        """Config con los valores de `encoder.*` del YAML, sobreescribibles."""
        values = {
            'depth': get('encoder.depth', 6),
            'hidden_dim': get('encoder.hidden_dim', 32),
            'kernel_size': get('encoder.kernel_size', 3),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(in_channels=in_channels, window_len=window_len, **values)

    def dilation(self, block: int) -> int:
        return 2 ** block

    def receptive_span(self, block: int) -> int:
        return self.dilation(block) * (self.kernel_size - 1) + 1

    def to_dict(self) -> dict:
        return asdict(self)


# =============================================================================
# PARÁMETROS
# =============================================================================

@dataclass
class BlockParams:
    """Dos convoluciones con sesgo y proyección de salto opcional."""
    w1: Tensor
    b1: Tensor
    w2: Tensor
    b2: Tensor
    skip: Optional[Tensor] = None

    def tensors(self) -> Iterator[Tuple[str, Tensor]]:
        yield 'w1', self.w1
        yield 'b1', self.b1
        yield 'w2', self.w2
        yield 'b2', self.b2
        if self.skip is not None:
            yield 'skip', self.skip


@dataclass
class HeadParams:
    """Cabeza por instante: h_d → h_d (GELU) → 1."""
    w1: Tensor
    b1: Tensor
    w2: Tensor
    b2: Tensor

    def tensors(self) -> Iterator[Tuple[str, Tensor]]:
        yield 'w1', self.w1
        yield 'b1', self.b1
        yield 'w2', self.w2
        yield 'b2', self.b2


@dataclass
class EncoderParams:
    """Pila de bloques de un dominio más la cabeza (posiblemente compartida)."""
    blocks: List[BlockParams]
    head: HeadParams
    config: Optional[EncoderConfig] = field(default=None, compare=False)

    def named_tensors(self, include_head: bool = True) -> Iterator[Tuple[str, Tensor]]:
        for b, block in enumerate(self.blocks):
            for name, tensor in block.tensors():
                yield f"block{b}.{name}", tensor
        if include_head:
            for name, tensor in self.head.tensors():
                yield f"head.{name}", tensor

    def parameters(self, include_head: bool = True) -> List[Tensor]:
        return [t for _, t in self.named_tensors(include_head)]


def _uniform(rng: np.random.Generator, shape: Tuple[int, ...], fan_in: int, name: str) -> Tensor:
    bound = 1.0 / np.sqrt(fan_in)
    return Tensor(rng.uniform(-bound, bound, size=shape), requires_grad=True, name=name)


def init_head(hidden_dim: int, rng: np.random.Generator) -> HeadParams:
    return HeadParams(
        w1=_uniform(rng, (hidden_dim, hidden_dim), hidden_dim, 'head.w1'),
        b1=_uniform(rng, (hidden_dim,), hidden_dim, 'head.b1'),
        w2=_uniform(rng, (hidden_dim, 1), hidden_dim, 'head.w2'),
        b2=_uniform(rng, (1,), hidden_dim, 'head.b2'),
    )


def init_encoder(
    config: EncoderConfig,
    rng: np.random.Generator,
    head: Optional[HeadParams] = None,
) -> EncoderParams:
    """Inicialización uniforme ±1/√fan_in (fan_in = C_in·K)."""
    h, k = config.hidden_dim, config.kernel_size
    blocks = []
    c_in = config.in_channels
    for b in range(config.depth):
        skip = None
        if c_in != h:
            skip = _uniform(rng, (h, c_in, 1), c_in, f'block{b}.skip')
        blocks.append(BlockParams(
            w1=_uniform(rng, (h, c_in, k), c_in * k, f'block{b}.w1'),
            b1=_uniform(rng, (h,), c_in * k, f'block{b}.b1'),
            w2=_uniform(rng, (h, h, k), h * k, f'block{b}.w2'),
            b2=_uniform(rng, (h,), h * k, f'block{b}.b2'),
            skip=skip,
        ))
        c_in = h
    return EncoderParams(blocks=blocks, head=head if head is not None else init_head(h, rng), config=config)


# =============================================================================
# FORWARD
# =============================================================================

def residual_block(x, params: BlockParams, dilation: int) -> Tensor:
    """gelu(conv2(gelu(conv1(x)))) + skip(x)."""
    x = x if isinstance(x, Tensor) else Tensor(x)
    c_in = x.shape[-1]
    hidden = params.w1.shape[0]
    if params.w1.shape[1] != c_in:
        raise ShapeError(f"bloque: entrada con {c_in} canales, núcleo espera {params.w1.shape[1]}")

    h = gelu(conv1d_same(x, params.w1, params.b1, dilation))
    h = gelu(conv1d_same(h, params.w2, params.b2, dilation))

    if params.skip is not None:
        skip = conv1d_same(x, params.skip, None, 1)
    elif c_in == hidden:
        skip = x
    else:
        raise ShapeError(f"bloque: C_in={c_in} ≠ h_d={hidden} sin proyección de salto")
    return h + skip


def project(h: Tensor, head: HeadParams) -> Tensor:
    """Cabeza por instante temporal; devuelve (..., L)."""
    if h.shape[-1] != head.w1.shape[0]:
        raise ShapeError(f"cabeza: h_d={h.shape[-1]} ≠ {head.w1.shape[0]}")
    z = gelu(matmul(h, head.w1) + head.b1)
    out = matmul(z, head.w2) + head.b2
    return out.reshape(out.shape[:-1])


def encode(features, params: EncoderParams) -> Tensor:
    """Embedding unitario r ∈ R^L (o B×L para entradas con lote).

    Args:
        features: DomainFeatures, array L×C o B×L×C, o Tensor.
        params: Parámetros del codificador del dominio.
    """
    if hasattr(features, 'channels'):
        features = features.channels
    x = features if isinstance(features, Tensor) else Tensor(features)
    if x.ndim not in (2, 3):
        raise ShapeError(f"encode: se esperaba L×C o B×L×C, forma {x.shape}")
    expected = params.blocks[0].w1.shape[1]
    if x.shape[-1] != expected:
        raise ShapeError(f"encode: {x.shape[-1]} canales, el codificador espera {expected}")

    h = x
    for b, block in enumerate(params.blocks):
        h = residual_block(h, block, dilation=2 ** b)
    r = project(h, params.head)
    return l2_normalize(r, axis=-1)


def parameter_count(params: EncoderParams, include_head: bool = True) -> int:
    return int(sum(t.size for t in params.parameters(include_head)))


def snapshot(params: Dict[str, EncoderParams]) -> Dict[str, np.ndarray]:
    """Copia plana de todos los arrays, con la cabeza compartida una sola vez."""
    flat: Dict[str, np.ndarray] = {}
    head_done = False
    for domain, enc in params.items():
        for name, tensor in enc.named_tensors(include_head=not head_done):
            key = name if name.startswith('head.') else f"{domain}.{name}"
            flat[key] = tensor.data.copy()
        head_done = True
    return flat


def restore(params: Dict[str, EncoderParams], flat: Dict[str, np.ndarray]) -> None:
    """Inversa de `snapshot`: copia los arrays sobre los tensores existentes."""
    seen_head = False
    for domain, enc in params.items():
        for name, tensor in enc.named_tensors(include_head=not seen_head):
            key = name if name.startswith('head.') else f"{domain}.{name}"
            if key not in flat:
                raise ShapeError(f"falta el parámetro '{key}'")
            if flat[key].shape != tensor.shape:
                raise ShapeError(f"'{key}': forma {flat[key].shape} ≠ {tensor.shape}")
            tensor.data = np.array(flat[key], dtype=np.float64)
        seen_head = True
