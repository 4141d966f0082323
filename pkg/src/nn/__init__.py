"""Motor de autodiferenciación y codificador convolucional dilatado."""

from .checkpoint import load_checkpoint, save_checkpoint
from .layers import (
    BlockParams,
    EncoderConfig,
    EncoderParams,
    HeadParams,
    encode,
    init_encoder,
    init_head,
    residual_block,
)
from .optim import Adam, AdamState, adam_step
from .tensor import Tensor, conv1d_same, gelu, l2_normalize

__all__ = [
    'Tensor',
    'conv1d_same',
    'gelu',
    'l2_normalize',
    'EncoderConfig',
    'BlockParams',
    'HeadParams',
    'EncoderParams',
    'init_encoder',
    'init_head',
    'residual_block',
    'encode',
    'Adam',
    'AdamState',
    'adam_step',
    'save_checkpoint',
    'load_checkpoint',
]
