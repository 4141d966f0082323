"""Pérdidas contrastivas y bucle de entrenamiento tri-dominio."""

from .losses import batch_loss, inter_loss, inter_loss_mean, intra_loss, intra_loss_mean, total_loss
from .trainer import EpochRecord, LossConfig, TrainedModel, batch_losses, embed, train

__all__ = [
    'intra_loss',
    'inter_loss',
    'total_loss',
    'intra_loss_mean',
    'inter_loss_mean',
    'batch_loss',
    'LossConfig',
    'EpochRecord',
    'TrainedModel',
    'train',
    'embed',
    'batch_losses',
]
