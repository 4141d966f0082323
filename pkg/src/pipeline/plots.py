"""Figura SVG de una ejecución: serie de test, votos, etiquetas y verdad."""

from pathlib import Path
from typing import Optional, Tuple

import matplotlib

matplotlib.use('Agg')

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# SVG reproducible: ids estables y sin fecha
STYLE = {
    'svg.hashsalt': 'triad',
    'svg.fonttype': 'none',
    'font.size': 9,
    'axes.labelsize': 9,
    'legend.fontsize': 8,
    'xtick.labelsize': 8,
    'ytick.labelsize': 8,
    'axes.spines.top': False,
    'axes.spines.right': False,
}

WIDTH_IN = 10.0
GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def _spans(mask: np.ndarray):
    edges = np.diff(np.concatenate([[0], mask.astype(np.int8), [0]]))
    return zip(np.flatnonzero(edges == 1), np.flatnonzero(edges == -1))


def plot_run(
    path: Path,
    test_values: np.ndarray,
    votes: np.ndarray,
    labels: np.ndarray,
    truth: np.ndarray,
    window: Tuple[int, int],
    region: Optional[Tuple[int, int]] = None,
    title: str = '',
) -> Path:
    """Escribe la figura de dos paneles y devuelve la ruta."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    x = np.arange(len(test_values))

    with plt.rc_context(STYLE):
        fig, (ax_series, ax_votes) = plt.subplots(
            2, 1, sharex=True, figsize=(WIDTH_IN, WIDTH_IN * GOLDEN * 0.8),
            gridspec_kw={'height_ratios': [2, 1]},
        )
        ax_series.plot(x, test_values, color='0.25', linewidth=0.6, label='test')
        for begin, end in _spans(np.asarray(truth) > 0):
            ax_series.axvspan(begin, end, color='tab:red', alpha=0.25, linewidth=0)
        for begin, end in _spans(np.asarray(labels) > 0):
            ax_series.axvspan(begin, end, ymax=0.08, color='tab:blue', alpha=0.8, linewidth=0)
        ax_series.axvspan(window[0], window[1], facecolor='none', edgecolor='tab:orange', linewidth=1.0)
        if region is not None:
            ax_series.axvline(region[0], color='tab:orange', linestyle=':', linewidth=0.8)
            ax_series.axvline(region[1], color='tab:orange', linestyle=':', linewidth=0.8)
        ax_series.set_ylabel('valor')
        if title:
            ax_series.set_title(title)

        ax_votes.step(x, votes, where='mid', color='tab:green', linewidth=0.8)
        ax_votes.set_ylabel('votos')
        ax_votes.set_xlabel('t (test)')

        fig.tight_layout()
        fig.savefig(path, format='svg', metadata={'Date': None})
        plt.close(fig)
    return path
