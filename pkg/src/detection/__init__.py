"""Localización de ventanas, discordias y puntuación por votos."""

from .detector import (
    CandidateWindows,
    DetectionTrace,
    SearchRegion,
    detect_window,
    domain_deviance,
    make_search_region,
    select_single,
    tri_window,
)
from .discord import (
    DiscordHit,
    brute_force_discord,
    drag,
    length_schedule,
    merlin,
    translate,
    znorm_dist,
)
from .scorer import ScoreVector, classify, percentile_threshold, score, threshold, vote

__all__ = [
    'CandidateWindows',
    'SearchRegion',
    'DetectionTrace',
    'domain_deviance',
    'tri_window',
    'select_single',
    'make_search_region',
    'detect_window',
    'DiscordHit',
    'znorm_dist',
    'brute_force_discord',
    'drag',
    'merlin',
    'length_schedule',
    'translate',
    'ScoreVector',
    'vote',
    'threshold',
    'percentile_threshold',
    'classify',
    'score',
]
