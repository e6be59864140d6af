"""
Sample points for suprema over a DomainBox
Author: Jay Guwalani
"""

import logging
from typing import Optional, Tuple

import numpy as np
from scipy.stats import qmc

logger = logging.getLogger(__name__)

Points = Tuple[np.ndarray, np.ndarray]


def halton_points(dom, seed: int = 0) -> Points:
    """Scrambled Halton points over box x [0, t_max]; returns (states (N, n), times (N,))"""
    n = dom.dim
    sampler = qmc.Halton(d=n + 1, scramble=True, seed=seed)
    u = sampler.random(dom.sample_count)
    states = dom.lower + u[:, :n] * (dom.upper - dom.lower)
    times = u[:, n] * dom.t_max
    return states, times


def harvest_points(states: np.ndarray, times: np.ndarray, max_points: int = 1024, dom=None) -> Points:
    """Evenly thin recorded trajectory states to at most ``max_points`` (state, time) samples.

    ``states`` has shape (..., n_rec, n) and ``times`` shape (n_rec,).
    With ``dom`` given, samples outside its box or past its horizon are dropped first.
    """
    states = np.asarray(states, dtype=float)
    times = np.asarray(times, dtype=float)
    n = states.shape[-1]
    flat_states = states.reshape(-1, n)
    flat_times = np.broadcast_to(times, states.shape[:-1]).reshape(-1)
    if dom is not None:
        inside = (np.all((flat_states >= dom.lower) & (flat_states <= dom.upper), axis=1)
                  & (flat_times <= dom.t_max))
        if not inside.all():
            logger.debug(f"Dropped {int((~inside).sum())} harvested states outside the domain")
        flat_states, flat_times = flat_states[inside], flat_times[inside]
    if flat_states.shape[0] > max_points:
        idx = np.linspace(0, flat_states.shape[0] - 1, max_points).astype(int)
        flat_states, flat_times = flat_states[idx], flat_times[idx]
    return flat_states, flat_times


def merge_points(base: Points, extra: Optional[Points]) -> Points:
    if extra is None:
        return base
    states = np.concatenate([base[0], np.asarray(extra[0], dtype=float)])
    times = np.concatenate([base[1], np.asarray(extra[1], dtype=float)])
    logger.debug(f"Merged {len(extra[1])} harvested points into {len(base[1])} box samples")
    return states, times
