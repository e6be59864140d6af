"""
Euler-Maruyama simulation of trajectories, trajectory pairs and ensembles
Author: Jay Guwalani

Every trajectory draws its Gaussian increments from its own counter-based
stream keyed by (master_seed, path_index, trajectory_id), so a path is the
same no matter which worker simulates it. Ensembles are cut into batches of
``batch_size`` paths; batch sums are reduced in batch order.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from utils.export import write_frame

from .core import Metric, SdeSystem
from .errors import DimensionMismatchError, NonFiniteError

logger = logging.getLogger(__name__)

INIT_STREAM_ID = 0

InitPairSampler = Callable[[int, np.random.Generator], Tuple[np.ndarray, np.ndarray]]
InitSampler = Callable[[int, np.random.Generator], np.ndarray]
Observable = Callable[[np.ndarray, np.ndarray], np.ndarray]


class PairMode(str, Enum):
    PAIR_NOISY = "PairNoisy"
    NOISE_FREE_VS_NOISY = "NoiseFreeVsNoisy"


@dataclass(frozen=True)
class SimConfig:
    """Integration grid, ensemble size and seeding for one run"""
    dt: float = 1e-3
    t_max: float = 1.0
    n_paths: int = 1
    master_seed: int = 0
    record_stride: int = 1
    batch_size: int = 1024
    noise_chunk: int = 1000
    threads: int = 1

    def __post_init__(self):
        if not self.dt > 0 or not self.t_max > 0:
            raise ValueError(f"dt and t_max must be positive, got dt={self.dt}, t_max={self.t_max}")
        if self.dt > self.t_max:
            raise ValueError(f"dt={self.dt} exceeds t_max={self.t_max}")
        if self.t_max / self.dt > np.iinfo(np.int64).max:
            raise ValueError("t_max/dt does not fit in a machine integer")
        for name in ("n_paths", "record_stride", "batch_size", "noise_chunk", "threads"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be a positive integer, got {getattr(self, name)}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_max / self.dt))

    @property
    def times(self) -> np.ndarray:
        """Recorded times, every ``record_stride``-th step starting at 0"""
        return np.arange(0, self.n_steps + 1, self.record_stride) * self.dt


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray


@dataclass(frozen=True, eq=False)
class TrajectoryPair:
    times: np.ndarray
    a: np.ndarray
    b: np.ndarray


@dataclass(frozen=True, eq=False)
class EnsemblePairStats:
    """Per-time mean squared distance of an ensemble of pairs"""
    times: np.ndarray
    mean_sq_dist: np.ndarray
    std_err: np.ndarray
    weighted_by_metric: bool = False
    n_paths: int = 0

    def __post_init__(self):
        if not (len(self.times) == len(self.mean_sq_dist) == len(self.std_err)):
            raise DimensionMismatchError("stats vectors must have equal lengths")
        if np.any(self.mean_sq_dist < 0) or np.any(self.std_err < 0):
            raise ValueError("mean squared distance and standard error must be nonnegative")

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"t": self.times, "msd": self.mean_sq_dist, "stderr": self.std_err})

    def write_csv(self, path: Union[str, Path]) -> Path:
        return write_frame(path, self.to_frame())


@dataclass(frozen=True, eq=False)
class ObservableStats:
    """Per-time mean of a scalar observable over single-trajectory paths"""
    times: np.ndarray
    mean: np.ndarray
    std_err: np.ndarray
    name: str = "value"
    n_paths: int = 0

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"t": self.times, self.name: self.mean, "stderr": self.std_err})

    def write_csv(self, path: Union[str, Path]) -> Path:
        return write_frame(path, self.to_frame())


def increment_stream(master_seed: int, path_index: int, trajectory_id: int) -> np.random.Generator:
    """Philox stream keyed by (master_seed, path_index, trajectory_id); id 0 feeds initial conditions"""
    entropy = int(master_seed) & 0xFFFFFFFFFFFFFFFF
    seq = np.random.SeedSequence(entropy=entropy, spawn_key=(int(path_index), int(trajectory_id)))
    return np.random.Generator(np.random.Philox(seq))


def _apply_diffusion(sigma: np.ndarray, dw: np.ndarray) -> np.ndarray:
    return np.einsum("...nd,...d->...n", sigma, dw)


def em_step(sys: SdeSystem, x, t: float, dt: float, dw) -> np.ndarray:
    """One Euler-Maruyama step x + f(x,t) dt + sigma(x,t) dw"""
    x = np.asarray(x, dtype=float)
    dw = np.asarray(dw, dtype=float)
    out = x + np.asarray(sys.drift(x, t)) * dt + _apply_diffusion(np.asarray(sys.diffusion(x, t)), dw)
    if not np.all(np.isfinite(out)):
        raise NonFiniteError(f"non-finite state at t={t}", time=t)
    return out


def _integrate(sys: SdeSystem, x0: np.ndarray, streams: Sequence[Optional[np.random.Generator]],
               cfg: SimConfig, path_indices: Sequence[int], trajectory_ids: Sequence[int]) -> np.ndarray:
    """Integrate a batch of rows; rows whose stream is None see no noise. Returns (rows, n_rec, n)."""
    x = np.array(x0, dtype=float)
    rows, n = x.shape
    d = sys.d
    n_steps = cfg.n_steps
    stride = cfg.record_stride
    sqrt_dt = np.sqrt(cfg.dt)

    records = np.empty((rows, n_steps // stride + 1, n))
    records[:, 0] = x
    noisy = [i for i, s in enumerate(streams) if s is not None]
    skip_diffusion = not noisy

    step = 0
    while step < n_steps:
        chunk = min(cfg.noise_chunk, n_steps - step)
        noise = np.zeros((rows, chunk, d))
        for i in noisy:
            noise[i] = streams[i].standard_normal((chunk, d))
        noise *= sqrt_dt

        for j in range(chunk):
            t = step * cfg.dt
            incr = np.asarray(sys.drift(x, t)) * cfg.dt
            if not skip_diffusion:
                incr = incr + _apply_diffusion(np.asarray(sys.diffusion(x, t)), noise[:, j])
            x = x + incr
            step += 1
            finite = np.isfinite(x).all(axis=1)
            if not finite.all():
                row = int(np.argmin(finite))
                raise NonFiniteError(
                    f"path {path_indices[row]} (trajectory {trajectory_ids[row]}) "
                    f"became non-finite at step {step}",
                    path_index=int(path_indices[row]), trajectory_id=int(trajectory_ids[row]),
                    step=step, time=step * cfg.dt)
            if step % stride == 0:
                records[:, step // stride] = x
    return records


def _check_state(sys: SdeSystem, x) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (sys.n,):
        raise DimensionMismatchError(f"initial state has shape {x.shape}, system has n={sys.n}")
    return x


def simulate_path(sys: SdeSystem, x0, cfg: SimConfig, path_index: int = 0) -> Trajectory:
    """Single trajectory driven by stream (master_seed, path_index, 1)"""
    x0 = _check_state(sys, x0)
    stream = increment_stream(cfg.master_seed, path_index, 1)
    rec = _integrate(sys, x0[None, :], [stream], cfg, [path_index], [1])
    return Trajectory(times=cfg.times, states=rec[0])


def simulate_pair(sys: SdeSystem, a0, b0, cfg: SimConfig, path_index: int = 0,
                  shared_noise: bool = False) -> TrajectoryPair:
    """Two trajectories of the same system under independent noise.

    ``shared_noise`` drives b with a's stream; it exists for testing
    common-noise cancellation.
    """
    a0, b0 = _check_state(sys, a0), _check_state(sys, b0)
    b_id = 1 if shared_noise else 2
    streams = [increment_stream(cfg.master_seed, path_index, 1),
               increment_stream(cfg.master_seed, path_index, b_id)]
    rec = _integrate(sys, np.stack([a0, b0]), streams, cfg, [path_index] * 2, [1, b_id])
    return TrajectoryPair(times=cfg.times, a=rec[0], b=rec[1])


def simulate_pair_noisefree_vs_noisy(sys: SdeSystem, a0, b0, cfg: SimConfig,
                                     path_index: int = 0) -> TrajectoryPair:
    """Trajectory a without noise, trajectory b driven by stream 2"""
    a0, b0 = _check_state(sys, a0), _check_state(sys, b0)
    streams = [None, increment_stream(cfg.master_seed, path_index, 2)]
    rec = _integrate(sys, np.stack([a0, b0]), streams, cfg, [path_index] * 2, [1, 2])
    return TrajectoryPair(times=cfg.times, a=rec[0], b=rec[1])


def fixed_pair(a0, b0) -> InitPairSampler:
    """Deterministic initial pair"""
    a0 = np.atleast_1d(np.asarray(a0, dtype=float))
    b0 = np.atleast_1d(np.asarray(b0, dtype=float))
    return lambda path_index, rng: (a0, b0)


def fixed_state(x0) -> InitSampler:
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    return lambda path_index, rng: x0


def _batches(cfg: SimConfig) -> List[Tuple[int, int]]:
    return [(start, min(start + cfg.batch_size, cfg.n_paths))
            for start in range(0, cfg.n_paths, cfg.batch_size)]


def _run_batches(run_batch: Callable[[int, int], Tuple[np.ndarray, np.ndarray]],
                 cfg: SimConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Run batches on a thread pool and reduce their (sum, sum of squares) in batch order"""
    batches = _batches(cfg)
    workers = min(cfg.threads, len(batches))
    results: List[Optional[Tuple[np.ndarray, np.ndarray]]] = [None] * len(batches)
    failures: List[NonFiniteError] = []

    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_batch, start, stop) for start, stop in batches]
        for i, future in enumerate(futures):
            try:
                results[i] = future.result()
            except NonFiniteError as e:
                failures.append(e)

    if failures:
        raise min(failures, key=lambda e: e.path_index)

    total, total_sq = results[0]
    total, total_sq = total.copy(), total_sq.copy()
    for s, ss in results[1:]:
        total += s
        total_sq += ss
    return total, total_sq


def _mean_and_stderr(total: np.ndarray, total_sq: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
    mean = total / n
    if n < 2:
        return mean, np.zeros_like(mean)
    var = np.maximum(0.0, (total_sq - n * mean ** 2) / (n - 1))
    return mean, np.sqrt(var / n)


def _squared_distance(diff: np.ndarray, times: np.ndarray, metric: Optional[Metric]) -> np.ndarray:
    if metric is None:
        return np.einsum("bti,bti->bt", diff, diff)
    if metric.is_constant:
        return np.einsum("bti,ij,btj->bt", diff, metric.matrix_at(0.0), diff)
    out = np.empty(diff.shape[:2])
    for k, t in enumerate(times):
        out[:, k] = np.einsum("bi,ij,bj->b", diff[:, k], metric.matrix_at(float(t)), diff[:, k])
    return out


def ensemble_pair_stats(sys: SdeSystem, init_sampler: InitPairSampler, cfg: SimConfig,
                        metric: Optional[Metric] = None,
                        mode: PairMode = PairMode.PAIR_NOISY) -> EnsemblePairStats:
    """Mean of ||a(t) - b(t)||^2 (or (a-b)^T M(t) (a-b)) over ``cfg.n_paths`` pairs"""
    if cfg.n_paths < 2:
        raise ValueError(f"ensemble statistics need at least 2 paths, got {cfg.n_paths}")
    if metric is not None and metric.dim != sys.n:
        raise DimensionMismatchError(f"metric has dimension {metric.dim}, system has n={sys.n}")

    times = cfg.times
    noise_free_a = mode == PairMode.NOISE_FREE_VS_NOISY

    def run_batch(start: int, stop: int) -> Tuple[np.ndarray, np.ndarray]:
        paths = list(range(start, stop))
        inits = [init_sampler(p, increment_stream(cfg.master_seed, p, INIT_STREAM_ID)) for p in paths]
        a0 = np.stack([_check_state(sys, a) for a, _ in inits])
        b0 = np.stack([_check_state(sys, b) for _, b in inits])
        a_streams = [None if noise_free_a else increment_stream(cfg.master_seed, p, 1) for p in paths]
        b_streams = [increment_stream(cfg.master_seed, p, 2) for p in paths]
        rec = _integrate(sys, np.concatenate([a0, b0]), a_streams + b_streams, cfg,
                         paths + paths, [1] * len(paths) + [2] * len(paths))
        q = _squared_distance(rec[:len(paths)] - rec[len(paths):], times, metric)
        return q.sum(axis=0), (q ** 2).sum(axis=0)

    logger.info(f"Simulating {cfg.n_paths} pairs of '{sys.name}' | mode={mode.value} "
                f"| steps={cfg.n_steps} | batches={len(_batches(cfg))}")
    start_time = time.time()
    total, total_sq = _run_batches(run_batch, cfg)
    mean, se = _mean_and_stderr(total, total_sq, cfg.n_paths)
    logger.info(f"Ensemble finished in {time.time() - start_time:.2f}s")

    return EnsemblePairStats(times=times, mean_sq_dist=mean, std_err=se,
                             weighted_by_metric=metric is not None, n_paths=cfg.n_paths)


def ensemble_observable_stats(sys: SdeSystem, init_sampler: InitSampler, cfg: SimConfig,
                              observables: Mapping[str, Observable]) -> Dict[str, ObservableStats]:
    """Means of scalar observables of single trajectories, one simulation for all of them.

    Each ``observable(states, times)`` maps states of shape (paths, n_rec, n)
    to values of shape (paths, n_rec).
    """
    if not observables:
        raise ValueError("at least one observable is required")
    times = cfg.times
    names = list(observables)

    def run_batch(start: int, stop: int) -> Tuple[np.ndarray, np.ndarray]:
        paths = list(range(start, stop))
        x0 = np.stack([_check_state(sys, init_sampler(p, increment_stream(cfg.master_seed, p, INIT_STREAM_ID)))
                       for p in paths])
        streams = [increment_stream(cfg.master_seed, p, 1) for p in paths]
        rec = _integrate(sys, x0, streams, cfg, paths, [1] * len(paths))
        q = np.stack([np.asarray(observables[name](rec, times), dtype=float) for name in names])
        return q.sum(axis=1), (q ** 2).sum(axis=1)

    logger.info(f"Simulating {cfg.n_paths} paths of '{sys.name}' | observables={names} | steps={cfg.n_steps}")
    total, total_sq = _run_batches(run_batch, cfg)
    mean, se = _mean_and_stderr(total, total_sq, cfg.n_paths)
    return {name: ObservableStats(times=times, mean=mean[i], std_err=se[i], name=name, n_paths=cfg.n_paths)
            for i, name in enumerate(names)}
