"""Monte-Carlo lifetime and reliability at a given stress.

Path ``q`` is ``a_q exp(alpha1 s*) t**beta + sigma B_H^q(t)`` with its own
drift draw and FBM, both taken from substream ``(master_seed, q)``.  A unit
fails at the first grid time where its degradation reaches the threshold;
paths that never reach it inside the horizon are censored and count as
survivors at every evaluation time.
"""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .exceptions import HorizonExceededError, InvalidGridError
from .fgn_fbm import (
    _circulant_sqrt,
    _toeplitz_factor,
    check_grid,
    check_hurst,
    cholesky_jittered,
    embedding_size,
    fbm_gram,
)
from .model import ThetaM0
from .simulator import draw_drift
from .streams import TAG_ER, TAG_PATHS, substream

logger = logging.getLogger(__name__)

# Paths are generated in blocks of this size whatever the worker count, so
# batched FFTs see identical inputs and results are reproducible.
BLOCK = 512
DEFAULT_STEPS = 2000


@dataclass(frozen=True)
class McConfig:
    """Monte-Carlo settings; the grid is ``0, step, ..., horizon`` in hours."""

    n_paths: int = 10_000
    horizon: float = 10_000.0
    x_th: float = 5.0
    master_seed: int = 0
    step: float | None = None
    workers: int = 1
    truncate_negative_drift: bool = False

    def __post_init__(self):
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")
        if not self.horizon > 0:
            raise ValueError("horizon must be > 0")
        if self.step is not None and not (0 < self.step <= self.horizon):
            raise ValueError("step must lie in (0, horizon]")

    @property
    def dt(self) -> float:
        return self.horizon / DEFAULT_STEPS if self.step is None else float(self.step)

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.horizon / self.dt)))

    @property
    def grid(self) -> np.ndarray:
        return self.dt * np.arange(self.n_steps + 1)

    def to_dict(self) -> dict:
        return {
            "n_paths": self.n_paths, "horizon": self.horizon, "x_th": self.x_th,
            "master_seed": self.master_seed, "step": self.step, "workers": self.workers,
            "truncate_negative_drift": self.truncate_negative_drift,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "McConfig":
        keys = cls.__dataclass_fields__
        return cls(**{k: v for k, v in d.items() if k in keys})


@dataclass
class ReliabilityCurve:
    times: np.ndarray
    r_values: np.ndarray
    n_paths: int
    censored_fraction: float
    warnings: list[str] = field(default_factory=list)

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        buf.write("# time: hours; reliability: probability of no threshold crossing\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time_hours", "reliability", "n_paths", "censored_fraction"])
        for t, r in zip(self.times, self.r_values):
            w.writerow([repr(float(t)), repr(float(r)), self.n_paths, repr(float(self.censored_fraction))])
        return buf.getvalue()


def _block_paths(theta: ThetaM0, s_star: float, cfg: McConfig, q0: int, q1: int) -> np.ndarray:
    """Degradation paths ``q0..q1-1`` on ``cfg.grid`` (rows are paths)."""
    h = check_hurst(theta.h)
    n = cfg.n_steps
    size = embedding_size(n)
    half = size // 2
    scale = _circulant_sqrt(n, h)
    drifts = np.empty(q1 - q0)
    if scale is None:
        factor = _toeplitz_factor(n, h)
        noise = np.empty((q1 - q0, n))
    else:
        z = np.empty((q1 - q0, size))
    for row, q in enumerate(range(q0, q1)):
        rng = substream(cfg.master_seed, TAG_PATHS, q)
        drifts[row] = draw_drift(theta, rng, cfg.truncate_negative_drift)
        if scale is None:
            noise[row] = factor @ rng.standard_normal(n)
        else:
            z[row] = rng.standard_normal(size)
    if scale is not None:
        coef = np.empty((q1 - q0, half + 1), dtype=complex)
        coef[:, 0] = z[:, 0]
        coef[:, half] = z[:, 1]
        coef[:, 1:half] = z[:, 2 : half + 1] + 1j * z[:, half + 1 :]
        noise = (np.fft.irfft(coef * scale, n=size, axis=1) * np.sqrt(size))[:, :n]
    grid = cfg.grid
    paths = np.zeros((q1 - q0, n + 1))
    np.cumsum(noise, axis=1, out=paths[:, 1:])
    paths *= theta.sigma * cfg.dt**h
    paths += np.outer(drifts * np.exp(theta.alpha1 * s_star), grid**theta.beta)
    return paths


def _blocks(n_paths: int):
    return [(q0, min(q0 + BLOCK, n_paths)) for q0 in range(0, n_paths, BLOCK)]


def _map_blocks(fn, cfg: McConfig):
    blocks = _blocks(cfg.n_paths)
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            return list(pool.map(lambda b: fn(*b), blocks))
    return [fn(*b) for b in blocks]


def simulate_degradation_paths(theta: ThetaM0, s_star: float, cfg: McConfig) -> np.ndarray:
    """All ``cfg.n_paths`` degradation paths on ``cfg.grid`` (shape N x len(grid))."""
    parts = _map_blocks(lambda q0, q1: _block_paths(theta, s_star, cfg, q0, q1), cfg)
    return np.vstack(parts)


def first_passage_times(paths: np.ndarray, times: np.ndarray, x_th: float) -> np.ndarray:
    """First grid time with ``path >= x_th`` per row; ``inf`` when censored."""
    paths = np.atleast_2d(paths)
    hit = paths >= x_th
    crossed = hit.any(axis=1)
    idx = hit.argmax(axis=1)
    return np.where(crossed, np.asarray(times, dtype=float)[idx], np.inf)


def first_passage(path, times, x_th: float) -> float | None:
    """First grid time at which ``path`` reaches ``x_th``, or None if censored.

    Reaching the threshold exactly counts as failure.
    """
    t = first_passage_times(np.asarray(path, dtype=float)[None, :], times, x_th)[0]
    return None if np.isinf(t) else float(t)


def lifetimes(theta: ThetaM0, s_star: float, cfg: McConfig) -> np.ndarray:
    """Simulated first-passage times for every path (``inf`` if censored)."""
    grid = cfg.grid

    def block(q0, q1):
        return first_passage_times(_block_paths(theta, s_star, cfg, q0, q1), grid, cfg.x_th)

    return np.concatenate(_map_blocks(block, cfg))


def reliability_curve(theta: ThetaM0, s_star: float, cfg: McConfig, eval_times=None) -> ReliabilityCurve:
    """Empirical reliability ``R(t) = 1 - F(t)`` from simulated lifetimes.

    ``eval_times`` defaults to the simulation grid and must stay inside it.
    """
    times = cfg.grid if eval_times is None else check_grid(eval_times, allow_zero=True)
    if times[-1] > cfg.grid[-1] + 1e-9:
        raise InvalidGridError("evaluation times exceed the simulation horizon")
    life = np.sort(lifetimes(theta, s_star, cfg))
    failed = np.searchsorted(life, times, side="right")
    r = 1.0 - failed / cfg.n_paths
    censored = float(np.mean(np.isinf(life)))
    warnings = []
    if 1.0 - failed[-1] / cfg.n_paths > 0.5:
        warnings.append("more than half of the paths survive the last evaluation time; horizon may be too short")
    return ReliabilityCurve(times, r, cfg.n_paths, censored, warnings)


def time_at_reliability(curve: ReliabilityCurve, r_target: float) -> float:
    """Largest curve time whose reliability is still at least ``r_target``.

    Raises:
        HorizonExceededError: reliability never falls below ``r_target``.
    """
    if not 0 < r_target < 1:
        raise ValueError("r_target must lie in (0, 1)")
    r = np.asarray(curve.r_values)
    if r[-1] >= r_target:
        raise HorizonExceededError(f"reliability stays >= {r_target} up to the horizon {curve.times[-1]:g} h")
    idx = np.nonzero(r >= r_target)[0]
    if idx.size == 0:
        raise HorizonExceededError(f"reliability is already below {r_target} at the first time point")
    return float(curve.times[idx[-1]])


def simulate_at_times(theta: ThetaM0, s_star: float, times, n_paths: int, master_seed: int,
                      truncate_negative_drift: bool = False) -> np.ndarray:
    """Paths evaluated at arbitrary observation times (exact Cholesky FBM)."""
    t = check_grid(times)
    factor = cholesky_jittered(fbm_gram(t, theta.h))
    drifts = np.empty(n_paths)
    z = np.empty((n_paths, t.size))
    for q in range(n_paths):
        rng = substream(master_seed, TAG_ER, q)
        drifts[q] = draw_drift(theta, rng, truncate_negative_drift)
        z[q] = rng.standard_normal(t.size)
    psi = np.exp(theta.alpha1 * s_star) * t**theta.beta
    return np.outer(drifts, psi) + theta.sigma * z @ factor.T


def path_bands(paths: np.ndarray, quantile_level: float = 0.05):
    """Pointwise mean, upper and lower quantile across simulated paths."""
    return (paths.mean(axis=0), np.quantile(paths, 1.0 - quantile_level, axis=0),
            np.quantile(paths, quantile_level, axis=0))
