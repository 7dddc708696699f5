"""Fractional Brownian motion: exact covariances and path simulation.

Two samplers are provided:

* :func:`simulate_fgn` / :func:`simulate_fbm_path` use Davies-Harte circulant
  embedding of fractional Gaussian noise and need a uniform grid.
* :func:`sample_fbm_exact` factorizes the FBM covariance on an arbitrary grid
  and is used for the (short) measurement grids of degradation tests.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import linalg

from .exceptions import ConditioningError, InvalidGridError

logger = logging.getLogger(__name__)

H_MIN = 1e-8
H_MAX = 1.0 - 1e-8

JITTER_LADDER = (1e-12, 1e-10, 1e-8)
EIG_TOL = 1e-10


def clamp_hurst(h: float) -> float:
    """Clamp a Hurst exponent into the storage range ``[H_MIN, H_MAX]``."""
    return float(min(max(h, H_MIN), H_MAX))


def check_hurst(h: float) -> float:
    if not (0.0 < h < 1.0):
        raise ValueError(f"Hurst exponent must lie in (0, 1), got {h!r}")
    return clamp_hurst(h)


def check_grid(times, *, allow_zero: bool = False) -> np.ndarray:
    """Validate a time grid and return it as a float array."""
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise InvalidGridError("time grid must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(t)):
        raise InvalidGridError("time grid contains non-finite values")
    if np.any(np.diff(t) <= 0):
        raise InvalidGridError("time grid must be strictly increasing")
    if allow_zero:
        if t[0] < 0:
            raise InvalidGridError("time grid values must be >= 0")
    elif t[0] <= 0:
        raise InvalidGridError("observation times must be > 0")
    return t


def fbm_gram(times: np.ndarray, h: float) -> np.ndarray:
    """Unit-diffusion FBM covariance on ``times`` (no validation)."""
    two_h = 2.0 * h
    p = times**two_h
    lag = np.abs(times[:, None] - times[None, :]) ** two_h
    return 0.5 * (p[:, None] + p[None, :] - lag)


def cholesky_jittered(matrix: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor, retrying with diagonal jitter on failure.

    Jitter levels are ``JITTER_LADDER`` times the mean diagonal entry.
    """
    try:
        return np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError:
        pass
    scale = float(np.mean(np.diag(matrix)))
    eye = np.eye(matrix.shape[0])
    for level in JITTER_LADDER:
        try:
            return np.linalg.cholesky(matrix + level * scale * eye)
        except np.linalg.LinAlgError:
            continue
    raise ConditioningError(
        f"covariance of size {matrix.shape[0]} is not positive definite "
        f"even with jitter {JITTER_LADDER[-1]:g} x mean diagonal"
    )


@dataclass(frozen=True)
class FbmCovariance:
    """Covariance of ``sigma * B_H`` observed at ``grid``."""

    matrix: np.ndarray
    grid: np.ndarray
    h: float
    sigma2: float

    def cholesky(self) -> np.ndarray:
        return cholesky_jittered(self.matrix)


def fbm_covariance(grid, h: float, sigma2: float = 1.0) -> FbmCovariance:
    """Entry ``(u, v)`` is ``sigma2/2 * (t_u^2H + t_v^2H - |t_u - t_v|^2H)``.

    Raises:
        InvalidGridError: grid empty, not strictly increasing or not positive.
        ConditioningError: the matrix cannot be factorized.
    """
    t = check_grid(grid)
    h = check_hurst(h)
    if not sigma2 > 0:
        raise ValueError("sigma2 must be > 0")
    cov = FbmCovariance(sigma2 * fbm_gram(t, h), t, h, float(sigma2))
    cov.cholesky()
    return cov


def fgn_autocovariance(n: int, h: float, dt: float = 1.0) -> np.ndarray:
    """gamma(k) for k = 0..n-1 of increments of FBM sampled every ``dt``."""
    k = np.arange(n, dtype=float)
    two_h = 2.0 * h
    gamma = 0.5 * (np.abs(k + 1) ** two_h - 2.0 * k**two_h + np.abs(k - 1) ** two_h)
    return dt**two_h * gamma


def embedding_size(n_steps: int) -> int:
    return 1 << max(1, int(np.ceil(np.log2(2 * n_steps))))


@lru_cache(maxsize=64)
def _circulant_sqrt(n_steps: int, h: float) -> np.ndarray | None:
    """Scaled square-root eigenvalues for unit-step fGn, or None if the
    embedding is not non-negative definite."""
    size = embedding_size(n_steps)
    half = size // 2
    gamma = fgn_autocovariance(half + 1, h)
    row = np.concatenate([gamma, gamma[half - 1 : 0 : -1]])
    eig = np.fft.rfft(row).real
    top = eig.max()
    if eig.min() < -EIG_TOL * top:
        return None
    eig = np.clip(eig, 0.0, None)
    scale = np.sqrt(eig)
    scale[1:half] *= np.sqrt(0.5)
    scale.flags.writeable = False
    return scale


@lru_cache(maxsize=64)
def _toeplitz_factor(n_steps: int, h: float) -> np.ndarray:
    factor = cholesky_jittered(linalg.toeplitz(fgn_autocovariance(n_steps, h)))
    factor.flags.writeable = False
    return factor


def _fgn_unit(n_steps: int, h: float, rng: np.random.Generator) -> np.ndarray:
    scale = _circulant_sqrt(n_steps, h)
    if scale is None:
        logger.warning("circulant embedding negative for n=%d, H=%g; using Cholesky", n_steps, h)
        return _toeplitz_factor(n_steps, h) @ rng.standard_normal(n_steps)
    size = embedding_size(n_steps)
    half = size // 2
    z = rng.standard_normal(size)
    coef = np.empty(half + 1, dtype=complex)
    coef[0] = z[0]
    coef[half] = z[1]
    coef[1:half] = z[2 : half + 1] + 1j * z[half + 1 :]
    out = np.fft.irfft(coef * scale, n=size) * np.sqrt(size)
    return out[:n_steps]


def simulate_fgn(n_steps: int, dt: float, h: float, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n_steps`` fractional Gaussian noise increments on step ``dt``.

    Uses Davies-Harte embedding of size ``2*n_steps`` rounded up to a power
    of two; if the embedding has eigenvalues below ``-1e-10 * max`` it falls
    back to exact Cholesky sampling of the Toeplitz covariance.  The output
    depends only on the state of ``rng``.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if not dt > 0:
        raise ValueError("dt must be > 0")
    h = check_hurst(h)
    return dt**h * _fgn_unit(int(n_steps), h, rng)


def _uniform_step(grid: np.ndarray) -> float:
    if grid.size < 2:
        raise InvalidGridError("simulation grid needs at least two points")
    if grid[0] != 0.0:
        raise InvalidGridError("simulation grid must start at 0")
    steps = np.diff(grid)
    dt = (grid[-1] - grid[0]) / (grid.size - 1)
    if np.any(np.abs(steps - dt) > 1e-9 * max(dt, 1.0)):
        raise InvalidGridError("simulation grid must be uniform; use sample_fbm_exact for irregular grids")
    return float(dt)


def simulate_fbm_path(grid, h: float, rng: np.random.Generator) -> np.ndarray:
    """Standard FBM path on a uniform grid starting at 0 (``path[0] == 0``)."""
    t = check_grid(grid, allow_zero=True)
    dt = _uniform_step(t)
    path = np.zeros(t.size)
    np.cumsum(simulate_fgn(t.size - 1, dt, h, rng), out=path[1:])
    return path


def sample_fbm_exact(times, h: float, rng: np.random.Generator) -> np.ndarray:
    """Standard FBM at arbitrary positive ``times`` via Cholesky factorization."""
    t = check_grid(times)
    h = check_hurst(h)
    factor = cholesky_jittered(fbm_gram(t, h))
    return factor @ rng.standard_normal(t.size)
