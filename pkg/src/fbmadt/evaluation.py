"""Fit-quality metrics and model comparison.

* :func:`relative_error` -- summed absolute relative parameter error.
* :func:`aic` -- ``-2 l_max + 2 n_p``.
* :func:`er_indices` -- relative errors of the simulated mean and 5%/95%
  bands against the observed cross-unit mean/max/min, averaged over
  measurement times and then over stress levels.
* :func:`cross_validate` -- hold out the lowest or highest stress level.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .data import AdtDataset
from .exceptions import GridAlignmentError, UndefinedRelativeErrorError
from .model import ThetaM0, Variant

OBS_EPS = 1e-9


def relative_error(theta_hat: ThetaM0, theta_true: ThetaM0) -> float:
    """Sum of ``|est - true| / |true|`` over the variant's free parameters.

    ``sigma_a`` and ``sigma`` enter on the standard-deviation scale.
    """
    if theta_hat.variant is not theta_true.variant:
        raise ValueError("relative error needs estimates and truth of the same variant")
    est, true = theta_hat.sd_values(), theta_true.sd_values()
    total = 0.0
    for name in theta_true.variant.free_names:
        if true[name] == 0:
            raise UndefinedRelativeErrorError(f"true value of {name} is zero")
        total += abs(est[name] - true[name]) / abs(true[name])
    return total


def aic(l_max: float, n_params: int) -> float:
    return -2.0 * l_max + 2.0 * n_params


@dataclass
class ErReport:
    stresses: list[float]
    er_mean_levels: list[float]
    er_upper_levels: list[float]
    er_lower_levels: list[float]
    skipped_terms: int = 0

    @property
    def er_mean(self) -> float:
        return float(np.mean(self.er_mean_levels))

    @property
    def er_upper(self) -> float:
        return float(np.mean(self.er_upper_levels))

    @property
    def er_lower(self) -> float:
        return float(np.mean(self.er_lower_levels))

    def to_dict(self) -> dict:
        return {
            "levels": [
                {"stress": s, "er_mean": m, "er_upper": u, "er_lower": lo}
                for s, m, u, lo in zip(self.stresses, self.er_mean_levels, self.er_upper_levels,
                                       self.er_lower_levels)
            ],
            "er_mean": self.er_mean,
            "er_upper": self.er_upper,
            "er_lower": self.er_lower,
            "skipped_terms": self.skipped_terms,
        }


def _mean_rel(pred: np.ndarray, obs: np.ndarray) -> tuple[float, int]:
    keep = np.abs(obs) >= OBS_EPS
    if not keep.any():
        return float("nan"), int(obs.size)
    return float(np.mean(np.abs(pred[keep] - obs[keep]) / np.abs(obs[keep]))), int(np.sum(~keep))


def er_indices(data: AdtDataset, simulated, quantile_level: float = 0.05) -> ErReport:
    """ER indices of simulated paths against observations, level by level.

    Args:
        data: observations; units of a level must share one measurement grid.
        simulated: one array per level, shape ``(n_paths, m_l)``, holding
            simulated degradation at that level's measurement times.
        quantile_level: tail probability of the bands (0.05 gives 5%/95%).

    Observed reference values with magnitude below 1e-9 are skipped and
    counted in ``skipped_terms``.
    """
    if len(simulated) != len(data.levels):
        raise ValueError("need one simulated ensemble per stress level")
    means, uppers, lowers, skipped = [], [], [], 0
    for lvl, paths in zip(data.levels, simulated):
        grid = lvl.common_grid
        if grid is None:
            raise GridAlignmentError(f"units at stress {lvl.stress:g} do not share a measurement grid")
        paths = np.atleast_2d(np.asarray(paths, dtype=float))
        if paths.shape[1] != grid.size:
            raise GridAlignmentError(f"simulated paths at stress {lvl.stress:g} have {paths.shape[1]} "
                                     f"columns, expected {grid.size}")
        obs = np.vstack([u.values for u in lvl.units])
        pre = paths.mean(axis=0)
        pre_u = np.quantile(paths, 1.0 - quantile_level, axis=0)
        pre_l = np.quantile(paths, quantile_level, axis=0)
        for pred, ref, out in ((pre, obs.mean(axis=0), means), (pre_u, obs.max(axis=0), uppers),
                               (pre_l, obs.min(axis=0), lowers)):
            value, n_skip = _mean_rel(pred, ref)
            out.append(value)
            skipped += n_skip
    return ErReport([lvl.stress for lvl in data.levels], means, uppers, lowers, skipped)


def simulate_levels(theta: ThetaM0, data: AdtDataset, n_paths: int = 1000, master_seed: int = 0):
    """Simulated ensembles at every level's measurement grid."""
    from .reliability import simulate_at_times

    out = []
    for l, lvl in enumerate(data.levels):
        grid = lvl.common_grid
        if grid is None:
            raise GridAlignmentError(f"units at stress {lvl.stress:g} do not share a measurement grid")
        out.append(simulate_at_times(theta, data.s_star(l), grid, n_paths, master_seed + l))
    return out


class HeldOut(str, enum.Enum):
    LOWEST = "lowest_stress"
    HIGHEST = "highest_stress"


@dataclass(frozen=True)
class CrossValPlan:
    held_out: HeldOut

    def split(self, data: AdtDataset) -> tuple[list[int], int]:
        if len(data.levels) < 2:
            raise ValueError("cross-validation needs at least two stress levels")
        order = sorted(range(len(data.levels)), key=lambda i: data.levels[i].stress)
        test = order[0] if HeldOut(self.held_out) is HeldOut.LOWEST else order[-1]
        return [i for i in range(len(data.levels)) if i != test], test


@dataclass
class ModelRow:
    variant: str
    method: str
    theta: ThetaM0
    l_max: float
    n_params: int
    aic: float
    er: ErReport | None = None
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = {
            "variant": self.variant, "method": self.method, "theta": self.theta.to_dict(),
            "theta_sd": self.theta.sd_values(), "l_max": self.l_max, "n_params": self.n_params,
            "aic": self.aic, "warnings": list(self.warnings),
        }
        if self.er is not None:
            d["er"] = self.er.to_dict()
        return d


def compare_models(data: AdtDataset, variants=("M0", "M1", "M2", "M3"), *, epsilon: float = 0.01,
                   max_iter: int = 500, bounds=None, er_paths: int | None = 1000,
                   master_seed: int = 0) -> list[ModelRow]:
    """Fit each variant (EM for M0/M2, direct MLE for M1/M3) and score it."""
    from .inference import fit

    rows = []
    for v in variants:
        v = Variant(v)
        res = fit(data, v, epsilon=epsilon, max_iter=max_iter, bounds=bounds)
        er = None
        if er_paths:
            er = er_indices(data, simulate_levels(res.theta_hat, data, er_paths, master_seed))
        rows.append(ModelRow(v.value, res.method, res.theta_hat, res.l_max, v.n_params, res.aic, er,
                             res.warnings))
    return rows


def cross_validate(data: AdtDataset, plan: CrossValPlan, variant="M0", method: str | None = None, *,
                   n_paths: int = 1000, master_seed: int = 0, epsilon: float = 0.01, max_iter: int = 500,
                   bounds=None) -> tuple[ErReport, ThetaM0]:
    """Fit on all levels but one and score predictions on the held-out level.

    The held-out level keeps its standardized stress from the full design.
    """
    from .inference import fit

    train_idx, test_idx = plan.split(data)
    res = fit(data.subset(train_idx), variant, method, epsilon=epsilon, max_iter=max_iter, bounds=bounds)
    test = data.subset([test_idx])
    report = er_indices(test, simulate_levels(res.theta_hat, test, n_paths, master_seed))
    return report, res.theta_hat
