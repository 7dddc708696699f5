"""Synthetic constant-stress ADT datasets and estimator sweeps."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .data import AdtDataset, StressLevel, Unit
from .fgn_fbm import cholesky_jittered, fbm_gram
from .model import AccelerationKind, StressSpec, ThetaM0, Variant, normalize_stress
from .streams import TAG_DATASET, substream

logger = logging.getLogger(__name__)

# Simulation settings of the reference study (temperatures in degC).
REFERENCE_THETA = ThetaM0.from_sd(1e-5, 2e-6, 2.5, 1.5, 0.1, 0.1)
REFERENCE_STRESSES = (80.0, 100.0, 120.0)
REFERENCE_NORMAL = 40.0
REFERENCE_INTERVAL = 100.0
REFERENCE_THRESHOLD = 5.0
DESIGN_GRID = tuple((n, m) for n in (6, 12, 18) for m in (10, 20, 30))


@dataclass(frozen=True)
class SimDesign:
    stress_levels: tuple[float, ...] = REFERENCE_STRESSES
    normal_stress: float = REFERENCE_NORMAL
    acceleration: AccelerationKind = AccelerationKind.ARRHENIUS
    n_units_per_level: int = 6
    n_measurements: int = 10
    inspection_interval: float = REFERENCE_INTERVAL
    theta_true: ThetaM0 = REFERENCE_THETA
    master_seed: int = 0
    truncate_negative_drift: bool = False

    def __post_init__(self):
        if self.n_units_per_level < 1 or self.n_measurements < 1:
            raise ValueError("design needs at least one unit per level and one measurement")
        if not self.inspection_interval > 0:
            raise ValueError("inspection interval must be > 0")
        if not self.stress_levels:
            raise ValueError("design needs at least one stress level")

    @property
    def stress_spec(self) -> StressSpec:
        return StressSpec(AccelerationKind(self.acceleration), self.normal_stress, max(self.stress_levels))

    @property
    def times(self) -> np.ndarray:
        return self.inspection_interval * np.arange(1, self.n_measurements + 1)

    def to_dict(self) -> dict:
        return {
            "stress_levels": list(self.stress_levels),
            "normal_stress": self.normal_stress,
            "acceleration": AccelerationKind(self.acceleration).value,
            "n_units_per_level": self.n_units_per_level,
            "n_measurements": self.n_measurements,
            "inspection_interval": self.inspection_interval,
            "theta_true": self.theta_true.to_dict(),
            "master_seed": self.master_seed,
            "truncate_negative_drift": self.truncate_negative_drift,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SimDesign":
        base = cls()
        return cls(
            tuple(float(s) for s in d.get("stress_levels", base.stress_levels)),
            float(d.get("normal_stress", base.normal_stress)),
            AccelerationKind(d.get("acceleration", base.acceleration)),
            int(d.get("n_units_per_level", base.n_units_per_level)),
            int(d.get("n_measurements", base.n_measurements)),
            float(d.get("inspection_interval", base.inspection_interval)),
            ThetaM0.from_dict(d["theta_true"]) if "theta_true" in d else base.theta_true,
            int(d.get("master_seed", base.master_seed)),
            bool(d.get("truncate_negative_drift", base.truncate_negative_drift)),
        )


def draw_drift(theta: ThetaM0, rng: np.random.Generator, truncate: bool = False) -> float:
    """One unit's drift ``a ~ N(mu_a, sigma_a2)``; optionally resampled until positive."""
    a = theta.mu_a + theta.sigma_a * rng.standard_normal()
    while truncate and a <= 0:
        a = theta.mu_a + theta.sigma_a * rng.standard_normal()
    return float(a)


def _simulate_unit(design: SimDesign, level: int, unit: int, s_star: float, factor: np.ndarray) -> Unit:
    theta = design.theta_true
    rng = substream(design.master_seed, TAG_DATASET, level, unit)
    a = draw_drift(theta, rng, design.truncate_negative_drift)
    noise = factor @ rng.standard_normal(factor.shape[0])
    t = design.times
    x = a * np.exp(theta.alpha1 * s_star) * t**theta.beta + theta.sigma * noise
    return Unit(f"L{level}U{unit}", t, x)


def generate_dataset(design: SimDesign, workers: int = 1) -> AdtDataset:
    """Simulate every unit of the design with exact Cholesky FBM sampling.

    Unit ``(l, i)`` draws from its own substream of ``master_seed``, so the
    result does not depend on ``workers``.
    """
    spec = design.stress_spec
    factor = cholesky_jittered(fbm_gram(design.times, design.theta_true.h))
    jobs = [(l, i, normalize_stress(s, spec)) for l, s in enumerate(design.stress_levels)
            for i in range(design.n_units_per_level)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            units = list(pool.map(lambda j: _simulate_unit(design, j[0], j[1], j[2], factor), jobs))
    else:
        units = [_simulate_unit(design, l, i, s, factor) for l, i, s in jobs]
    levels = []
    n = design.n_units_per_level
    for l, s in enumerate(design.stress_levels):
        levels.append(StressLevel(float(s), units[l * n : (l + 1) * n]))
    return AdtDataset(levels, spec)


@dataclass
class SweepRow:
    n_units: int
    n_measurements: int
    replication: int
    seed: int
    method: str
    variant: str
    theta: dict | None
    l_max: float | None
    aic: float | None
    re: float | None
    iterations: int | None
    converged: bool | None
    error: str | None = None


@dataclass
class SweepReport:
    rows: list[SweepRow] = field(default_factory=list)

    def for_design(self, n: int, m: int, method: str | None = None) -> list[SweepRow]:
        return [r for r in self.rows
                if r.n_units == n and r.n_measurements == m and (method is None or r.method == method)]

    def summary(self) -> list[dict]:
        """Per design and method: median RE, median l_max, and EM l_max win-rate."""
        out = []
        designs = sorted({(r.n_units, r.n_measurements) for r in self.rows})
        methods = sorted({r.method for r in self.rows})
        for n, m in designs:
            for method in methods:
                rows = [r for r in self.for_design(n, m, method) if r.error is None]
                if not rows:
                    continue
                entry = {
                    "n_units": n, "n_measurements": m, "method": method, "n_ok": len(rows),
                    "median_re": float(np.median([r.re for r in rows])),
                    "median_l_max": float(np.median([r.l_max for r in rows])),
                }
                out.append(entry)
            em = {r.replication: r for r in self.for_design(n, m, "em") if r.error is None}
            ts = {r.replication: r for r in self.for_design(n, m, "two_step") if r.error is None}
            common = sorted(set(em) & set(ts))
            if common:
                wins = sum(em[k].l_max >= ts[k].l_max - 1e-6 for k in common)
                out.append({"n_units": n, "n_measurements": m, "method": "em_vs_two_step",
                            "l_max_win_rate": wins / len(common)})
        return out

    def to_dict(self) -> dict:
        return {"rows": [r.__dict__ for r in self.rows], "summary": self.summary()}


def run_design_sweep(designs, replications: int, methods=("two_step", "em"), *,
                     base: SimDesign | None = None, variant: Variant | str = Variant.M0,
                     master_seed: int = 0, epsilon: float = 0.01, bounds=None, workers: int = 1) -> SweepReport:
    """Generate, fit and score every ``(N, M)`` design ``replications`` times.

    Replication ``r`` of a design uses seed ``master_seed + r`` for data
    generation.  ``em`` starts from the two-step estimate of the same data.
    Fit failures become rows with ``error`` set.
    """
    from .evaluation import relative_error
    from .inference import em_fit, fit, two_step_mle

    if replications < 1:
        raise ValueError("replications must be >= 1")
    base = base or SimDesign()
    variant = Variant(variant)
    truth = base.theta_true.with_variant(variant)

    def one(job):
        (n, m), r = job
        seed = master_seed + r
        design = replace(base, n_units_per_level=n, n_measurements=m, master_seed=seed)
        data = generate_dataset(design)
        rows, two = [], None
        for method in methods:
            try:
                if method == "em":
                    if two is None:
                        two = two_step_mle(data, variant, bounds)
                    res = em_fit(data, two.theta_hat, epsilon, bounds=bounds)
                elif method == "two_step":
                    res = two = two_step_mle(data, variant, bounds)
                else:
                    res = fit(data, variant, method, epsilon=epsilon, bounds=bounds)
                re = relative_error(res.theta_hat, truth)
                rows.append(SweepRow(n, m, r, seed, method, res.theta_hat.variant.value, res.theta_hat.to_dict(),
                                     res.l_max, res.aic, re, res.iterations, res.converged))
            except Exception as exc:  # noqa: BLE001 - recorded, sweep continues
                logger.warning("fit failed for design (%d, %d) rep %d method %s: %s", n, m, r, method, exc)
                rows.append(SweepRow(n, m, r, seed, method, variant.value, None, None, None, None, None, None,
                                     f"{type(exc).__name__}: {exc}"))
        return rows

    jobs = [(tuple(d), r) for d in designs for r in range(replications)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, jobs))
    else:
        results = [one(j) for j in jobs]
    return SweepReport([row for rows in results for row in rows])
