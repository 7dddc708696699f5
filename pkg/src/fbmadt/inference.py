"""Parameter estimation for the random-drift FBM degradation model.

Estimators:

* :func:`em_fit` -- EM with a Gaussian posterior for each unit's drift and a
  profile search over ``(alpha1, beta, H)`` in the M-step (variants M0, M2).
* :func:`two_step_mle` -- per-unit drifts first, drift distribution second.
* :func:`mle_fixed` -- direct likelihood maximization for constant-drift
  variants M1 and M3.

All likelihood work goes through :class:`Workspace`, which groups units that
share a measurement grid so each ``(H, grid)`` pair is factorized once.
Per-unit terms are always reduced in (level, unit) order.
"""

from __future__ import annotations

import logging
import math
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy.linalg import solve_triangular

from .data import AdtDataset
from .exceptions import ConditioningError, EstimationError
from .fgn_fbm import H_MAX, H_MIN, cholesky_jittered, fbm_gram
from .model import ThetaM0, Variant, basis_vector

logger = logging.getLogger(__name__)

LOG_2PI = math.log(2.0 * math.pi)
TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class SearchBounds:
    """Box for the profile search and the coarse grid resolution inside it."""

    alpha1: tuple[float, float] = (-20.0, 20.0)
    beta: tuple[float, float] = (1e-3, 5.0)
    h: tuple[float, float] = (H_MIN, H_MAX)
    alpha_points: int = 9
    beta_step: float = 0.25
    h_step: float = 0.05

    def alpha_grid(self) -> np.ndarray:
        return np.linspace(*self.alpha1, self.alpha_points)

    def beta_grid(self) -> np.ndarray:
        lo, hi = self.beta
        grid = np.arange(self.beta_step, hi + 1e-12, self.beta_step)
        return grid[grid >= lo]

    def h_grid(self) -> np.ndarray:
        lo, hi = self.h
        inner = np.arange(self.h_step, hi, self.h_step)
        inner = inner[(inner > lo) & (inner < hi - 1e-9)]
        return np.concatenate([[lo], inner, [hi]])

    def clip(self, alpha1, beta, h):
        return (
            float(np.clip(alpha1, *self.alpha1)),
            float(np.clip(beta, *self.beta)),
            float(np.clip(h, *self.h)),
        )

    def to_dict(self) -> dict:
        return {
            "alpha1": list(self.alpha1), "beta": list(self.beta), "h": list(self.h),
            "alpha_points": self.alpha_points, "beta_step": self.beta_step, "h_step": self.h_step,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SearchBounds":
        base = cls()
        return cls(
            tuple(d.get("alpha1", base.alpha1)), tuple(d.get("beta", base.beta)), tuple(d.get("h", base.h)),
            int(d.get("alpha_points", base.alpha_points)), float(d.get("beta_step", base.beta_step)),
            float(d.get("h_step", base.h_step)),
        )


@dataclass(frozen=True)
class UnitStats:
    """Per-unit quadratic forms with ``tau = t**beta`` (global unit order)."""

    xSx: np.ndarray
    xSt: np.ndarray
    tSt: np.ndarray
    logdet: np.ndarray


class Workspace:
    """Cached factorizations of the unit-diffusion FBM covariance per grid."""

    def __init__(self, data: AdtDataset, cache_size: int = 128):
        self.data = data
        s_star, m, groups = [], [], OrderedDict()
        for idx, (_, s, unit) in enumerate(data.iter_units()):
            s_star.append(s)
            m.append(unit.times.size)
            groups.setdefault(tuple(unit.times), []).append((idx, unit.values))
        self.s_star = np.asarray(s_star)
        self.m = np.asarray(m)
        self.n_units = len(m)
        self.n_obs = int(self.m.sum())
        self.groups = [
            (np.asarray(times), np.asarray([i for i, _ in members]), np.vstack([v for _, v in members]).T)
            for times, members in groups.items()
        ]
        self._cache: OrderedDict[float, tuple] = OrderedDict()
        self._cache_size = cache_size

    def _factor(self, h: float):
        hit = self._cache.get(h)
        if hit is not None:
            self._cache.move_to_end(h)
            return hit
        factors = []
        xSx = np.empty(self.n_units)
        logdet = np.empty(self.n_units)
        for times, idx, X in self.groups:
            L = cholesky_jittered(fbm_gram(times, h))
            Y = solve_triangular(L, X, lower=True, check_finite=False)
            xSx[idx] = np.einsum("ij,ij->j", Y, Y)
            logdet[idx] = 2.0 * np.sum(np.log(np.diag(L)))
            factors.append((L, Y))
        entry = (factors, xSx, logdet)
        self._cache[h] = entry
        if len(self._cache) > self._cache_size:
            self._cache.popitem(last=False)
        return entry

    def stats(self, h: float, beta: float) -> UnitStats:
        factors, xSx, logdet = self._factor(float(h))
        xSt = np.empty(self.n_units)
        tSt = np.empty(self.n_units)
        for (times, idx, _), (L, Y) in zip(self.groups, factors):
            w = solve_triangular(L, times**beta, lower=True, check_finite=False)
            xSt[idx] = Y.T @ w
            tSt[idx] = w @ w
        return UnitStats(xSx, xSt, tSt, logdet)


# --------------------------------------------------------------------------
# Likelihood pieces
# --------------------------------------------------------------------------


def _loglik_terms(st: UnitStats, s_star, m, mu_a, sigma_a2, alpha1, sigma2) -> np.ndarray:
    e = np.exp(alpha1 * s_star)
    psp = e * e * st.tSt
    xsp = e * st.xSt
    rSr = st.xSx - 2.0 * mu_a * xsp + mu_a * mu_a * psp
    rSp = xsp - mu_a * psp
    c = sigma_a2 / sigma2
    shrink = 1.0 + c * psp
    quad = (rSr - c * rSp * rSp / shrink) / sigma2
    logdet = m * math.log(sigma2) + st.logdet + np.log(shrink)
    return -0.5 * (m * LOG_2PI + logdet + quad)


def observed_loglik(theta: ThetaM0, data: AdtDataset, workspace: Workspace | None = None) -> float:
    """Marginal log-likelihood with every unit's drift integrated out.

    Unit ``i`` contributes ``log N(x_i; mu_a psi_i, sigma2 Sigma_i + sigma_a2 psi_i psi_i')``;
    the rank-one term is handled with the matrix determinant lemma and
    Sherman-Morrison on top of the Cholesky factor of ``Sigma_i``.
    """
    ws = workspace or Workspace(data)
    st = ws.stats(theta.h, theta.beta)
    terms = _loglik_terms(st, ws.s_star, ws.m, theta.mu_a, theta.sigma_a2, theta.alpha1, theta.sigma2)
    return float(np.sum(terms))


@dataclass(frozen=True)
class DriftPosterior:
    mu: float
    sigma2: float


@dataclass(frozen=True)
class DriftPosteriors:
    """Posterior means and variances of the drifts, in (level, unit) order."""

    mu: np.ndarray
    sigma2: np.ndarray


def _posterior_arrays(theta: ThetaM0, st: UnitStats, s_star):
    e = np.exp(theta.alpha1 * s_star)
    psp = e * e * st.tSt
    xsp = e * st.xSt
    denom = psp * theta.sigma_a2 + theta.sigma2
    mu = (xsp * theta.sigma_a2 + theta.mu_a * theta.sigma2) / denom
    var = theta.sigma2 * theta.sigma_a2 / denom
    return mu, var


def posterior_drift(theta_p: ThetaM0, values, times, s_star: float) -> DriftPosterior:
    """Gaussian posterior of one unit's drift given its observations."""
    t = np.asarray(times, dtype=float)
    x = np.asarray(values, dtype=float)
    L = cholesky_jittered(fbm_gram(t, theta_p.h))
    y = solve_triangular(L, x, lower=True)
    w = solve_triangular(L, t**theta_p.beta, lower=True)
    st = UnitStats(np.array([y @ y]), np.array([y @ w]), np.array([w @ w]), np.zeros(1))
    mu, var = _posterior_arrays(theta_p, st, np.array([s_star]))
    return DriftPosterior(float(mu[0]), float(var[0]))


def e_step(theta: ThetaM0, data: AdtDataset, workspace: Workspace | None = None) -> DriftPosteriors:
    ws = workspace or Workspace(data)
    mu, var = _posterior_arrays(theta, ws.stats(theta.h, theta.beta), ws.s_star)
    return DriftPosteriors(mu, var)


def _residual_sums(st: UnitStats, s_star, post: DriftPosteriors, alphas) -> np.ndarray:
    """Sum over units of E[(x - a psi)' Sigma^-1 (x - a psi)] for each alpha."""
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    e = np.exp(np.outer(alphas, s_star))
    second = post.mu**2 + post.sigma2
    return (np.sum(st.xSx) - 2.0 * (e * (post.mu * st.xSt)).sum(axis=1)
            + (e * e * (second * st.tSt)).sum(axis=1))


def q_function(theta: ThetaM0, posteriors: DriftPosteriors, data: AdtDataset,
               workspace: Workspace | None = None) -> float:
    """Expected complete-data log-likelihood under the given drift posteriors.

    Each unit contributes an ``m``-variate Gaussian term for its observations
    and a univariate Gaussian term for its drift.
    """
    if not theta.sigma_a2 > 0:
        raise ValueError("q_function needs sigma_a2 > 0")
    ws = workspace or Workspace(data)
    st = ws.stats(theta.h, theta.beta)
    e = np.exp(theta.alpha1 * ws.s_star)
    mu, v = posteriors.mu, posteriors.sigma2
    second = mu * mu + v
    resid = st.xSx - 2.0 * mu * e * st.xSt + second * e * e * st.tSt
    prior = second - 2.0 * mu * theta.mu_a + theta.mu_a**2
    terms = ((ws.m + 1) * LOG_2PI + st.logdet + ws.m * math.log(theta.sigma2) + math.log(theta.sigma_a2)
             + resid / theta.sigma2 + prior / theta.sigma_a2)
    return float(-0.5 * np.sum(terms))


def m_step_closed(posteriors: DriftPosteriors, data: AdtDataset, alpha1: float, beta: float, h: float,
                  workspace: Workspace | None = None) -> tuple[float, float, float]:
    """Closed-form ``(mu_a, sigma_a2, sigma2)`` maximizing the expected log-likelihood."""
    ws = workspace or Workspace(data)
    mu, v = posteriors.mu, posteriors.sigma2
    mu_a = float(np.mean(mu))
    sigma_a2 = float(np.mean(mu * mu + v - 2.0 * mu * mu_a + mu_a * mu_a))
    assert sigma_a2 >= -1e-12 * max(mu_a * mu_a, TINY), "negative drift variance"
    sigma_a2 = max(sigma_a2, 0.0)
    st = ws.stats(h, beta)
    sigma2 = float(_residual_sums(st, ws.s_star, posteriors, alpha1)[0]) / ws.n_obs
    return mu_a, sigma_a2, max(sigma2, TINY)


# --------------------------------------------------------------------------
# Profile search
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ProfileResult:
    alpha1: float
    beta: float
    h: float
    value: float
    converged: bool


def _grid_then_polish(score, bounds: SearchBounds, *, fit_alpha: bool, fit_h: bool, fixed_h: float = 0.5,
                      fixed_alpha: float = 0.0, starts=(), n_polish: int = 3) -> ProfileResult:
    """Maximize ``score(h, beta, alphas) -> array`` over the box.

    A coarse grid is scanned first; bounded Nelder-Mead then polishes from the
    best few grid points and from every point in ``starts``.
    """
    alphas = bounds.alpha_grid() if fit_alpha else np.array([fixed_alpha])
    hs = bounds.h_grid() if fit_h else np.array([fixed_h])
    candidates = []
    for h in hs:
        for beta in bounds.beta_grid():
            try:
                vals = score(float(h), float(beta), alphas)
            except ConditioningError:
                continue
            for a, v in zip(alphas, vals):
                if np.isfinite(v):
                    candidates.append((float(v), float(a), float(beta), float(h)))
    candidates.sort(key=lambda c: -c[0])
    seeds = [bounds.clip(a, b, h) for _, a, b, h in candidates[:n_polish]]
    seeds += [bounds.clip(*s) for s in starts]
    if not seeds:
        raise EstimationError("profile likelihood is not finite anywhere on the search grid")

    names = [n for n, keep in (("alpha1", fit_alpha), ("beta", True), ("h", fit_h)) if keep]
    box = [getattr(bounds, n) for n in names]
    steps = {"alpha1": 0.25, "beta": 0.05, "h": 0.05}

    def unpack(z):
        p = dict(zip(names, z))
        return p.get("alpha1", fixed_alpha), p["beta"], p.get("h", fixed_h)

    def neg(z):
        a, b, h = unpack(z)
        try:
            v = float(score(h, b, np.array([a]))[0])
        except ConditioningError:
            return np.inf
        return -v if np.isfinite(v) else np.inf

    best, best_ok = None, False
    seen = set()
    for seed in seeds:
        z0 = np.array([dict(zip(("alpha1", "beta", "h"), seed))[n] for n in names])
        key = tuple(np.round(z0, 12))
        if key in seen:
            continue
        seen.add(key)
        simplex = [z0]
        for j, n in enumerate(names):
            z = z0.copy()
            lo, hi = box[j]
            z[j] = z0[j] + steps[n] if z0[j] + steps[n] <= hi else z0[j] - steps[n]
            z[j] = min(max(z[j], lo), hi)
            simplex.append(z)
        res = optimize.minimize(
            neg, z0, method="Nelder-Mead", bounds=box,
            options={"initial_simplex": np.array(simplex), "xatol": 1e-7, "fatol": 1e-10,
                     "maxiter": 4000, "maxfev": 8000},
        )
        if best is None or res.fun < best.fun:
            best, best_ok = res, bool(res.success)
    if not np.isfinite(best.fun):
        raise EstimationError("profile search failed: no finite likelihood found")
    a, b, h = unpack(best.x)
    if not best_ok:
        logger.warning("profile search did not meet its tolerance; returning best point found")
    return ProfileResult(float(a), float(b), float(h), float(-best.fun), best_ok)


def _em_profile_score(ws: Workspace, post: DriftPosteriors):
    n = ws.n_obs

    def score(h, beta, alphas):
        st = ws.stats(h, beta)
        s2 = np.maximum(_residual_sums(st, ws.s_star, post, alphas) / n, TINY)
        return -0.5 * np.sum(st.logdet) - 0.5 * n * np.log(s2)

    return score


def profile_search(data: AdtDataset, posteriors: DriftPosteriors, bounds: SearchBounds | None = None,
                   *, fixed_h: float | None = None, start=None,
                   workspace: Workspace | None = None) -> ProfileResult:
    """Maximize the expected log-likelihood over ``(alpha1, beta, H)``.

    ``sigma2`` is profiled out in closed form at every candidate point;
    ``mu_a`` and ``sigma_a2`` do not interact with these three parameters.
    ``fixed_h`` pins the Hurst exponent (Brownian variant).  The returned
    ``value`` omits constant terms.
    """
    ws = workspace or Workspace(data)
    bounds = bounds or SearchBounds()
    return _grid_then_polish(
        _em_profile_score(ws, posteriors), bounds, fit_alpha=True, fit_h=fixed_h is None,
        fixed_h=0.5 if fixed_h is None else fixed_h, starts=[start] if start is not None else (),
    )


# --------------------------------------------------------------------------
# Estimators
# --------------------------------------------------------------------------


@dataclass
class FitResult:
    theta_hat: ThetaM0
    l_max: float
    aic: float
    iterations: int
    converged: bool
    method: str
    trace: list[tuple[ThetaM0, float]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "variant": self.theta_hat.variant.value,
            "theta": self.theta_hat.to_dict(),
            "theta_sd": self.theta_hat.sd_values(),
            "n_params": self.theta_hat.variant.n_params,
            "l_max": self.l_max,
            "aic": self.aic,
            "iterations": self.iterations,
            "converged": self.converged,
            "trace": [{"theta": t.to_dict(), "loglik": ll} for t, ll in self.trace],
            "warnings": list(self.warnings),
        }


def _aic(l_max: float, variant: Variant) -> float:
    from .evaluation import aic

    return aic(l_max, variant.n_params)


def _relative_change(new: ThetaM0, old: ThetaM0) -> float:
    a, b = new.as_vector(), old.as_vector()
    return float(np.max(np.abs(a - b) / (np.abs(b) + 1e-12)))


def em_fit(data: AdtDataset, theta0: ThetaM0 | None = None, epsilon: float = 0.01, max_iter: int = 500,
           bounds: SearchBounds | None = None, variant: Variant | str | None = None) -> FitResult:
    """Fit a random-drift variant (M0 or M2) by expectation-maximization.

    Each iteration computes drift posteriors, updates ``mu_a`` and
    ``sigma_a2`` in closed form, searches ``(alpha1, beta, H)`` on the
    profile of the expected log-likelihood (``H`` pinned to 0.5 for M2) and
    finally sets ``sigma2`` in closed form.  Iteration stops when the largest
    relative parameter change is at most ``epsilon``.

    When ``theta0`` is omitted the two-step estimate is used as start.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be > 0")
    if theta0 is None:
        theta0 = two_step_mle(data, Variant(variant or Variant.M0), bounds=bounds).theta_hat
    elif variant is not None:
        theta0 = theta0.with_variant(variant)
    variant = theta0.variant
    if not variant.random_drift:
        raise ValueError(f"em_fit needs a random-drift variant (M0 or M2), got {variant.value}")
    bounds = bounds or SearchBounds()
    warnings: list[str] = []
    if theta0.sigma_a2 <= 0:
        theta0 = ThetaM0(theta0.mu_a, 1e-4 * theta0.mu_a**2, theta0.alpha1, theta0.beta, theta0.sigma2,
                         theta0.h, variant)
        warnings.append("initial sigma_a2 was 0; reset to 1e-4 * mu_a^2")
    ws = Workspace(data)
    fixed_h = None if variant.free_hurst else 0.5

    theta = theta0
    trace = [(theta, observed_loglik(theta, data, ws))]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        post = e_step(theta, data, ws)
        mu_a = float(np.mean(post.mu))
        sigma_a2 = float(np.mean(post.mu**2 + post.sigma2 - 2.0 * post.mu * mu_a + mu_a**2))
        prof = profile_search(data, post, bounds, fixed_h=fixed_h,
                              start=(theta.alpha1, theta.beta, theta.h), workspace=ws)
        if not prof.converged:
            warnings.append(f"iteration {it}: profile search flagged non-convergence")
        _, _, sigma2 = m_step_closed(post, data, prof.alpha1, prof.beta, prof.h, ws)
        new = ThetaM0(mu_a, max(sigma_a2, TINY), prof.alpha1, prof.beta, sigma2, prof.h, variant)
        trace.append((new, observed_loglik(new, data, ws)))
        change = _relative_change(new, theta)
        theta = new
        if change <= epsilon:
            converged = True
            break
    best_theta, best_ll = max(trace, key=lambda p: p[1])
    if not converged:
        warnings.append(f"EM did not converge within {max_iter} iterations")
    return FitResult(best_theta, best_ll, _aic(best_ll, variant), it, converged, "em", trace, warnings)


def _drift_rates(st: UnitStats) -> np.ndarray:
    return st.xSt / st.tSt


def two_step_mle(data: AdtDataset, variant: Variant | str = Variant.M0,
                 bounds: SearchBounds | None = None) -> FitResult:
    """Two-step baseline for the random-drift variants.

    Step 1 fits ``(beta, H, sigma2)`` with a free drift rate per unit
    (generalized least squares, profiled out).  Step 2 treats the unit rates
    ``b_i = a_i exp(alpha1 s*_i)`` as data and maximizes their Gaussian
    likelihood over ``(mu_a, sigma_a2, alpha1)``; for a fixed ``alpha1`` this
    gives the sample mean and the ``1/n`` sample variance of
    ``b_i exp(-alpha1 s*_i)``.
    """
    variant = Variant(variant)
    if not variant.random_drift:
        raise ValueError("two_step_mle applies to random-drift variants M0 and M2")
    if data.n_units < 2:
        raise EstimationError("two-step MLE needs at least two units to estimate sigma_a2")
    if any(u.times.size < 2 for _, _, u in data.iter_units()):
        raise EstimationError("two-step MLE needs at least two measurements per unit")
    bounds = bounds or SearchBounds()
    ws = Workspace(data)
    n = ws.n_obs

    def score(h, beta, alphas):
        st = ws.stats(h, beta)
        s2 = max(float(np.sum(st.xSx - st.xSt**2 / st.tSt)) / n, TINY)
        val = -0.5 * np.sum(st.logdet) - 0.5 * n * (math.log(s2) + 1.0 + LOG_2PI)
        return np.full(len(alphas), val)

    step1 = _grid_then_polish(score, bounds, fit_alpha=False, fit_h=variant.free_hurst)
    st = ws.stats(step1.h, step1.beta)
    sigma2 = max(float(np.sum(st.xSx - st.xSt**2 / st.tSt)) / n, TINY)
    rates = _drift_rates(st)
    s = ws.s_star
    k = rates.size

    def moments(alpha):
        a = rates * np.exp(-alpha * s)
        mu = float(np.mean(a))
        return mu, float(np.mean((a - mu) ** 2))

    def neg_ll(alpha):
        _, var = moments(alpha)
        return 0.5 * k * math.log(max(var, TINY)) + alpha * float(np.sum(s))

    grid = np.linspace(*bounds.alpha1, 161)
    vals = [neg_ll(a) for a in grid]
    j = int(np.argmin(vals))
    lo, hi = grid[max(j - 1, 0)], grid[min(j + 1, grid.size - 1)]
    res = optimize.minimize_scalar(neg_ll, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    alpha1 = float(res.x) if res.fun <= vals[j] else float(grid[j])
    mu_a, sigma_a2 = moments(alpha1)
    theta = ThetaM0(mu_a, sigma_a2, alpha1, step1.beta, sigma2, step1.h, variant)
    ll = observed_loglik(theta, data, ws) if sigma_a2 > 0 or sigma2 > TINY else float("nan")
    warnings = [] if step1.converged else ["step-1 profile search flagged non-convergence"]
    return FitResult(theta, ll, _aic(ll, variant), 1, step1.converged, "two_step",
                     [(theta, ll)], warnings)


def mle_fixed(data: AdtDataset, variant: Variant | str = Variant.M1,
              bounds: SearchBounds | None = None) -> FitResult:
    """Direct maximum likelihood for a constant drift (variants M1 and M3).

    ``mu_a`` (generalized least squares) and ``sigma2`` are profiled out;
    the remaining ``(alpha1, beta, H)`` search uses the same grid-then-polish
    strategy as the EM M-step.
    """
    variant = Variant(variant)
    if variant.random_drift:
        raise ValueError("mle_fixed applies to constant-drift variants M1 and M3")
    bounds = bounds or SearchBounds()
    ws = Workspace(data)
    n = ws.n_obs

    def profiled(st, alphas):
        e = np.exp(np.outer(alphas, ws.s_star))
        num = (e * st.xSt).sum(axis=1)
        den = (e * e * st.tSt).sum(axis=1)
        mu = num / den
        s2 = (np.sum(st.xSx) - mu * num) / n
        return mu, np.maximum(s2, TINY)

    def score(h, beta, alphas):
        st = ws.stats(h, beta)
        _, s2 = profiled(st, np.asarray(alphas, dtype=float))
        return -0.5 * np.sum(st.logdet) - 0.5 * n * (np.log(s2) + 1.0 + LOG_2PI)

    prof = _grid_then_polish(score, bounds, fit_alpha=True, fit_h=variant.free_hurst)
    st = ws.stats(prof.h, prof.beta)
    mu, s2 = profiled(st, np.array([prof.alpha1]))
    theta = ThetaM0(float(mu[0]), 0.0, prof.alpha1, prof.beta, float(s2[0]), prof.h, variant)
    ll = observed_loglik(theta, data, ws)
    warnings = [] if prof.converged else ["profile search flagged non-convergence"]
    return FitResult(theta, ll, _aic(ll, variant), 1, prof.converged, "mle_fixed", [(theta, ll)], warnings)


def fit(data: AdtDataset, variant: Variant | str = Variant.M0, method: str | None = None,
        epsilon: float = 0.01, max_iter: int = 500, bounds: SearchBounds | None = None,
        theta0: ThetaM0 | None = None) -> FitResult:
    """Dispatch to the estimator matching ``method`` (default by variant)."""
    variant = Variant(variant)
    if method is None:
        method = "em" if variant.random_drift else "mle_fixed"
    if method == "em":
        return em_fit(data, theta0, epsilon, max_iter, bounds, variant)
    if method == "two_step":
        return two_step_mle(data, variant, bounds)
    if method == "mle_fixed":
        return mle_fixed(data, variant, bounds)
    raise ValueError(f"unknown fit method {method!r}")


