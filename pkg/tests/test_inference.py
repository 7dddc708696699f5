import numpy as np
import pytest
from scipy import integrate, optimize, stats

from fbmadt.data import AdtDataset, StressLevel, Unit
from fbmadt.exceptions import EstimationError
from fbmadt.fgn_fbm import fbm_gram
from fbmadt.inference import (
    SearchBounds,
    e_step,
    em_fit,
    fit,
    m_step_closed,
    mle_fixed,
    observed_loglik,
    posterior_drift,
    q_function,
    two_step_mle,
)
from fbmadt.model import AccelerationKind, StressSpec, ThetaM0, Variant, basis_vector
from fbmadt.streams import substream

SPEC = StressSpec(AccelerationKind.POWER_LAW, 1.0, 10.0)


def random_dataset(seed, n_levels=2, n_units=3, m=4, theta=None):
    rng = substream(1234, seed)
    theta = theta or ThetaM0(1.0, 0.04, 0.8, 1.2, 0.05, 0.35)
    levels = []
    for l in range(n_levels):
        stress = 1.0 + 9.0 * l / max(n_levels - 1, 1)
        units = []
        for i in range(n_units):
            t = np.cumsum(rng.uniform(0.2, 1.0, size=m))
            a = rng.normal(theta.mu_a, theta.sigma_a)
            s = np.log(stress) / np.log(10.0)
            cov = theta.sigma2 * fbm_gram(t, theta.h)
            x = a * basis_vector(theta, s, t) + rng.multivariate_normal(np.zeros(m), cov)
            units.append(Unit(f"u{l}{i}", t, x))
        levels.append(StressLevel(stress, units))
    return AdtDataset(levels, SPEC)


def dense_loglik(theta, data):
    total = 0.0
    for _, s, u in data.iter_units():
        psi = basis_vector(theta, s, u.times)
        cov = theta.sigma2 * fbm_gram(u.times, theta.h) + theta.sigma_a2 * np.outer(psi, psi)
        total += stats.multivariate_normal(theta.mu_a * psi, cov).logpdf(u.values)
    return total


class TestObservedLoglik:
    @pytest.mark.parametrize("h", [0.1, 0.5, 0.9])
    @pytest.mark.parametrize("variant", ["M0", "M1"])
    def test_matches_dense_gaussian(self, h, variant):
        data = random_dataset(7)
        theta = ThetaM0(0.9, 0.02, 0.5, 1.1, 0.07, h).with_variant(variant)
        assert observed_loglik(theta, data) == pytest.approx(dense_loglik(theta, data), rel=1e-10)

    def test_truth_beats_distorted(self, reference_medium):
        from fbmadt.simulator import REFERENCE_THETA

        ll = observed_loglik(REFERENCE_THETA, reference_medium)
        worse = ThetaM0(REFERENCE_THETA.mu_a, REFERENCE_THETA.sigma_a2, REFERENCE_THETA.alpha1, 1.3,
                        REFERENCE_THETA.sigma2, REFERENCE_THETA.h)
        assert ll > observed_loglik(worse, reference_medium)


class TestPosterior:
    @pytest.mark.parametrize("h", [0.1, 0.5, 0.9])
    def test_against_quadrature(self, h):
        rng = substream(99, int(h * 10))
        theta = ThetaM0(1.0, 0.09, 0.6, 1.3, 0.04, h)
        t = np.array([0.5, 1.0, 1.7])
        x = np.array([0.4, 1.1, 2.3]) + rng.normal(0, 0.05, 3)
        psi = basis_vector(theta, 0.4, t)
        cov = theta.sigma2 * fbm_gram(t, h)
        lik = stats.multivariate_normal(np.zeros(3), cov)
        prior = stats.norm(theta.mu_a, theta.sigma_a)

        def dens(a):
            return np.exp(lik.logpdf(x - a * psi)) * prior.pdf(a)

        lo, hi = theta.mu_a - 12 * theta.sigma_a, theta.mu_a + 12 * theta.sigma_a
        z = integrate.quad(dens, lo, hi, epsabs=0, epsrel=1e-12, limit=200)[0]
        m1 = integrate.quad(lambda a: a * dens(a), lo, hi, epsabs=0, epsrel=1e-12, limit=200)[0] / z
        m2 = integrate.quad(lambda a: (a - m1) ** 2 * dens(a), lo, hi, epsabs=0, epsrel=1e-12, limit=200)[0] / z
        post = posterior_drift(theta, x, t, 0.4)
        assert post.mu == pytest.approx(m1, rel=1e-8)
        assert post.sigma2 == pytest.approx(m2, rel=1e-7)

    def test_e_step_matches_single_unit(self):
        data = random_dataset(3)
        theta = ThetaM0(1.0, 0.03, 0.4, 1.2, 0.05, 0.3)
        post = e_step(theta, data)
        for k, (_, s, u) in enumerate(data.iter_units()):
            one = posterior_drift(theta, u.values, u.times, s)
            assert post.mu[k] == pytest.approx(one.mu, rel=1e-10)
            assert post.sigma2[k] == pytest.approx(one.sigma2, rel=1e-10)

    def test_zero_prior_variance_collapses(self):
        theta = ThetaM0(1.0, 0.0, 0.0, 1.0, 0.1, 0.5, Variant.M1)
        post = posterior_drift(theta, [5.0, 9.0], [1.0, 2.0], 0.0)
        assert post.mu == 1.0 and post.sigma2 == 0.0


class TestMStep:
    def test_closed_form_maximizes_q(self):
        data = random_dataset(11)
        theta = ThetaM0(1.0, 0.03, 0.4, 1.2, 0.05, 0.3)
        post = e_step(theta, data)
        mu_a, sa2, s2 = m_step_closed(post, data, 0.4, 1.2, 0.3)

        def neg_q(z):
            return -q_function(ThetaM0(z[0], np.exp(z[1]), 0.4, 1.2, np.exp(z[2]), 0.3), post, data)

        res = optimize.minimize(neg_q, [0.5, np.log(0.1), np.log(0.2)], method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 20000})
        assert mu_a == pytest.approx(res.x[0], rel=1e-4)
        assert sa2 == pytest.approx(np.exp(res.x[1]), rel=1e-4)
        assert s2 == pytest.approx(np.exp(res.x[2]), rel=1e-4)

    def test_q_rejects_degenerate(self):
        data = random_dataset(1)
        theta = ThetaM0(1.0, 0.0, 0.4, 1.2, 0.05, 0.3, Variant.M1)
        with pytest.raises(ValueError):
            q_function(theta, e_step(theta, data), data)


class TestEstimators:
    def test_em_monotone(self, reference_small):
        res = em_fit(reference_small)
        ll = [v for _, v in res.trace]
        assert all(b >= a - 1e-6 for a, b in zip(ll, ll[1:]))
        assert res.converged

    def test_em_beats_two_step(self, reference_small):
        ts = two_step_mle(reference_small)
        em = em_fit(reference_small, theta0=ts.theta_hat)
        assert em.l_max >= ts.l_max - 1e-9

    def test_em_m2_pins_hurst(self, reference_small):
        res = fit(reference_small, Variant.M2)
        assert res.theta_hat.h == 0.5 and res.theta_hat.variant is Variant.M2

    @pytest.mark.parametrize("variant", [Variant.M1, Variant.M3])
    def test_fixed_drift(self, reference_small, variant):
        res = mle_fixed(reference_small, variant)
        assert res.theta_hat.sigma_a2 == 0.0
        assert res.aic == pytest.approx(-2 * res.l_max + 2 * variant.n_params)
        # profiled optimum cannot be improved by a nudge in mu_a
        th = res.theta_hat
        nudged = ThetaM0(th.mu_a * 1.01, 0.0, th.alpha1, th.beta, th.sigma2, th.h, variant)
        assert res.l_max >= observed_loglik(nudged, reference_small)

    def test_m3_nested_in_m1(self, reference_small):
        assert mle_fixed(reference_small, "M1").l_max >= mle_fixed(reference_small, "M3").l_max - 1e-6

    def test_wrong_method_for_variant(self, reference_small):
        with pytest.raises(ValueError):
            mle_fixed(reference_small, "M0")
        with pytest.raises(ValueError):
            em_fit(reference_small, variant="M1")
        with pytest.raises(ValueError):
            fit(reference_small, "M0", method="bogus")
        with pytest.raises(ValueError):
            em_fit(reference_small, epsilon=0.0)

    def test_two_step_needs_two_units(self):
        data = random_dataset(2, n_levels=1, n_units=1)
        with pytest.raises(EstimationError):
            two_step_mle(data)

    def test_zero_sigma_a_start_is_reset(self, reference_small):
        from fbmadt.simulator import REFERENCE_THETA

        start = REFERENCE_THETA.with_variant("M1").with_variant("M0")
        res = em_fit(reference_small, theta0=start, max_iter=3)
        assert any("reset" in w for w in res.warnings)

    def test_search_bounds_roundtrip(self):
        b = SearchBounds(alpha1=(-5.0, 5.0))
        assert SearchBounds.from_dict(b.to_dict()) == b
        assert b.clip(10.0, 100.0, 2.0)[0] == 5.0

    def test_result_serializes(self, reference_small):
        import jsonschema

        from fbmadt.report import _clean
        from fbmadt.schemas import FIT

        jsonschema.validate(_clean(fit(reference_small, "M3").to_dict()), FIT)
