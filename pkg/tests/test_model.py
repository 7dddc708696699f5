import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fbmadt.exceptions import StressDomainError
from fbmadt.model import (
    AccelerationKind,
    StressSpec,
    ThetaM0,
    Variant,
    basis_vector,
    drift_distribution,
    normalize_stress,
    trend,
)

ARR = StressSpec(AccelerationKind.ARRHENIUS, 40.0, 120.0)
TRUTH = ThetaM0.from_sd(1e-5, 2e-6, 2.5, 1.5, 0.1, 0.1)


class TestNormalizeStress:
    def test_endpoints(self):
        assert normalize_stress(40.0, ARR) == 0.0
        assert normalize_stress(120.0, ARR) == 1.0

    def test_arrhenius_kelvin(self):
        assert normalize_stress(100.0, ARR) == pytest.approx(0.79018, abs=1e-4)

    def test_power_and_exponential(self):
        pw = StressSpec(AccelerationKind.POWER_LAW, 10.0, 1000.0)
        assert normalize_stress(100.0, pw) == pytest.approx(0.5)
        ex = StressSpec(AccelerationKind.EXPONENTIAL, 10.0, 30.0)
        assert normalize_stress(25.0, ex) == pytest.approx(0.75)

    def test_domain_errors(self):
        with pytest.raises(StressDomainError):
            normalize_stress(-5.0, StressSpec(AccelerationKind.POWER_LAW, 1.0, 10.0))
        with pytest.raises(StressDomainError):
            StressSpec(AccelerationKind.ARRHENIUS, 40.0, 40.0)
        with pytest.raises(StressDomainError):
            normalize_stress(-300.0, ARR)

    @given(st.sampled_from(list(AccelerationKind)), st.floats(1.0, 100.0), st.floats(1.0, 100.0))
    def test_monotone(self, kind, a, b):
        spec = StressSpec(kind, 5.0, 150.0)
        lo, hi = sorted((a, b))
        assert normalize_stress(lo, spec) <= normalize_stress(hi, spec) + 1e-15

    @given(st.sampled_from(list(AccelerationKind)), st.floats(1.0, 50.0), st.floats(60.0, 300.0))
    def test_fixed_points_exact(self, kind, s0, sh):
        spec = StressSpec(kind, s0, sh)
        assert normalize_stress(s0, spec) == 0.0
        assert normalize_stress(sh, spec) == 1.0


class TestTrend:
    def test_drift_distribution(self):
        assert drift_distribution(TRUTH, 0.0) == pytest.approx((1e-5, 2e-6))
        mu, sd = drift_distribution(TRUTH, 1.0)
        assert mu == pytest.approx(1.21825e-4, rel=1e-5)
        assert sd == pytest.approx(2.43649e-5, rel=1e-5)
        assert drift_distribution(TRUTH.with_variant("M1"), 0.7)[1] == 0.0

    def test_trend_values(self):
        assert trend(TRUTH, 1.0, 0.0) == 0.0
        assert trend(TRUTH, 1.0, 100.0) == pytest.approx(0.121825, rel=1e-5)
        lin = ThetaM0(2.0, 0.1, 0.3, 1.0, 1.0)
        assert trend(lin, 0.4, 20.0) == pytest.approx(2 * trend(lin, 0.4, 10.0))

    def test_basis_vector(self):
        flat = ThetaM0(1.0, 0.1, 0.0, 1.0, 1.0)
        np.testing.assert_allclose(basis_vector(flat, 0.8, [1.0, 2.0, 5.0]), [1.0, 2.0, 5.0])
        np.testing.assert_allclose(basis_vector(TRUTH, 0.0, [100.0, 200.0]), [1000.0, 2828.4271], rtol=1e-7)
        assert basis_vector(TRUTH, 0.3, np.arange(1, 8.0)).shape == (7,)

    @given(st.floats(0.0, 1.0), st.floats(1.0, 5000.0))
    def test_constant_drift_trend(self, s, t):
        th = TRUTH.with_variant("M3")
        assert trend(th, s, t) == pytest.approx(th.mu_a * basis_vector(th, s, [t])[0], rel=1e-12)


class TestTheta:
    def test_variant_masks(self):
        m1 = TRUTH.with_variant(Variant.M1)
        assert m1.sigma_a2 == 0.0 and m1.h == TRUTH.h
        m2 = TRUTH.with_variant(Variant.M2)
        assert m2.h == 0.5 and m2.sigma_a2 == TRUTH.sigma_a2
        m3 = TRUTH.with_variant(Variant.M3)
        assert m3.h == 0.5 and m3.sigma_a2 == 0.0
        assert [Variant(v).n_params for v in "M0 M1 M2 M3".split()] == [6, 5, 5, 4]

    def test_roundtrip(self):
        assert ThetaM0.from_dict(TRUTH.to_dict()) == TRUTH
        assert ThetaM0.from_dict({**TRUTH.sd_values(), "variant": "M0"}).sigma_a2 == pytest.approx(4e-12)

    def test_invalid(self):
        with pytest.raises(ValueError):
            ThetaM0(1.0, -1.0, 0.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            ThetaM0(1.0, 1.0, 0.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            ThetaM0(1.0, 1.0, 0.0, 1.0, 1.0, h=1.0)
        assert math.isclose(TRUTH.sigma, 0.1)
