import numpy as np
import pytest

from fbmadt.data import AdtDataset, StressLevel, Unit
from fbmadt.evaluation import (
    CrossValPlan,
    HeldOut,
    aic,
    compare_models,
    cross_validate,
    er_indices,
    relative_error,
)
from fbmadt.exceptions import GridAlignmentError, UndefinedRelativeErrorError
from fbmadt.model import AccelerationKind, StressSpec, ThetaM0
from fbmadt.simulator import REFERENCE_THETA

SPEC = StressSpec(AccelerationKind.POWER_LAW, 1.0, 4.0)


class TestRelativeError:
    def test_exact_is_zero(self):
        assert relative_error(REFERENCE_THETA, REFERENCE_THETA) == 0.0

    def test_sd_scale(self):
        est = ThetaM0.from_sd(1.1e-5, 2e-6, 2.5, 1.5, 0.2, 0.1)
        # 10% on mu_a and 100% on sigma (not 300% on sigma2)
        assert relative_error(est, REFERENCE_THETA) == pytest.approx(1.1)

    def test_only_free_parameters(self):
        est = REFERENCE_THETA.with_variant("M3")
        truth = ThetaM0(2e-5, 0.0, 2.5, 1.5, 0.01, 0.5, "M3")
        assert relative_error(est, truth) == pytest.approx(0.5)

    def test_zero_truth(self):
        truth = ThetaM0.from_sd(1e-5, 2e-6, 0.0, 1.5, 0.1, 0.1)
        with pytest.raises(UndefinedRelativeErrorError):
            relative_error(REFERENCE_THETA, truth)

    def test_variant_mismatch(self):
        with pytest.raises(ValueError):
            relative_error(REFERENCE_THETA.with_variant("M1"), REFERENCE_THETA)


@pytest.mark.parametrize("l_max,n_p,expected", [(532.326, 6, -1052.652), (0.0, 4, 8.0), (-10.0, 5, 30.0)])
def test_aic(l_max, n_p, expected):
    assert aic(l_max, n_p) == pytest.approx(expected)


def two_level_data():
    t = np.array([1.0, 2.0])
    lv1 = StressLevel(1.0, [Unit("a", t, np.array([1.0, 2.0])), Unit("b", t, np.array([3.0, 4.0]))])
    lv2 = StressLevel(4.0, [Unit("c", t, np.array([2.0, 0.0])), Unit("d", t, np.array([4.0, 0.0]))])
    return AdtDataset([lv1, lv2], SPEC)


class TestEr:
    def test_hand_example(self):
        data = two_level_data()
        sim1 = np.array([[2.0, 3.0]] * 3)  # mean = obs mean, bands collapse to mean
        sim2 = np.array([[3.0, 1.0]] * 3)
        rep = er_indices(data, [sim1, sim2])
        assert rep.er_mean_levels == [0.0, 0.0]
        assert rep.er_mean == 0.0
        # level 1: upper obs (3,4) vs 2,3 -> (1/3 + 1/4)/2; level 2 second time has obs 0 -> skipped
        assert rep.er_upper_levels[0] == pytest.approx((1 / 3 + 1 / 4) / 2)
        assert rep.er_upper_levels[1] == pytest.approx(0.25)
        assert rep.er_lower_levels[0] == pytest.approx((1.0 + 0.5) / 2)
        assert rep.skipped_terms == 3  # time 2 at level 2 for mean, max and min

    def test_misaligned(self):
        data = two_level_data()
        with pytest.raises(GridAlignmentError):
            er_indices(data, [np.zeros((2, 3)), np.zeros((2, 2))])
        ragged = AdtDataset([StressLevel(1.0, [Unit("a", [1.0, 2.0], [1.0, 2.0]),
                                                Unit("b", [1.0, 3.0], [1.0, 2.0])])], SPEC)
        with pytest.raises(GridAlignmentError):
            er_indices(ragged, [np.zeros((2, 2))])


class TestComparison:
    def test_four_rows(self, reference_small):
        rows = compare_models(reference_small, er_paths=200)
        assert [r.variant for r in rows] == ["M0", "M1", "M2", "M3"]
        assert [r.n_params for r in rows] == [6, 5, 5, 4]
        assert [r.method for r in rows] == ["em", "mle_fixed", "em", "mle_fixed"]
        for r in rows:
            assert r.aic == pytest.approx(-2 * r.l_max + 2 * r.n_params)
            assert np.isfinite(r.er.er_mean)

    @pytest.mark.parametrize("held", list(HeldOut))
    def test_cross_validation(self, reference_small, held):
        train, test = CrossValPlan(held).split(reference_small)
        assert test == (0 if held is HeldOut.LOWEST else 2) and test not in train
        rep, theta = cross_validate(reference_small, CrossValPlan(held), "M3", n_paths=200)
        assert rep.stresses == [reference_small.levels[test].stress]
        assert np.isfinite(rep.er_mean) and theta.variant.value == "M3"

    def test_cross_validation_needs_two_levels(self, reference_small):
        with pytest.raises(ValueError):
            CrossValPlan(HeldOut.LOWEST).split(reference_small.subset([0]))
