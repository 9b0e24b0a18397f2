import json

import numpy as np
import pytest

from ocoboost.errors import ConfigError, StageError
from ocoboost.extension import ExtendedLoss, default_delta
from ocoboost.geometry import Interval
from ocoboost.losses import LinearLoss, QuadraticLoss, ScaledLoss
from ocoboost.statistical import (ConstantHypothesis, ErmWeakOptimizer,
                                  FiniteSupportOracle, exact_population_loss,
                                  fit_boosted_hypothesis, population_loss)
from ocoboost.testkit import hull_optimum


def _two_point_oracle():
    atoms = [(QuadraticLoss([-0.6]), np.array([0.0])),
             (QuadraticLoss([0.8]), np.array([1.0]))]
    return FiniteSupportOracle(atoms, probs=[0.5, 0.5], seed=0)


def _constant_hyps(points):
    return [ConstantHypothesis(np.array([p]), name=f"c{p}") for p in points]


class TestOracles:
    def test_finite_support_draws_match_distribution(self):
        oracle = FiniteSupportOracle(
            [(LinearLoss([1.0]), np.array([0.0])),
             (LinearLoss([2.0]), np.array([1.0]))],
            probs=[0.8, 0.2], seed=3)
        draws = [oracle.draw()[1][0] for _ in range(5000)]
        assert np.mean(draws) == pytest.approx(0.2, abs=0.02)

    def test_bad_probs_rejected(self):
        with pytest.raises(ConfigError):
            FiniteSupportOracle([(LinearLoss([1.0]), np.array([0.0]))],
                                probs=[0.7])


class TestErmWeakOptimizer:
    def test_exact_mode_picks_population_minimizer(self):
        oracle = _two_point_oracle()
        hyps = _constant_hyps([-0.5, 0.1, 0.9])
        wopt = ErmWeakOptimizer(hyps, gamma=1.0, exact=True)
        learned = wopt.solve(oracle, budget=1)
        vals = [exact_population_loss(h, oracle) for h in hyps]
        best = hyps[int(np.argmin(vals))]
        np.testing.assert_allclose(learned(np.zeros(1)), best(np.zeros(1)))
        assert wopt.epsilon(10) == 0.0

    def test_gamma_scaling(self):
        hyps = _constant_hyps([0.8])
        wopt = ErmWeakOptimizer(hyps, gamma=0.5, exact=True)
        learned = wopt.solve(_two_point_oracle(), budget=1)
        assert learned(np.zeros(1))[0] == pytest.approx(0.4)

    def test_sampled_mode_epsilon_decays(self):
        wopt = ErmWeakOptimizer(_constant_hyps([0.0, 1.0]), gamma=1.0)
        assert wopt.epsilon(400) < wopt.epsilon(100)


class TestFit:
    def test_single_stage_collapse(self):
        # N=1, gamma=1, eta_1=1: hypothesis = project o W^1, where W^1 is what
        # the weak optimizer returns on the lifted stage distribution
        iv = Interval(-1.0, 1.0)
        oracle = _two_point_oracle()
        hyps = _constant_hyps([-0.5, 0.1, 0.9])
        solved = []

        class Spy(ErmWeakOptimizer):
            def solve(self, stage_oracle, budget):
                learned = super().solve(stage_oracle, budget)
                solved.append(learned)
                return learned

        wopt = Spy(hyps, gamma=1.0, exact=True)
        fitted = fit_boosted_hypothesis(oracle, wopt, iv, n_stages=1, gamma=1.0,
                                        stage_budget=1, lipschitz=8.0)
        (learned,) = solved
        for c in (np.zeros(1), np.ones(1)):
            np.testing.assert_allclose(fitted(c), iv.project(learned(c)))

    def test_centroid_stages_stay_centroid(self):
        iv = Interval(-1.0, 1.0)

        class CentroidOptimizer:
            gamma = 1.0

            def solve(self, oracle, budget):
                return ConstantHypothesis(np.zeros(1), name="centroid")

        fitted = fit_boosted_hypothesis(_two_point_oracle(), CentroidOptimizer(),
                                        iv, n_stages=4, gamma=1.0,
                                        stage_budget=1, lipschitz=8.0)
        np.testing.assert_allclose(fitted(np.zeros(1)), [0.0], atol=1e-15)

    def test_exact_erm_approaches_hull_optimum(self):
        # gap to the enumerated hull optimum within 2 * (4 G D / sqrt(N))
        iv = Interval(-1.0, 1.0)
        oracle = _two_point_oracle()
        points = [-0.5, 0.1, 0.9]
        hyps = _constant_hyps(points)
        n_stages = 64
        g_bound = 2.0 * (1.0 + 0.8)  # gradients of the atom losses over [-1,1]^+
        wopt = ErmWeakOptimizer(hyps, gamma=1.0, exact=True)
        fitted = fit_boosted_hypothesis(oracle, wopt, iv, n_stages=n_stages,
                                        gamma=1.0, stage_budget=1,
                                        lipschitz=g_bound)
        value = exact_population_loss(fitted, oracle)

        support = oracle.support()
        hull = hull_optimum(hyps, [ScaledLoss(l, p) for l, _, p in support],
                            [c for _, c, _ in support], grid_spacing=0.01)
        gap = value - hull.value
        assert gap >= -1e-9
        assert gap <= 2.0 * 4.0 * g_bound * iv.diameter / np.sqrt(n_stages)

    def test_stage_failure_carries_index(self):
        class Exploder:
            gamma = 1.0

            def __init__(self):
                self.calls = 0

            def solve(self, oracle, budget):
                self.calls += 1
                if self.calls == 3:
                    raise RuntimeError("boom")
                return ConstantHypothesis(np.zeros(1))

        with pytest.raises(StageError) as err:
            fit_boosted_hypothesis(_two_point_oracle(), Exploder(),
                                   Interval(-1.0, 1.0), n_stages=5, gamma=1.0,
                                   stage_budget=1, lipschitz=8.0)
        assert err.value.stage == 3

    def test_stage_oracle_lifts_gradients(self):
        # the lifted linear losses are extension gradients at h_prev(c)
        iv = Interval(-1.0, 1.0)
        oracle = _two_point_oracle()
        delta = default_delta(iv.diameter, 1.0, 1, 8.0)

        captured = {}

        class Capture:
            gamma = 1.0

            def solve(self, stage_oracle, budget):
                captured["support"] = stage_oracle.support()
                return ConstantHypothesis(np.zeros(1))

        fit_boosted_hypothesis(oracle, Capture(), iv, n_stages=1, gamma=1.0,
                               stage_budget=1, lipschitz=8.0)
        for (lin, ctx, p), (loss, ctx0, p0) in zip(captured["support"],
                                                   oracle.support()):
            ext = ExtendedLoss(loss, iv, delta=delta, kappa=8.0)
            np.testing.assert_allclose(lin.direction, ext.grad(np.zeros(1)),
                                       atol=1e-10)
            np.testing.assert_allclose(ctx, ctx0)
            assert p == p0


class TestPopulationLoss:
    def test_single_atom_exact_zero_se(self):
        oracle = FiniteSupportOracle([(QuadraticLoss([0.4]), np.zeros(1))],
                                     seed=0)
        h = ConstantHypothesis(np.array([0.1]))
        mean, se = population_loss(h, oracle, 50)
        assert mean == pytest.approx((0.1 - 0.4) ** 2)
        assert se == pytest.approx(0.0)

    def test_two_atom_closed_form_within_3se(self):
        oracle = _two_point_oracle()
        h = ConstantHypothesis(np.array([0.2]))
        truth = 0.5 * (0.2 + 0.6) ** 2 + 0.5 * (0.2 - 0.8) ** 2
        mean, se = population_loss(h, oracle, 4000)
        assert abs(mean - truth) <= max(3 * se, 1e-12)

    def test_centroid_on_centered_linear_losses(self):
        atoms = [(LinearLoss([1.0]), np.zeros(1)), (LinearLoss([-2.0]), np.zeros(1))]
        oracle = FiniteSupportOracle(atoms, seed=1)
        h = ConstantHypothesis(np.zeros(1))
        mean, se = population_loss(h, oracle, 500)
        assert mean == pytest.approx(0.0)

    def test_needs_two_samples(self):
        oracle = _two_point_oracle()
        with pytest.raises(ConfigError):
            population_loss(ConstantHypothesis(np.zeros(1)), oracle, 1)


def test_hypothesis_export_is_json_serializable():
    iv = Interval(-1.0, 1.0)
    oracle = _two_point_oracle()
    wopt = ErmWeakOptimizer(_constant_hyps([-0.5, 0.1, 0.9]), gamma=0.5,
                            exact=True)
    fitted = fit_boosted_hypothesis(oracle, wopt, iv, n_stages=3, gamma=0.5,
                                    stage_budget=1, lipschitz=8.0)
    payload = fitted.to_dict()
    text = json.dumps(payload)
    parsed = json.loads(text)
    # eta_1 = eta_2 = 1 drop the initial hypothesis and stage 1
    assert len(parsed["stages"]) == 2
    coefs = [s["coef"] for s in parsed["stages"]]
    assert sum(coefs) == pytest.approx(1.0 / 0.5)


def test_fit_from_config_round_trip():
    from ocoboost.statistical import fit_from_config
    iv = Interval(-1.0, 1.0)
    oracle = _two_point_oracle()
    wopt = ErmWeakOptimizer(_constant_hyps([-0.5, 0.1, 0.9]), gamma=0.5,
                            exact=True)
    config = {"N": 4, "gamma": 0.5, "stage_budget": 1, "lipschitz": 8.0}
    fitted = fit_from_config(oracle, wopt, iv, config)
    direct = fit_boosted_hypothesis(oracle, wopt, iv, n_stages=4, gamma=0.5,
                                    stage_budget=1, lipschitz=8.0)
    for c in (np.zeros(1), np.ones(1)):
        np.testing.assert_allclose(fitted(c), direct(c))
    with pytest.raises(ConfigError):
        fit_from_config(oracle, wopt, iv, {"gamma": 0.5})


def test_fitted_actions_always_feasible(rng):
    iv = Interval(-0.3, 1.7)
    oracle = _two_point_oracle()
    wopt = ErmWeakOptimizer(_constant_hyps([-0.5, 0.9]), gamma=0.5, exact=True)
    fitted = fit_boosted_hypothesis(oracle, wopt, iv, n_stages=8, gamma=0.5,
                                    stage_budget=1, lipschitz=10.0)
    for _ in range(20):
        assert iv.contains(fitted(rng.standard_normal(1)))
