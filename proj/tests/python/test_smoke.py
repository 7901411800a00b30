import math

import pytest

import qbandits as qb


def test_distribution_statistics():
    exp = qb.DistributionSpec.exponential(0.25)
    assert exp.mean() == 4.0
    assert exp.true_quantile(0.5) == pytest.approx(4 * math.log(2), abs=1e-9)
    assert exp.hazard_lower_bound() == 0.25

    absgau = qb.DistributionSpec.abs_gaussian(0.0, 2.0)
    assert absgau.mean() == pytest.approx(1.5957691216, abs=1e-6)
    assert absgau.true_quantile(0.5) == pytest.approx(1.3489795, abs=1e-6)
    assert absgau.hazard_lower_bound() == pytest.approx(1 / (2 * math.sqrt(2 * math.pi)))


def test_sampling_is_deterministic():
    spec = qb.DistributionSpec.exponential(1.0)
    a = spec.sample(10, qb.RngStream(3))
    b = spec.sample(10, qb.RngStream(3))
    assert a == b
    assert all(x >= 0 for x in a)


def test_order_statistics():
    assert qb.rank_for(4, 0.5) == 2
    assert qb.empirical_quantile([1.0, 2.0, 3.0, 4.0], 0.5) == 3.0
    assert qb.spacing([4.0, 3.0, 2.0, 1.0], 2) == 1.0
    with pytest.raises(ValueError):
        qb.rank_for(3, 0.8)


def test_bound_calculators():
    params = qb.OsBoundParams(n=10, k=2, hazard_floor=1.0)
    assert qb.os_right_radius(params, 2.0) == pytest.approx(4.0)
    assert qb.os_left_radius(qb.OsBoundParams(10, 6, 1.0), 1.0) == pytest.approx(math.sqrt(0.8))

    qparams = qb.QuantileBoundParams(n=100, tau=0.5, hazard_floor=1.0, bias_constant=0.0)
    right, left = qb.quantile_radii(qparams, 1.0)
    assert right > 0 and left > 0
    probs = qb.quantile_epsilon_bound(qparams, 1.0)
    assert 0 < probs["right"] <= 1
    assert 0 < probs["left"] <= 1


def test_complexity_and_error_bound():
    report = qb.problem_complexity([0.5, 1.0], [1.0, 1.0], [0.0, 0.0], 0.5)
    assert report.h_tau == pytest.approx(3157.3333333333335)
    bound = qb.qsar_error_bound(1000, 2, 0.5, report)
    assert 0 < bound <= 1


def test_policies_on_preset():
    env = qb.preset_environment("env2", m=5)
    assert env.num_arms == 25
    assert qb.true_optimal_set(env) == [20, 21, 22, 23, 24]
    profile = qb.gaps(env)
    assert profile.delta_sorted[0] == pytest.approx(1.2544586684, abs=1e-6)

    outcome = qb.run_policy("qsar", env, budget=3000, seed=11)
    assert len(outcome.recommended) == 5
    assert outcome.pulls_used <= 3000

    estimate = qb.evaluate(env, "qsar", budget=3000, runs=40, seed=11, jobs=2)
    assert estimate.runs == 40
    assert 0 <= estimate.e_hat <= 1


def test_qsar_equals_qsr_at_m1():
    env = qb.preset_environment("env1", m=1)
    for seed in range(5):
        a = qb.run_policy("qsar", env, 3000, seed)
        b = qb.run_policy("qsr", env, 3000, seed)
        assert a.recommended == b.recommended


def test_schedule():
    s = qb.build_schedule(5, 2, 100, "sr")
    assert s.cumulative == [0, 14, 17, 22]
    assert qb.log_tilde(4, 1) == qb.log_bar(4)
