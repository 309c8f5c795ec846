import numpy as np
import pytest
from scipy import stats

from helpers import two_state, isolated_scenario
from markov_opinion.core import agent_stationary
from markov_opinion.entities import NetworkConfig
from markov_opinion.exceptions import InvalidSimConfig
from markov_opinion.marginal import assemble_marginal_system, marginal_stationary
from markov_opinion.sampling import (SimConfig, OccupancyAccumulator, simulate_trajectory, estimate_marginals,
                                     product_sampler)


@pytest.mark.parametrize('horizon, replicates, burn_in', [
    (10.0, 0, 0.0),
    (10.0, 5, 10.0),
    (10.0, 5, -1.0),
    (np.inf, 5, 0.0),
])
def test_sim_config_checks(horizon, replicates, burn_in):
    with pytest.raises(InvalidSimConfig):
        SimConfig(horizon, replicates, burn_in=burn_in).check()


def test_replicate_streams_are_distinct():
    sim = SimConfig(10.0, 3, seed=5)

    assert sim.generator(0).random() == SimConfig(10.0, 3, seed=5).generator(0).random()
    assert sim.generator(0).random() != sim.generator(1).random()


def test_negative_seeds_wrap_to_unsigned_streams():
    sim = SimConfig(10.0, 2, seed=-1)

    assert sim.generator(0).random() == SimConfig(10.0, 2, seed=2 ** 64 - 1).generator(0).random()
    # seed -1, replicate 1 wraps around to key 0
    assert sim.generator(1).random() == SimConfig(10.0, 2, seed=0).generator(0).random()
    assert SimConfig(10.0, 1, seed=-2 ** 63).generator(0).random() == \
        SimConfig(10.0, 1, seed=2 ** 63).generator(0).random()


def test_estimate_with_negative_seed(intersection):
    sim = SimConfig(5.0, 2, seed=-1, burn_in=1.0)
    first = estimate_marginals(intersection, sim)

    np.testing.assert_allclose(first.mean.sum(axis=1), 1.0, atol=1e-12)
    np.testing.assert_array_equal(first.mean, estimate_marginals(intersection, sim).mean)


def test_trajectory_events_increase_and_flip_one_agent(intersection):
    rng = np.random.Generator(np.random.Philox(1))
    trajectory = simulate_trajectory(intersection, product_sampler(intersection), 20.0, rng)

    assert len(trajectory) > 0
    assert np.all(np.diff(trajectory.times) > 0)
    assert trajectory.times[-1] <= 20.0

    state = list(trajectory.initial)
    for _, aid, new_state in trajectory.events():
        position = intersection.position(aid)
        assert new_state != state[position]
        state[position] = new_state


def test_trajectory_is_deterministic(intersection):
    def run():
        return simulate_trajectory(intersection, NetworkConfig([0] * 7), 30.0,
                                   np.random.Generator(np.random.Philox(11)))

    first, second = run(), run()
    assert first.events() == second.events()


def test_holding_times_are_exponential():
    rates = two_state(1.5, 0.5)
    scenario = isolated_scenario(rates)
    rng = np.random.Generator(np.random.Philox(2024))

    trajectory = simulate_trajectory(scenario, NetworkConfig([0]), 30000.0, rng)
    held, durations = trajectory.holding_times(0)

    for state, rate in ((0, 1.5), (1, 0.5)):
        samples = durations[held == state]
        assert samples.size > 10000
        assert stats.kstest(samples, 'expon', args=(0, 1.0 / rate)).pvalue > 0.01


def test_occupancy_rows_sum_to_one(intersection):
    rng = np.random.Generator(np.random.Philox(3))
    trajectory = simulate_trajectory(intersection, product_sampler(intersection), 50.0, rng)

    occupancy = trajectory.occupancy(2, burn_in=5.0)
    np.testing.assert_allclose(occupancy.sum(axis=1), 1.0, atol=1e-12)


def test_occupancy_without_jumps():
    scenario = isolated_scenario(two_state(1e-9, 1e-9))
    trajectory = simulate_trajectory(scenario, NetworkConfig([1]), 1.0, np.random.Generator(np.random.Philox(0)))

    assert len(trajectory) == 0
    np.testing.assert_array_equal(trajectory.occupancy(2), [[0.0, 1.0]])


def test_single_agent_converges_to_stationary():
    scenario = isolated_scenario(two_state(1.0, 2.0))
    estimate = estimate_marginals(scenario, SimConfig(2000.0, 20, seed=3, burn_in=10.0))

    expected = agent_stationary(scenario.agents[0])
    assert np.all(np.abs(estimate.mean[0] - expected) <= 4 * estimate.stderr[0])
    np.testing.assert_allclose(estimate.mean[0], expected, atol=0.01)


def test_symmetric_agent_is_balanced():
    scenario = isolated_scenario(two_state(0.7, 0.7))
    estimate = estimate_marginals(scenario, SimConfig(1000.0, 20, seed=1, burn_in=5.0))

    assert np.all(np.abs(estimate.mean[0] - 0.5) <= 4 * estimate.stderr[0])


def test_estimates_sum_to_one(intersection):
    estimate = estimate_marginals(intersection, SimConfig(20.0, 4, seed=9, burn_in=2.0))

    np.testing.assert_allclose(estimate.mean.sum(axis=1), 1.0, atol=1e-12)
    assert estimate.replicates == 4
    assert estimate.stacked().shape == (14,)
    assert len(list(estimate.records())) == 14


def test_same_seed_is_bit_identical(intersection):
    sim = SimConfig(20.0, 5, seed=42, burn_in=2.0)
    first = estimate_marginals(intersection, sim)
    second = estimate_marginals(intersection, sim)

    np.testing.assert_array_equal(first.mean, second.mean)
    np.testing.assert_array_equal(first.stderr, second.stderr)

    other = estimate_marginals(intersection, SimConfig(20.0, 5, seed=43, burn_in=2.0))
    assert not np.array_equal(first.mean, other.mean)


def test_single_replicate_has_no_stderr(intersection):
    estimate = estimate_marginals(intersection, SimConfig(10.0, 1, burn_in=1.0))

    assert np.all(np.isnan(estimate.stderr))
    assert np.all(np.isfinite(estimate.mean))


def test_accumulator_merge_is_order_independent(rng):
    samples = rng.uniform(size=(12, 3, 2))

    serial = OccupancyAccumulator((3, 2))
    for sample in samples:
        serial.add(sample)

    left, right = OccupancyAccumulator((3, 2)), OccupancyAccumulator((3, 2))
    for sample in samples[:5]:
        left.add(sample)
    for sample in samples[5:][::-1]:
        right.add(sample)
    right.merge(left)
    right.merge(OccupancyAccumulator((3, 2)))

    assert right.count == 12
    np.testing.assert_allclose(right.mean, samples.mean(axis=0), atol=1e-14)
    np.testing.assert_allclose(right.stderr(), serial.stderr(), atol=1e-14)
    np.testing.assert_allclose(serial.stderr(), samples.std(axis=0, ddof=1) / np.sqrt(12), atol=1e-14)


def test_independent_agents_factorize():
    scenario = isolated_scenario(two_state(1.0, 2.0), two_state(0.5, 0.5))
    rng = np.random.Generator(np.random.Philox(77))
    trajectory = simulate_trajectory(scenario, NetworkConfig([0, 0]), 5000.0, rng)

    # joint occupancy from the merged event sequence
    joint = np.zeros((2, 2))
    state = list(trajectory.initial)
    last = 0.0
    for t, aid, new_state in trajectory.events():
        joint[state[0], state[1]] += t - last
        state[scenario.position(aid)] = new_state
        last = t
    joint[state[0], state[1]] += trajectory.horizon - last
    joint /= trajectory.horizon

    marginals = trajectory.occupancy(2)
    np.testing.assert_allclose(joint, np.outer(marginals[0], marginals[1]), atol=0.02)


@pytest.mark.slow
def test_workers_do_not_change_estimates(intersection):
    sim = SimConfig(20.0, 6, seed=4, burn_in=2.0)

    serial = estimate_marginals(intersection, sim)
    parallel = estimate_marginals(intersection, sim, workers=2)

    np.testing.assert_array_equal(serial.mean, parallel.mean)
    np.testing.assert_array_equal(serial.stderr, parallel.stderr)


@pytest.mark.slow
def test_intersection_estimates_match_marginal_stationary(intersection):
    estimate = estimate_marginals(intersection, SimConfig(200.0, 200, seed=0, burn_in=20.0))
    expected = marginal_stationary(assemble_marginal_system(intersection)).reshape(7, 2)

    deviation = np.abs(estimate.mean - expected)
    assert np.all(deviation <= 3 * estimate.stderr)
    assert np.all(deviation <= 0.01)
