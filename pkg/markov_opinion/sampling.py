import logging
import multiprocessing
from typing import Callable, List, Tuple, Union

import numpy as np
from tqdm import tqdm

from markov_opinion.core import ForceWeights, force_weights
from markov_opinion.entities import Scenario, NetworkConfig
from markov_opinion.exceptions import InvalidSimConfig

_logger = logging.getLogger(__name__)

SEED_MODULUS = 2 ** 64


class SimConfig:
    def __init__(self, horizon: float, replicates: int, seed: int = 0, burn_in: float = 0.0):
        self._horizon = float(horizon)
        self._replicates = int(replicates)
        self._seed = int(seed)
        self._burn_in = float(burn_in)

    @property
    def horizon(self):
        return self._horizon

    @property
    def replicates(self):
        return self._replicates

    @property
    def seed(self):
        return self._seed

    @property
    def burn_in(self):
        return self._burn_in

    def check(self):
        if not (np.isfinite(self._horizon) and 0 <= self._burn_in < self._horizon):
            raise InvalidSimConfig("Need horizon > burn_in >= 0, got horizon=%s, burn_in=%s"
                                   % (self._horizon, self._burn_in))
        if self._replicates < 1:
            raise InvalidSimConfig("Need at least one replicate, got %s" % self._replicates)

    def generator(self, index: int) -> np.random.Generator:
        """ Independent counter-based stream of replicate `index`. Any signed 64-bit seed is
        taken modulo 2**64. """
        return np.random.Generator(np.random.Philox((self._seed + index) % SEED_MODULUS))

    def __repr__(self):
        return 'SimConfig(horizon=%s, replicates=%s, seed=%s, burn_in=%s)' % (
            self._horizon, self._replicates, self._seed, self._burn_in)


class SampledTrajectory:
    """ Initial configuration plus the jumps (time, agent position, new state) up to the horizon. """

    def __init__(self, agents: List[int], initial: NetworkConfig, horizon: float,
                 times: np.ndarray, positions: np.ndarray, states: np.ndarray):
        self._agents = tuple(agents)
        self._initial = initial
        self._horizon = horizon
        self._times = times
        self._positions = positions
        self._states = states

    @property
    def initial(self):
        return self._initial

    @property
    def horizon(self):
        return self._horizon

    @property
    def times(self):
        return self._times

    @property
    def positions(self):
        return self._positions

    @property
    def states(self):
        return self._states

    def events(self) -> List[Tuple[float, int, int]]:
        return [(float(t), self._agents[p], int(s)) for t, p, s in zip(self._times, self._positions, self._states)]

    def holding_times(self, position: int) -> Tuple[np.ndarray, np.ndarray]:
        """ Completed sojourns of one agent: (state held, duration). The sojourn cut by the horizon is dropped. """
        mask = self._positions == position
        jumps = self._times[mask]
        held = np.concatenate([[self._initial[position]], self._states[mask]])[:-1]
        starts = np.concatenate([[0.0], jumps])[:-1]
        return held, jumps - starts

    def occupancy(self, state_count: int, burn_in: float = 0.0) -> np.ndarray:
        """ Fraction of (burn_in, horizon] each agent spends in each state, shape (agents, states). """
        window = self._horizon - burn_in
        occupancy = np.zeros((len(self._initial), state_count))

        for position in range(len(self._initial)):
            mask = self._positions == position
            held = np.concatenate([[self._initial[position]], self._states[mask]])
            starts = np.concatenate([[0.0], self._times[mask]])
            ends = np.append(starts[1:], self._horizon)

            durations = np.clip(ends, burn_in, None) - np.clip(starts, burn_in, None)
            np.add.at(occupancy[position], held, durations)

        return occupancy / window

    def __len__(self):
        return len(self._times)


class OccupancyAccumulator:
    """ Running mean and sum of squared deviations, merged pairwise so that
    aggregation order does not matter. """

    def __init__(self, shape):
        self._count = 0
        self._mean = np.zeros(shape)
        self._m2 = np.zeros(shape)

    @property
    def count(self):
        return self._count

    @property
    def mean(self):
        return self._mean

    def add(self, sample: np.ndarray):
        other = OccupancyAccumulator(sample.shape)
        other._count, other._mean = 1, np.asarray(sample, dtype=float)
        self.merge(other)

    def merge(self, other: 'OccupancyAccumulator'):
        if other._count == 0:
            return
        count = self._count + other._count
        delta = other._mean - self._mean

        self._mean = self._mean + delta * (other._count / count)
        self._m2 = self._m2 + other._m2 + delta ** 2 * (self._count * other._count / count)
        self._count = count

    def stderr(self) -> np.ndarray:
        if self._count < 2:
            return np.full(self._mean.shape, np.nan)
        return np.sqrt(self._m2 / (self._count - 1) / self._count)


class SimulationEstimate:
    def __init__(self, agents: List[int], states: List[str], mean: np.ndarray, stderr: np.ndarray, replicates: int):
        self._agents = tuple(agents)
        self._states = tuple(states)
        self._mean = mean
        self._stderr = stderr
        self._replicates = replicates

    @property
    def agents(self):
        return self._agents

    @property
    def states(self):
        return self._states

    @property
    def mean(self):
        return self._mean

    @property
    def stderr(self):
        return self._stderr

    @property
    def replicates(self):
        return self._replicates

    def stacked(self) -> np.ndarray:
        return self._mean.ravel()

    def records(self):
        for a_idx, agent in enumerate(self._agents):
            for s_idx, state in enumerate(self._states):
                yield str(agent), state, float(self._mean[a_idx, s_idx]), float(self._stderr[a_idx, s_idx])

    def __repr__(self):
        return 'SimulationEstimate(agents=%s, states=%s, replicates=%s)' % (
            len(self._agents), len(self._states), self._replicates)


def product_sampler(scenario: Scenario) -> Callable[[np.random.Generator], NetworkConfig]:
    """ Draws each agent's initial state independently from its initial distribution. """
    initials = [agent.initial for agent in scenario.agents]

    def sample(rng: np.random.Generator) -> NetworkConfig:
        return NetworkConfig(rng.choice(len(p), p=p) for p in initials)

    return sample


def simulate_trajectory(scenario: Scenario, initial: Union[NetworkConfig, Callable], horizon: float,
                        rng: np.random.Generator, attraction: bool = True, repulsion: bool = True,
                        weights: ForceWeights = None) -> SampledTrajectory:
    """ Exact event-driven simulation. Rates are constant between jumps, so the waiting time
    is exponential in the total rate and the jump is chosen proportionally to its rate. """
    if callable(initial):
        initial = initial(rng)
    if weights is None:
        weights = force_weights(scenario, attraction=attraction, repulsion=repulsion)

    n, m = scenario.agent_count, scenario.state_count
    base = np.stack([agent.rates for agent in scenario.agents])
    coupling = weights.attraction - weights.repulsion
    offset = weights.offset[:, np.newaxis]
    agents = np.arange(n)

    state = np.array(initial.assignment, dtype=int)
    onehot = initial.one_hot(m)

    times, positions, states = [], [], []
    t = 0.0
    while True:
        rates = base[agents, state, :] + coupling @ onehot + offset
        rates[agents, state] = 0.0
        np.clip(rates, 0.0, None, out=rates)

        flat = rates.ravel()
        cumulative = np.cumsum(flat)
        total = cumulative[-1]

        t += rng.exponential(1.0 / total)
        if t > horizon:
            break

        event = min(int(np.searchsorted(cumulative, rng.random() * total, side='right')), flat.size - 1)
        r, j = divmod(event, m)

        onehot[r, state[r]] = 0.0
        onehot[r, j] = 1.0
        state[r] = j

        times.append(t)
        positions.append(r)
        states.append(j)

    return SampledTrajectory(scenario.agent_ids, initial, horizon, np.array(times, dtype=float),
                             np.array(positions, dtype=int), np.array(states, dtype=int))


def estimate_marginals(scenario: Scenario, sim: SimConfig, attraction: bool = True, repulsion: bool = True,
                       workers: int = 1, progress: bool = False) -> SimulationEstimate:
    """ Mean over replicates of the time-averaged occupancy on (burn_in, horizon]. Replicate i
    draws from its own stream seeded seed + i, so results do not depend on `workers`. """
    sim.check()
    tasks = [(i, scenario, sim, attraction, repulsion) for i in range(sim.replicates)]
    accumulator = OccupancyAccumulator((scenario.agent_count, scenario.state_count))

    if workers > 1:
        with multiprocessing.get_context('spawn').Pool(workers) as pool:
            results = pool.imap(_produce_replicate, tasks)
            _accumulate(accumulator, results, sim, progress)
    else:
        _accumulate(accumulator, map(_produce_replicate, tasks), sim, progress)

    _logger.debug("Merged %s replicates" % accumulator.count)
    return SimulationEstimate(scenario.agent_ids, scenario.states.labels, accumulator.mean,
                              accumulator.stderr(), accumulator.count)


def _accumulate(accumulator, results, sim, progress):
    for occupancy, _ in tqdm(results, total=sim.replicates, desc='Simulate', disable=not progress):
        accumulator.add(occupancy)


def _produce_replicate(args):
    i, scenario, sim, attraction, repulsion = args

    rng = sim.generator(i)
    trajectory = simulate_trajectory(scenario, product_sampler(scenario), sim.horizon, rng,
                                     attraction=attraction, repulsion=repulsion)

    return trajectory.occupancy(scenario.state_count, sim.burn_in), i
