""" Scenario builders and brute-force oracles shared by the tests. """
import itertools
import os

import numpy as np

from markov_opinion.core import modulated_rate, attractive_force, repulsive_force
from markov_opinion.entities import Scenario, StateSpace, AgentSpec, Group, RepulsionEdge, NetworkConfig

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
BUNDLED_SCENARIO = os.path.join(ROOT, 'data', 'scenarios', 'intersection.json')


def two_state(a, b):
    return [[-a, a], [b, -b]]


def isolated_scenario(*rates, initials=None, states=None):
    """ One singleton group per agent, no repulsion. """
    m = len(rates[0])
    states = states or ['s%s' % (i + 1) for i in range(m)]
    initials = initials or [np.full(m, 1.0 / m)] * len(rates)

    agents = [AgentSpec(i + 1, q, 1.0, p) for i, (q, p) in enumerate(zip(rates, initials))]
    groups = [Group('G%s' % (i + 1), [i + 1], 0.0, [[0.0]]) for i in range(len(rates))]
    return Scenario(StateSpace(states), agents, groups)


def mutual_pair(strength=1.0, eta=1.0, rate=1.0):
    """ Two agents attracting each other with Lambda = [[0, 1], [1, 0]]. """
    agents = [AgentSpec(1, two_state(rate, rate), eta, [0.5, 0.5]),
              AgentSpec(2, two_state(rate, rate), eta, [0.5, 0.5])]
    return Scenario(StateSpace(['s1', 's2']), agents, [Group('A', [1, 2], strength, [[0, 1], [1, 0]])])


def _stochastic_rows(rng, rows, cols, zero_diagonal=False):
    weights = rng.uniform(0.1, 1.0, size=(rows, cols))
    if zero_diagonal:
        np.fill_diagonal(weights, 0.0)
    return weights / weights.sum(axis=1, keepdims=True)


def random_scenario(rng, max_agents=5, max_states=3):
    n = int(rng.integers(1, max_agents + 1))
    m = int(rng.integers(2, max_states + 1))

    agents = []
    for aid in range(1, n + 1):
        rates = rng.uniform(0.1, 2.0, size=(m, m))
        np.fill_diagonal(rates, 0.0)
        np.fill_diagonal(rates, -rates.sum(axis=1))
        agents.append(AgentSpec(aid, rates, rng.uniform(0.5, 5.0), rng.dirichlet(np.ones(m))))

    ids = list(rng.permutation(np.arange(1, n + 1)))
    k = int(rng.integers(1, min(3, n) + 1))
    cuts = sorted(rng.choice(np.arange(1, n), size=k - 1, replace=False)) if k > 1 else []
    partition = [list(map(int, part)) for part in np.split(np.array(ids), cuts)]

    groups = []
    for i, members in enumerate(partition):
        adjacency = _stochastic_rows(rng, len(members), len(members), True) if len(members) > 1 else [[0.0]]
        groups.append(Group('G%s' % i, members, rng.uniform(0.0, 2.0), adjacency))

    repulsions = []
    for target, source in itertools.permutations(groups, 2):
        if rng.random() < 0.6:
            repulsions.append(RepulsionEdge(target.name, source.name, rng.uniform(0.0, 1.5),
                                            _stochastic_rows(rng, target.size, source.size)))

    return Scenario(StateSpace(['s%s' % (i + 1) for i in range(m)]), agents, groups, repulsions)


def all_configs(scenario):
    for assignment in itertools.product(range(scenario.state_count), repeat=scenario.agent_count):
        yield NetworkConfig(assignment)


def brute_force_generators(scenario):
    """ Dense Q0, A0, R0 by enumerating every (configuration, agent, target) triple. """
    n, m = scenario.agent_count, scenario.state_count
    size = m ** n
    index = {config: i for i, config in enumerate(all_configs(scenario))}
    q0, a0, r0 = np.zeros((size, size)), np.zeros((size, size)), np.zeros((size, size))

    for config, i in index.items():
        for position, aid in enumerate(scenario.agent_ids):
            for j in range(m):
                if j == config[position]:
                    continue
                k = index[config.replace(position, j)]
                q0[i, k] = scenario.agent(aid).rates[config[position], j]
                a0[i, k] = attractive_force(scenario, aid, j, config)
                r0[i, k] = repulsive_force(scenario, aid, j, config)

    for matrix in (q0, a0, r0):
        np.fill_diagonal(matrix, -matrix.sum(axis=1))
    return q0, a0, r0


def brute_force_total(scenario):
    size = scenario.network_size
    index = {config: i for i, config in enumerate(all_configs(scenario))}
    total = np.zeros((size, size))

    for config, i in index.items():
        for position, aid in enumerate(scenario.agent_ids):
            for j in range(scenario.state_count):
                if j != config[position]:
                    total[i, index[config.replace(position, j)]] = modulated_rate(scenario, aid, j, config)

    np.fill_diagonal(total, -total.sum(axis=1))
    return total
