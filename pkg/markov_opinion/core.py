from typing import Sequence

import numpy as np
import scipy.linalg

from markov_opinion import solvers
from markov_opinion.entities import AgentSpec, Scenario, NetworkConfig, TrajectoryTable
from markov_opinion.exceptions import SelfTransition, IndexOutOfRange, DimensionMismatch


def agent_stationary(agent: AgentSpec) -> np.ndarray:
    """ Stationary distribution of an isolated agent: (Q^r)^T p = 0, sum(p) = 1.
    The agent's initial distribution is never read. """
    return solvers.stationary_distribution(agent.rates, residual_tol=1e-12)


def agent_transient(agent: AgentSpec, t_grid: Sequence[float], states: Sequence[str] = None) -> TrajectoryTable:
    """ Pi(t) = expm((Q^r)^T t) Pi(0) on every time of the grid. """
    t_grid = solvers.check_time_grid(t_grid)
    transposed = agent.rates.T

    probabilities = np.array([scipy.linalg.expm(transposed * t) @ agent.initial for t in t_grid])

    if states is None:
        states = ['s%s' % (i + 1) for i in range(agent.state_count)]
    return TrajectoryTable(t_grid, [agent.id], states, probabilities[:, np.newaxis, :])


def attractive_force(scenario: Scenario, r: int, j: int, config: NetworkConfig) -> float:
    """ psi_j(r) = eta^r lambda^A sum_k Lambda_{r,k} [config_k = j] over the group A of r. """
    _check_config(scenario, config, j)
    group = scenario.group_of(r)
    if group.size < 2:
        return 0.0

    row = group.adjacency[group.position(r)]
    occupancy = sum(row[k] * config.indicator(scenario.position(member), j)
                    for k, member in enumerate(group.members))

    return scenario.agent(r).eta * group.strength * occupancy


def repulsive_force(scenario: Scenario, r: int, j: int, config: NetworkConfig, source: str = None) -> float:
    """ Sum over the repulsing groups R_l of r's group of
    xi_j(r) = (eta^r gamma / |R|) sum_k Gamma_{r,k} (1 - [config_k = j]).
    With `source` only that group's term is returned. """
    _check_config(scenario, config, j)
    group = scenario.group_of(r)
    edges = scenario.repulsions_into(group.name)
    if not edges:
        return 0.0

    eta = scenario.agent(r).eta
    position = group.position(r)

    force = 0.0
    for edge in edges:
        if source is not None and edge.source != source:
            continue
        members = scenario.group(edge.source).members
        row = edge.adjacency[position]
        absent = sum(row[k] * (1 - config.indicator(scenario.position(member), j))
                     for k, member in enumerate(members))
        force += eta * edge.gamma / len(edges) * absent

    return force


def modulated_rate(scenario: Scenario, r: int, j: int, config: NetworkConfig,
                   attraction: bool = True, repulsion: bool = True) -> float:
    """ Total rate of agent r leaving its current state towards state j. """
    _check_config(scenario, config, j)
    current = config[scenario.position(r)]
    if j == current:
        raise SelfTransition("Agent %s is already in state %s" % (r, j))

    rate = scenario.agent(r).rates[current, j]
    if attraction:
        rate += attractive_force(scenario, r, j, config)
    if repulsion:
        rate += repulsive_force(scenario, r, j, config)
    return rate


class ForceWeights:
    """ Dense per-position form of both forces. For a configuration with one-hot matrix X
    (agents x states): attraction = W_att @ X, repulsion = offset - W_rep @ X. """

    def __init__(self, attraction: np.ndarray, repulsion: np.ndarray, offset: np.ndarray):
        self._attraction = attraction
        self._repulsion = repulsion
        self._offset = offset

        for array in (self._attraction, self._repulsion, self._offset):
            array.setflags(write=False)

    @property
    def attraction(self):
        return self._attraction

    @property
    def repulsion(self):
        return self._repulsion

    @property
    def offset(self):
        return self._offset

    def attraction_rates(self, onehot: np.ndarray) -> np.ndarray:
        return self._attraction @ onehot

    def repulsion_rates(self, onehot: np.ndarray) -> np.ndarray:
        return self._offset[:, np.newaxis] - self._repulsion @ onehot


def force_weights(scenario: Scenario, attraction: bool = True, repulsion: bool = True) -> ForceWeights:
    n = scenario.agent_count
    attract = np.zeros((n, n))
    repulse = np.zeros((n, n))
    offset = np.zeros(n)

    for group in scenario.groups:
        positions = [scenario.position(m) for m in group.members]
        etas = np.array([scenario.agents[p].eta for p in positions])

        if attraction and group.size >= 2:
            attract[np.ix_(positions, positions)] += (etas * group.strength)[:, np.newaxis] * group.adjacency

        edges = scenario.repulsions_into(group.name) if repulsion else []
        for edge in edges:
            sources = [scenario.position(m) for m in scenario.group(edge.source).members]
            scale = etas * edge.gamma / len(edges)
            repulse[np.ix_(positions, sources)] += scale[:, np.newaxis] * edge.adjacency
            offset[positions] += scale

    return ForceWeights(attract, repulse, offset)


def _check_config(scenario: Scenario, config: NetworkConfig, j: int):
    if len(config) != scenario.agent_count:
        raise DimensionMismatch("Configuration has %s entries for %s agents" % (len(config), scenario.agent_count))
    if not 0 <= j < scenario.state_count:
        raise IndexOutOfRange("State index %s not in [0, %s)" % (j, scenario.state_count))
