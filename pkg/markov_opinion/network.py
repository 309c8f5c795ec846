import logging
import os
from functools import reduce
from typing import Sequence, Tuple

import numpy as np
from scipy import sparse

from markov_opinion import solvers
from markov_opinion.core import force_weights
from markov_opinion.entities import Scenario, NetworkConfig, TrajectoryTable
from markov_opinion.exceptions import CapacityExceeded, IndexOutOfRange, DimensionMismatch

DEFAULT_CAPACITY = 2 ** 20
CAPACITY_ENV = 'MARKOV_OPINION_CAP'

_logger = logging.getLogger(__name__)


def resolve_capacity(cap: int = None) -> int:
    if cap is not None:
        return int(cap)
    return int(os.environ.get(CAPACITY_ENV, DEFAULT_CAPACITY))


class StateIndexCodec:
    """ Mixed-radix index of network states; agent position 0 is the most significant digit,
    which matches the ordering of the Kronecker sum I (x) Q^r (x) I. """

    def __init__(self, agent_count: int, state_count: int):
        self._agent_count = agent_count
        self._state_count = state_count

    @property
    def agent_count(self):
        return self._agent_count

    @property
    def state_count(self):
        return self._state_count

    @property
    def capacity(self):
        return self._state_count ** self._agent_count

    @property
    def shape(self):
        return (self._state_count,) * self._agent_count

    def stride(self, position: int) -> int:
        return self._state_count ** (self._agent_count - 1 - position)

    def encode(self, config: NetworkConfig) -> int:
        if len(config) != self._agent_count:
            raise DimensionMismatch("Configuration has %s entries for %s agents" % (len(config), self._agent_count))
        if any(not 0 <= s < self._state_count for s in config):
            raise IndexOutOfRange("Configuration %s has states outside [0, %s)" % (config, self._state_count))
        return int(np.ravel_multi_index(tuple(config), self.shape))

    def decode(self, index: int) -> NetworkConfig:
        if not 0 <= index < self.capacity:
            raise IndexOutOfRange("Network index %s not in [0, %s)" % (index, self.capacity))
        return NetworkConfig(np.unravel_index(index, self.shape))

    def digits(self) -> np.ndarray:
        """ All configurations, one row per network index. """
        return np.stack(np.unravel_index(np.arange(self.capacity), self.shape), axis=1)

    def __eq__(self, other):
        if isinstance(other, StateIndexCodec):
            return self._agent_count == other._agent_count and self._state_count == other._state_count
        return False

    def __hash__(self):
        return hash((self._agent_count, self._state_count))

    def __repr__(self):
        return 'StateIndexCodec(N=%s, M=%s)' % (self._agent_count, self._state_count)


class NetworkGenerator:
    def __init__(self, codec: StateIndexCodec, isolated: sparse.csr_matrix,
                 attraction: sparse.csr_matrix, repulsion: sparse.csr_matrix):
        self._codec = codec
        self._isolated = isolated  # Q0
        self._attraction = attraction  # A0
        self._repulsion = repulsion  # R0

    @property
    def codec(self):
        return self._codec

    @property
    def isolated(self):
        return self._isolated

    @property
    def attraction(self):
        return self._attraction

    @property
    def repulsion(self):
        return self._repulsion

    def total(self, attraction: bool = True, repulsion: bool = True) -> sparse.csr_matrix:
        generator = self._isolated
        if attraction:
            generator = generator + self._attraction
        if repulsion:
            generator = generator + self._repulsion
        return generator.tocsr()


class MarginalizationOperator:
    """ 0/1 matrix summing network probabilities into stacked per-agent marginals. """

    def __init__(self, codec: StateIndexCodec, matrix: sparse.csr_matrix):
        self._codec = codec
        self._matrix = matrix

    @property
    def codec(self):
        return self._codec

    @property
    def matrix(self):
        return self._matrix


def check_capacity(scenario: Scenario, cap: int = None) -> StateIndexCodec:
    cap = resolve_capacity(cap)
    codec = StateIndexCodec(scenario.agent_count, scenario.state_count)
    if codec.capacity > cap:
        raise CapacityExceeded("%s^%s = %s network states exceed the cap of %s"
                               % (scenario.state_count, scenario.agent_count, codec.capacity, cap))
    return codec


def encode_config(codec: StateIndexCodec, config: NetworkConfig) -> int:
    return codec.encode(config)


def decode_config(codec: StateIndexCodec, index: int) -> NetworkConfig:
    return codec.decode(index)


def build_isolated_generator(scenario: Scenario, cap: int = None) -> sparse.csr_matrix:
    """ Q0 = sum_r I (x) Q^r (x) I, assembled entry-wise through the codec. """
    codec = check_capacity(scenario, cap)
    digits = codec.digits()
    index = np.arange(codec.capacity)

    rows, cols, values = [], [], []
    for position, agent in enumerate(scenario.agents):
        current = digits[:, position]
        for target in range(scenario.state_count):
            moving = current != target
            rates = agent.rates[current[moving], target]
            keep = rates > 0

            source = index[moving][keep]
            rows.append(source)
            cols.append(source + (target - current[moving][keep]) * codec.stride(position))
            values.append(rates[keep])

    return _compensated(rows, cols, values, codec.capacity)


def build_force_generators(scenario: Scenario, cap: int = None, attraction: bool = True,
                           repulsion: bool = True) -> Tuple[sparse.csr_matrix, sparse.csr_matrix]:
    """ A0 and R0: for every single-agent transition the force towards the target state,
    evaluated at the source configuration. Disabled forces yield zero matrices. """
    codec = check_capacity(scenario, cap)
    size = codec.capacity
    if not (attraction or repulsion):
        return sparse.csr_matrix((size, size)), sparse.csr_matrix((size, size))

    weights = force_weights(scenario, attraction=attraction, repulsion=repulsion)
    digits = codec.digits()
    index = np.arange(size)

    attract = ([], [], [])
    repulse = ([], [], [])
    for target in range(scenario.state_count):
        occupied = (digits == target).astype(float)
        psi = occupied @ weights.attraction.T
        xi = weights.offset[np.newaxis, :] - occupied @ weights.repulsion.T

        for position in range(scenario.agent_count):
            moving = digits[:, position] != target
            source = index[moving]
            destination = source + (target - digits[moving, position]) * codec.stride(position)

            for forces, store in ((psi, attract), (xi, repulse)):
                rates = forces[moving, position]
                keep = rates > 0
                store[0].append(source[keep])
                store[1].append(destination[keep])
                store[2].append(rates[keep])

    return _compensated(*attract, size), _compensated(*repulse, size)


def build_network_generator(scenario: Scenario, cap: int = None, attraction: bool = True,
                            repulsion: bool = True) -> NetworkGenerator:
    codec = check_capacity(scenario, cap)
    isolated = build_isolated_generator(scenario, cap)
    attract, repulse = build_force_generators(scenario, cap, attraction=attraction, repulsion=repulsion)

    _logger.debug("Network generator: %s states, %s/%s/%s nonzeros"
                  % (codec.capacity, isolated.nnz, attract.nnz, repulse.nnz))
    return NetworkGenerator(codec, isolated, attract, repulse)


def product_distribution(scenario: Scenario) -> np.ndarray:
    """ Joint initial distribution under independence: outer product of agent initials in codec order. """
    return reduce(np.kron, [agent.initial for agent in scenario.agents])


def network_transient(generator: NetworkGenerator, p0: np.ndarray, t_grid: Sequence[float],
                      states: Sequence[str] = None, attraction: bool = True,
                      repulsion: bool = True) -> TrajectoryTable:
    """ Integrates dPi_X/dt = (Q0 + A0 + R0)^T Pi_X; one joint 'network' entry per time. """
    codec = generator.codec
    p0 = np.asarray(p0, dtype=float)
    if p0.shape != (codec.capacity,):
        raise DimensionMismatch("Initial vector of length %s, expected %s" % (p0.size, codec.capacity))

    operator = generator.total(attraction=attraction, repulsion=repulsion).T.tocsr()
    trajectory = solvers.integrate_linear(operator, p0, t_grid)

    return TrajectoryTable(solvers.check_time_grid(t_grid), ['network'], network_labels(codec, states),
                           trajectory[:, np.newaxis, :])


def network_stationary(generator: NetworkGenerator, attraction: bool = True, repulsion: bool = True) -> np.ndarray:
    return solvers.stationary_distribution(generator.total(attraction=attraction, repulsion=repulsion))


def network_labels(codec: StateIndexCodec, states: Sequence[str] = None):
    if states is None:
        states = ['s%s' % (i + 1) for i in range(codec.state_count)]
    return ['/'.join(states[s] for s in row) for row in codec.digits()]


def build_marginalization(codec: StateIndexCodec) -> MarginalizationOperator:
    """ Row r*M + j selects the network states in which agent position r is in state j. """
    digits = codec.digits()
    offsets = np.arange(codec.agent_count) * codec.state_count

    rows = (digits + offsets[np.newaxis, :]).ravel()
    cols = np.repeat(np.arange(codec.capacity), codec.agent_count)
    matrix = sparse.csr_matrix((np.ones(rows.size), (rows, cols)),
                               shape=(codec.agent_count * codec.state_count, codec.capacity))

    return MarginalizationOperator(codec, matrix)


def project_marginal(operator: MarginalizationOperator, p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != operator.codec.capacity:
        raise DimensionMismatch("Network vector of length %s, expected %s" % (p.shape[-1], operator.codec.capacity))
    return operator.matrix @ p


def project_trajectory(operator: MarginalizationOperator, table: TrajectoryTable,
                       agents: Sequence[str], states: Sequence[str]) -> TrajectoryTable:
    joint = table.probabilities[:, 0, :]
    if joint.shape[1] != operator.codec.capacity:
        raise DimensionMismatch("Trajectory over %s states, expected %s" % (joint.shape[1], operator.codec.capacity))

    marginals = (operator.matrix @ joint.T).T
    shape = (len(table), operator.codec.agent_count, operator.codec.state_count)
    return TrajectoryTable(table.times, agents, states, marginals.reshape(shape))


def _compensated(rows, cols, values, size: int) -> sparse.csr_matrix:
    """ Off-diagonal rates with the diagonal set to the negated row sums. """
    rows, cols, values = (np.concatenate(x) if len(x) else np.zeros(0) for x in (rows, cols, values))
    off_diagonal = sparse.csr_matrix((values, (rows.astype(int), cols.astype(int))), shape=(size, size))
    exit_rates = np.asarray(off_diagonal.sum(axis=1)).ravel()
    return (off_diagonal - sparse.diags(exit_rates)).tocsr()
