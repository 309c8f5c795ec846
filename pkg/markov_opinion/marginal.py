import logging
from typing import Sequence

import numpy as np
import scipy.linalg

from markov_opinion import solvers
from markov_opinion.core import force_weights
from markov_opinion.entities import Scenario, TrajectoryTable
from markov_opinion.exceptions import DimensionMismatch

_logger = logging.getLogger(__name__)


class MarginalSystem:
    """ d/dt Pi_m = (Qm + Am + Rm) Pi_m + Em over the agent-major, state-minor stack of
    per-agent distributions. Qm already holds the transposed agent generators. """

    def __init__(self, agents: Sequence[int], states: Sequence[str], qm: np.ndarray, am: np.ndarray,
                 rm: np.ndarray, em: np.ndarray):
        self._agents = tuple(agents)
        self._states = tuple(states)
        self._qm = qm
        self._am = am
        self._rm = rm
        self._em = em

        for array in (self._qm, self._am, self._rm, self._em):
            array.setflags(write=False)

    @property
    def agents(self):
        return self._agents

    @property
    def states(self):
        return self._states

    @property
    def agent_count(self):
        return len(self._agents)

    @property
    def state_count(self):
        return len(self._states)

    @property
    def size(self):
        return self.agent_count * self.state_count

    @property
    def qm(self):
        return self._qm

    @property
    def am(self):
        return self._am

    @property
    def rm(self):
        return self._rm

    @property
    def em(self):
        return self._em

    def operator(self) -> np.ndarray:
        return self._qm + self._am + self._rm

    def derivative(self, stacked: np.ndarray) -> np.ndarray:
        return self.operator() @ stacked + self._em

    def normalization(self) -> np.ndarray:
        """ N x NM matrix summing each agent block. """
        return np.kron(np.eye(self.agent_count), np.ones((1, self.state_count)))

    def __repr__(self):
        return 'MarginalSystem(N=%s, M=%s)' % (self.agent_count, self.state_count)


def assemble_marginal_system(scenario: Scenario, attraction: bool = True, repulsion: bool = True) -> MarginalSystem:
    m = scenario.state_count
    identity = np.eye(m)
    weights = force_weights(scenario, attraction=attraction, repulsion=repulsion)

    qm = scipy.linalg.block_diag(*[agent.rates.T for agent in scenario.agents])

    # row sums of the attraction weights are eta*lambda, zero for singletons
    am = np.kron(weights.attraction - np.diag(weights.attraction.sum(axis=1)), identity)
    rm = np.kron(-weights.repulsion - np.diag(weights.offset * (m - 1)), identity)
    em = np.kron(weights.offset, np.ones(m))

    _logger.debug("Marginal system of dimension %s" % qm.shape[0])
    return MarginalSystem(scenario.agent_ids, scenario.states.labels, qm, am, rm, em)


def stacked_initials(scenario: Scenario) -> np.ndarray:
    return np.concatenate([agent.initial for agent in scenario.agents])


def marginal_transient(system: MarginalSystem, p0: np.ndarray, t_grid: Sequence[float]) -> TrajectoryTable:
    p0 = np.asarray(p0, dtype=float)
    if p0.shape != (system.size,):
        raise DimensionMismatch("Initial stack of length %s, expected %s" % (p0.size, system.size))

    trajectory = solvers.integrate_linear(system.operator(), p0, t_grid, offset=system.em)

    shape = (trajectory.shape[0], system.agent_count, system.state_count)
    return TrajectoryTable(solvers.check_time_grid(t_grid), system.agents, system.states,
                           trajectory.reshape(shape))


def marginal_stationary(system: MarginalSystem) -> np.ndarray:
    """ (Qm + Am + Rm) Pi + Em = 0 with every agent block summing to 1. """
    return solvers.affine_stationary(system.operator(), system.em, system.normalization(),
                                     np.ones(system.agent_count))
