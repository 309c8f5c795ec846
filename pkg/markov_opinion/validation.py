from collections import Counter
from typing import List

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from markov_opinion.entities import Scenario, AgentSpec, Group, RepulsionEdge

# tolerance on every row/vector that must sum to 0 or 1; larger deviations are rejected, never renormalized
STOCHASTIC_TOL = 1e-12


class Violation:
    def __init__(self, invariant: str, location: str, message: str):
        self._invariant = invariant
        self._location = location
        self._message = message

    @property
    def invariant(self):
        return self._invariant

    @property
    def location(self):
        return self._location

    @property
    def message(self):
        return self._message

    def __str__(self):
        return '%s: %s (%s)' % (self._location, self._message, self._invariant)

    def __repr__(self):
        return 'Violation(%s)' % self


class ValidationReport:
    def __init__(self, violations: List[Violation]):
        self._violations = tuple(violations)

    @property
    def violations(self):
        return self._violations

    @property
    def passed(self):
        return not self._violations

    def messages(self) -> List[str]:
        return [v.message for v in self._violations]

    def locations(self) -> List[str]:
        return [v.location for v in self._violations]

    def __bool__(self):
        return self.passed

    def __str__(self):
        if self.passed:
            return 'pass'
        return '\n'.join(str(v) for v in self._violations)


def validate_scenario(scenario: Scenario) -> ValidationReport:
    """ Check every structural invariant. Violations are returned as data, never raised. """
    violations = []

    _check_states(scenario, violations)
    _check_agents(scenario, violations)
    _check_groups(scenario, violations)
    _check_partition(scenario, violations)
    _check_repulsions(scenario, violations)

    return ValidationReport(violations)


def is_irreducible(rates: np.ndarray) -> bool:
    """ Strong connectivity of the digraph of strictly positive off-diagonal rates. """
    positive = rates > 0
    np.fill_diagonal(positive, False)
    n_components, _ = connected_components(csr_matrix(positive), directed=True, connection='strong')
    return n_components == 1


def _check_states(scenario, violations):
    labels = scenario.states.labels
    if len(labels) < 2:
        violations.append(Violation('StateSpace', 'states', 'at least two states required'))
    if len(set(labels)) != len(labels):
        violations.append(Violation('StateSpace', 'states', 'state labels must be distinct'))


def _check_agents(scenario, violations):
    if not scenario.agents:
        violations.append(Violation('Scenario', 'agents', 'at least one agent required'))
        return

    ids = Counter(a.id for a in scenario.agents)
    for i, agent in enumerate(scenario.agents):
        location = 'agents[%s]' % i

        if isinstance(agent.id, bool) or not isinstance(agent.id, (int, np.integer)) or agent.id <= 0:
            violations.append(Violation('AgentSpec', location + '.id', 'agent id must be a positive integer'))
        elif ids[agent.id] > 1:
            violations.append(Violation('Scenario', location + '.id', 'agent ids must be unique'))

        _check_rates(agent, scenario.state_count, location, violations)

        if not np.isfinite(agent.eta) or agent.eta <= 0:
            violations.append(Violation('AgentSpec', location + '.eta', 'eta must be positive'))

        _check_distribution(agent.initial, scenario.state_count, location + '.initial', violations)


def _check_rates(agent: AgentSpec, state_count: int, location: str, violations):
    rates = agent.rates
    location = location + '.Q'

    if rates.shape != (state_count, state_count):
        violations.append(Violation('AgentSpec', location, 'rate matrix must be %sx%s' % (state_count, state_count)))
        return
    if not np.all(np.isfinite(rates)):
        violations.append(Violation('AgentSpec', location, 'rate matrix entries must be finite'))
        return

    off_diagonal = rates[~np.eye(state_count, dtype=bool)]
    if np.any(off_diagonal < 0):
        violations.append(Violation('AgentSpec', location, 'rate matrix has negative off-diagonal'))
    if np.any(np.abs(rates.sum(axis=1)) > STOCHASTIC_TOL):
        violations.append(Violation('AgentSpec', location, 'rate matrix row sum nonzero'))
    if not is_irreducible(rates):
        violations.append(Violation('AgentSpec', location, 'rate matrix not irreducible'))


def _check_distribution(vector: np.ndarray, size: int, location: str, violations):
    if vector.shape != (size,):
        violations.append(Violation('AgentSpec', location, 'initial distribution must have %s entries' % size))
    elif not np.all(np.isfinite(vector)) or np.any(vector < 0):
        violations.append(Violation('AgentSpec', location, 'initial distribution has negative entries'))
    elif abs(vector.sum() - 1.0) > STOCHASTIC_TOL:
        violations.append(Violation('AgentSpec', location, 'initial distribution must sum to 1'))


def _check_row_stochastic(adjacency: np.ndarray, shape, owner: str, location: str, violations):
    if adjacency.shape != shape:
        violations.append(Violation(owner, location, 'adjacency must be %sx%s' % shape))
        return False
    if not np.all(np.isfinite(adjacency)) or np.any(adjacency < 0):
        violations.append(Violation(owner, location, 'adjacency entries must be nonnegative'))
        return False
    return True


def _check_groups(scenario, violations):
    names = Counter(g.name for g in scenario.groups)
    known = set(scenario.agent_ids)

    for i, group in enumerate(scenario.groups):
        location = 'groups[%s]' % i

        if names[group.name] > 1:
            violations.append(Violation('Group', location + '.name', 'group names must be unique'))
        if group.size == 0:
            violations.append(Violation('Group', location + '.members', 'group needs at least one member'))
            continue
        if len(set(group.members)) != group.size:
            violations.append(Violation('Group', location + '.members', 'group members must be distinct'))
        for member in group.members:
            if member not in known:
                violations.append(Violation('Group', location + '.members', 'unknown agent %s' % (member,)))

        if not np.isfinite(group.strength) or group.strength < 0:
            violations.append(Violation('Group', location + '.lambda', 'lambda must be nonnegative'))

        adjacency = group.adjacency
        if not _check_row_stochastic(adjacency, (group.size, group.size), 'Group', location + '.adjacency',
                                     violations):
            continue
        if np.any(np.diag(adjacency) != 0):
            violations.append(Violation('Group', location + '.adjacency', 'adjacency diagonal must be zero'))
        if group.size >= 2 and np.any(np.abs(adjacency.sum(axis=1) - 1.0) > STOCHASTIC_TOL):
            violations.append(Violation('Group', location + '.adjacency', 'adjacency rows must sum to 1'))


def _check_partition(scenario, violations):
    membership = Counter(m for g in scenario.groups for m in set(g.members))

    for i, agent in enumerate(scenario.agents):
        if membership[agent.id] != 1:
            violations.append(Violation('Scenario', 'agents[%s]' % i, 'groups must partition agents'))


def _check_repulsions(scenario, violations):
    groups = {}
    for group in scenario.groups:
        groups.setdefault(group.name, group)
    pairs = Counter((e.target, e.source) for e in scenario.repulsions)

    for i, edge in enumerate(scenario.repulsions):
        location = 'repulsions[%s]' % i

        if edge.target not in groups:
            violations.append(Violation('RepulsionEdge', location + '.target', 'unknown group %s' % edge.target))
        if edge.source not in groups:
            violations.append(Violation('RepulsionEdge', location + '.source', 'unknown group %s' % edge.source))
        if edge.target == edge.source:
            violations.append(Violation('RepulsionEdge', location, 'target and source must differ'))
        if pairs[(edge.target, edge.source)] > 1:
            violations.append(Violation('Scenario', location, 'at most one repulsion per (target, source) pair'))
        if not np.isfinite(edge.gamma) or edge.gamma < 0:
            violations.append(Violation('RepulsionEdge', location + '.gamma', 'gamma must be nonnegative'))

        if edge.target not in groups or edge.source not in groups:
            continue
        shape = (groups[edge.target].size, groups[edge.source].size)
        if not _check_row_stochastic(edge.adjacency, shape, 'RepulsionEdge', location + '.adjacency', violations):
            continue
        if np.any(np.abs(edge.adjacency.sum(axis=1) - 1.0) > STOCHASTIC_TOL):
            violations.append(Violation('RepulsionEdge', location + '.adjacency', 'adjacency rows must sum to 1'))
