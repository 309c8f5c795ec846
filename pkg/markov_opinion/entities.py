from collections import OrderedDict
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from markov_opinion.exceptions import UnknownAgent, IndexOutOfRange, DimensionMismatch


def _frozen(values, ndim: int) -> np.ndarray:
    array = np.array(values, dtype=float, ndmin=ndim)
    array.setflags(write=False)
    return array


class StateSpace:
    """ Ordered set of decision states shared by all agents, e.g. ('Yield', 'Go'). """

    def __init__(self, labels: Iterable[str]):
        self._labels = tuple(labels)

    @property
    def labels(self):
        return self._labels

    @property
    def size(self):
        return len(self._labels)

    def index(self, label: str) -> int:
        try:
            return self._labels.index(label)
        except ValueError:
            raise IndexOutOfRange("Unknown state label '%s'" % label)

    def label(self, index: int) -> str:
        if not 0 <= index < len(self._labels):
            raise IndexOutOfRange("State index %s not in [0, %s)" % (index, len(self._labels)))
        return self._labels[index]

    def __len__(self):
        return len(self._labels)

    def __iter__(self):
        return iter(self._labels)

    def __eq__(self, other):
        if isinstance(other, StateSpace):
            return self._labels == other._labels
        return False

    def __hash__(self):
        return hash(self._labels)

    def __repr__(self):
        return 'StateSpace(%s)' % ', '.join(self._labels)


class AgentSpec:
    def __init__(self, aid: int, rates, eta: float, initial):
        self._id = aid
        self._rates = _frozen(rates, 2)  # Q^r, row i holds the rates out of state i
        self._eta = float(eta)
        self._initial = _frozen(initial, 1)

    @property
    def id(self):
        return self._id

    @property
    def rates(self):
        return self._rates

    @property
    def eta(self):
        return self._eta

    @property
    def initial(self):
        return self._initial

    @property
    def state_count(self):
        return self._rates.shape[0]

    def __eq__(self, other):
        if isinstance(other, AgentSpec):
            return (self._id == other._id and self._eta == other._eta
                    and np.array_equal(self._rates, other._rates)
                    and np.array_equal(self._initial, other._initial))
        return False

    def __hash__(self):
        return hash(self._id)

    def __repr__(self):
        return 'AgentSpec(id=%s, eta=%s)' % (self._id, self._eta)


class Group:
    """ Attractive group: members pull each other towards their current states. """

    def __init__(self, name: str, members: Sequence[int], strength: float, adjacency):
        self._name = name
        self._members = tuple(members)
        self._strength = float(strength)  # lambda
        self._adjacency = _frozen(adjacency, 2)

    @property
    def name(self):
        return self._name

    @property
    def members(self):
        return self._members

    @property
    def strength(self):
        return self._strength

    @property
    def adjacency(self):
        return self._adjacency

    @property
    def size(self):
        return len(self._members)

    def position(self, aid: int) -> int:
        return self._members.index(aid)

    def __contains__(self, aid):
        return aid in self._members

    def __eq__(self, other):
        if isinstance(other, Group):
            return (self._name == other._name and self._members == other._members
                    and self._strength == other._strength
                    and np.array_equal(self._adjacency, other._adjacency))
        return False

    def __hash__(self):
        return hash(self._name)

    def __repr__(self):
        return 'Group(%s, members=%s)' % (self._name, list(self._members))


class RepulsionEdge:
    """ Members of `target` are pushed away from the states occupied by members of `source`. """

    def __init__(self, target: str, source: str, gamma: float, adjacency):
        self._target = target
        self._source = source
        self._gamma = float(gamma)
        self._adjacency = _frozen(adjacency, 2)  # rows: target members, columns: source members

    @property
    def target(self):
        return self._target

    @property
    def source(self):
        return self._source

    @property
    def gamma(self):
        return self._gamma

    @property
    def adjacency(self):
        return self._adjacency

    def __eq__(self, other):
        if isinstance(other, RepulsionEdge):
            return (self._target == other._target and self._source == other._source
                    and self._gamma == other._gamma
                    and np.array_equal(self._adjacency, other._adjacency))
        return False

    def __hash__(self):
        return hash((self._target, self._source))

    def __repr__(self):
        return 'RepulsionEdge(%s <- %s, gamma=%s)' % (self._target, self._source, self._gamma)


class Scenario:
    def __init__(self, states: StateSpace, agents: List[AgentSpec], groups: List[Group] = (),
                 repulsions: List[RepulsionEdge] = (), comment: str = None):
        self._states = states if isinstance(states, StateSpace) else StateSpace(states)
        self._agents = tuple(agents)
        self._groups = tuple(groups)
        self._repulsions = tuple(repulsions)
        self._comment = comment

        self._positions = OrderedDict((a.id, i) for i, a in enumerate(self._agents))

    @property
    def states(self):
        return self._states

    @property
    def agents(self):
        return self._agents

    @property
    def groups(self):
        return self._groups

    @property
    def repulsions(self):
        return self._repulsions

    @property
    def comment(self):
        return self._comment

    @property
    def agent_ids(self):
        return list(self._positions.keys())

    @property
    def agent_count(self):
        return len(self._agents)

    @property
    def state_count(self):
        return self._states.size

    @property
    def network_size(self):
        return self.state_count ** self.agent_count

    def position(self, aid: int) -> int:
        try:
            return self._positions[aid]
        except (KeyError, TypeError):
            raise UnknownAgent("Agent %s is not part of the scenario" % (aid,))

    def agent(self, aid: int) -> AgentSpec:
        return self._agents[self.position(aid)]

    def group(self, name: str) -> Group:
        for group in self._groups:
            if group.name == name:
                return group
        raise KeyError("Unknown group '%s'" % name)

    def group_of(self, aid: int) -> Group:
        self.position(aid)
        for group in self._groups:
            if aid in group:
                return group
        raise UnknownAgent("Agent %s belongs to no group" % aid)

    def repulsions_into(self, name: str) -> List[RepulsionEdge]:
        return [edge for edge in self._repulsions if edge.target == name]

    def __eq__(self, other):
        if isinstance(other, Scenario):
            return (self._states == other._states and self._agents == other._agents
                    and self._groups == other._groups and self._repulsions == other._repulsions)
        return False

    def __hash__(self):
        return hash((self._states, self._agents))

    def __repr__(self):
        return 'Scenario(states=%s, agents=%s, groups=%s, repulsions=%s)' % (
            self.state_count, self.agent_count, len(self._groups), len(self._repulsions))


class NetworkConfig:
    """ One decision state (0-based) per agent position: the network state tuple X. """

    def __init__(self, assignment: Iterable[int]):
        self._assignment = tuple(int(s) for s in assignment)

    @property
    def assignment(self):
        return self._assignment

    def indicator(self, position: int, state: int) -> int:
        return int(self._assignment[position] == state)

    def replace(self, position: int, state: int) -> 'NetworkConfig':
        assignment = list(self._assignment)
        assignment[position] = state
        return NetworkConfig(assignment)

    def one_hot(self, state_count: int) -> np.ndarray:
        onehot = np.zeros((len(self._assignment), state_count))
        onehot[np.arange(len(self._assignment)), self._assignment] = 1.0
        return onehot

    def labels(self, states: StateSpace) -> Tuple[str, ...]:
        return tuple(states.label(s) for s in self._assignment)

    def __getitem__(self, position):
        return self._assignment[position]

    def __len__(self):
        return len(self._assignment)

    def __iter__(self):
        return iter(self._assignment)

    def __eq__(self, other):
        if isinstance(other, NetworkConfig):
            return self._assignment == other._assignment
        return False

    def __hash__(self):
        return hash(self._assignment)

    def __repr__(self):
        return 'NetworkConfig%s' % (self._assignment,)


class TrajectoryTable:
    """ Time-indexed probabilities, shape (time, agent, state). Agents are either
    per-agent marginals (labelled by id) or the single joint 'network' entry. """

    def __init__(self, times, agents: Sequence[str], states: Sequence[str], probabilities):
        self._times = _frozen(times, 1)
        self._agents = tuple(str(a) for a in agents)
        self._states = tuple(states)
        self._probabilities = _frozen(probabilities, 3)

        expected = (len(self._times), len(self._agents), len(self._states))
        if self._probabilities.shape != expected:
            raise DimensionMismatch("Probabilities of shape %s, expected %s"
                                    % (self._probabilities.shape, expected))

    @property
    def times(self):
        return self._times

    @property
    def agents(self):
        return self._agents

    @property
    def states(self):
        return self._states

    @property
    def probabilities(self):
        return self._probabilities

    def agent(self, agent) -> np.ndarray:
        try:
            return self._probabilities[:, self._agents.index(str(agent)), :]
        except ValueError:
            raise UnknownAgent("Agent %s not in trajectory" % (agent,))

    def final(self) -> np.ndarray:
        return self._probabilities[-1]

    def stacked(self) -> np.ndarray:
        """ Rows of agent-major, state-minor stacked vectors. """
        return self._probabilities.reshape(len(self._times), -1)

    def max_deviation(self, other: 'TrajectoryTable') -> float:
        if self._probabilities.shape != other.probabilities.shape:
            raise DimensionMismatch("Cannot compare trajectories of shape %s and %s"
                                    % (self._probabilities.shape, other.probabilities.shape))
        return float(np.max(np.abs(self._probabilities - other.probabilities)))

    def records(self):
        # tiny negative integration noise is clamped for reporting
        reported = np.clip(self._probabilities, 0.0, None)
        for t_idx, t in enumerate(self._times):
            for a_idx, agent in enumerate(self._agents):
                for s_idx, state in enumerate(self._states):
                    yield float(t), agent, state, float(reported[t_idx, a_idx, s_idx])

    def __len__(self):
        return len(self._times)

    def __repr__(self):
        return 'TrajectoryTable(times=%s, agents=%s, states=%s)' % (
            len(self._times), len(self._agents), len(self._states))
