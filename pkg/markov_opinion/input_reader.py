import json
from abc import abstractmethod, ABC
from collections import OrderedDict
from logging import Logger
from typing import TextIO, Union

import numpy as np

from markov_opinion.entities import Scenario, StateSpace, AgentSpec, Group, RepulsionEdge
from markov_opinion.exceptions import ParseError, ValidationError
from markov_opinion.validation import validate_scenario

SCENARIO_KEYS = ('states', 'agents', 'groups', 'repulsions', 'comment')
AGENT_KEYS = ('id', 'Q', 'eta', 'initial')
GROUP_KEYS = ('name', 'members', 'lambda', 'adjacency')
REPULSION_KEYS = ('target', 'source', 'gamma', 'adjacency')


class BaseScenarioReader(ABC):
    def __init__(self, logger: Logger = None):
        self._scenarios = OrderedDict()
        self._logger = logger

    @abstractmethod
    def read(self, path: str, label: str = None) -> Scenario:
        pass

    def get_scenario(self, label) -> Scenario:
        return self._scenarios[label]

    def _log(self, text):
        if self._logger is not None:
            self._logger.info(text)

    @property
    def scenarios(self):
        return self._scenarios

    def __str__(self):
        return '\n'.join('Scenario: %s %s' % (label, s) for label, s in self._scenarios.items())

    def __repr__(self):
        return self.__str__()


class JsonScenarioReader(BaseScenarioReader):
    """ Strict reader: unknown or duplicate keys and malformed values raise ParseError
    naming the JSON path; invariant breaches raise ValidationError. """

    def __init__(self, logger: Logger = None, validate: bool = True):
        super().__init__(logger)
        self._validate = validate

    def read(self, path: str, label: str = None) -> Scenario:
        try:
            with open(path, encoding='utf-8') as f:
                document = json.load(f, object_pairs_hook=_unique_keys)
        except OSError as e:
            raise ParseError("Cannot read scenario '%s': %s" % (path, e))
        except ValueError as e:
            raise ParseError("Malformed scenario '%s': %s" % (path, e))

        scenario = self.parse(document)
        self._scenarios[label or path] = scenario
        self._log("Read scenario '%s': %s" % (path, scenario))
        return scenario

    def parse(self, document) -> Scenario:
        _expect(isinstance(document, dict), '$', 'document must be an object')
        _check_keys(document, SCENARIO_KEYS, '$', required=('states', 'agents'))

        states = self._parse_states(document['states'])
        agents = [self._parse_agent(a, 'agents[%s]' % i) for i, a in enumerate(_list(document['agents'], 'agents'))]
        groups = [self._parse_group(g, 'groups[%s]' % i)
                  for i, g in enumerate(_list(document.get('groups', []), 'groups'))]
        repulsions = [self._parse_repulsion(r, 'repulsions[%s]' % i)
                      for i, r in enumerate(_list(document.get('repulsions', []), 'repulsions'))]

        comment = document.get('comment')
        _expect(comment is None or isinstance(comment, str), 'comment', 'comment must be a string')

        scenario = Scenario(states, agents, groups, repulsions, comment=comment)

        if self._validate:
            report = validate_scenario(scenario)
            if not report.passed:
                raise ValidationError(report)

        return scenario

    def _parse_states(self, jstates) -> StateSpace:
        labels = _list(jstates, 'states')
        for i, label in enumerate(labels):
            _expect(isinstance(label, str), 'states[%s]' % i, 'state label must be a string')
        return StateSpace(labels)

    def _parse_agent(self, jagent, location) -> AgentSpec:
        _expect(isinstance(jagent, dict), location, 'agent must be an object')
        _check_keys(jagent, AGENT_KEYS, location)

        aid = jagent['id']
        _expect(isinstance(aid, int) and not isinstance(aid, bool), location + '.id', 'agent id must be an integer')

        return AgentSpec(aid, _matrix(jagent['Q'], location + '.Q'), _number(jagent['eta'], location + '.eta'),
                         _vector(jagent['initial'], location + '.initial'))

    def _parse_group(self, jgroup, location) -> Group:
        _expect(isinstance(jgroup, dict), location, 'group must be an object')
        _check_keys(jgroup, GROUP_KEYS, location)

        name = jgroup['name']
        _expect(isinstance(name, str), location + '.name', 'group name must be a string')
        members = _list(jgroup['members'], location + '.members')
        for i, member in enumerate(members):
            _expect(isinstance(member, int) and not isinstance(member, bool),
                    '%s.members[%s]' % (location, i), 'member must be an agent id')

        return Group(name, members, _number(jgroup['lambda'], location + '.lambda'),
                     _matrix(jgroup['adjacency'], location + '.adjacency'))

    def _parse_repulsion(self, jedge, location) -> RepulsionEdge:
        _expect(isinstance(jedge, dict), location, 'repulsion must be an object')
        _check_keys(jedge, REPULSION_KEYS, location)

        for key in ('target', 'source'):
            _expect(isinstance(jedge[key], str), '%s.%s' % (location, key), '%s must be a group name' % key)

        return RepulsionEdge(jedge['target'], jedge['source'], _number(jedge['gamma'], location + '.gamma'),
                             _matrix(jedge['adjacency'], location + '.adjacency'))


def parse_scenario(path: str, logger: Logger = None) -> Scenario:
    return JsonScenarioReader(logger).read(path)


def dump_scenario(scenario: Scenario) -> OrderedDict:
    """ Document form of a scenario. Floats are written in their shortest exact round-trip form. """
    document = OrderedDict()
    if scenario.comment is not None:
        document['comment'] = scenario.comment
    document['states'] = list(scenario.states.labels)
    document['agents'] = [OrderedDict([('id', int(a.id)), ('Q', a.rates.tolist()), ('eta', a.eta),
                                       ('initial', a.initial.tolist())]) for a in scenario.agents]
    document['groups'] = [OrderedDict([('name', g.name), ('members', [int(m) for m in g.members]),
                                       ('lambda', g.strength), ('adjacency', g.adjacency.tolist())])
                          for g in scenario.groups]
    document['repulsions'] = [OrderedDict([('target', e.target), ('source', e.source), ('gamma', e.gamma),
                                           ('adjacency', e.adjacency.tolist())]) for e in scenario.repulsions]
    return document


def write_scenario(scenario: Scenario, target: Union[str, TextIO]):
    """ Write `scenario` as JSON to the file at `target`, or to `target` itself when it is a text stream. """
    if isinstance(target, str):
        with open(target, 'w', encoding='utf-8', newline='\n') as f:
            write_scenario(scenario, f)
        return

    json.dump(dump_scenario(scenario), target, indent=2)
    target.write('\n')


def _unique_keys(pairs):
    document = OrderedDict()
    for key, value in pairs:
        if key in document:
            raise ValueError("duplicate key '%s'" % key)
        document[key] = value
    return document


def _expect(condition, location, message):
    if not condition:
        raise ParseError('%s: %s' % (location, message))


def _check_keys(obj, allowed, location, required=None):
    required = allowed if required is None else required
    for key in obj:
        _expect(key in allowed, '%s.%s' % (location, key), 'unknown key')
    for key in required:
        _expect(key in obj, '%s.%s' % (location, key), 'missing key')


def _list(value, location):
    _expect(isinstance(value, list), location, 'expected a list')
    return value


def _number(value, location) -> float:
    _expect(isinstance(value, (int, float)) and not isinstance(value, bool), location, 'expected a number')
    return float(value)


def _vector(value, location) -> np.ndarray:
    for i, entry in enumerate(_list(value, location)):
        _number(entry, '%s[%s]' % (location, i))
    return np.array(value, dtype=float)


def _matrix(value, location) -> np.ndarray:
    rows = [_vector(row, '%s[%s]' % (location, i)) for i, row in enumerate(_list(value, location))]
    _expect(len({row.size for row in rows}) <= 1, location, 'rows must have equal length')
    if not rows:
        return np.zeros((0, 0))
    return np.array(rows, dtype=float).reshape(len(rows), -1)
