""" Seven road users at an intersection: two cyclist groups crossing a group of three drivers.
Agents 1, 2 form C1, agents 3, 4, 5 the drivers D and agents 6, 7 form C2. """
import logging

import numpy as np

from markov_opinion.entities import Scenario, StateSpace, AgentSpec, Group, RepulsionEdge
from markov_opinion.exceptions import ToleranceNotMet
from markov_opinion.marginal import assemble_marginal_system, marginal_stationary

STATES = ('Yield', 'Go')
YIELD, GO = 0, 1

ETAS = {1: 10.0, 2: 1.0, 3: 100.0, 4: 100.0, 5: 100.0, 6: 10.0, 7: 1.0}
PREFERRED = {1: GO, 2: GO, 3: GO, 4: YIELD, 5: GO, 6: GO, 7: GO}

GROUPS = (('C1', (1, 2), 0.5), ('D', (3, 4, 5), 0.05), ('C2', (6, 7), 0.5))
REPULSIONS = (('D', 'C1', 0.3), ('D', 'C2', 0.3), ('C1', 'D', 0.003), ('C2', 'D', 0.003))

OTHER_RATE = 0.1
# frozen result of calibrate_preference_rate()
PREFERENCE_RATE = 0.15
CALIBRATION_GRID = np.round(np.arange(0.15, 0.6 + 1e-9, 0.05), 2)
UNDECIDED_BAND = (0.45, 0.55)

_logger = logging.getLogger(__name__)


def confidence_factor(eta: float, eta_max: float) -> float:
    """ 1 for the least confident agents, one more per decade of lower uncertainty. """
    return 1.0 + np.log10(eta_max / eta)


def preference_rates(preferred: int, r_pref: float, r_other: float, factor: float = 1.0) -> np.ndarray:
    rates = np.full((2, 2), r_other)
    rates[1 - preferred, preferred] = r_pref * factor
    np.fill_diagonal(rates, 0.0)
    np.fill_diagonal(rates, -rates.sum(axis=1))
    return rates


def uniform_adjacency(rows: int, cols: int) -> np.ndarray:
    return np.full((rows, cols), 1.0 / cols)


def peer_adjacency(size: int) -> np.ndarray:
    """ Complete graph without self loops; a lone member has no peers. """
    if size == 1:
        return np.zeros((1, 1))
    return (np.ones((size, size)) - np.eye(size)) / (size - 1)


def intersection_example(r_pref: float = None, r_other: float = OTHER_RATE) -> Scenario:
    r_pref = PREFERENCE_RATE if r_pref is None else float(r_pref)
    eta_max = max(ETAS.values())

    agents = [AgentSpec(aid, preference_rates(PREFERRED[aid], r_pref, r_other, confidence_factor(eta, eta_max)),
                        eta, np.full(len(STATES), 1.0 / len(STATES)))
              for aid, eta in ETAS.items()]

    groups = [Group(name, members, strength, peer_adjacency(len(members)))
              for name, members, strength in GROUPS]
    sizes = {name: len(members) for name, members, _ in GROUPS}
    repulsions = [RepulsionEdge(target, source, gamma, uniform_adjacency(sizes[target], sizes[source]))
                  for target, source, gamma in REPULSIONS]

    comment = ("Intersection scenario: cyclist groups C1 (1, 2) and C2 (6, 7), drivers D (3, 4, 5). "
               "Base rates r_other = %r and r_pref = %r (calibrated on the grid 0.15..0.6), the rate toward "
               "the preferred state scaled by 1 + log10(100 / eta)." % (r_other, r_pref))

    return Scenario(StateSpace(STATES), agents, groups, repulsions, comment=comment)


def calibrate_preference_rate(r_other: float = OTHER_RATE, grid=CALIBRATION_GRID) -> float:
    """ Smallest r_pref for which every isolated agent's most likely state is its preferred one
    and the undecided driver 4 goes with probability inside UNDECIDED_BAND under attraction only. """
    for r_pref in grid:
        scenario = intersection_example(float(r_pref), r_other)

        isolated = _stationary(scenario, attraction=False)
        preferred_ok = all(np.argmax(isolated[scenario.position(aid)]) == PREFERRED[aid] for aid in ETAS)

        attract = _stationary(scenario, attraction=True)
        go = attract[scenario.position(4), GO]
        undecided_ok = UNDECIDED_BAND[0] <= go <= UNDECIDED_BAND[1]

        _logger.debug("r_pref=%.2f: preferred states %s, driver 4 Go %.4f"
                      % (r_pref, 'ok' if preferred_ok else 'off', go))
        if preferred_ok and undecided_ok:
            return float(r_pref)

    raise ToleranceNotMet("No preference rate on the grid meets the calibration conditions")


def _stationary(scenario: Scenario, attraction: bool) -> np.ndarray:
    system = assemble_marginal_system(scenario, attraction=attraction, repulsion=False)
    return marginal_stationary(system).reshape(scenario.agent_count, scenario.state_count)
