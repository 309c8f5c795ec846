import logging
from typing import List

import numpy as np

from markov_opinion.entities import Scenario
from markov_opinion.models import NetworkMethod, MarginalMethod, get_model, model_names
from markov_opinion.sampling import SimConfig, SimulationEstimate, estimate_marginals

STATIONARY_TOL = 1e-9
TRANSIENT_TOL = 1e-6

_logger = logging.getLogger(__name__)


class CheckResult:
    def __init__(self, name: str, deviation: float, tolerance: float):
        self._name = name
        self._deviation = deviation
        self._tolerance = tolerance

    @property
    def name(self):
        return self._name

    @property
    def deviation(self):
        return self._deviation

    @property
    def tolerance(self):
        return self._tolerance

    @property
    def passed(self):
        # NaN never passes
        return bool(self._deviation <= self._tolerance)

    def __repr__(self):
        return 'CheckResult(%s: %.3e <= %.1e %s)' % (self._name, self._deviation, self._tolerance,
                                                     'ok' if self.passed else 'FAIL')


class Comparator:
    """ Oracle chain: network vs marginal model for every variant (stationary and transient),
    then Monte Carlo estimates of the full model against the marginal stationary. """

    def __init__(self, scenario: Scenario, cap: int = None, t_end: float = 10.0, points: int = 50,
                 sim: SimConfig = None, sigma: float = 3.0, sim_atol: float = 0.01, workers: int = 1,
                 progress: bool = False):
        self._scenario = scenario
        self._cap = cap
        self._t_grid = np.linspace(0.0, t_end, points)
        self._sim = sim
        self._sigma = sigma
        self._sim_atol = sim_atol
        self._workers = workers
        self._progress = progress

        self._results = []
        self._estimate = None

    @property
    def results(self) -> List[CheckResult]:
        return self._results

    @property
    def estimate(self) -> SimulationEstimate:
        return self._estimate

    @property
    def passed(self):
        return all(r.passed for r in self._results)

    def compute_checks(self) -> List[CheckResult]:
        self._results = []
        full_stationary = None

        for name in model_names():
            model = get_model(name)
            exact = NetworkMethod(self._scenario, model, cap=self._cap)
            reduced = MarginalMethod(self._scenario, model)

            stationary = reduced.stationary()
            self._add('%s stationary' % name, np.max(np.abs(exact.stationary() - stationary)), STATIONARY_TOL)
            self._add('%s transient' % name,
                      exact.transient(self._t_grid).max_deviation(reduced.transient(self._t_grid)), TRANSIENT_TOL)

            if model.attraction and model.repulsion:
                full_stationary = stationary

        if self._sim is not None:
            self._estimate = estimate_marginals(self._scenario, self._sim, workers=self._workers,
                                                progress=self._progress)
            deviation = np.abs(self._estimate.mean - full_stationary)

            self._add('simulation abs', np.max(deviation), self._sim_atol)
            with np.errstate(divide='ignore', invalid='ignore'):
                self._add('simulation z', np.max(deviation / self._estimate.stderr), self._sigma)

        return self._results

    def format_results(self) -> str:
        columns = ('check', 'deviation', 'tolerance', 'status')

        row_fmt = "%20s" + (" %12s" * (len(columns) - 1))
        results = [row_fmt % columns, '\n']

        for r in self._results:
            results.append(row_fmt % (r.name, '%.3e' % r.deviation, '%.1e' % r.tolerance,
                                      'ok' if r.passed else 'FAIL'))
            results.append('\n')

        return ''.join(results)

    def _add(self, name, deviation, tolerance):
        result = CheckResult(name, float(deviation), float(tolerance))
        _logger.debug(repr(result))
        self._results.append(result)
