import argparse

from markov_opinion import models, util
from markov_opinion.entities import Scenario
from markov_opinion.evaluator import Comparator
from markov_opinion.exceptions import OpinionModelError, ParseError, ValidationError, ComparisonFailed
from markov_opinion.input_reader import BaseScenarioReader, JsonScenarioReader, write_scenario
from markov_opinion.intersection import intersection_example, calibrate_preference_rate
from markov_opinion.network import network_labels
from markov_opinion.runner import BaseRunner
from markov_opinion.sampling import SimConfig, estimate_marginals
from markov_opinion.validation import validate_scenario

EXAMPLES = ('intersection',)


class OpinionRunner(BaseRunner):
    """ Subcommands: validation, exact and marginal solutions, simulation and the comparison chain """

    def __init__(self, args: argparse.Namespace, reader_cls: BaseScenarioReader = JsonScenarioReader):
        super().__init__(args)
        self._reader_cls = reader_cls

    def validate(self, scenario_path: str):
        reader = self._reader_cls(self._logger, validate=False)
        scenario = reader.read(self._require(scenario_path))
        report = validate_scenario(scenario)

        with util.open_output(self.args.out) as out:
            out.write(str(report) + '\n')

        if not report.passed:
            raise ValidationError(report)

    def stationary(self, scenario_path: str):
        scenario = self._read(scenario_path)
        method = self._method(scenario)

        if self.args.joint:
            labels = network_labels(method.generator.codec, scenario.states.labels)
            records = [('network', label, p) for label, p in zip(labels, method.joint_stationary())]
        else:
            marginals = method.stationary()
            records = [(str(aid), state, marginals[a_idx, s_idx])
                       for a_idx, aid in enumerate(scenario.agent_ids)
                       for s_idx, state in enumerate(scenario.states)]

        records = [(a, s, float(max(p, 0.0))) for a, s, p in records]
        for agent, state, p in records:
            self._log_tensorboard('stationary', '%s/%s' % (agent, state), p, 0)

        with util.open_output(self.args.out) as out:
            util.write_records(out, ('agent', 'state', 'probability'), records)

    def transient(self, scenario_path: str):
        scenario = self._read(scenario_path)
        method = self._method(scenario)
        t_grid = util.time_grid(self.args.t_end, self.args.points)

        self._logger.info("Transient on [0, %s] with %s points (%s, %s)"
                          % (self.args.t_end, self.args.points, self.args.model, self.args.method))
        table = method.joint_transient(t_grid) if self.args.joint else method.transient(t_grid)

        for t_idx, snapshot in enumerate(table.probabilities):
            for a_idx, agent in enumerate(table.agents):
                for s_idx, state in enumerate(table.states):
                    self._log_tensorboard('transient', '%s/%s' % (agent, state), snapshot[a_idx, s_idx], t_idx)

        with util.open_output(self.args.out) as out:
            util.write_records(out, ('t', 'agent', 'state', 'probability'), table.records())

    def simulate(self, scenario_path: str):
        scenario = self._read(scenario_path)
        model = models.get_model(self.args.model)
        sim = SimConfig(self.args.horizon, self.args.replicates, self.args.seed, self.args.burn_in)

        self._logger.info("Simulating %s (%s model, %s workers)" % (sim, model.name, self.args.workers))
        estimate = estimate_marginals(scenario, sim, attraction=model.attraction, repulsion=model.repulsion,
                                      workers=self.args.workers, progress=True)

        for agent, state, mean, _ in estimate.records():
            self._log_tensorboard('simulate', '%s/%s' % (agent, state), mean, estimate.replicates)

        with util.open_output(self.args.out) as out:
            util.write_records(out, ('agent', 'state', 'estimate', 'stderr'), estimate.records())

    def compare(self, scenario_path: str):
        scenario = self._read(scenario_path)
        label = 'compare'
        self._add_dataset_logging(label, data={'checks': ['check', 'deviation', 'tolerance', 'passed']})

        sim = None
        if not self.args.skip_simulation:
            sim = SimConfig(self.args.horizon, self.args.replicates, self.args.seed, self.args.burn_in)

        comparator = Comparator(scenario, cap=self.args.cap, t_end=self.args.t_end, points=self.args.points,
                                sim=sim, sigma=self.args.sigma, sim_atol=self.args.sim_atol,
                                workers=self.args.workers, progress=True)
        results = comparator.compute_checks()

        for r in results:
            self._log_csv(label, 'checks', r.name, r.deviation, r.tolerance, r.passed)
            self._log_tensorboard(label, r.name.replace(' ', '_'), r.deviation, 0)

        with util.open_output(self.args.out) as out:
            out.write(comparator.format_results())

        failed = [r.name for r in results if not r.passed]
        if failed:
            raise ComparisonFailed("Checks out of tolerance: %s" % ', '.join(failed))
        self._logger.info("All %s checks within tolerance" % len(results))

    def example(self, name: str):
        if name not in EXAMPLES:
            raise ParseError("Unknown example '%s', choose from %s" % (name, list(EXAMPLES)))

        r_pref = None
        if self.args.calibrate:
            r_pref = calibrate_preference_rate()
            self._logger.info("Calibrated preference rate: %s" % r_pref)
        scenario = intersection_example(r_pref)

        with util.open_output(self.args.out) as out:
            write_scenario(scenario, out)
        self._logger.info("Wrote scenario '%s' to %s" % (name, self.args.out or 'stdout'))

    def _read(self, scenario_path: str) -> Scenario:
        reader = self._reader_cls(self._logger)
        scenario = reader.read(self._require(scenario_path))

        self._logger.info("Scenario: %s agents, %s states, %s groups, %s repulsions"
                          % (scenario.agent_count, scenario.state_count, len(scenario.groups),
                             len(scenario.repulsions)))
        return scenario

    def _method(self, scenario: Scenario) -> models.BaseMethod:
        if self.args.joint and self.args.method != 'network':
            raise OpinionModelError("--joint needs --method network")

        model = models.get_model(self.args.model)
        method_cls = models.get_method(self.args.method)
        return method_cls(scenario, model, cap=self.args.cap)

    @staticmethod
    def _require(scenario_path):
        if not scenario_path:
            raise ParseError("No scenario file given")
        return scenario_path
