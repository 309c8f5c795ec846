import argparse
import logging
import sys

from args import (validate_argparser, stationary_argparser, transient_argparser, simulate_argparser,
                  compare_argparser, example_argparser)
from config_reader import process_configs
from markov_opinion.exceptions import OpinionModelError
from markov_opinion.opinion_runner import OpinionRunner


def _run(run_args, action) -> int:
    runner = OpinionRunner(run_args)
    try:
        action(runner)
        return 0
    except OpinionModelError as e:
        if run_args.debug:
            logging.getLogger().exception(e)
        else:
            logging.getLogger().error("%s: %s" % (type(e).__name__, e))
        return e.exit_code
    finally:
        runner.close()


def __validate(run_args):
    return _run(run_args, lambda runner: runner.validate(run_args.scenario_path))


def __stationary(run_args):
    return _run(run_args, lambda runner: runner.stationary(run_args.scenario_path))


def __transient(run_args):
    return _run(run_args, lambda runner: runner.transient(run_args.scenario_path))


def __simulate(run_args):
    return _run(run_args, lambda runner: runner.simulate(run_args.scenario_path))


def __compare(run_args):
    return _run(run_args, lambda runner: runner.compare(run_args.scenario_path))


def __example(run_args):
    return _run(run_args, lambda runner: runner.example(run_args.name))


_MODES = {
    'validate': (validate_argparser, __validate),
    'stationary': (stationary_argparser, __stationary),
    'transient': (transient_argparser, __transient),
    'simulate': (simulate_argparser, __simulate),
    'compare': (compare_argparser, __compare),
    'example': (example_argparser, __example),
}


def main(argv) -> int:
    arg_parser = argparse.ArgumentParser(add_help=False)
    arg_parser.add_argument('mode', type=str, help="Mode: %s" % ', '.join(_MODES))
    args, _ = arg_parser.parse_known_args(argv[:1])

    if args.mode not in _MODES:
        print("Mode not in %s, e.g. 'python opinion_dynamics.py stationary scenario.json'" % list(_MODES),
              file=sys.stderr)
        return 2

    parser_factory, target = _MODES[args.mode]
    return process_configs(target=target, arg_parser=parser_factory(), argv=list(argv[1:]))


if __name__ == '__main__':
    sys.exit(main(sys.argv[1:]))
