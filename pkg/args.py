import argparse

from markov_opinion.models import model_names, method_names


def _add_common_args(arg_parser):
    arg_parser.add_argument('--config', type=str, help="Path to a run configuration file")

    # Output
    arg_parser.add_argument('--out', type=str, default=None, help="Output file (default: stdout)")

    # Limits
    arg_parser.add_argument('--cap', type=int, default=None,
                            help="Maximum number of network states (default: $MARKOV_OPINION_CAP or 2^20)")

    # Logging
    arg_parser.add_argument('--label', type=str, default=None, help="Label of run. Used as the directory name of logs")
    arg_parser.add_argument('--log_path', type=str, default=None,
                            help="Path to directory where run logs are stored (no file logs if omitted)")
    arg_parser.add_argument('--debug', action='store_true', default=False, help="Debugging mode on/off")


def _add_scenario_args(arg_parser):
    arg_parser.add_argument('scenario_path', type=str, nargs='?', default=None, help="Path to scenario JSON file")


def _add_model_args(arg_parser, default_model='full'):
    arg_parser.add_argument('--model', type=str, default=default_model, choices=model_names(),
                            help="Forces to include: isolated, attract (no repulsion) or full")


def _add_method_args(arg_parser):
    arg_parser.add_argument('--method', type=str, default='marginal', choices=method_names(),
                            help="Exact network CTMC or the marginal linear model")
    arg_parser.add_argument('--joint', action='store_true', default=False,
                            help="Report network-state probabilities instead of marginals (network method only)")


def _add_time_args(arg_parser):
    arg_parser.add_argument('--t-end', '--t_end', dest='t_end', type=float, default=10.0, help="End of the time grid")
    arg_parser.add_argument('--points', type=int, default=50, help="Number of equidistant grid points on [0, t_end]")


def _add_simulation_args(arg_parser):
    arg_parser.add_argument('--replicates', type=int, default=200, help="Number of independent trajectories")
    arg_parser.add_argument('--horizon', type=float, default=200.0, help="Simulated time per trajectory")
    arg_parser.add_argument('--burn-in', '--burn_in', dest='burn_in', type=float, default=20.0,
                            help="Time discarded before occupancy averaging")
    arg_parser.add_argument('--seed', type=int, default=0, help="Seed; replicate i uses seed + i")
    arg_parser.add_argument('--workers', type=int, default=1, help="Processes to fan replicates out to")


def validate_argparser():
    arg_parser = argparse.ArgumentParser(prog='opinion_dynamics.py validate')
    _add_scenario_args(arg_parser)
    _add_common_args(arg_parser)

    return arg_parser


def stationary_argparser():
    arg_parser = argparse.ArgumentParser(prog='opinion_dynamics.py stationary')
    _add_scenario_args(arg_parser)
    _add_model_args(arg_parser)
    _add_method_args(arg_parser)
    _add_common_args(arg_parser)

    return arg_parser


def transient_argparser():
    arg_parser = argparse.ArgumentParser(prog='opinion_dynamics.py transient')
    _add_scenario_args(arg_parser)
    _add_model_args(arg_parser)
    _add_method_args(arg_parser)
    _add_time_args(arg_parser)
    _add_common_args(arg_parser)

    return arg_parser


def simulate_argparser():
    arg_parser = argparse.ArgumentParser(prog='opinion_dynamics.py simulate')
    _add_scenario_args(arg_parser)
    _add_model_args(arg_parser)
    _add_simulation_args(arg_parser)
    _add_common_args(arg_parser)

    return arg_parser


def compare_argparser():
    arg_parser = argparse.ArgumentParser(prog='opinion_dynamics.py compare')
    _add_scenario_args(arg_parser)
    _add_time_args(arg_parser)
    _add_simulation_args(arg_parser)

    # Tolerances of the simulation checks
    arg_parser.add_argument('--sigma', type=float, default=3.0,
                            help="Allowed deviation of simulation estimates in standard errors")
    arg_parser.add_argument('--sim-atol', '--sim_atol', dest='sim_atol', type=float, default=0.01,
                            help="Allowed absolute deviation of simulation estimates")
    arg_parser.add_argument('--skip-simulation', '--skip_simulation', dest='skip_simulation', action='store_true',
                            default=False, help="Only compare the network and marginal models")
    _add_common_args(arg_parser)

    return arg_parser


def example_argparser():
    arg_parser = argparse.ArgumentParser(prog='opinion_dynamics.py example')
    arg_parser.add_argument('name', type=str, nargs='?', default='intersection', help="Bundled scenario name")
    arg_parser.add_argument('--calibrate', action='store_true', default=False,
                            help="Re-run the base rate grid search instead of using the frozen value")
    _add_common_args(arg_parser)

    return arg_parser
