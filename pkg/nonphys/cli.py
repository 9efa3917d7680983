"""
Command-line interface: `nonphys <command> --channel <source> [options]`.

Exit codes: 0 success, 1 a check failed, 2 bad input, 3 solver failure.
"""
import argparse
import logging
import sys

from . import core
from .channels import parse_channel_source
from .exceptions import InputError, SingularMapError, SolverError
from .nonmarkov import parse_family
from .sdp import SolverConfig, dump_programs
from .serialize import dumps

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT = 2
EXIT_SOLVER = 3

LOG_LEVELS = [logging.WARNING, logging.INFO, logging.DEBUG]


def _common():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--channel', help="channel JSON file or 'builtin:<name>?k=v&k=v'")
    common.add_argument('--out', help='write the JSON report here instead of stdout')
    common.add_argument('--gap-tol', type=float, default=1e-8)
    common.add_argument('--feas-tol', type=float, default=1e-8)
    common.add_argument('--max-iter', type=int, default=200)
    common.add_argument('--jobs', type=int, default=1, help='independent evaluations run concurrently')
    common.add_argument('--seed', type=int, default=0)
    common.add_argument('--certify', action='store_true', help='verify every solver certificate from scratch')
    common.add_argument('--dump-sdp', metavar='PATH', help='write the compiled cone programs as JSON')
    common.add_argument('-v', '--verbose', action='count', default=0)
    return common


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog='nonphys', description='Non-physicality measures of linear maps.')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('compute', parents=[common], help='evaluate measures')
    p.add_argument('measures', nargs='+', choices=sorted(core.MEASURES), metavar='MEASURE',
                   help='one or more of: ' + ', '.join(sorted(core.MEASURES)))
    p.add_argument('--save-witnesses', metavar='PATH', help='HDF5 file for the optimal witnesses')

    p = sub.add_parser('bounds', parents=[common], help='analytic bounds on the measures')
    p.add_argument('--probes', type=int, default=0, help='number of extra random probe states')
    p.add_argument('--approx-inverse', metavar='FORWARD',
                   help='forward map that the channel approximately inverts')
    p.add_argument('--eps', type=float, default=0.0, help='inversion accuracy of the channel')

    p = sub.add_parser('simulate', parents=[common], help='optimal simulation with an ancilla')
    p.add_argument('--probes', type=int, default=50, help='random probe states for the residual')

    sub.add_parser('game', parents=[common], help='optimal input-output game')
    sub.add_parser('verify', parents=[common], help='run the identity suite')

    p = sub.add_parser('nonmarkov', parents=[common], help='non-Markovianity of a channel family')
    p.add_argument('--family', required=True, help="'<name>?k=v&k=v', e.g. oscillatory_dephasing?Gamma=0.2")
    p.add_argument('--t-min', type=float, default=0.0)
    p.add_argument('--t-max', type=float, required=True)
    p.add_argument('--steps', type=int, default=100)
    p.add_argument('--eps', type=float, default=1e-4, help='finite-difference step')
    p.add_argument('--richardson', action='store_true')
    p.add_argument('--sup-points', type=int, default=0)
    return parser


def _config(args):
    try:
        return SolverConfig(gap_tol=args.gap_tol, feas_tol=args.feas_tol, max_iterations=args.max_iter)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _channel(args):
    if not args.channel:
        raise InputError("--channel is required for the {} command".format(args.command))
    return parse_channel_source(args.channel)


def cmd_compute(args, config):
    programs = [] if args.dump_sdp else None
    results = core.compute(_channel(args), args.measures, config, args.jobs, args.certify, programs)
    if args.save_witnesses:
        core.save_witnesses(results, args.save_witnesses)
    if programs is not None:
        dump_programs(programs, args.dump_sdp)
    payload = {'command': 'compute', 'channel': args.channel,
               'results': {name: res.to_dict() for name, res in results.items()}}
    return payload, EXIT_OK


def cmd_bounds(args, config):
    m = _channel(args)
    probes = core.random_probes(m.d_in, args.probes, args.seed) if args.probes else None
    forward = parse_channel_source(args.approx_inverse) if args.approx_inverse else None
    report = core.bounds(m, probes, args.certify, forward, args.eps, config)
    code = EXIT_OK if report.consistent else EXIT_CHECK_FAILED
    return {'command': 'bounds', 'channel': args.channel, 'bounds': report}, code


def cmd_simulate(args, config):
    plan, residual = core.simulate(_channel(args), config, args.probes, args.seed)
    return {'command': 'simulate', 'channel': args.channel, 'plan': plan, 'cost': plan.cost,
            'residual': residual}, EXIT_OK


def cmd_game(args, config):
    report = core.game(_channel(args), config)
    code = EXIT_OK if report.passed else EXIT_CHECK_FAILED
    return {'command': 'game', 'channel': args.channel, 'game': report}, code


def cmd_verify(args, config):
    report = core.verify(_channel(args), config, jobs=args.jobs)
    code = EXIT_OK if report.passed else EXIT_CHECK_FAILED
    return {'command': 'verify', 'channel': args.channel, 'verify': report}, code


def cmd_nonmarkov(args, config):
    family = parse_family(args.family)
    report = core.nonmarkov(family, args.t_max, args.steps, args.eps, args.t_min, args.richardson,
                            args.sup_points, config, args.jobs)
    return {'command': 'nonmarkov', 'family': args.family, 'report': report}, EXIT_OK


COMMANDS = {
    'compute': cmd_compute,
    'bounds': cmd_bounds,
    'simulate': cmd_simulate,
    'game': cmd_game,
    'verify': cmd_verify,
    'nonmarkov': cmd_nonmarkov,
}


def _emit(text, path):
    if path:
        with open(path, 'w') as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=LOG_LEVELS[min(args.verbose, 2)], stream=sys.stderr,
                        format='%(levelname)s %(name)s: %(message)s')
    try:
        config = _config(args)
        payload, code = COMMANDS[args.command](args, config)
    except (InputError, SingularMapError) as exc:
        logger.error("%s", exc)
        return EXIT_INPUT
    except SolverError as exc:
        logger.error("%s", exc)
        return EXIT_SOLVER
    _emit(dumps(payload), args.out)
    return code


if __name__ == '__main__':
    sys.exit(main())
