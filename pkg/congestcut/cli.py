"""Command line interface.

Subcommands ``generate``, ``run``, ``oracle`` and ``bench``. Reports are
JSON documents with sorted keys and floats kept to 12 significant digits,
so reruns with the same flags are byte identical.
"""

import argparse
import json
import logging
import sys

import congestcut
from .base import engine as eng
from .base import graph as grp
from .cuts import oracle as orc
from .cuts import sparsecut as spc
from .walks import randomwalk as rwk


__all__ = ['build_parser', 'cli_run', 'main']


_logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SIMULATION = 3
ALGORITHMS = ('randomwalk', 'pagerank', 'local', 'guess')


### Parser ###

def _graph_parser():
    parser = argparse.ArgumentParser(add_help=False)
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument('--graph', type=str, help='edge list file')
    group.add_argument(
        '--family', type=str, choices=grp.GRAPH_FAMILIES,
        help='generated graph family')
    parser.add_argument('--n', type=int, help='node count of --family')
    parser.add_argument(
        '--p', type=float, default=0.5,
        help='edge probability of random-connected')
    parser.add_argument(
        '--graph-seed', type=int, default=0,
        help='seed of random-connected')
    return parser


def _sim_parser():
    parser = argparse.ArgumentParser(add_help=False)
    # Unset flags keep the library defaults.
    parser.add_argument('--seed', type=int, help='simulation seed')
    parser.add_argument(
        '--max-rounds', type=int, help='round cap of each simulation')
    parser.add_argument(
        '--bit-budget-multiplier', type=int,
        help='message field budget in node id words')
    parser.add_argument(
        '--strict-bits', action='store_true', default=None,
        help='fail on message budget violations')
    parser.add_argument('--out', type=str, help='output file, default stdout')
    return parser


def _cut_parser():
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument(
        '--algo', type=str, choices=ALGORITHMS, default='randomwalk')
    parser.add_argument('--phi', type=float, help='target conductance')
    parser.add_argument('--balance', type=float, help='assumed balance')
    parser.add_argument('--epsilon', type=float, help='walk accuracy')
    parser.add_argument('--walks', type=int, help='tokens per estimate')
    parser.add_argument(
        '--mode', type=str, choices=rwk.WALK_MODES, default='diffusion')
    parser.add_argument(
        '--engine', type=str, choices=spc.ENGINES, default='randomwalk',
        help='distribution used by local and guess')
    parser.add_argument(
        '--preset', type=str, choices=spc.PRESETS, default='desk')
    parser.add_argument('--source', type=int, help='local cluster source')
    return parser


def build_parser():
    parser = argparse.ArgumentParser(prog='congestcut')
    parser.add_argument(
        '-v', '--version', action='version',
        version=f'%(prog)s {congestcut.__version__}')
    parser.add_argument(
        '-V', '--verbosity', type=int, default=30, help='logger level')
    commands = parser.add_subparsers(dest='command', required=True)

    graph, sim, cut = _graph_parser(), _sim_parser(), _cut_parser()

    cmd = commands.add_parser('generate', help='write a family edge list')
    cmd.add_argument(
        '--family', type=str, choices=grp.GRAPH_FAMILIES, required=True)
    cmd.add_argument('--n', type=int, required=True)
    cmd.add_argument('--p', type=float, default=0.5)
    cmd.add_argument('--graph-seed', type=int, default=0)
    cmd.add_argument('--out', type=str)
    cmd.set_defaults(func=_generate)

    cmd = commands.add_parser(
        'run', parents=[graph, sim, cut], help='run a cut algorithm')
    cmd.set_defaults(func=_run)

    cmd = commands.add_parser(
        'oracle', parents=[graph, sim], help='exact reference values')
    cmd.add_argument(
        '--what', type=str, choices=('sparsest', 'walk', 'ppr'),
        default='sparsest')
    cmd.add_argument('--source', type=int, default=0)
    cmd.add_argument('--length', type=int, default=1)
    cmd.add_argument('--alpha', type=float, default=0.5)
    cmd.add_argument('--max-n', type=int, help='enumeration cap')
    cmd.set_defaults(func=_oracle)

    cmd = commands.add_parser(
        'bench', parents=[sim, cut], help='JSON lines table over a family')
    cmd.add_argument(
        '--family', type=str, choices=grp.GRAPH_FAMILIES, required=True)
    cmd.add_argument('--sizes', type=int, nargs='*', default=[])
    cmd.add_argument(
        '--seeds', type=int, default=1, help='runs per size from --seed on')
    cmd.add_argument('--p', type=float, default=0.5)
    cmd.add_argument(
        '--oracle', action='store_true',
        help='compare with the brute force optimum')
    cmd.set_defaults(func=_bench)
    return parser


### Helpers ###

def _sim_config(args, **overrides):
    params = dict()
    for flag in (
            'seed', 'max_rounds', 'bit_budget_multiplier', 'strict_bits'):
        value = getattr(args, flag, None)
        if value is not None:
            params[flag] = value
    params.update(overrides)
    return eng.SimConfig.default(**params)


def _load_graph(args):
    if args.graph:
        return grp.read_edge_list(args.graph)
    if args.n is None:
        raise eng.ConfigError('--family needs --n')
    return grp.generate(
        grp.GraphFamilySpec(args.family, args.n, args.p, args.graph_seed))


def _rounded(value):
    if isinstance(value, float):
        return float(f'{value:.12g}')
    if isinstance(value, dict):
        return {k: _rounded(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_rounded(v) for v in value]
    return value


def _dumps(doc, indent=2):
    return json.dumps(_rounded(doc), sort_keys=True, indent=indent)


def _write(text, path):
    if path:
        with open(path, 'w') as file:
            file.write(text)
    else:
        sys.stdout.write(text)


def _cut_config(args, phi=None, balance=None):
    return spc.SparseCutConfig(
        phi=phi if phi is not None else 0.5,
        balance=balance if balance is not None else 0.5,
        epsilon=args.epsilon, walks=args.walks, mode=args.mode,
        engine=args.engine, preset=args.preset)


def _cut_report(g, args, sim, phi, balance, source):
    algo = args.algo
    if algo in ('randomwalk', 'pagerank'):
        if phi is None:
            raise eng.ConfigError(f'--algo {algo} needs --phi')
        cfg = _cut_config(args, phi, balance)._replace(engine=algo)
        return spc.sparse_cut(g, cfg, sim)
    if algo == 'guess':
        cfg = _cut_config(args, balance=balance)
        return spc.guess_phi(
            g, cfg.balance, engine=args.engine, sim=sim, cfg=cfg)
    if source is None:
        raise eng.ConfigError('--algo local needs --source')
    return spc.local_cluster(
        g, source, engine=args.engine, sim=sim, cfg=_cut_config(args))


### Commands ###

def _generate(args):
    g = grp.generate(
        grp.GraphFamilySpec(args.family, args.n, args.p, args.graph_seed))
    _write(g.to_edge_list(), args.out)
    return EXIT_OK


def _run(args):
    g = _load_graph(args)
    sim = _sim_config(args)
    report = _cut_report(g, args, sim, args.phi, args.balance, args.source)
    doc = report.to_dict()
    doc.update(n=g.n, m=g.m, seed=sim.seed)
    _write(_dumps(doc) + '\n', args.out)
    return EXIT_OK


def _oracle(args):
    g = _load_graph(args)
    if args.what == 'sparsest':
        budget = orc.OracleBudget.default()
        if args.max_n is not None:
            budget = budget._replace(max_n_bruteforce=args.max_n)
        doc = orc.oracle_report(g, budget)
    elif args.what == 'walk':
        values = orc.exact_walk_distribution(g, args.source, args.length)
        doc = {
            'oracle': True, 'what': 'walk', 'source': args.source,
            'length': args.length, 'values': [float(v) for v in values]}
    else:
        values = orc.exact_ppr(g, args.source, args.alpha)
        doc = {
            'oracle': True, 'what': 'ppr', 'source': args.source,
            'alpha': args.alpha, 'values': list(values)}
    _write(_dumps(doc) + '\n', args.out)
    return EXIT_OK


def _bench_row(args, n, seed):
    row = {
        'family': args.family, 'n': n, 'seed': seed, 'phi_star': None,
        'error': None}
    try:
        g = grp.generate(grp.GraphFamilySpec(args.family, n, args.p, seed))
        phi, balance = args.phi, args.balance
        if args.oracle:
            cut, phi_star = orc.brute_force_sparsest_cut(g)
            row['phi_star'] = float(phi_star)
            phi = float(phi_star) if phi is None else phi
            if balance is None:
                balance = float(grp.balance(g, cut))
        sim = _sim_config(args, seed=seed)
        source = 0 if args.source is None else args.source
        report = _cut_report(g, args, sim, phi, balance, source)
        row.update(
            phi_returned=float(report.conductance),
            rounds=report.metrics.rounds,
            messages=report.metrics.messages_total,
            accepted=report.accepted)
    except (eng.ConfigError, grp.GraphError, eng.SimulationError) as e:
        _logger.warning('bench %s n=%d seed=%d: %s', args.family, n, seed, e)
        row['error'] = f'{type(e).__name__}: {e}'
    return row


def _bench(args):
    first = congestcut.DEFAULT_SEED if args.seed is None else args.seed
    lines = []
    for n in args.sizes:
        for seed in range(first, first + args.seeds):
            lines.append(_dumps(_bench_row(args, n, seed), indent=None))
    _write(''.join(line + '\n' for line in lines), args.out)
    return EXIT_OK


### Entry ###

def cli_run(argv=None):
    '''Run the command line and return the exit status.'''
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code
    congestcut.init(logging.getLevelName(args.verbosity))
    try:
        return args.func(args)
    except (eng.ConfigError, grp.GraphError, OSError) as e:
        _logger.error('%s', e)
        return EXIT_CONFIG
    except eng.SimulationError as e:
        _logger.error('%s', e)
        return EXIT_SIMULATION


def main():
    return cli_run(sys.argv[1:])
