"""Sweep cuts over a rho ordering."""

from fractions import Fraction
import logging
from typing import NamedTuple

from ..base import engine as eng
from ..base import tree as trp
from ..base.graph import Cut


__all__ = [
    'SweepOrder', 'SweepResult', 'order_by_rho', 'sweep_conductances',
    'sweep_distributed', 'format_sweep', 'SWEEP_ROUND_FACTOR']


_logger = logging.getLogger(__name__)

# Distributed sweep rounds are at most SWEEP_ROUND_FACTOR * (n + D).
SWEEP_ROUND_FACTOR = 4


class SweepOrder(NamedTuple):
    '''Nodes by decreasing rho, ties by ascending id.'''

    pi: tuple
    rho: tuple

    def position(self):
        pos = [0] * len(self.pi)
        for k, node in enumerate(self.pi):
            pos[node] = k
        return tuple(pos)

    def reversed(self):
        return type(self)(tuple(reversed(self.pi)), self.rho)


class SweepResult(NamedTuple):
    '''Conductances of the prefix cuts ``S_j = pi[:j]``, j = 1..n-1.

    The per-j tuples are 0-based, ``conductances[j - 1]`` belongs to
    ``S_j``. ``left`` and ``right`` hold each position's neighbor counts
    before and after it in the order, for every position.
    '''

    order: SweepOrder
    left: tuple
    right: tuple
    crossings: tuple
    volumes: tuple
    conductances: tuple
    best_j: int
    best_conductance: Fraction

    def prefix(self, j):
        return frozenset(self.order.pi[:j])

    def cut(self, g, j=None):
        return Cut.from_members(g, self.prefix(self.best_j if j is None else j))


def order_by_rho(g, p):
    '''Order nodes by ``p[i] / d(i)``.

    Parameters
    ----------
    p: ProbEstimate, PageRankEstimate or sequence
        Anything with per-node ``values`` or the values themselves.
    '''
    values = getattr(p, 'values', p)
    if len(values) != g.n:
        raise eng.ConfigError(f'{len(values)} values for {g.n} nodes')
    rho = tuple(Fraction(v) / g.degree(i) for i, v in enumerate(values))
    pi = tuple(sorted(range(g.n), key=lambda i: (-rho[i], i)))
    return SweepOrder(pi, rho)


def _check_order(g, order):
    if sorted(order.pi) != list(range(g.n)):
        raise eng.ConfigError('sweep order is not a permutation of the nodes')


def _sweep_from_counts(order, left, right):
    # Total volume is the sum of all degrees, L + R at each position.
    two_m = sum(left) + sum(right)
    crossings, volumes, conductances = [], [], []
    crossing = volume = 0
    for k in range(len(order.pi) - 1):
        crossing += right[k] - left[k]
        volume += left[k] + right[k]
        crossings.append(crossing)
        volumes.append(volume)
        conductances.append(
            Fraction(crossing, min(volume, two_m - volume)))
    best = min(conductances)
    best_j = conductances.index(best) + 1
    return SweepResult(
        order, tuple(left), tuple(right), tuple(crossings), tuple(volumes),
        tuple(conductances), best_j, best)


def sweep_conductances(g, order):
    '''All prefix conductances in one pass over the order.'''
    _check_order(g, order)
    pos = order.position()
    left, right = [], []
    for k, node in enumerate(order.pi):
        before = sum(1 for j in g.neighbors(node) if pos[j] < k)
        left.append(before)
        right.append(g.degree(node) - before)
    return _sweep_from_counts(order, left, right)


class _PositionExchange(eng.NodeProgram):
    '''Neighbors swap sweep positions, each node counts the ones before
    and after its own.'''

    name = 'positions'

    def __init__(self, position):
        self._position = position

    def init(self, ctx):
        return {'pos': self._position[ctx.node], 'counts': None}

    def on_round(self, ctx, state, round, inbox):
        if round == 1:
            msg = (state['pos'],)
            return state, [(p, msg) for p in range(ctx.degree)], False
        before = sum(1 for _, payload in inbox if payload[0] < state['pos'])
        state['counts'] = (before, len(inbox) - before)
        return state, [], True

    def report(self, ctx, state):
        return state['counts']


def sweep_distributed(g, order, sim=None):
    '''Prefix conductances computed in the network.

    Nodes learn their before/after counts from their neighbors, build a
    BFS tree from ``pi[0]`` and upcast ``(id, L, R)`` items to it. The
    root rebuilds the recurrences.

    Returns
    -------
    tuple
        ``(SweepResult, RoundMetrics)``
    '''
    sim = eng.SimConfig.default() if sim is None else sim
    _check_order(g, order)
    metrics = eng.RoundMetrics()
    counts, m = eng.run(g, _PositionExchange(order.position()), sim)
    metrics.merge(m, 'positions')
    tree, m = trp.build_tree(g, sim, root=order.pi[0])
    metrics.merge(m, 'bfs')
    items = [[(i, left, right)] for i, (left, right) in enumerate(counts)]
    collected, m = trp.upcast(g, tree, items, sim)
    metrics.merge(m, 'upcast')

    by_node = {i: (left, right) for i, left, right in collected}
    left = [by_node[i][0] for i in order.pi]
    right = [by_node[i][1] for i in order.pi]
    result = _sweep_from_counts(order, left, right)
    _logger.debug(
        'sweep from root %d: best j=%d at %s in %d rounds',
        order.pi[0], result.best_j, result.best_conductance, metrics.rounds)
    return result, metrics


def format_sweep(result, labels=None):
    '''Table lines ``j node L R crossing volume conductance``.'''
    lines = []
    for j in range(1, len(result.order.pi)):
        node = result.order.pi[j - 1]
        if labels is not None:
            node = labels[node]
        lines.append(
            f'{j} {node} {result.left[j - 1]} {result.right[j - 1]} '
            f'{result.crossings[j - 1]} {result.volumes[j - 1]} '
            f'{float(result.conductances[j - 1]):.12g}')
    return '\n'.join(lines) + '\n'
