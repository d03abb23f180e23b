"""Monte Carlo personalized PageRank by terminating walks."""

from fractions import Fraction
import logging
import math
from typing import NamedTuple

from ..base import engine as eng


__all__ = [
    'PageRankConfig', 'PageRankEstimate', 'SanityReport',
    'estimate_pagerank', 'exactness_sanity', 'termination_bound',
    'pagerank_accuracy_walks', 'format_pagerank']


_logger = logging.getLogger(__name__)


class PageRankConfig(NamedTuple):
    source: int
    alpha: float
    walks: int

    def validate(self, n, sim):
        if not 0 <= self.source < n:
            raise eng.ConfigError(f'source {self.source} not in 0..{n - 1}')
        if not 0 < self.alpha <= 1:
            raise eng.ConfigError(
                f'reset probability must be in (0, 1], got {self.alpha}')
        limit = eng.count_limit(n, sim.bit_budget_multiplier)
        if not 1 <= self.walks <= limit:
            raise eng.ConfigError(f'walk count {self.walks} not in 1..{limit}')
        return self


class PageRankEstimate(NamedTuple):
    '''Visit counts and the estimate ``visits * alpha / walks``.

    ``moves`` counts the tokens each node passed on, every visit is either
    an initial placement or a received move.
    '''

    values: tuple
    visits: tuple
    moves: tuple
    walks: int
    alpha: float
    rounds_used: int

    @property
    def masses(self):
        # Common scale for rank comparisons.
        return self.visits

    def as_distribution(self):
        return tuple(float(v) for v in self.values)

    def total(self):
        return sum(self.values)


class SanityReport(NamedTuple):
    max_deviation: float
    node: int
    tol: float
    passed: bool


class _PageRankWalk(eng.NodeProgram):
    '''Each live token ends with probability alpha and otherwise moves to
    a uniform neighbor. Terminations are one binomial draw per round and
    the survivors are split by one multinomial draw.'''

    name = 'pagerank-walk'

    def __init__(self, source, alpha, walks):
        self._source = source
        self._alpha = alpha
        self._walks = walks

    def init(self, ctx):
        start = self._walks if ctx.node == self._source else 0
        # The initial placement counts as a visit.
        return {'live': start, 'visits': start, 'moves': 0}

    def on_round(self, ctx, state, round, inbox):
        arrived = sum(payload[0] for _, payload in inbox)
        state['visits'] += arrived
        live = state['live'] + arrived
        outbox = []
        if live:
            rng = ctx.rng(round)
            movers = live - int(rng.binomial(live, self._alpha))
            if movers:
                d = ctx.degree
                counts = rng.multinomial(movers, [1 / d] * d)
                outbox = [(p, (int(c),)) for p, c in enumerate(counts) if c]
                state['moves'] += movers
        state['live'] = 0
        return state, outbox, True

    def report(self, ctx, state):
        return (state['visits'], state['moves'])


def termination_bound(n, walks, alpha):
    '''Rounds within which all walks end with high probability.'''
    return math.ceil(8 * math.log(n * walks) / alpha)


def estimate_pagerank(g, cfg, sim=None):
    '''Personalized PageRank from ``cfg.source``.

    Raises ``RoundLimitExceeded`` with the partial ``(visits, moves)``
    outputs when walks are still alive after ``termination_bound``
    rounds.

    Returns
    -------
    tuple
        ``(PageRankEstimate, RoundMetrics)``
    '''
    sim = eng.SimConfig.default() if sim is None else sim
    cfg.validate(g.n, sim)
    bound = termination_bound(g.n, cfg.walks, cfg.alpha) + 1
    capped = sim._replace(max_rounds=min(sim.max_rounds, bound))
    outputs, metrics = eng.run(
        g, _PageRankWalk(cfg.source, cfg.alpha, cfg.walks), capped)
    visits = tuple(v for v, _ in outputs)
    moves = tuple(mv for _, mv in outputs)
    alpha = Fraction(cfg.alpha)
    values = tuple(Fraction(v) * alpha / cfg.walks for v in visits)
    estimate = PageRankEstimate(
        values, visits, moves, cfg.walks, cfg.alpha, metrics.rounds)
    _logger.debug(
        'pagerank from %d, alpha %g: %d rounds', cfg.source, cfg.alpha,
        metrics.rounds)
    return estimate, metrics


def exactness_sanity(estimate, oracle, tol):
    '''Largest absolute deviation of ``estimate`` from ``oracle``.'''
    values = getattr(estimate, 'values', estimate)
    if len(values) != len(oracle):
        raise eng.ConfigError(
            f'{len(values)} estimates for {len(oracle)} oracle values')
    worst, node = 0.0, 0
    for i, (v, p) in enumerate(zip(values, oracle)):
        dev = abs(float(v) - float(p))
        if dev > worst:
            worst, node = dev, i
    return SanityReport(worst, node, tol, worst <= tol)


def pagerank_accuracy_walks(n):
    '''Walk count ``ceil(n^4 ln n)`` of the accuracy preset.'''
    return math.ceil(n ** 4 * math.log(n))


def format_pagerank(estimate, labels=None):
    lines = []
    for i, (value, visits) in enumerate(zip(estimate.values, estimate.visits)):
        node = i if labels is None else labels[i]
        lines.append(f'{node} {float(value):.12g} {visits}')
    return '\n'.join(lines) + '\n'
