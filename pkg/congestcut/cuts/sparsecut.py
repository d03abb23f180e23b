"""Sparse cut and local cluster search.

For each sampled source a distribution is estimated in the network, the
rho values are gathered at the node of largest rho and sent back down
the same tree so every node knows the order, and the prefix cuts are
swept. The best prefix over all candidates wins and its coordinates are
flooded from the winning sweep root.
"""

from fractions import Fraction
import logging
import math
from typing import NamedTuple, Callable

from ..base import _fixedpoint as fxp
from ..base import engine as eng
from ..base import tree as trp
from ..base.graph import Cut, conductance, balance
from ..walks import pagerank as prk
from ..walks import randomwalk as rwk
from . import sweep as swp


__all__ = [
    'SparseCutConfig', 'CutReport', 'Candidate', 'sparse_cut_randomwalk',
    'sparse_cut_pagerank', 'sparse_cut', 'guess_phi', 'local_cluster',
    'broadcast_rho', 'ENGINES', 'PRESETS']


_logger = logging.getLogger(__name__)

ENGINES = ('randomwalk', 'pagerank')
PRESETS = ('desk', 'paper-accuracy')
DESK_EPSILON = 0.5
PAGERANK_ALPHA_FACTOR = 10
# Largest power of 1/2 with alpha = 10 * phi <= 1, larger PageRank
# guesses are checked against the run at this phi.
PAGERANK_MAX_PHI = Fraction(1, 16)
FIRST_GUESS = Fraction(1, 2)
_ORCHESTRATION_CHANNEL = 1


class SparseCutConfig(NamedTuple):
    '''Sparse cut parameters.

    Parameters
    ----------
    phi: float
        Target conductance, sets the walk length range ``1..ceil(c/phi)``
        and the PageRank reset probability ``10 * phi``.
    balance: float
        Assumed balance b of the cut, ``ceil(ln n / b)`` sources.
    epsilon: float, optional
        Accuracy that sets the token count, see ``walk_count``.
    length_cap: float
        The constant c of the length range.
    sources, lengths_per_source: int, optional
        Override ``ceil(ln n / b)`` and ``ceil(ln n)``.
    mode: str
        'diffusion' or 'tokens'.
    engine: str
        'randomwalk' or 'pagerank'.
    walks: int, optional
        Token count, overrides ``epsilon`` and ``preset``.
    preset: str
        'desk' or 'paper-accuracy'.
    source_nodes, fixed_lengths: tuple, optional
        Use these sources (and lengths) instead of sampling them.
    distribution_hook: callable, optional
        ``hook(g, source, param)`` returning the distribution to sweep in
        place of the estimator, no rounds are charged for it.
    '''

    phi: float
    balance: float = 0.5
    epsilon: float = None
    length_cap: float = 4
    sources: int = None
    lengths_per_source: int = None
    mode: str = 'diffusion'
    engine: str = 'randomwalk'
    walks: int = None
    preset: str = 'desk'
    source_nodes: tuple = None
    fixed_lengths: tuple = None
    distribution_hook: Callable = None

    def validate(self, g):
        if not 0 < self.phi < 1:
            raise eng.ConfigError(f'phi must be in (0, 1), got {self.phi}')
        if self.engine not in ENGINES:
            raise eng.ConfigError(f"invalid engine '{self.engine}'")
        if self.engine == 'pagerank' and self.alpha() > 1:
            raise eng.ConfigError(
                f'phi={self.phi} gives reset probability {self.alpha()} > 1')
        if not 0 < self.balance <= 0.5:
            raise eng.ConfigError(
                f'balance must be in (0, 1/2], got {self.balance}')
        if self.epsilon is not None and not 0 < self.epsilon <= 1:
            raise eng.ConfigError(
                f'epsilon must be in (0, 1], got {self.epsilon}')
        if self.length_cap <= 0:
            raise eng.ConfigError(
                f'length_cap must be positive, got {self.length_cap}')
        for name in ('sources', 'lengths_per_source', 'walks'):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise eng.ConfigError(f'{name} must be positive, got {value}')
        if self.mode not in rwk.WALK_MODES:
            raise eng.ConfigError(f"invalid walk mode '{self.mode}'")
        if self.preset not in PRESETS:
            raise eng.ConfigError(f"invalid preset '{self.preset}'")
        if self.source_nodes is not None:
            if not self.source_nodes:
                raise eng.ConfigError('source_nodes is empty')
            for s in self.source_nodes:
                if not 0 <= s < g.n:
                    raise eng.ConfigError(f'source {s} not in 0..{g.n - 1}')
        if self.fixed_lengths is not None:
            if not self.fixed_lengths or min(self.fixed_lengths) < 0:
                raise eng.ConfigError(
                    f'invalid fixed lengths {self.fixed_lengths}')
        return self

    def alpha(self):
        return PAGERANK_ALPHA_FACTOR * self.phi

    def num_sources(self, n):
        if self.sources is not None:
            return self.sources
        return max(1, math.ceil(math.log(n) / self.balance))

    def num_lengths(self, n):
        if self.lengths_per_source is not None:
            return self.lengths_per_source
        return max(1, math.ceil(math.log(n)))

    def max_length(self):
        return math.ceil(self.length_cap / self.phi)

    def effective_epsilon(self):
        if self.epsilon is not None:
            return self.epsilon
        if self.preset == 'paper-accuracy':
            return self.phi * self.phi / 4
        return DESK_EPSILON

    def walk_count(self, n):
        '''Tokens per estimate: ``walks`` when given, else derived from
        ``epsilon``, else from the preset.'''
        if self.walks is not None:
            return self.walks
        if self.epsilon is None and self.preset == 'paper-accuracy':
            if self.engine == 'pagerank':
                return prk.pagerank_accuracy_walks(n)
            return rwk.sweep_accuracy_walks(n, self.phi)
        return rwk.walks_for_accuracy(n, self.effective_epsilon())

    def walk_config(self, g, source, length):
        '''Random walk estimate parameters, ``epsilon`` is recorded when
        the token count is derived from it.'''
        if self.mode != 'tokens':
            return rwk.WalkConfig(source, length, mode=self.mode)
        epsilon = None if self.walks is not None else self.effective_epsilon()
        return rwk.WalkConfig(
            source, length, self.walk_count(g.n), self.mode, epsilon)


class Candidate(NamedTuple):
    '''Best prefix of one (source, length or alpha) sweep.'''

    source_index: int
    source: int
    param_index: int
    param: object
    best_j: int
    best_conductance: Fraction
    rounds: int

    def to_dict(self):
        return {
            'source_index': self.source_index, 'source': self.source,
            'param_index': self.param_index, 'param': float(self.param),
            'best_j': self.best_j,
            'best_conductance': float(self.best_conductance),
            'rounds': self.rounds}


class CutReport(NamedTuple):
    algorithm: str
    cut: Cut
    conductance: Fraction
    balance: Fraction
    source_used: int
    length_used: int
    alpha_used: float
    phi_guess: float
    accepted: bool
    target_balance: float
    metrics: eng.RoundMetrics
    trace: tuple
    labels: tuple = None

    @property
    def phases(self):
        return self.metrics.phases

    def members(self):
        ids = self.cut.sorted()
        if self.labels is None:
            return list(ids)
        return [self.labels[i] for i in ids]

    def to_dict(self):
        doc = {
            'algorithm': self.algorithm,
            'phi_guess': float(self.phi_guess),
            'accepted': self.accepted,
            'balance': float(self.target_balance),
            'cut_members': self.members(),
            'conductance': float(self.conductance),
            'conductance_exact': str(self.conductance),
            'balance_measured': float(self.balance),
            'source_used': self.source_used,
            'length_used': self.length_used,
            'alpha_used': self.alpha_used,
            'trace': [c.to_dict() for c in self.trace],
            'phases': [[name, rounds] for name, rounds in self.phases]}
        doc.update(self.metrics.to_dict())
        return doc


### Rho broadcast ###

def _masses(p):
    '''Integer masses and their common scale for any distribution.'''
    if isinstance(p, rwk.ProbEstimate):
        return p.masses, Fraction(p.scale)
    if isinstance(p, prk.PageRankEstimate):
        return p.visits, Fraction(p.walks) / Fraction(p.alpha)
    return fxp.quantize(getattr(p, 'values', p)), Fraction(fxp.FIXED_SCALE)


def broadcast_rho(g, p, sim):
    '''Give every node the (id, mass, degree) of all nodes.

    The node of largest rho roots a BFS tree, everything is upcast to it
    and downcast back. Returns the order the nodes derive, its root and
    the metrics.
    '''
    masses, scale = _masses(p)
    metrics = eng.RoundMetrics()
    tree, m = trp.build_tree(g, sim, masses=masses)
    metrics.merge(m, 'rho-tree')
    items = [
        [(i,) + fxp.split(mass) + (g.degree(i),)]
        for i, mass in enumerate(masses)]
    collected, m = trp.upcast(g, tree, items, sim)
    metrics.merge(m, 'rho-upcast')
    views, m = trp.downcast(g, tree, collected, sim)
    metrics.merge(m, 'rho-downcast')

    root = tree[0].root
    rho = [None] * g.n
    for i, hi, lo, degree in views[root]:
        rho[i] = Fraction(fxp.join(hi, lo)) / scale / degree
    pi = tuple(sorted(range(g.n), key=lambda i: (-rho[i], i)))
    return swp.SweepOrder(pi, tuple(rho)), metrics


### Orchestration ###

def _estimate(g, cfg, sim, source, param):
    if cfg.distribution_hook is not None:
        return cfg.distribution_hook(g, source, param), eng.RoundMetrics()
    if cfg.engine == 'pagerank':
        return prk.estimate_pagerank(
            g, prk.PageRankConfig(source, param, cfg.walk_count(g.n)), sim)
    return rwk.estimate_probability(
        g, cfg.walk_config(g, source, param), sim)


def _sample(g, cfg, sim, attempt):
    rng = eng.per_node_rng(sim.seed, 0, attempt, _ORCHESTRATION_CHANNEL)
    if cfg.source_nodes is not None:
        sources = tuple(cfg.source_nodes)
    else:
        count = cfg.num_sources(g.n)
        sources = tuple(int(s) for s in rng.integers(0, g.n, size=count))
    params = []
    for _ in sources:
        if cfg.engine == 'pagerank':
            params.append((cfg.alpha(),))
        elif cfg.fixed_lengths is not None:
            params.append(tuple(cfg.fixed_lengths))
        else:
            draws = rng.integers(
                1, cfg.max_length() + 1, size=cfg.num_lengths(g.n))
            params.append(tuple(int(v) for v in draws))
    return sources, params


def _run_candidates(g, cfg, sim, algorithm, attempt=0):
    cfg.validate(g)
    sources, params = _sample(g, cfg, sim, attempt)
    metrics = eng.RoundMetrics()
    trace = []
    best = None
    for a, source in enumerate(sources):
        for h, param in enumerate(params[a]):
            before = metrics.rounds
            estimate, m = _estimate(g, cfg, sim, source, param)
            metrics.merge(m, 'estimate')
            order, m = broadcast_rho(g, estimate, sim)
            metrics.merge(m)
            result, m = swp.sweep_distributed(g, order, sim)
            metrics.merge(m)
            candidate = Candidate(
                a, source, h, param, result.best_j, result.best_conductance,
                metrics.rounds - before)
            trace.append(candidate)
            _logger.debug(
                'candidate source %d param %s: %s at j=%d', source, param,
                result.best_conductance, result.best_j)
            # Strict, the first candidate wins ties.
            if best is None or \
                    result.best_conductance < best[1].best_conductance:
                best = (candidate, result)

    candidate, result = best
    winner = (candidate.source_index, candidate.param_index, result.best_j)
    _, m = trp.flood(g, result.order.pi[0], winner, sim)
    metrics.merge(m, 'final-broadcast')

    cut = result.cut(g)
    phi = conductance(g, cut)
    is_pagerank = cfg.engine == 'pagerank'
    report = CutReport(
        algorithm=algorithm, cut=cut, conductance=phi,
        balance=balance(g, cut), source_used=candidate.source,
        length_used=None if is_pagerank else candidate.param,
        alpha_used=candidate.param if is_pagerank else None,
        phi_guess=cfg.phi, accepted=True, target_balance=cfg.balance,
        metrics=metrics, trace=tuple(trace), labels=g.labels)
    _logger.info(
        '%s phi=%g: conductance %s from source %d in %d rounds',
        algorithm, cfg.phi, phi, candidate.source, metrics.rounds)
    return report


def sparse_cut_randomwalk(g, cfg, sim=None):
    '''Best sweep cut over random walk distributions from
    ``ceil(ln n / b)`` sources and ``ceil(ln n)`` lengths each.'''
    sim = eng.SimConfig.default() if sim is None else sim
    return _run_candidates(
        g, cfg._replace(engine='randomwalk'), sim, 'randomwalk')


def sparse_cut_pagerank(g, cfg, sim=None):
    '''Best sweep cut over personalized PageRank vectors with reset
    probability ``10 * phi``, one per sampled source.'''
    sim = eng.SimConfig.default() if sim is None else sim
    return _run_candidates(
        g, cfg._replace(engine='pagerank'), sim, 'pagerank')


def sparse_cut(g, cfg, sim=None):
    if cfg.engine == 'pagerank':
        return sparse_cut_pagerank(g, cfg, sim)
    return sparse_cut_randomwalk(g, cfg, sim)


def _guesses(g):
    guess = FIRST_GUESS
    floor = Fraction(1, 2 * g.m)
    yield guess
    guess /= 2
    while guess >= floor:
        yield guess
        guess /= 2


def _guess_loop(g, cfg, sim, algorithm):
    metrics = eng.RoundMetrics()
    best = None
    report = None
    attempt = 0
    for guess in _guesses(g):
        run_phi = guess
        if cfg.engine == 'pagerank':
            run_phi = min(guess, PAGERANK_MAX_PHI)
        # Guesses sharing a capped phi reuse the last run.
        if report is None or report.phi_guess != float(run_phi):
            report = _run_candidates(
                g, cfg._replace(phi=float(run_phi)), sim, algorithm, attempt)
            attempt += 1
            metrics.merge(report.metrics)
            if best is None or report.conductance < best.conductance:
                best = report
        if report.conductance <= guess:
            _logger.info(
                '%s: accepted guess %s with conductance %s', algorithm,
                guess, report.conductance)
            return report._replace(metrics=metrics, phi_guess=float(guess))
    _logger.info(
        '%s: no guess accepted, best conductance %s', algorithm,
        best.conductance)
    return best._replace(metrics=metrics, accepted=False)


def guess_phi(g, balance, engine='randomwalk', sim=None, cfg=None):
    '''Sparse cut for unknown phi.

    Tries phi = 1/2, 1/4, ... down to 1/(2m) and accepts the first cut
    whose conductance is at most the guess. Otherwise the best cut seen
    is returned with ``accepted`` false. Metrics cover all runs.

    PageRank needs ``10 * phi <= 1``, so guesses above 1/16 are checked
    against a single run at phi = 1/16 and ``phi_guess`` of an accepted
    report is the guess, not the phi the vectors were computed with.

    Parameters
    ----------
    cfg: SparseCutConfig, optional
        Template for the remaining parameters, ``phi`` is replaced.
    '''
    sim = eng.SimConfig.default() if sim is None else sim
    if cfg is None:
        cfg = SparseCutConfig(phi=0.5)
    cfg = cfg._replace(balance=balance, engine=engine)
    return _guess_loop(g, cfg, sim, 'guess')


def local_cluster(g, source, engine='randomwalk', sim=None, cfg=None):
    '''Guessing loop with every distribution started at ``source``. The
    reported cut is the side containing ``source``.'''
    sim = eng.SimConfig.default() if sim is None else sim
    if not 0 <= source < g.n:
        raise eng.ConfigError(f'source {source} not in 0..{g.n - 1}')
    if cfg is None:
        cfg = SparseCutConfig(phi=0.5)
    cfg = cfg._replace(engine=engine, source_nodes=(source,))
    report = _guess_loop(g, cfg, sim, 'local')
    if source not in report.cut:
        cut = report.cut.complement(g)
        report = report._replace(cut=cut, balance=balance(g, cut))
    return report
