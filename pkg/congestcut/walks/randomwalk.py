"""Landing distribution of fixed length random walks.

Token mode forwards walk counts, a node holding c tokens sends each of
them to a uniform neighbor by one multinomial draw per round. Diffusion
mode sends fixed-point mass shares instead and gives the exact
distribution up to rounding.
"""

from fractions import Fraction
import logging
import math
from typing import NamedTuple

from ..base import _fixedpoint as fxp
from ..base import engine as eng


__all__ = [
    'WalkConfig', 'ProbEstimate', 'estimate_probability',
    'walks_for_accuracy', 'sweep_accuracy_walks', 'format_estimate',
    'WALK_MODES', 'WALK_SETUP_ROUNDS']


_logger = logging.getLogger(__name__)

WALK_MODES = ('tokens', 'diffusion')
# Rounds on top of the l forwarding rounds, the last forwarded counts are
# tallied in one extra round.
WALK_SETUP_ROUNDS = 1


class WalkConfig(NamedTuple):
    source: int
    length: int
    walks: int = 1
    mode: str = 'tokens'
    epsilon: float = None

    def validate(self, n, sim):
        if not 0 <= self.source < n:
            raise eng.ConfigError(f'source {self.source} not in 0..{n - 1}')
        if self.mode not in WALK_MODES:
            raise eng.ConfigError(f"invalid walk mode '{self.mode}'")
        if self.length < 0:
            raise eng.ConfigError(f'negative walk length {self.length}')
        if self.length + WALK_SETUP_ROUNDS > sim.max_rounds:
            raise eng.ConfigError(
                f'walk length {self.length} exceeds max_rounds '
                f'{sim.max_rounds}')
        if self.mode == 'tokens':
            limit = eng.count_limit(n, sim.bit_budget_multiplier)
            if not 1 <= self.walks <= limit:
                raise eng.ConfigError(
                    f'walk count {self.walks} not in 1..{limit}')
        if self.epsilon is not None and not 0 < self.epsilon <= 1:
            raise eng.ConfigError(
                f'epsilon must be in (0, 1], got {self.epsilon}')
        return self


class ProbEstimate(NamedTuple):
    '''Estimated landing probabilities.

    ``masses`` are the integer tallies the nodes hold (token counts or
    fixed-point mass), ``values[i]`` is ``masses[i] / scale``.
    '''

    values: tuple
    masses: tuple
    scale: int
    walks: int
    length: int
    mode: str
    epsilon_target: float = None

    @classmethod
    def from_masses(cls, masses, scale, walks, length, mode, epsilon=None):
        masses = tuple(int(v) for v in masses)
        values = tuple(Fraction(v, scale) for v in masses)
        return cls(values, masses, scale, walks, length, mode, epsilon)

    def as_floats(self):
        return tuple(float(v) for v in self.values)

    def total(self):
        return sum(self.values)


class _TokenWalk(eng.NodeProgram):
    name = 'token-walk'

    def __init__(self, source, length, walks):
        self._source = source
        self._length = length
        self._walks = walks

    def init(self, ctx):
        return self._walks if ctx.node == self._source else 0

    def on_round(self, ctx, tokens, round, inbox):
        tokens += sum(payload[0] for _, payload in inbox)
        outbox = []
        if round <= self._length and tokens:
            d = ctx.degree
            counts = ctx.rng(round).multinomial(tokens, [1 / d] * d)
            outbox = [(p, (int(c),)) for p, c in enumerate(counts) if c]
            tokens = 0
        return tokens, outbox, round > self._length


class _Diffusion(eng.NodeProgram):
    name = 'diffusion'

    def __init__(self, source, length):
        self._source = source
        self._length = length

    def init(self, ctx):
        return fxp.FIXED_SCALE if ctx.node == self._source else 0

    def on_round(self, ctx, mass, round, inbox):
        mass += sum(fxp.join(*payload) for _, payload in inbox)
        outbox = []
        if round <= self._length and mass:
            d = ctx.degree
            each = fxp.share(mass, d)
            shares = [mass - (d - 1) * each] + [each] * (d - 1)
            outbox = [
                (p, fxp.split(v)) for p, v in enumerate(shares) if v]
            mass = 0
        return mass, outbox, round > self._length


def estimate_probability(g, cfg, sim=None):
    '''Landing distribution of ``cfg.length`` step walks from
    ``cfg.source``.

    Uses ``cfg.length + WALK_SETUP_ROUNDS`` rounds. Every node knows the
    walk count from the start signal, so the division by K is local.

    Returns
    -------
    tuple
        ``(ProbEstimate, RoundMetrics)``
    '''
    sim = eng.SimConfig.default() if sim is None else sim
    cfg.validate(g.n, sim)
    if cfg.mode == 'tokens':
        program = _TokenWalk(cfg.source, cfg.length, cfg.walks)
        scale = cfg.walks
    else:
        program = _Diffusion(cfg.source, cfg.length)
        scale = fxp.FIXED_SCALE
    masses, metrics = eng.run(g, program, sim)
    walks = cfg.walks if cfg.mode == 'tokens' else None
    estimate = ProbEstimate.from_masses(
        masses, scale, walks, cfg.length, cfg.mode, cfg.epsilon)
    _logger.debug(
        'walk estimate from %d, length %d (%s): %d rounds',
        cfg.source, cfg.length, cfg.mode, metrics.rounds)
    return estimate, metrics


def walks_for_accuracy(n, epsilon):
    '''Token count ``ceil(4 n^2 ln n / epsilon^2)`` for additive error
    ``epsilon / n`` with high probability.'''
    if not 0 < epsilon <= 1:
        raise eng.ConfigError(f'epsilon must be in (0, 1], got {epsilon}')
    return max(1, math.ceil(4 * n * n * math.log(n) / (epsilon * epsilon)))


def sweep_accuracy_walks(n, phi):
    '''Token count for the accuracy ``phi^2 / 4`` the sweep guarantee
    asks for.'''
    return walks_for_accuracy(n, phi * phi / 4)


def format_estimate(estimate, labels=None):
    lines = []
    for i, value in enumerate(estimate.values):
        node = i if labels is None else labels[i]
        lines.append(f'{node} {float(value):.12g}')
    return '\n'.join(lines) + '\n'
