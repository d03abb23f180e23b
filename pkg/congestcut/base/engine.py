"""Synchronous CONGEST round engine."""

from abc import ABC, abstractmethod
import logging
import operator
from typing import NamedTuple

import numpy as np

import congestcut as _libcongestcut


__all__ = [
    'NodeProgram', 'NodeContext', 'Message', 'RoundMetrics', 'SimConfig',
    'run', 'per_node_rng', 'word_bits', 'field_budget', 'count_limit']


_logger = logging.getLogger(__name__)

MAX_PAYLOAD_FIELDS = 8
_MASK64 = (1 << 64) - 1


class ConfigError(ValueError):
    pass


class SimulationError(RuntimeError):
    pass


class ProtocolViolation(SimulationError):
    pass


class MessageBudgetExceeded(SimulationError):
    def __init__(self, node, port, dest, round, bits, budget):
        super().__init__(
            f'node {node} port {port} (to {dest}) in round {round} sent a '
            f'{bits} bit field, budget is {budget} bits')
        self.node = node
        self.port = port
        self.dest = dest
        self.round = round
        self.bits = bits
        self.budget = budget


class RoundLimitExceeded(SimulationError):
    def __init__(self, max_rounds, metrics, outputs):
        super().__init__(f'no global halt after {max_rounds} rounds')
        self.max_rounds = max_rounds
        self.metrics = metrics
        self.outputs = outputs


### Message size ###

def word_bits(n):
    '''Bits of a node id, ``ceil(log2 n)``, floored at ``MIN_WORD_BITS``.'''
    return max((n - 1).bit_length(), _libcongestcut.MIN_WORD_BITS)


def field_budget(n, multiplier):
    return multiplier * word_bits(n)


def count_limit(n, multiplier):
    '''Largest integer a single message field can carry.'''
    return (1 << field_budget(n, multiplier)) - 1


def field_bits(value):
    return max(1, value.bit_length())


class Message(NamedTuple):
    payload: tuple
    bits: int

    @classmethod
    def of(cls, payload):
        '''Validate ``payload`` as a short tuple of nonnegative ints.'''
        try:
            payload = tuple(operator.index(v) for v in payload)
        except TypeError:
            raise ProtocolViolation(
                f'payload fields must be integers: {payload!r}') from None
        if not payload or len(payload) > MAX_PAYLOAD_FIELDS:
            raise ProtocolViolation(
                f'payload must have 1 to {MAX_PAYLOAD_FIELDS} fields, '
                f'got {len(payload)}')
        if any(v < 0 for v in payload):
            raise ProtocolViolation(f'negative payload field: {payload!r}')
        return cls(payload, sum(field_bits(v) for v in payload))

    @property
    def max_field_bits(self):
        return max(field_bits(v) for v in self.payload)


### Randomness ###

def per_node_rng(seed, node, round, channel=0):
    '''Independent reproducible stream for one (node, round, channel).

    Philox4x64-10 keyed by (seed, node) with the round and the channel in
    the upper counter words, the lower word counts draws. The channel
    separates protocol draws (0) from orchestration draws.
    '''
    key = ((node & _MASK64) << 64) | (seed & _MASK64)
    counter = ((channel & _MASK64) << 128) | ((round & _MASK64) << 64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


### Programs ###

class NodeContext(NamedTuple):
    '''What a node knows about itself: its id, the ids of its neighbors
    indexed by port, and the network size.'''

    node: int
    ports: tuple
    n: int
    seed: int

    @property
    def degree(self):
        return len(self.ports)

    def rng(self, round, channel=0):
        return per_node_rng(self.seed, self.node, round, channel)


class NodeProgram(ABC):
    '''Per node behavior run by ``run``.

    Instances may hold read-only inputs indexed by node id, hooks must
    only read the entry of ``ctx.node`` and keep everything else in the
    returned state.
    '''

    name = 'program'

    @abstractmethod
    def init(self, ctx):
        '''Return the initial local state.'''
        pass

    @abstractmethod
    def on_round(self, ctx, state, round, inbox):
        '''Run one round.

        Parameters
        ----------
        ctx: NodeContext
        state: object
            Local state returned by ``init`` or the previous round.
        round: int
            Round number starting at 1.
        inbox: tuple
            ``(port, payload)`` pairs sent in the previous round, ordered
            by port.

        Returns
        -------
        tuple
            ``(state, outbox, halted)`` where outbox is an iterable of
            ``(port, payload)`` with at most one entry per port.
        '''
        pass

    def report(self, ctx, state):
        return state


class SimConfig(NamedTuple):
    seed: int = 0
    bit_budget_multiplier: int = 4
    max_rounds: int = 1_000_000
    strict_bits: bool = False
    trace: bool = False

    @classmethod
    def default(cls, **overrides):
        '''Config with library defaults as set at call time.'''
        params = dict(
            seed=_libcongestcut.DEFAULT_SEED,
            bit_budget_multiplier=_libcongestcut.BIT_BUDGET_MULTIPLIER,
            max_rounds=_libcongestcut.MAX_ROUNDS,
            strict_bits=_libcongestcut.STRICT_BITS)
        params.update(overrides)
        return cls(**params).validate()

    def validate(self):
        if self.max_rounds <= 0:
            raise ConfigError(f'max_rounds must be positive: {self.max_rounds}')
        if self.bit_budget_multiplier <= 0:
            raise ConfigError(
                'bit_budget_multiplier must be positive: '
                f'{self.bit_budget_multiplier}')
        return self


class RoundMetrics():
    '''Round and traffic accounting of one or more simulations.'''

    def __init__(self):
        self.rounds = 0
        self.messages_total = 0
        self.bits_total = 0
        self.max_bits_per_edge_round = 0
        self.max_messages_per_edge_round = 0
        self.budget_violations = 0
        self.trace = []
        self.phases = []

    def merge(self, other, phase=None):
        '''Append ``other`` as if it ran after this one.'''
        offset = self.rounds
        self.rounds += other.rounds
        self.messages_total += other.messages_total
        self.bits_total += other.bits_total
        self.max_bits_per_edge_round = max(
            self.max_bits_per_edge_round, other.max_bits_per_edge_round)
        self.max_messages_per_edge_round = max(
            self.max_messages_per_edge_round,
            other.max_messages_per_edge_round)
        self.budget_violations += other.budget_violations
        self.trace.extend(
            (r + offset, src, dst, bits) for r, src, dst, bits in other.trace)
        if phase is None:
            self.phases.extend(other.phases)
        else:
            self.phases.append((phase, other.rounds))
        return self

    def to_dict(self):
        return {
            'rounds': self.rounds,
            'messages_total': self.messages_total,
            'max_bits_per_edge_round': self.max_bits_per_edge_round,
            'max_messages_per_edge_round': self.max_messages_per_edge_round,
            'budget_violations': self.budget_violations}

    def format_trace(self):
        return ''.join(
            f'{r} {src} {dst} {bits}\n' for r, src, dst, bits in self.trace)

    def __repr__(self):
        return (
            f'{type(self).__name__}(rounds={self.rounds}, '
            f'messages_total={self.messages_total})')


### Engine ###

def _reverse_ports(g):
    # rev[u][p] is the port of u at its p-th neighbor.
    return tuple(
        tuple(g.port(v, u) for v in g.adjacency[u]) for u in range(g.n))


def _check_order(order, n):
    if order is None:
        return range(n)
    order = tuple(order)
    if sorted(order) != list(range(n)):
        raise ConfigError('stepping order must be a permutation of the nodes')
    return order


def run(g, program, cfg=None, order=None):
    '''Run ``program`` on every node of ``g`` until global halt.

    Every node steps once per round. Messages sent in round r are in the
    inbox of round r + 1. The run ends after a round in which every node
    reported halted and nothing was sent.

    Parameters
    ----------
    g: Graph
    program: NodeProgram
    cfg: SimConfig
        Defaults to ``SimConfig.default()``.
    order: sequence, optional
        Intra-round stepping order. Results do not depend on it.

    Returns
    -------
    tuple
        ``(outputs, metrics)`` with one output per node.
    '''
    cfg = SimConfig.default() if cfg is None else cfg.validate()
    n = g.n
    order = _check_order(order, n)
    budget = field_budget(n, cfg.bit_budget_multiplier)
    reverse = _reverse_ports(g)
    contexts = [NodeContext(i, g.adjacency[i], n, cfg.seed) for i in range(n)]
    states = [program.init(ctx) for ctx in contexts]
    inboxes = [() for _ in range(n)]
    metrics = RoundMetrics()
    warned = False

    while True:
        if metrics.rounds >= cfg.max_rounds:
            outputs = [
                program.report(ctx, s) for ctx, s in zip(contexts, states)]
            raise RoundLimitExceeded(cfg.max_rounds, metrics, outputs)
        round = metrics.rounds + 1
        delivered = [[] for _ in range(n)]
        all_halted = True
        in_flight = 0

        for i in order:
            ctx = contexts[i]
            state, outbox, halted = program.on_round(
                ctx, states[i], round, inboxes[i])
            states[i] = state
            all_halted = all_halted and bool(halted)
            used = set()
            for port, payload in outbox:
                if not isinstance(port, int) or not 0 <= port < ctx.degree:
                    raise ProtocolViolation(
                        f'node {i} round {round}: invalid port {port!r}')
                if port in used:
                    raise ProtocolViolation(
                        f'node {i} round {round}: two messages on port {port}')
                used.add(port)
                msg = Message.of(payload)
                dest = ctx.ports[port]
                widest = msg.max_field_bits
                if widest > budget:
                    if cfg.strict_bits:
                        raise MessageBudgetExceeded(
                            i, port, dest, round, widest, budget)
                    metrics.budget_violations += 1
                    if not warned:
                        _logger.warning(
                            '%s: node %d round %d sent a %d bit field '
                            '(budget %d)', program.name, i, round, widest,
                            budget)
                        warned = True
                metrics.messages_total += 1
                metrics.bits_total += msg.bits
                metrics.max_bits_per_edge_round = max(
                    metrics.max_bits_per_edge_round, msg.bits)
                metrics.max_messages_per_edge_round = max(
                    metrics.max_messages_per_edge_round, 1)
                if cfg.trace:
                    metrics.trace.append((round, i, dest, msg.bits))
                delivered[dest].append((reverse[i][port], msg.payload))
                in_flight += 1

        # Arrival order is fixed by port, not by stepping order.
        inboxes = [tuple(sorted(box)) for box in delivered]
        metrics.rounds = round
        if all_halted and in_flight == 0:
            break

    if metrics.budget_violations:
        _logger.warning(
            '%s: %d message(s) over the %d bit field budget',
            program.name, metrics.budget_violations, budget)
    _logger.debug(
        '%s: %d rounds, %d messages', program.name, metrics.rounds,
        metrics.messages_total)
    outputs = [program.report(ctx, s) for ctx, s in zip(contexts, states)]
    return outputs, metrics
