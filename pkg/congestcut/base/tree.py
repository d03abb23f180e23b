"""BFS trees and pipelined tree casts.

Node programs for ``engine.run``. Payloads start with a tag field so a
program can tell its message kinds apart.
"""

import collections
import logging
from typing import NamedTuple

from . import engine as eng


__all__ = [
    'TreeNode', 'ElectedBfsTree', 'RootedBfsTree', 'Upcast', 'Downcast',
    'Flood', 'rank_greater', 'build_tree', 'upcast', 'downcast', 'flood']


_logger = logging.getLogger(__name__)

_ITEM = 0
_DONE = 1
_EXPLORE = 0
_JOIN = 1


class TreeNode(NamedTuple):
    '''Local view of a spanning tree, ``parent`` and ``children`` are
    ports, ``parent`` is None at the root.'''

    root: int
    parent: int
    children: tuple
    depth: int

    @property
    def is_root(self):
        return self.parent is None


def rank_greater(a, b):
    '''Compare ``(mass, degree, id)`` ranks by mass per degree, the
    smaller id wins ties.'''
    lhs = a[0] * b[1]
    rhs = b[0] * a[1]
    if lhs != rhs:
        return lhs > rhs
    return a[2] < b[2]


class ElectedBfsTree(eng.NodeProgram):
    '''BFS tree rooted at the node of greatest rank.

    Every node floods the best rank it has seen for n rounds together with
    its hop count, a node's parent is the port the winning rank first came
    from. Children are learned in two more rounds.

    Parameters
    ----------
    masses: sequence of int
        Rank mass of each node, compared per unit of degree.
    '''

    name = 'elected-bfs'

    def __init__(self, masses):
        self._masses = masses

    def init(self, ctx):
        return {
            'best': (self._masses[ctx.node], ctx.degree, ctx.node),
            'parent': None, 'depth': 0, 'changed': True, 'children': []}

    def on_round(self, ctx, state, round, inbox):
        flood_rounds = ctx.n
        outbox = []
        for port, payload in inbox:
            if payload[0] == _JOIN:
                state['children'].append(port)
                continue
            _, root, hi, lo, degree, depth = payload
            rank = (hi << 32 | lo, degree, root)
            if rank_greater(rank, state['best']):
                state.update(
                    best=rank, parent=port, depth=depth + 1, changed=True)
        if round <= flood_rounds and state['changed']:
            mass, degree, root = state['best']
            msg = (_EXPLORE, root, mass >> 32, mass & 0xFFFFFFFF, degree,
                   state['depth'])
            outbox = [
                (p, msg) for p in range(ctx.degree) if p != state['parent']]
            state['changed'] = False
        elif round == flood_rounds + 1 and state['parent'] is not None:
            outbox = [(state['parent'], (_JOIN,))]
        return state, outbox, round >= flood_rounds + 2

    def report(self, ctx, state):
        return TreeNode(
            state['best'][2], state['parent'],
            tuple(sorted(state['children'])), state['depth'])


class RootedBfsTree(eng.NodeProgram):
    '''BFS tree from a known root. A node adopts the smallest port it
    was first explored from and tells that parent to count it as a child.'''

    name = 'rooted-bfs'

    def __init__(self, root):
        self._root = root

    def init(self, ctx):
        is_root = ctx.node == self._root
        return {
            'explored': 0 if is_root else None, 'parent': None,
            'depth': 0, 'children': [], 'root': self._root}

    def on_round(self, ctx, state, round, inbox):
        outbox = []
        explorers = []
        for port, payload in inbox:
            if payload[0] == _JOIN:
                state['children'].append(port)
            elif payload[0] == _EXPLORE:
                explorers.append((port, payload[1]))
        if state['explored'] == 0:
            # Root starts exploring in the first round.
            state['explored'] = round
            outbox = [(p, (_EXPLORE, 0)) for p in range(ctx.degree)]
        elif state['explored'] is None and explorers:
            port, depth = explorers[0]
            state.update(explored=round, parent=port, depth=depth + 1)
            outbox = [(port, (_JOIN,))]
            outbox.extend(
                (p, (_EXPLORE, state['depth'])) for p in range(ctx.degree)
                if p != port)
        halted = (
            state['explored'] is not None and round >= state['explored'] + 2)
        return state, outbox, halted

    def report(self, ctx, state):
        return TreeNode(
            state['root'], state['parent'],
            tuple(sorted(state['children'])), state['depth'])


class Upcast(eng.NodeProgram):
    '''Pipelined convergecast of fixed-width integer items to the root.

    Each node forwards one queued item per round to its parent and a done
    marker once its queue is empty and all its children are done.

    Parameters
    ----------
    tree: sequence of TreeNode
    items: sequence of sequences
        Items contributed by each node, tuples of nonnegative ints.
    '''

    name = 'upcast'

    def __init__(self, tree, items):
        self._tree = tree
        self._items = items

    def init(self, ctx):
        node = self._tree[ctx.node]
        own = [tuple(item) for item in self._items[ctx.node]]
        return {
            'node': node, 'queue': collections.deque(own),
            'pending': set(node.children), 'done': False,
            'collected': list(own) if node.is_root else None}

    def on_round(self, ctx, state, round, inbox):
        node = state['node']
        for port, payload in inbox:
            if payload[0] == _DONE:
                state['pending'].discard(port)
            elif node.is_root:
                state['collected'].append(payload[1:])
            else:
                state['queue'].append(payload[1:])
        if node.is_root:
            return state, [], not state['pending']
        outbox = []
        if state['queue']:
            outbox = [(node.parent, (_ITEM,) + state['queue'].popleft())]
        elif not state['pending'] and not state['done']:
            outbox = [(node.parent, (_DONE,))]
            state['done'] = True
        return state, outbox, state['done']

    def report(self, ctx, state):
        if state['node'].is_root:
            return tuple(state['collected'])
        return None


class Downcast(eng.NodeProgram):
    '''Pipelined broadcast of the root's items down the tree, every node
    reports the full item sequence.'''

    name = 'downcast'

    def __init__(self, tree, items):
        self._tree = tree
        self._items = tuple(tuple(item) for item in items)

    def init(self, ctx):
        node = self._tree[ctx.node]
        own = list(self._items) if node.is_root else []
        return {
            'node': node, 'queue': collections.deque(own),
            'received': list(own), 'upstream_done': node.is_root,
            'done': False}

    def on_round(self, ctx, state, round, inbox):
        node = state['node']
        for port, payload in inbox:
            if payload[0] == _DONE:
                state['upstream_done'] = True
            else:
                state['received'].append(payload[1:])
                state['queue'].append(payload[1:])
        outbox = []
        if state['queue']:
            item = (_ITEM,) + state['queue'].popleft()
            outbox = [(p, item) for p in node.children]
        elif state['upstream_done'] and not state['done']:
            outbox = [(p, (_DONE,)) for p in node.children]
            state['done'] = True
        return state, outbox, state['done']

    def report(self, ctx, state):
        return tuple(state['received'])


class Flood(eng.NodeProgram):
    '''Flood one value from ``root``, each node forwards it once to the
    ports it did not receive it from.'''

    name = 'flood'

    def __init__(self, root, value):
        self._root = root
        self._value = tuple(value)

    def init(self, ctx):
        if ctx.node == self._root:
            return {'value': self._value, 'sent': False}
        return {'value': None, 'sent': False}

    def on_round(self, ctx, state, round, inbox):
        outbox = []
        if state['sent']:
            return state, outbox, True
        if state['value'] is not None:
            outbox = [(p, state['value']) for p in range(ctx.degree)]
            state['sent'] = True
        elif inbox:
            senders = {port for port, _ in inbox}
            state['value'] = inbox[0][1]
            outbox = [
                (p, state['value']) for p in range(ctx.degree)
                if p not in senders]
            state['sent'] = True
        return state, outbox, state['sent']

    def report(self, ctx, state):
        return state['value']


### Runners ###

def build_tree(g, sim, root=None, masses=None):
    '''BFS tree rooted at ``root``, or at the greatest rank node when
    ``masses`` are given instead.'''
    if root is None:
        program = ElectedBfsTree(masses)
    else:
        program = RootedBfsTree(root)
    tree, metrics = eng.run(g, program, sim)
    return tree, metrics


def upcast(g, tree, items, sim):
    '''Collect every node's items at the root, returns the root's list.'''
    outputs, metrics = eng.run(g, Upcast(tree, items), sim)
    root = tree[0].root
    return outputs[root], metrics


def downcast(g, tree, items, sim):
    outputs, metrics = eng.run(g, Downcast(tree, items), sim)
    return outputs, metrics


def flood(g, root, value, sim):
    outputs, metrics = eng.run(g, Flood(root, value), sim)
    return outputs, metrics
