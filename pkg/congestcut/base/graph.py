"""Graphs, cuts and exact cut quantities."""

from fractions import Fraction
import bisect
import logging
from typing import NamedTuple

import networkx as nx


__all__ = [
    'Graph', 'Cut', 'GraphFamilySpec', 'GRAPH_FAMILIES',
    'load_edge_list', 'read_edge_list', 'generate',
    'conductance', 'balance', 'diameter']


_logger = logging.getLogger(__name__)


class GraphError(ValueError):
    pass


class EdgeListParseError(GraphError):
    def __init__(self, lineno, line, reason):
        super().__init__(f'line {lineno}: {reason}: {line!r}')
        self.lineno = lineno
        self.line = line


class DisconnectedGraphError(GraphError):
    pass


class InvalidCutError(GraphError):
    pass


class Graph():
    '''Immutable undirected simple graph on nodes ``0..n-1``.

    Neighbor lists are kept sorted, the position of a neighbor in that
    list is the port a node uses to address it.

    Parameters
    ----------
    adjacency: sequence of iterables
        Neighbors of each node. Lists are deduplicated and sorted.
    labels: sequence, optional
        External ids reported for each internal id.
    duplicates: int
        Number of repeated edges dropped while loading, kept for
        reporting only.
    '''

    __slots__ = ('_adjacency', '_degrees', '_m', '_labels', '_duplicates')

    def __init__(self, adjacency, labels=None, duplicates=0):
        adjacency = tuple(tuple(sorted(set(nbrs))) for nbrs in adjacency)
        n = len(adjacency)
        if n < 2:
            raise GraphError(f'graph needs at least two nodes, got {n}')
        for i, nbrs in enumerate(adjacency):
            for j in nbrs:
                if not 0 <= j < n:
                    raise GraphError(f'node {i} has out of range neighbor {j}')
                if j == i:
                    raise GraphError(f'self-loop at node {i}')
        arcs = {(i, j) for i, nbrs in enumerate(adjacency) for j in nbrs}
        for i, j in arcs:
            if (j, i) not in arcs:
                raise GraphError(f'edge {i}-{j} is not symmetric')
        self._adjacency = adjacency
        self._degrees = tuple(len(nbrs) for nbrs in adjacency)
        self._m = sum(self._degrees) // 2
        if labels is None:
            labels = tuple(range(n))
        elif len(labels) != n:
            raise GraphError(f'{len(labels)} labels for {n} nodes')
        self._labels = tuple(labels)
        self._duplicates = duplicates
        if not nx.is_connected(self.to_networkx()):
            raise DisconnectedGraphError(
                f'graph with {n} nodes and {self._m} edges is not connected')

    @classmethod
    def from_edges(cls, n, edges, labels=None, duplicates=0):
        adjacency = [[] for _ in range(n)]
        for u, v in edges:
            adjacency[u].append(v)
            adjacency[v].append(u)
        return cls(adjacency, labels, duplicates)

    @classmethod
    def from_networkx(cls, nxg):
        '''Build from a networkx graph, nodes are numbered in iteration
        order and their original names kept as labels.'''
        nodes = list(nxg)
        index = {node: i for i, node in enumerate(nodes)}
        adjacency = [[index[v] for v in nxg.adj[u] if v != u] for u in nodes]
        return cls(adjacency, nodes)

    def to_networkx(self):
        nxg = nx.Graph()
        nxg.add_nodes_from(range(self.n))
        nxg.add_edges_from(self.edges())
        return nxg

    @property
    def n(self):
        return len(self._adjacency)

    @property
    def m(self):
        return self._m

    @property
    def adjacency(self):
        return self._adjacency

    @property
    def degrees(self):
        return self._degrees

    @property
    def labels(self):
        return self._labels

    @property
    def duplicates(self):
        '''Count of repeated edges dropped on load.'''
        return self._duplicates

    def degree(self, i):
        return self._degrees[i]

    def neighbors(self, i):
        return self._adjacency[i]

    def port(self, i, j):
        '''Port of neighbor ``j`` in the list of node ``i``.'''
        nbrs = self._adjacency[i]
        k = bisect.bisect_left(nbrs, j)
        if k == len(nbrs) or nbrs[k] != j:
            raise GraphError(f'{j} is not a neighbor of {i}')
        return k

    def external_id(self, i):
        return self._labels[i]

    def edges(self):
        for i, nbrs in enumerate(self._adjacency):
            for j in nbrs:
                if i < j:
                    yield (i, j)

    def volume(self, nodes):
        return sum(self._degrees[i] for i in nodes)

    def to_edge_list(self, external=True):
        lines = []
        for i, j in self.edges():
            if external:
                i, j = self._labels[i], self._labels[j]
            lines.append(f'{i} {j}')
        return '\n'.join(lines) + '\n'

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if type(self) is not type(other):
            return NotImplemented
        return self._adjacency == other._adjacency

    def __hash__(self):
        return hash(self._adjacency)

    def __repr__(self):
        return f'{type(self).__name__}(n={self.n}, m={self.m})'


class Cut():
    '''Proper nonempty node subset with its crossing edge count and volume
    cached. Build instances with ``Cut.from_members``.'''

    __slots__ = ('_members', '_crossing', '_volume')

    def __init__(self, members, crossing, volume):
        self._members = frozenset(members)
        self._crossing = crossing
        self._volume = volume

    @classmethod
    def from_members(cls, g, members):
        members = frozenset(members)
        for i in members:
            if not isinstance(i, int) or not 0 <= i < g.n:
                raise InvalidCutError(f'invalid node {i!r} for n={g.n}')
        if not 0 < len(members) < g.n:
            raise InvalidCutError(
                f'cut must be a proper nonempty subset, got {len(members)} '
                f'of {g.n} nodes')
        crossing = 0
        for i in members:
            for j in g.adjacency[i]:
                if j not in members:
                    crossing += 1
        return cls(members, crossing, g.volume(members))

    @property
    def members(self):
        return self._members

    @property
    def crossing(self):
        return self._crossing

    @property
    def volume(self):
        return self._volume

    def complement(self, g):
        rest = frozenset(range(g.n)) - self._members
        return type(self)(rest, self._crossing, 2 * g.m - self._volume)

    def verify(self, g):
        '''Recompute crossing and volume by scanning every edge.'''
        crossing = sum(
            1 for i, j in g.edges()
            if (i in self._members) != (j in self._members))
        if crossing != self._crossing:
            raise InvalidCutError(
                f'cached crossing {self._crossing} != recomputed {crossing}')
        volume = g.volume(self._members)
        if volume != self._volume:
            raise InvalidCutError(
                f'cached volume {self._volume} != recomputed {volume}')
        return True

    def sorted(self):
        return tuple(sorted(self._members))

    def __len__(self):
        return len(self._members)

    def __contains__(self, i):
        return i in self._members

    def __iter__(self):
        return iter(self.sorted())

    def __eq__(self, other):
        if isinstance(other, Cut):
            return self._members == other._members
        return NotImplemented

    def __hash__(self):
        return hash(self._members)

    def __repr__(self):
        return f'{type(self).__name__}({list(self.sorted())})'


def _as_cut(g, c):
    if isinstance(c, Cut):
        return c
    return Cut.from_members(g, c)


def conductance(g, c, exact=True):
    '''Crossing edges over the smaller side volume.

    Parameters
    ----------
    g: Graph
    c: Cut or iterable of node ids
    exact: bool
        Return a ``Fraction`` when true, a float otherwise.
    '''
    c = _as_cut(g, c)
    den = min(c.volume, 2 * g.m - c.volume)
    if den <= 0:
        raise InvalidCutError(f'zero volume side for {c!r}')
    if exact:
        return Fraction(c.crossing, den)
    return c.crossing / den


def balance(g, c, exact=True):
    '''Smaller side size over n.'''
    c = _as_cut(g, c)
    size = min(len(c), g.n - len(c))
    if exact:
        return Fraction(size, g.n)
    return size / g.n


def diameter(g):
    return nx.diameter(g.to_networkx())


### Edge lists ###

def load_edge_list(text):
    '''Parse an edge-list document.

    One edge per line as two whitespace separated decimal ids, blank lines
    and lines starting with '#' are skipped. Ids are compacted to
    ``0..n-1`` in order of first appearance, the original ids are kept
    as labels. Repeated edges are dropped with a warning.
    '''
    index = dict()
    labels = []
    edges = []
    seen = set()
    duplicates = 0
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith('#'):
            continue
        tokens = stripped.split()
        if len(tokens) != 2:
            raise EdgeListParseError(lineno, line, 'expected two node ids')
        ids = []
        for token in tokens:
            if not token.isdecimal():
                raise EdgeListParseError(lineno, line, 'invalid node id')
            ids.append(int(token))
        u, v = ids
        if u == v:
            raise EdgeListParseError(lineno, line, 'self-loop')
        for x in (u, v):
            if x not in index:
                index[x] = len(labels)
                labels.append(x)
        key = (min(u, v), max(u, v))
        if key in seen:
            duplicates += 1
            continue
        seen.add(key)
        edges.append((index[u], index[v]))
    if not labels:
        raise GraphError('empty edge list')
    if duplicates:
        _logger.warning('dropped %d duplicate edge(s)', duplicates)
    return Graph.from_edges(len(labels), edges, labels, duplicates)


def read_edge_list(path):
    with open(path, 'r') as file:
        return load_edge_list(file.read())


### Families ###

GRAPH_FAMILIES = (
    'barbell', 'cycle', 'complete', 'random-connected', 'path', 'star')


class GraphFamilySpec(NamedTuple):
    '''Generator input, ``p`` and ``seed`` only matter for
    random-connected graphs.'''

    family: str
    n: int
    p: float = 0.5
    seed: int = 0

    def validate(self):
        if self.family not in GRAPH_FAMILIES:
            raise GraphError(f"unknown graph family '{self.family}'")
        minimum = {'cycle': 3, 'barbell': 7}.get(self.family, 2)
        if self.n < minimum:
            raise GraphError(
                f'{self.family} needs n >= {minimum}, got {self.n}')
        if self.family == 'barbell' and self.n % 2 == 0:
            raise GraphError(f'barbell needs odd n, got {self.n}')
        if self.family == 'random-connected' and not 0 <= self.p <= 1:
            raise GraphError(f'edge probability {self.p} not in [0, 1]')
        return self


def generate(spec):
    '''Deterministic family member for ``spec``.

    The barbell B_n is two cliques of size (n-1)/2 where the highest id of
    the first clique and the lowest id of the second one are bridged by
    the middle node (n-1)/2.
    '''
    spec.validate()
    n = spec.n
    if spec.family == 'barbell':
        nxg = nx.barbell_graph((n - 1) // 2, 1)
    elif spec.family == 'cycle':
        nxg = nx.cycle_graph(n)
    elif spec.family == 'complete':
        nxg = nx.complete_graph(n)
    elif spec.family == 'path':
        nxg = nx.path_graph(n)
    elif spec.family == 'star':
        nxg = nx.star_graph(n - 1)
    else:
        nxg = _random_connected(n, spec.p, spec.seed)
    adjacency = [list(nxg.adj[i]) for i in range(n)]
    return Graph(adjacency)


def _random_connected(n, p, seed):
    nxg = nx.gnp_random_graph(n, p, seed=seed)
    components = sorted(min(c) for c in nx.connected_components(nxg))
    # Chain components through their smallest nodes.
    for a, b in zip(components, components[1:]):
        nxg.add_edge(a, b)
    return nxg
