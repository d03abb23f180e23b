"""Exact references: walk distributions, personalized PageRank and the
sparsest cut by enumeration."""

from fractions import Fraction
import logging
import math
from typing import NamedTuple

import numpy as np

import congestcut as _libcongestcut
from ..base import engine as eng
from ..base.graph import Cut, balance


__all__ = [
    'OracleBudget', 'transition_matrix', 'exact_walk_distribution',
    'exact_ppr', 'ppr_residual', 'brute_force_sparsest_cut', 'all_cuts',
    'oracle_report', 'OracleLimitError', 'EXACT_MAX_N',
    'BRUTE_FORCE_HARD_CAP']


_logger = logging.getLogger(__name__)

EXACT_MAX_N = 12
BRUTE_FORCE_HARD_CAP = 26


class OracleLimitError(eng.ConfigError):
    pass


class OracleBudget(NamedTuple):
    max_n_bruteforce: int = 22
    ppr_tail_tol: float = 1e-12

    @classmethod
    def default(cls, **overrides):
        params = dict(
            max_n_bruteforce=_libcongestcut.ORACLE_MAX_N,
            ppr_tail_tol=_libcongestcut.PPR_TAIL_TOL)
        params.update(overrides)
        return cls(**params).validate()

    def validate(self):
        if not 2 <= self.max_n_bruteforce <= BRUTE_FORCE_HARD_CAP:
            raise eng.ConfigError(
                f'max_n_bruteforce must be in 2..{BRUTE_FORCE_HARD_CAP}, '
                f'got {self.max_n_bruteforce}')
        if not 0 < self.ppr_tail_tol < 1:
            raise eng.ConfigError(
                f'ppr_tail_tol must be in (0, 1), got {self.ppr_tail_tol}')
        return self


def transition_matrix(g):
    '''Row stochastic walk matrix, ``P[i, j] = 1 / d(i)`` on edges.'''
    P = np.zeros((g.n, g.n))
    for i, nbrs in enumerate(g.adjacency):
        P[i, list(nbrs)] = 1.0 / len(nbrs)
    return P


def _check_source(g, s):
    if not 0 <= s < g.n:
        raise eng.ConfigError(f'source {s} not in 0..{g.n - 1}')


def exact_walk_distribution(g, s, length, exact=None):
    '''Distribution of a ``length`` step walk from ``s``.

    Rational when ``exact`` is true, the default for n up to
    ``EXACT_MAX_N``, float otherwise.
    '''
    _check_source(g, s)
    if length < 0:
        raise eng.ConfigError(f'negative walk length {length}')
    if exact is None:
        exact = g.n <= EXACT_MAX_N
    if exact:
        p = [Fraction(0)] * g.n
        p[s] = Fraction(1)
        for _ in range(length):
            q = [Fraction(0)] * g.n
            for i, mass in enumerate(p):
                if mass:
                    each = mass / g.degree(i)
                    for j in g.neighbors(i):
                        q[j] += each
            p = q
        return tuple(p)
    p = np.zeros(g.n)
    p[s] = 1.0
    P = transition_matrix(g)
    for _ in range(length):
        p = p @ P
    return tuple(float(v) for v in p)


def _ppr_terms(alpha, tol):
    if alpha == 1:
        return 0
    # Smallest T with (1 - alpha)^(T + 1) <= tol.
    T = max(0, math.ceil(math.log(tol) / math.log(1 - alpha)) - 1)
    while (1 - alpha) ** (T + 1) > tol:
        T += 1
    return T


def exact_ppr(g, s, alpha, tol=None):
    '''Personalized PageRank from ``s`` as the truncated series
    ``sum_t alpha (1 - alpha)^t p_t``, the dropped tail is at most
    ``tol``.'''
    _check_source(g, s)
    if not 0 < alpha <= 1:
        raise eng.ConfigError(
            f'reset probability must be in (0, 1], got {alpha}')
    if tol is None:
        tol = _libcongestcut.PPR_TAIL_TOL
    P = transition_matrix(g)
    p = np.zeros(g.n)
    p[s] = 1.0
    acc = alpha * p
    weight = alpha
    for _ in range(_ppr_terms(alpha, tol)):
        p = p @ P
        weight *= 1 - alpha
        acc += weight * p
    return tuple(float(v) for v in acc)


def ppr_residual(g, s, alpha, v):
    '''Sup norm of ``v - (alpha chi_s + (1 - alpha) v P)``.'''
    v = np.asarray(v, dtype=float)
    chi = np.zeros(g.n)
    chi[s] = 1.0
    step = alpha * chi + (1 - alpha) * (v @ transition_matrix(g))
    return float(np.max(np.abs(v - step)))


def _check_cap(g, budget):
    if g.n > budget.max_n_bruteforce:
        raise OracleLimitError(
            f'n={g.n} over the enumeration cap {budget.max_n_bruteforce}')


def brute_force_sparsest_cut(g, budget=None):
    '''Minimum conductance cut by enumerating every cut once.

    The side without node 0 walks a Gray code over nodes 1..n-1, so each
    step flips one node and updates crossing and volume in O(degree).
    The cut is reported as the side containing node 0 unless another
    member set of equal conductance is lexicographically smaller.

    Returns
    -------
    tuple
        ``(Cut, Fraction)``
    '''
    budget = OracleBudget.default() if budget is None else budget.validate()
    _check_cap(g, budget)
    n, two_m = g.n, 2 * g.m
    adjacency, degrees = g.adjacency, g.degrees
    flipped = [False] * n
    inside = [0] * n  # neighbors on the flipped side
    crossing = volume = 0
    best_num, best_den, best_members = None, None, None
    for k in range(1, 1 << (n - 1)):
        v = (k & -k).bit_length()  # node 1 + index of the lowest set bit
        d = degrees[v]
        if flipped[v]:
            flipped[v] = False
            crossing -= d - 2 * inside[v]
            volume -= d
            delta = -1
        else:
            flipped[v] = True
            crossing += d - 2 * inside[v]
            volume += d
            delta = 1
        for u in adjacency[v]:
            inside[u] += delta
        den = min(volume, two_m - volume)
        if best_num is not None:
            lhs, rhs = crossing * best_den, best_num * den
            if lhs > rhs:
                continue
            if lhs == rhs:
                members = _side_of_zero(flipped)
                if members >= best_members:
                    continue
                best_members = members
                continue
        best_num, best_den = crossing, den
        best_members = _side_of_zero(flipped)
    cut = Cut.from_members(g, best_members)
    phi = Fraction(best_num, best_den)
    _logger.debug('sparsest cut of %r: %s %s', g, phi, list(best_members))
    return cut, phi


def _side_of_zero(flipped):
    return tuple(i for i, f in enumerate(flipped) if not f)


def all_cuts(g, budget=None):
    '''Every cut once, as the side containing node 0.'''
    budget = OracleBudget.default() if budget is None else budget.validate()
    _check_cap(g, budget)
    rest = range(1, g.n)
    for mask in range(0, (1 << (g.n - 1)) - 1):
        members = [0] + [i for i in rest if mask >> (i - 1) & 1]
        yield Cut.from_members(g, members)


def oracle_report(g, budget=None):
    cut, phi = brute_force_sparsest_cut(g, budget)
    return {
        'oracle': True,
        'cut_members': [g.external_id(i) for i in cut.sorted()],
        'conductance': float(phi),
        'conductance_exact': str(phi),
        'balance_measured': float(balance(g, cut)),
        'n': g.n,
        'm': g.m}
