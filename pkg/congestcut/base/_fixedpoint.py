"""Fixed-point masses carried in 32-bit message words."""

from fractions import Fraction


FIXED_BITS = 63
FIXED_SCALE = 1 << FIXED_BITS
WORD_BITS = 32
_WORD_MASK = (1 << WORD_BITS) - 1


def split(value):
    '''Integer mass as (high, low) 32-bit words.'''
    return (value >> WORD_BITS, value & _WORD_MASK)


def join(high, low):
    return (high << WORD_BITS) | low


def share(value, parts):
    '''Nearest integer share of ``value`` over ``parts`` such that the
    remaining ``parts - 1`` shares never exceed ``value``. The caller gives
    ``value - (parts - 1) * share`` to its first port.'''
    if parts == 1:
        return value
    each = (2 * value + parts) // (2 * parts)
    if (parts - 1) * each > value:
        each = value // parts
    return each


def quantize(values):
    '''Probabilities as integer masses in units of ``1 / FIXED_SCALE``.'''
    return tuple(round(Fraction(v) * FIXED_SCALE) for v in values)
