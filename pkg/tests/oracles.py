"""Finite-state oracle for sets of ordinals below w^2 + 1.

A set X is described by two eventually periodic bit patterns on w: the
first w-block follows ``head`` and every later w-block follows ``tail``.
An optional ``top`` bit sits at w^2.  Limit points in the interval topology
can then be read off the patterns directly:

* w*(k+1) is a limit point iff block k has infinitely many points;
* w^2 is a limit point iff infinitely many blocks are nonempty;
* nothing else is a limit point.
"""

from itertools import product
from typing import Iterator, List, Tuple

from glpwb import nperiodic as N
from glpwb import word as W
from glpwb.ordinal import OMEGA, ONE, add, divmod_ord, mul, omega_pow

Pattern = Tuple[Tuple[int, ...], Tuple[int, ...]]  # (offset bits, period bits)


def patterns(max_bits: int = 4) -> List[Pattern]:
    """All (offset, period) pairs with at most ``max_bits`` bits, one per
    distinct subset of w."""
    seen = {}
    for total in range(1, max_bits + 1):
        for olen in range(total):
            for bits in product((0, 1), repeat=total):
                p = (bits[:olen], bits[olen:])
                key = tuple(bit_at(p, j) for j in range(4 * max_bits))
                seen.setdefault(key, p)
    return list(seen.values())


def bit_at(p: Pattern, j: int) -> int:
    off, per = p
    return off[j] if j < len(off) else per[(j - len(off)) % len(per)]


def infinite(p: Pattern) -> bool:
    return 1 in p[1]


def nonempty(p: Pattern) -> bool:
    return 1 in p[0] or 1 in p[1]


def pattern_word(p: Pattern) -> W.Word:
    off, per = p
    return W.concat(*[W.BITS[b] for b in off], W.iterate(W.concat(*[W.BITS[b] for b in per]), OMEGA))


def block_word(head: Pattern, tail: Pattern, top=None) -> W.Word:
    parts = [pattern_word(head), W.iterate(pattern_word(tail), OMEGA)]
    if top is not None:
        parts.append(W.BITS[top])
    return W.concat(*parts)


def member(head: Pattern, tail: Pattern, top, k: int, j: int) -> int:
    """Bit of X at w*k + j (k = None means the top point w^2)."""
    if k is None:
        return top
    return bit_at(head if k == 0 else tail, j)


def limit_point(head: Pattern, tail: Pattern, k, j: int) -> bool:
    """Is w*k + j (or w^2 when k is None) a limit point of X?"""
    if k is None:
        return nonempty(tail)
    if j != 0 or k == 0:
        return False
    return infinite(head if k == 1 else tail)


def expected_d0(head: Pattern, tail: Pattern, top=None) -> W.Word:
    """d0(X) assembled block by block from the rules above."""
    parts = [
        W.zeros(OMEGA),
        W.BITS[int(infinite(head))],
        W.zeros(OMEGA),
        W.iterate(W.concat(W.BITS[int(infinite(tail))], W.zeros(OMEGA)), OMEGA),
    ]
    if top is not None:
        parts.append(W.BITS[int(nonempty(tail))])
    return W.concat(*parts)


def point(k, j: int):
    return omega_pow(2) if k is None else add(mul(OMEGA, k), j)


def grid(top) -> Iterator[Tuple[object, int]]:
    # patterns have offset < 4 and period <= 4, so blocks 0..3 and
    # positions 0..15 cover every distinct behaviour
    for k in range(4):
        for j in range(16):
            yield k, j
    if top is not None:
        yield None, 0


def cases(max_bits: int = 4):
    ps = patterns(max_bits)
    for head in ps:
        for tail in ps:
            for top in (None, 0, 1):
                yield head, tail, top


def multiples(nu, bound):
    """Nonzero multiples of w^(nu+1) below ``bound``, written out as a word:
    a one followed by w^(nu+1) zeros, repeated, with position 0 cleared."""
    unit = omega_pow(add(nu, ONE))
    q, r = divmod_ord(bound, unit)
    assert not r.terms, "bound must be a multiple of the unit"
    block = W.concat(W.BIT1, W.zeros(unit))
    return N.from_word(W.setbit0(W.iterate(block, q), 0))
