"""Seeded random generators and probe grids for the property suites."""

from __future__ import annotations

import random
from typing import Iterable, List, Set

from .ordinal import (
    ONE,
    ZERO,
    Ordinal,
    add,
    as_ordinal,
    cmp,
    mul,
    omega_pow,
    omega_tower,
    sub_left,
)
from .word import BITS, EMPTY, Cat, Iter, Word, concat, const, iter_pow, u1_word


def random_ordinal_below(rng: random.Random, bound: Ordinal, size: int = 2) -> Ordinal:
    """A random ordinal ``< bound`` built from at most ``size`` extra terms."""
    bound = as_ordinal(bound)
    if not bound.terms:
        raise ValueError("no ordinal below 0")
    if bound.is_finite:
        return as_ordinal(rng.randrange(bound.finite_value()))
    i = rng.randrange(len(bound.terms))
    head = list(bound.terms[:i])
    e, c = bound.terms[i]
    if c > 1 and rng.random() < 0.4:
        head.append((e, rng.randrange(1, c)))
        x = Ordinal(tuple(head))
        return add(x, random_ordinal_below(rng, omega_pow(e), size - 1)) if size > 1 else x
    if not e.terms:
        return Ordinal(tuple(head))
    x = Ordinal(tuple(head))
    if size <= 0:
        return x
    e2 = random_ordinal_below(rng, e, size - 1)
    x = add(x, mul(omega_pow(e2), rng.randint(1, 3)))
    if rng.random() < 0.3:
        x = add(x, rng.randint(1, 3))
    return x


def random_word(rng: random.Random, length, depth: int = 3) -> Word:
    """A random word of exactly the given length."""
    length = as_ordinal(length)
    if not length.terms:
        return EMPTY
    pieces = []
    for e, c in length.terms:
        for _ in range(c):
            pieces.append(_random_pow(rng, e, depth))
    return concat(*pieces)


def _random_pow(rng: random.Random, e: Ordinal, depth: int) -> Word:
    if not e.terms:
        return BITS[rng.randrange(2)]
    r = rng.random()
    if depth <= 0 or r < 0.15:
        return const(rng.randrange(2), omega_pow(e))
    if r < 0.75:
        e1 = random_ordinal_below(rng, e, 2) if rng.random() < 0.8 else ZERO
        blen = mul(omega_pow(e1), rng.randint(1, 2))
        if rng.random() < 0.4:
            blen = add(blen, random_ordinal_below(rng, omega_pow(e1), 1) if e1.terms else ZERO)
        if not blen.terms:
            blen = ONE
        body = random_word(rng, blen, depth - 1)
        return iter_pow(body, sub_left(e1, e))
    if r < 0.85:
        return u1_word(random_ordinal_below(rng, e, 1), omega_pow(e))
    off = random_ordinal_below(rng, omega_pow(e), 2)
    return concat(random_word(rng, off, depth - 1), _random_pow(rng, e, depth - 1))


def standard_grid(bound, max_exp: int = 3, max_coef: int = 3) -> List[Ordinal]:
    """Ordinals ``w^e1*c1 + w^e2*c2 + c3`` with small ``e, c``, below ``bound``."""
    bound = as_ordinal(bound)
    exps = [as_ordinal(i) for i in range(1, max_exp + 1)]
    exps += [omega_pow(ONE), add(omega_pow(ONE), ONE), omega_pow(omega_pow(ONE))]
    pts: Set[Ordinal] = set()
    lead = [ZERO] + [mul(omega_pow(e), c) for e in exps for c in range(1, max_coef + 1)]
    for a in lead:
        for b in lead:
            for k in range(0, max_coef + 1):
                x = add(add(a, b), k)
                if cmp(x, bound) < 0:
                    pts.add(x)
    return sorted(pts, key=_key)


def _key(x: Ordinal):
    from functools import cmp_to_key

    return cmp_to_key(cmp)(x)


def _small_counts(limit_exp: Ordinal) -> List[Ordinal]:
    w = omega_pow(ONE)
    cands = [ONE, as_ordinal(2), w, add(w, ONE), mul(w, 2), omega_pow(2), add(omega_pow(2), w)]
    cands += [omega_pow(w), omega_pow(add(w, ONE))]
    lim = omega_pow(limit_exp)
    return [t for t in cands if cmp(t, lim) < 0]


def word_probes(w: Word, budget: int = 400) -> List[Ordinal]:
    """Structural probe points of a word: part boundaries, copy starts and
    their neighbours, recursively."""
    out: Set[Ordinal] = set()

    def go(x: Word, base: Ordinal, depth: int) -> None:
        if len(out) > budget or depth > 6:
            return
        out.add(base)
        out.add(add(base, x.length))
        if isinstance(x, Cat):
            for off, p in zip(x.offsets, x.parts):
                go(p, add(base, off), depth + 1)
        elif isinstance(x, Iter):
            beta = x.body.length
            go(x.body, base, depth + 1)
            for t in _small_counts(x.e):
                start = add(base, mul(beta, t))
                out.add(start)
                out.add(add(start, ONE))
                if depth < 3:
                    go(x.body, start, depth + 2)

    go(w, ZERO, 0)
    return sorted((p for p in out if cmp(p, w.length) < 0), key=_key)


def probe_grid(w: Word, extra: Iterable[Ordinal] = ()) -> List[Ordinal]:
    pts = set(standard_grid(w.length)) | set(word_probes(w)) | set(extra)
    return sorted((p for p in pts if cmp(p, w.length) < 0), key=_key)


def tower(k: int) -> Ordinal:
    return omega_tower(k)


def random_hset(rng: random.Random, level: int, bound, depth: int = 2):
    """A random set of exactly the given level over ``[0, bound)``."""
    from . import nperiodic as N

    bound = as_ordinal(bound)
    if level == 0:
        return N.from_word(random_word(rng, bound, depth))
    terms = []
    for _ in range(rng.randint(1, 3)):
        b = random_word(rng, bound, depth)
        r = rng.random()
        if r < 0.2:
            m = rng.randint(1, level)
            tail = N.uset(m, random_ordinal_below(rng, _small_cap(bound), 1), bound)
        else:
            tail = random_hset(rng, level - 1, bound, depth)
        terms.append((b, tail))
    return N.from_terms(level, bound, terms)


def _small_cap(bound: Ordinal) -> Ordinal:
    w = omega_pow(ONE)
    cap = omega_pow(w)
    return bound if cmp(bound, cap) < 0 else cap
