"""Hypothesis strategies shared by the test modules."""

import random

from hypothesis import strategies as st

from glpwb.gen import random_hset, random_word
from glpwb.ordinal import ZERO, Ordinal, add, mul, omega_pow


def ordinals(max_depth: int = 2, max_terms: int = 3, max_coef: int = 3) -> st.SearchStrategy[Ordinal]:
    """Ordinals in Cantor normal form with exponents nested ``max_depth`` deep."""
    if max_depth == 0:
        return st.integers(0, 6).map(Ordinal.of_int)

    def build(pairs):
        out = ZERO
        for e, c in sorted(pairs, key=lambda p: p[0], reverse=True):
            out = add(out, mul(omega_pow(e), c))
        return out

    exps = ordinals(max_depth - 1, max_terms, max_coef)
    return st.lists(st.tuples(exps, st.integers(1, max_coef)), max_size=max_terms).map(build)


def hsets(level: int, bound, depth: int = 2):
    # the generator is seeded so failures replay from the printed seed
    return st.integers(0, 10**6).map(lambda s: random_hset(random.Random(s), level, bound, depth))


def words(length, depth: int = 3):
    return st.integers(0, 10**6).map(lambda s: random_word(random.Random(s), length, depth))
