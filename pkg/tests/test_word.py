import random
from functools import cmp_to_key

import pytest
from hypothesis import given
from hypothesis import strategies as st

from glpwb import word as W
from glpwb.gen import probe_grid
from glpwb.ordinal import OMEGA, ONE, ZERO, add, cmp, divmod_ord, ell, mul, omega_pow, sub_left
from strategies import words

# A pointwise model built alongside each word: model(alpha) -> bit.


def modelled(rng: random.Random, depth: int):
    """Random (word, model) pair of length below w^(w^2)."""
    r = rng.random()
    if depth == 0 or r < 0.25:
        b = rng.randrange(2)
        return W.BITS[b], (lambda a, b=b: b)
    if r < 0.6:
        parts = [modelled(rng, depth - 1) for _ in range(rng.randint(2, 3))]
        w = W.concat(*[p[0] for p in parts])

        def model(a, parts=parts):
            for pw, pm in parts:
                if cmp(a, pw.length) < 0:
                    return pm(a)
                a = sub_left(pw.length, a)
            raise IndexError(a)

        return w, model
    body, bm = modelled(rng, depth - 1)
    beta = rng.choice([OMEGA, add(OMEGA, 2), mul(OMEGA, 2), omega_pow(2), omega_pow(OMEGA), 3])
    w = W.iterate(body, beta)

    def model(a, body=body, bm=bm):
        return bm(divmod_ord(a, body.length)[1])

    return w, model


def model_points(w):
    return probe_grid(w)


@given(st.integers(0, 10**6))
def test_member_matches_model(seed):
    w, m = modelled(random.Random(seed), 3)
    for a in model_points(w):
        assert W.member(w, a) == m(a), a


@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_boolean_ops_pointwise(s1, s2):
    x, mx = modelled(random.Random(s1), 3)
    y, my = modelled(random.Random(s2), 3)
    if x.length != y.length:
        y, my = W.ones(x.length), (lambda a: 1)
    u, i, d, c = W.union(x, y), W.intersect(x, y), W.difference(x, y), W.complement(x)
    for a in model_points(x) + model_points(y):
        if cmp(a, x.length) >= 0:
            continue
        p, q = mx(a), my(a)
        assert W.member(u, a) == (p | q)
        assert W.member(i, a) == (p & q)
        assert W.member(d, a) == (p & (1 - q))
        assert W.member(c, a) == 1 - p


@given(st.integers(0, 10**6))
def test_split_matches_model(seed):
    w, m = modelled(random.Random(seed), 3)
    pts = model_points(w)
    cut = pts[len(pts) // 2]
    left, right = W.split(w, cut)
    assert left.length == cut
    assert add(left.length, right.length) == w.length
    for a in pts:
        if cmp(a, cut) < 0:
            assert W.member(left, a) == m(a)
        else:
            assert W.member(right, sub_left(cut, a)) == m(a)


def test_iterate_normal_forms():
    a = W.concat(W.BIT1, W.BIT0)
    assert W.iterate(W.iterate(a, OMEGA), OMEGA) == W.iterate(a, omega_pow(2))
    assert W.iterate(a, 0) == W.EMPTY
    assert W.iterate(W.BIT1, OMEGA) == W.ones(OMEGA)
    assert W.concat(a, W.iterate(a, OMEGA)) == W.iterate(a, OMEGA)
    assert W.concat(W.zeros(3), W.zeros(OMEGA)) == W.zeros(OMEGA)
    assert W.iterate(a, OMEGA).length == OMEGA


def test_equal_is_semantic():
    a = W.concat(W.BIT1, W.BIT0)
    x = W.iterate(a, OMEGA)
    y = W.concat(W.BIT1, W.iterate(W.concat(W.BIT0, W.BIT1), OMEGA))
    assert W.equal(x, y)
    assert not W.equal(x, W.complement(y))


@given(words(omega_pow(OMEGA)))
def test_double_complement(w):
    assert W.equal(W.complement(W.complement(w)), w)
    assert W.equal(W.union(w, W.complement(w)), W.ones(w.length))
    assert not W.intersect(w, W.complement(w)).has1


@given(words(mul(omega_pow(OMEGA), 2)), words(mul(omega_pow(OMEGA), 2)))
def test_de_morgan(x, y):
    lhs = W.complement(W.union(x, y))
    rhs = W.intersect(W.complement(x), W.complement(y))
    assert W.equal(lhs, rhs)


@given(st.integers(0, 10**6))
def test_first_and_min(seed):
    w, m = modelled(random.Random(seed), 3)
    pts = model_points(w)
    ones_seen = [a for a in pts if m(a)]
    first = W.min_of(w)
    if not w.has1:
        assert first is None
        return
    assert first is not None and W.member(w, first) == 1
    assert all(cmp(first, a) <= 0 for a in ones_seen)
    for a in pts:
        nxt = W.first_at_or_after(w, a)
        if nxt is not None:
            assert cmp(nxt, a) >= 0 and W.member(w, nxt) == 1


def test_derivative_of_small_words():
    w = OMEGA
    # all points of w*2: limit points are w only (inside [0, w*2))
    assert W.derive0(W.ones(mul(w, 2))) == W.concat(W.zeros(w), W.BIT1, W.zeros(w))
    # the even numbers below w+1 accumulate at w
    evens = W.concat(W.iterate(W.concat(W.BIT1, W.BIT0), w), W.BIT0)
    d = W.d0(evens)
    assert W.member(d, w) == 1 and not W.split(d, w)[0].has1
    # a single point has no limit points
    single = W.concat(W.BIT1, W.zeros(omega_pow(2)))
    assert not W.derive0(single).has1


@given(words(omega_pow(OMEGA), depth=2))
def test_derive0_limit_points_by_sup(w):
    d = W.derive0(w)
    assert d.length == w.length
    for a in probe_grid(w):
        expect = a.is_limit and W.sup_below(w, a) == a
        assert W.member(d, a) == int(expect), a


def test_u1_and_limit_multiples():
    w = OMEGA
    u = W.u1_word(0, omega_pow(2))
    for a in probe_grid(u):
        assert W.member(u, a) == int(cmp(ell(a), ZERO) > 0)
    # (w+1)*a for a = 0 or a limit: 0, w^2, w^2*2, ...
    lm = W.limit_multiples(add(w, 1), omega_pow(3))
    assert [W.member(lm, a) for a in (0, add(w, 1), omega_pow(2), mul(omega_pow(2), 2))] == [1, 0, 1, 1]
    assert W.member(lm, add(omega_pow(2), add(w, 1))) == 0


def test_setbit0_and_substitute():
    w = W.ones(OMEGA)
    assert W.member(W.setbit0(w, 0), 0) == 0
    s = W.substitute(W.concat(W.BIT1, W.BIT0), W.zeros(2), W.ones(2))
    assert s == W.concat(W.ones(2), W.zeros(2))


@given(words(mul(omega_pow(2), 3)))
def test_sexp_roundtrip(w):
    assert W.parse_word(W.format_word(w)) == w


@pytest.mark.parametrize("text", ["(bit 2)", "(iter (bit 1))", "(foo)", "bit", "(cat (bit 1) (bit"])
def test_bad_word_text(text):
    with pytest.raises(SyntaxError):
        W.parse_word(text)


def test_member_out_of_range():
    with pytest.raises(W.WordRangeError):
        W.member(W.ones(3), 3)


def test_probe_points_sorted():
    pts = probe_grid(W.ones(omega_pow(OMEGA)))
    assert pts == sorted(pts, key=cmp_to_key(cmp))
    assert pts[0] == ZERO and ONE in pts
