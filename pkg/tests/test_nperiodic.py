import random
from itertools import islice

import pytest
from hypothesis import given, settings

import oracles
from glpwb import nperiodic as N
from glpwb import word as W
from glpwb.gen import probe_grid, random_hset
from glpwb.ordinal import OMEGA, ONE, ZERO, add, cmp, ell, ell_iter, mul, omega_pow, omega_tower
from strategies import hsets

W3 = omega_tower(3)


def grid_of(*sets):
    pts = set()
    for s in sets:
        for b, _ in s.terms():
            pts.update(probe_grid(b))
    return sorted(pts, key=lambda a: (len(str(a)), str(a)))


@given(hsets(2, W3), hsets(1, W3))
@settings(max_examples=25)
def test_boolean_ops_pointwise(x, y):
    ops = [
        (N.union, lambda a, b: a or b),
        (N.intersect, lambda a, b: a and b),
        (N.difference, lambda a, b: a and not b),
        (N.xor, lambda a, b: a != b),
    ]
    results = [(f(x, y), g) for f, g in ops]
    comp = N.complement(x)
    for a in grid_of(x, y):
        p, q = N.member(x, a), N.member(y, a)
        assert N.member(comp, a) == (not p)
        for r, g in results:
            assert N.member(r, a) == g(p, q)


@given(hsets(2, W3), hsets(2, W3))
def test_boolean_laws_symbolic(x, y):
    assert N.equal(N.complement(N.complement(x)), x)
    assert N.equal(N.complement(N.union(x, y)), N.intersect(N.complement(x), N.complement(y)))
    assert N.is_empty(N.intersect(x, N.complement(x)))
    assert N.equal(N.union(x, y), N.union(y, x))


@given(hsets(3, W3))
def test_sexp_roundtrip(s):
    text = N.format_hset(s)
    back = N.parse_hset(text)
    assert back == s
    assert N.format_hset(back) == text


@given(hsets(1, W3))
def test_lift_ell_membership(a):
    up = N.lift_ell(a)
    assert up.level == a.level + 1
    for x in grid_of(a):
        assert N.member(up, x) == N.member(a, ell(x))


@pytest.mark.parametrize("m", [1, 2, 3])
def test_uset_membership(m):
    beta = [ZERO, ONE, OMEGA][m - 1]
    u = N.uset(m, beta, W3)
    assert u.level == m - 1
    for x in probe_grid(W.ones(W3)):
        assert N.member(u, x) == (cmp(ell_iter(m, x), beta) > 0)


@given(hsets(1, W3))
def test_coerce_keeps_members(s):
    t = N.coerce(s, 3)
    assert t.level == 3
    assert N.equal(s, t)


def test_restrict_and_bounds():
    s = N.full(1, W3)
    r = N.restrict(s, omega_pow(2))
    assert r.bound == omega_pow(2)
    assert N.equal(r, N.full(0, omega_pow(2)))
    with pytest.raises(N.BoundMismatch):
        N.union(N.full(0, W3), N.full(0, omega_pow(2)))
    with pytest.raises(N.BoundMismatch):
        N.restrict(r, W3)


def test_min_and_first():
    u = N.uset(1, 0, W3)
    assert N.min_of(u) == OMEGA
    assert N.min_above(u, OMEGA) == mul(OMEGA, 2)
    assert N.min_of(N.empty(2, W3)) is None
    assert N.first_at_or_after(u, add(OMEGA, 1)) == mul(OMEGA, 2)


def _d0_oracle(s, a):
    return a.is_limit and N.sup_below(s, a) == a


@given(hsets(2, W3))
def test_d0_matches_sup_oracle(s):
    d = N.derivative(s, 0)
    assert d.level == 0
    for a in grid_of(s):
        assert N.member(d, a) == _d0_oracle(s, a), a


@given(hsets(2, W3))
def test_derivative_levels_and_reserialize(s):
    for i in range(4):
        d = N.derivative(s, i)
        assert d.level <= max(s.level, i)
        assert N.equal(N.parse_hset(N.format_hset(d)), d)


@pytest.mark.parametrize("i", [0, 1, 2])
def test_rank_of_full_space(i):
    bound = omega_tower(4)
    s = N.full(0, bound)
    for k in (1, 2):
        s = N.derivative(s, i)
        for a in probe_grid(W.ones(bound)):
            r = ell_iter(i + 1, a)
            assert N.member(s, a) == (bool(r.terms) and (not r.is_finite or r.finite_value() >= k))


@given(hsets(1, W3))
@settings(max_examples=25)
def test_uset_law_ell_preimage(a):
    if N.is_empty(a):
        return
    lhs = N.derivative(N.lift_ell(a), 0)
    assert N.equal(lhs, N.uset(1, N.min_of(a), W3))


@pytest.mark.parametrize("nu", [ZERO, ONE, OMEGA, add(OMEGA, 2)])
def test_uset_law_multiples(nu):
    e = oracles.multiples(nu, W3)
    assert N.equal(N.derivative(e, 0), N.uset(1, add(nu, ONE), W3))
    for n in (1, 2):
        assert N.equal(N.derivative(e, n), N.intersect(N.uset(n + 1, 0, W3), e))


def test_open_and_discrete_examples():
    assert N.is_open(N.uset(1, OMEGA, W3), 1)
    assert not N.is_open(N.uset(1, OMEGA, W3), 0)
    point = N.from_word(W.concat(W.zeros(OMEGA), W.BIT1, W.zeros(W3)))
    assert not N.is_open(point, 0)
    assert N.is_discrete(point, 0)
    assert not N.is_discrete(oracles.multiples(ZERO, W3), 0)


def test_block_oracle_sample():
    # the full exhaustive run lives in the acceptance suite
    for head, tail, top in islice(oracles.cases(), 0, None, 23):
        x = oracles.block_word(head, tail, top)
        d = N.derivative(N.from_word(x), 0)
        assert N.equal(d, N.from_word(oracles.expected_d0(head, tail, top)))
        for k, j in oracles.grid(top):
            a = oracles.point(k, j)
            assert W.member(x, a) == oracles.member(head, tail, top, k, j)
            assert N.member(d, a) == oracles.limit_point(head, tail, k, j)


def test_from_terms_rejects_bad_input():
    with pytest.raises(ValueError):
        N.from_terms(0, W3, [(W.ones(W3), N.full(0, W3))])
    with pytest.raises(N.BoundMismatch):
        N.from_terms(1, W3, [(W.ones(OMEGA), None)])


def test_random_sets_have_requested_level():
    rng = random.Random(7)
    for level in range(4):
        s = random_hset(rng, level, W3)
        assert s.level == level and s.bound == W3
