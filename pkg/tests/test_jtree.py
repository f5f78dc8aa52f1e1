import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from glpwb import jtree as J
from glpwb.logic import TOP, Dia, parse

# rooted unlabelled trees (OEIS A000081) count the J_0-trees
ROOTED_TREES = [1, 1, 2, 4, 9, 20]


def _posets(size):
    pairs = [(a, b) for a in range(size) for b in range(size) if a != b]
    out = []
    for bits in range(1 << len(pairs)):
        r = {pairs[i] for i in range(len(pairs)) if bits >> i & 1}
        if any((b, a) in r for a, b in r):
            continue
        if all((a, d) in r for a, b in r for c, d in r if b == c):
            out.append(frozenset(r))
    return out


def _iso_key(size, rels):
    return min(
        tuple(tuple(sorted((perm[a], perm[b]) for a, b in r)) for r in rels)
        for perm in itertools.permutations(range(size))
    )


def brute_force_count(n, size):
    """Isomorphism classes of (n+1)-tuples of strict orders that form J_n-trees."""
    seen = set()
    for rels in itertools.product(_posets(size), repeat=n + 1):
        t = J.JTree(n, size, rels)
        if not J.check_frame(t) and J.is_derivable(t):
            seen.add(_iso_key(size, rels))
    return len(seen)


def count(n, size):
    return sum(1 for t in J.enumerate_trees(n, size) if t.size == size)


@pytest.mark.parametrize("size", range(1, 7))
def test_j0_trees_are_rooted_trees(size):
    assert count(0, size) == ROOTED_TREES[size - 1]


@pytest.mark.parametrize("n,size", [(0, 4), (1, 2), (1, 3), (1, 4), (2, 2), (2, 3)])
def test_enumeration_matches_brute_force(n, size):
    assert count(n, size) == brute_force_count(n, size)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_enumerated_trees_are_frames(n):
    keys = set()
    for t in J.enumerate_trees(n, 5):
        assert J.check_frame(t) == []
        assert J.is_derivable(t)
        assert t.root == 0
        keys.add(J.canonical_key(t))
    assert len(keys) == sum(count(n, s) for s in range(1, 6))


def test_builders():
    c = J.chain(3)
    assert c.rel(0) == {(0, 1), (0, 2), (1, 2)}
    p = J.plus(c)
    assert p.signature == 1 and p.rel(0) == frozenset() and p.rel(1) == c.rel(0)
    g = J.graft(J.chain(1), [J.plus(J.chain(1)), J.plus(J.chain(2))])
    assert g.size == 4 and g.signature == 1
    assert g.rel(0) == {(0, 1), (0, 2), (0, 3)}
    assert g.rel(1) == {(2, 3)}
    assert J.lift_to(c, 2).rels[1:] == (frozenset(), frozenset())
    assert J.check_frame(g) == [] and J.is_derivable(g)


def test_malformed_inputs():
    with pytest.raises(J.MalformedTree):
        J.tree0([None, None])
    with pytest.raises(J.MalformedTree):
        J.tree0([1, 0])
    with pytest.raises(J.MalformedTree):
        J.graft(J.chain(1), [])
    with pytest.raises(J.MalformedTree):
        J.graft(J.chain(1), [J.chain(1)])
    with pytest.raises(J.MalformedTree):
        J.JTree(0, 2, (frozenset({(0, 5)}),))
    bad = J.JTree(1, 3, (frozenset({(0, 1)}), frozenset({(0, 2), (2, 1)})))
    assert J.check_frame(bad)


def test_not_derivable_examples():
    # a diamond satisfies the frame conditions but is not a tree
    diamond = J.JTree(0, 4, (frozenset({(0, 1), (0, 2), (1, 3), (2, 3), (0, 3)}),))
    assert J.check_frame(diamond) == []
    assert not J.is_derivable(diamond)
    assert not J.is_derivable(J.plus(diamond))
    # an R_1 step followed by an R_0 step must be an R_0 step
    t = J.JTree(1, 3, (frozenset({(1, 2)}), frozenset({(0, 1)})))
    assert J.check_frame(t)


def test_roots():
    g = J.graft(J.chain(1), [J.plus(J.chain(2))])
    assert J.hereditary_roots(g, 0) == [0]
    assert J.hereditary_roots(g, 1) == [0, 1]
    assert J.k_root(g, 2, 1) == 1
    assert J.r_star(g, 1) == {(1, 2)}


def test_kripke_semantics():
    g = J.graft(J.chain(1), [J.plus(J.chain(2))])
    assert J.kripke_eval(Dia(0, TOP), {}, g) == {0}
    assert J.kripke_eval(Dia(1, TOP), {}, g) == {1}
    assert J.kripke_eval(parse("[0]p"), {"p": {1, 2}}, g) == {0, 1, 2}
    assert J.kripke_eval(parse("<1>p -> <0>p"), {"p": {2}}, g) == {0, 2}
    allv = J.kripke_eval_all(parse("~<0>p"), {"p": {2}}, g)
    assert allv[parse("<0>p")] == {0}


@given(st.integers(0, 10**6))
def test_tree_sexp_roundtrip(seed):
    rng = random.Random(seed)
    n = rng.randint(0, 2)
    trees = list(J.enumerate_trees(n, 4))
    t = rng.choice(trees)
    text = J.format_sexp(J.tree_to_sexp(t))
    assert J.parse_tree(text) == t


@pytest.mark.parametrize("text", ["<0>T -> <1>T", "<0>p -> <1>p", "<0><1>p -> <1>p"])
def test_countermodels_for_non_theorems(text):
    cm = J.countermodel_search(parse(text), 1)
    assert cm is not None and cm.recheck()
    assert cm.root == cm.tree.root


@pytest.mark.parametrize(
    "text,n",
    [("[0]([0]p -> p) -> [0]p", 0), ("[0]p -> [0][0]p", 0), ("<1>p -> <0>p", 1), ("[0]p -> [1]p", 1)],
)
def test_no_countermodel_for_theorems(text, n):
    assert J.countermodel_search(parse(text), n, node_budget=4, val_budget=256) is None


def test_countermodel_is_deterministic():
    f = parse("<0>p -> <1>p")
    a = J.countermodel_search(f, 1, seed=3)
    b = J.countermodel_search(f, 1, seed=3)
    assert a.tree == b.tree and a.valuation == b.valuation
