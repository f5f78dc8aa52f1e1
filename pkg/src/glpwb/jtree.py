"""Finite J_n-trees: the inductive grammar, frame checks, Kripke semantics and
a bounded countermodel search.

A tree of signature ``n`` has nodes ``0..size-1`` and relations
``R_0..R_n``.  ``w R_k u`` means ``u`` lies above ``w``; the root is the
unique node with no ``R_k`` predecessor for any ``k``.  Node sets are
handled internally as int bitmasks.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .logic import And, Bot, Dia, Formula, Imp, Not, Or, Top, Var, m_translation, subformulas, variables
from .sexp import SExp, format_sexp, parse_sexp

Edge = Tuple[int, int]

__all__ = [
    "JTree",
    "MalformedTree",
    "tree0",
    "chain",
    "plus",
    "graft",
    "check_frame",
    "is_derivable",
    "k_root",
    "hereditary_roots",
    "r_star",
    "kripke_eval",
    "enumerate_trees",
    "Countermodel",
    "countermodel_search",
    "tree_to_sexp",
    "tree_from_sexp",
]


class MalformedTree(ValueError):
    pass


@dataclass(frozen=True)
class JTree:
    signature: int
    size: int
    rels: Tuple[FrozenSet[Edge], ...]

    def __post_init__(self) -> None:
        if len(self.rels) != self.signature + 1:
            raise MalformedTree("need one relation per modality")
        for r in self.rels:
            for u, v in r:
                if not (0 <= u < self.size and 0 <= v < self.size):
                    raise MalformedTree(f"edge ({u}, {v}) outside the node range")

    @property
    def nodes(self) -> range:
        return range(self.size)

    def rel(self, k: int) -> FrozenSet[Edge]:
        return self.rels[k] if k <= self.signature else frozenset()

    def succ_masks(self, k: int) -> Tuple[int, ...]:
        return _succ_masks(self, k)

    @property
    def root(self) -> int:
        return _root(self)

    def __str__(self) -> str:
        return format_sexp(tree_to_sexp(self))


@lru_cache(maxsize=1 << 14)
def _succ_masks(t: JTree, k: int) -> Tuple[int, ...]:
    out = [0] * t.size
    for u, v in t.rel(k):
        out[u] |= 1 << v
    return tuple(out)


@lru_cache(maxsize=1 << 14)
def _root(t: JTree) -> int:
    has_pred = set()
    for r in t.rels:
        has_pred.update(v for _, v in r)
    roots = [w for w in t.nodes if w not in has_pred]
    if len(roots) != 1:
        raise MalformedTree(f"expected a unique root, found {roots}")
    return roots[0]


# grammar --------------------------------------------------------------------------


def _closure(size: int, edges: Iterable[Edge]) -> FrozenSet[Edge]:
    reach = {u: {v for a, v in edges if a == u} for u in range(size)}
    changed = True
    while changed:
        changed = False
        for u in range(size):
            extra = set()
            for v in reach[u]:
                extra |= reach[v]
            if not extra <= reach[u]:
                reach[u] |= extra
                changed = True
    return frozenset((u, v) for u in range(size) for v in reach[u])


def tree0(parents: Sequence[Optional[int]]) -> JTree:
    """A J_0-tree from a parent array; exactly one entry is None (the root)."""
    size = len(parents)
    if size == 0:
        raise MalformedTree("empty tree")
    if sum(p is None for p in parents) != 1:
        raise MalformedTree("a J_0-tree needs exactly one root")
    edges = [(p, c) for c, p in enumerate(parents) if p is not None]
    r = _closure(size, edges)
    if any(u == v for u, v in r):
        raise MalformedTree("parent array has a cycle")
    return JTree(0, size, (r,))


def chain(length: int) -> JTree:
    """The J_0 chain ``0 R 1 R ... R length-1``."""
    return tree0([None] + list(range(length - 1)))


def plus(t: JTree) -> JTree:
    """Shift every relation up one index and leave ``R_0`` empty."""
    return JTree(t.signature + 1, t.size, (frozenset(),) + t.rels)


def graft(v: JTree, ws: Sequence[JTree]) -> JTree:
    """Put ``v+`` below the disjoint sum of ``ws`` and link every node of ``v``
    to every node of every ``w`` by ``R_0``."""
    if not ws:
        raise MalformedTree("graft needs at least one upper tree")
    n = v.signature + 1
    if any(w.signature != n for w in ws):
        raise MalformedTree(f"upper trees must have signature {n}")
    vp = plus(v)
    rels = [set(r) for r in vp.rels]
    off = v.size
    upper = []
    for w in ws:
        for k, r in enumerate(w.rels):
            rels[k].update((a + off, b + off) for a, b in r)
        upper.extend(range(off, off + w.size))
        off += w.size
    rels[0].update((a, b) for a in range(v.size) for b in upper)
    return JTree(n, off, tuple(frozenset(r) for r in rels))


def lift_to(t: JTree, n: int) -> JTree:
    """View ``t`` at a larger signature by appending empty relations."""
    if n < t.signature:
        raise MalformedTree("cannot lower the signature")
    return JTree(n, t.size, t.rels + (frozenset(),) * (n - t.signature))


# frame conditions ------------------------------------------------------------------


def check_frame(t: JTree) -> List[str]:
    """Violations of the J frame conditions; empty when all hold."""
    bad: List[str] = []
    rs = [t.rel(k) for k in range(t.signature + 1)]
    for k, r in enumerate(rs):
        if any(u == v for u, v in r):
            bad.append(f"R_{k} is not irreflexive")
        for (a, b), (c, d) in itertools.product(r, r):
            if b == c and (a, d) not in r:
                bad.append(f"R_{k} is not transitive at ({a}, {b}, {d})")
                break
    for k, m in itertools.product(range(len(rs)), repeat=2):
        lo = rs[min(k, m)]
        for (a, b), (c, d) in itertools.product(rs[k], rs[m]):
            if b == c and (a, d) not in lo:
                bad.append(f"R_{k}R_{m} not inside R_{min(k, m)} at ({a}, {b}, {d})")
                break
        if k < m:
            for (y, x), (y2, z) in itertools.product(rs[m], rs[k]):
                if y == y2 and (x, z) not in rs[k]:
                    bad.append(f"R_{m}^-1 R_{k} not inside R_{k} at ({x}, {y}, {z})")
                    break
    try:
        _root(t)
    except MalformedTree as e:
        bad.append(str(e))
    return bad


def _restrict(t: JTree, keep: Sequence[int], shift: int = 0) -> JTree:
    idx = {w: i for i, w in enumerate(keep)}
    rels = []
    for k in range(shift, t.signature + 1):
        rels.append(frozenset((idx[a], idx[b]) for a, b in t.rels[k] if a in idx and b in idx))
    return JTree(t.signature - shift, len(keep), tuple(rels))


def is_derivable(t: JTree) -> bool:
    """Recognise the inductive grammar by undoing the last clause."""
    if t.size == 0:
        return False
    if t.signature == 0:
        r = t.rels[0]
        if any(u == v for u, v in r) or _closure(t.size, r) != r:
            return False
        preds = [[u for u, v in r if v == w] for w in t.nodes]
        # tree-like: the predecessors of each node form a chain
        for ps in preds:
            for a, b in itertools.combinations(ps, 2):
                if (a, b) not in r and (b, a) not in r:
                    return False
        return sum(not ps for ps in preds) == 1
    r0 = t.rels[0]
    if not r0:
        return is_derivable(_restrict(t, list(t.nodes), 1))
    low = sorted({w for w in t.nodes} - {v for _, v in r0})
    rest = sorted(set(t.nodes) - set(low))
    if not low or not rest:
        return False
    if any((a, b) not in r0 for a in low for b in rest):
        return False
    for k, r in enumerate(t.rels):
        for a, b in r:
            if b in low and a in rest:
                return False
            if k > 0 and (a in low) != (b in low):
                return False
    comps = _components(t, rest)
    if not is_derivable(_restrict(t, low, 1)):
        return False
    return all(is_derivable(_restrict(t, c)) for c in comps)


def _components(t: JTree, keep: Sequence[int]) -> List[List[int]]:
    keep_set = set(keep)
    adj: Dict[int, set] = {w: set() for w in keep}
    for r in t.rels:
        for a, b in r:
            if a in keep_set and b in keep_set:
                adj[a].add(b)
                adj[b].add(a)
    seen: set = set()
    comps = []
    for w in keep:
        if w in seen:
            continue
        stack, comp = [w], []
        seen.add(w)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in adj[x] - seen:
                seen.add(y)
                stack.append(y)
        comps.append(sorted(comp))
    return comps


# roots -----------------------------------------------------------------------------


def r_star(t: JTree, k: int) -> FrozenSet[Edge]:
    """``R*_k``, the union of ``R_k..R_n``."""
    out: set = set()
    for i in range(k, t.signature + 1):
        out |= t.rels[i]
    return frozenset(out)


def hereditary_roots(t: JTree, k: int) -> List[int]:
    """The ``R*_k``-minimal nodes."""
    rs = r_star(t, k)
    targets = {b for _, b in rs}
    return [w for w in t.nodes if w not in targets]


def k_root(t: JTree, w: int, k: int) -> int:
    """The hereditary k-root ``v`` with ``v == w`` or ``v R_k w``."""
    rk = t.rel(k)
    for v in hereditary_roots(t, k):
        if v == w or (v, w) in rk:
            return v
    raise MalformedTree(f"node {w} has no hereditary {k}-root")


# Kripke semantics ------------------------------------------------------------------


@lru_cache(maxsize=1 << 10)
def _plan(f: Formula) -> Tuple[Formula, ...]:
    return tuple(subformulas(f))


def _eval_masks(f: Formula, v: Mapping[str, int], t: JTree) -> Dict[Formula, int]:
    full = (1 << t.size) - 1
    out: Dict[Formula, int] = {}
    for x in _plan(f):
        if isinstance(x, Top):
            r = full
        elif isinstance(x, Bot):
            r = 0
        elif isinstance(x, Var):
            r = v[x.name] & full
        elif isinstance(x, Not):
            r = full & ~out[x.arg]
        elif isinstance(x, And):
            r = out[x.left] & out[x.right]
        elif isinstance(x, Or):
            r = out[x.left] | out[x.right]
        elif isinstance(x, Imp):
            r = (full & ~out[x.left]) | out[x.right]
        else:
            succ = t.succ_masks(x.index)
            a = out[x.arg]
            if isinstance(x, Dia):
                r = sum(1 << w for w in t.nodes if succ[w] & a)
            else:
                r = sum(1 << w for w in t.nodes if not succ[w] & ~a)
        out[x] = r
    return out


def _to_mask(s: Iterable[int]) -> int:
    m = 0
    for w in s:
        m |= 1 << w
    return m


def _from_mask(m: int) -> FrozenSet[int]:
    return frozenset(i for i in range(m.bit_length()) if m >> i & 1)


def kripke_eval(f: Formula, v: Mapping[str, Iterable[int]], t: JTree) -> FrozenSet[int]:
    """Nodes of ``t`` where ``f`` holds; ``<k>`` looks along ``R_k``."""
    masks = {p: _to_mask(s) for p, s in v.items()}
    for p in variables(f):
        if p not in masks:
            raise KeyError(p)
    return _from_mask(_eval_masks(f, masks, t)[f])


def kripke_eval_all(f: Formula, v: Mapping[str, Iterable[int]], t: JTree) -> Dict[Formula, FrozenSet[int]]:
    """Truth sets of every subformula of ``f``."""
    masks = {p: _to_mask(s) for p, s in v.items()}
    return {x: _from_mask(m) for x, m in _eval_masks(f, masks, t).items()}


# enumeration -----------------------------------------------------------------------


def canonical_key(t: JTree) -> Tuple:
    """An isomorphism invariant that is complete for the small trees we build:
    the least relabelled edge list over all colour-respecting permutations."""
    colour = []
    for w in t.nodes:
        sig = []
        for r in t.rels:
            sig.append((sum(1 for _, b in r if b == w), sum(1 for a, _ in r if a == w)))
        colour.append(tuple(sig))
    order = sorted(t.nodes, key=lambda w: colour[w])
    groups = [list(g) for _, g in itertools.groupby(order, key=lambda w: colour[w])]
    best = None
    for choice in itertools.product(*(itertools.permutations(g) for g in groups)):
        perm = {}
        for w in itertools.chain.from_iterable(choice):
            perm[w] = len(perm)
        key = tuple(tuple(sorted((perm[a], perm[b]) for a, b in r)) for r in t.rels)
        if best is None or key < best:
            best = key
    return (t.signature, t.size, best)


def _relabel(t: JTree) -> JTree:
    """The representative whose edge list is ``canonical_key``."""
    _, size, key = canonical_key(t)
    return JTree(t.signature, size, tuple(frozenset(r) for r in key))


@lru_cache(maxsize=None)
def _rooted_parent_arrays(size: int) -> Tuple[Tuple[Optional[int], ...], ...]:
    if size == 1:
        return ((None,),)
    out = []
    for smaller in _rooted_parent_arrays(size - 1):
        for p in range(size - 1):
            out.append(smaller + (p,))
    return tuple(out)


@lru_cache(maxsize=None)
def _trees(n: int, size: int) -> Tuple[JTree, ...]:
    found: Dict[Tuple, JTree] = {}

    def add(t: JTree) -> None:
        k = canonical_key(t)
        if k not in found:
            found[k] = _relabel(t)

    if n == 0:
        for arr in _rooted_parent_arrays(size):
            add(tree0(arr))
        return tuple(sorted(found.values(), key=canonical_key))
    for t in _trees(n - 1, size):
        add(plus(t))
    for vs in range(1, size):
        for v in _trees(n - 1, vs):
            for parts in _partitions(size - vs):
                for ws in _multisets(n, parts):
                    add(graft(v, ws))
    return tuple(sorted(found.values(), key=canonical_key))


def _partitions(total: int, largest: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
    largest = total if largest is None else largest
    if total == 0:
        yield ()
        return
    for first in range(min(total, largest), 0, -1):
        for rest in _partitions(total - first, first):
            yield (first,) + rest


def _multisets(n: int, parts: Tuple[int, ...]) -> Iterator[List[JTree]]:
    """Multisets of J_n-trees with the given sizes (non-increasing)."""
    groups = [(size, len(list(g))) for size, g in itertools.groupby(parts)]
    pools = [itertools.combinations_with_replacement(_trees(n, size), cnt) for size, cnt in groups]
    for combo in itertools.product(*pools):
        yield [w for grp in combo for w in grp]


def enumerate_trees(n: int, max_size: int) -> Iterator[JTree]:
    """All J_n-trees up to isomorphism, by size and then canonical order."""
    for size in range(1, max_size + 1):
        yield from _trees(n, size)


# countermodel search ---------------------------------------------------------------


@dataclass
class Countermodel:
    tree: JTree
    valuation: Dict[str, FrozenSet[int]]
    root: int
    formula: Formula

    def recheck(self) -> bool:
        n = self.tree.signature
        mp = m_translation(self.formula, n)
        return self.root in kripke_eval(mp, self.valuation, self.tree) and self.root not in kripke_eval(
            self.formula, self.valuation, self.tree
        )


def _valuations(names: Sequence[str], size: int, budget: int, rng: random.Random) -> Iterator[Dict[str, int]]:
    bits = size * len(names)
    span = 1 << size
    if (1 << bits) <= budget:
        for code in range(1 << bits):
            yield {p: (code >> (i * size)) % span for i, p in enumerate(names)}
        return
    for _ in range(budget):
        yield {p: rng.randrange(span) for p in names}


def countermodel_search(
    f: Formula,
    n: int,
    node_budget: int = 6,
    val_budget: int = 4096,
    seed: int = 0,
) -> Optional[Countermodel]:
    """Smallest J_n-tree (in enumeration order) whose root satisfies ``M+(f)``
    but not ``f``.  None only means nothing was found within the budgets."""
    target = Imp(m_translation(f, n), f)
    names = variables(f)
    rng = random.Random(seed)
    for t in enumerate_trees(n, node_budget):
        root = t.root
        bit = 1 << root
        for v in _valuations(names, t.size, val_budget, rng):
            if not _eval_masks(target, v, t)[target] & bit:
                val = {p: _from_mask(v[p]) for p in names}
                return Countermodel(t, val, root, f)
    return None


# serialisation ---------------------------------------------------------------------


def tree_to_sexp(t: JTree) -> SExp:
    out: List[SExp] = ["jtree", str(t.signature), ["nodes"] + [str(w) for w in t.nodes]]
    for k, r in enumerate(t.rels):
        out.append(["r", str(k)] + [[str(a), str(b)] for a, b in sorted(r)])
    return out


def tree_from_sexp(x: SExp) -> JTree:
    if not isinstance(x, list) or len(x) < 3 or x[0] != "jtree":
        raise MalformedTree("expected (jtree N (nodes ...) (r K ...) ...)")
    try:
        n = int(x[1])
        nodes = x[2]
        if not isinstance(nodes, list) or nodes[0] != "nodes":
            raise MalformedTree("missing node list")
        ids = [int(w) for w in nodes[1:]]
        if ids != list(range(len(ids))):
            raise MalformedTree("nodes must be 0..size-1")
        rels: List[FrozenSet[Edge]] = [frozenset()] * (n + 1)
        for item in x[3:]:
            if not isinstance(item, list) or item[0] != "r":
                raise MalformedTree(f"bad relation entry {format_sexp(item)}")
            k = int(item[1])
            rels[k] = frozenset((int(a), int(b)) for a, b in item[2:])
    except (ValueError, IndexError, TypeError) as e:
        if isinstance(e, MalformedTree):
            raise
        raise MalformedTree(str(e)) from e
    return JTree(n, len(ids), tuple(rels))


def parse_tree(text: str) -> JTree:
    return tree_from_sexp(parse_sexp(text))
