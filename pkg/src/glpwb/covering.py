"""Covering maps from ordinal frames onto J_n-trees.

For a J_n-tree ``T`` we build an ordinal ``lam`` and a map ``f : [1, lam] -> T``
together with the preimage of every node as an :class:`HSet` over
``[0, lam + 1)`` (point 0 masked).  The construction recurses on the tree:

* ``Single``: one node, ``lam = 1``.
* ``BaseTree`` (signature 0): the children's maps are summed to ``[1, mu]``,
  repeated ``w`` times, and ``lam = mu * w`` goes to the root.
* ``LiftRoot`` (``R_0`` empty): a map ``g`` for the tree shifted one
  signature down is composed with ``ell``: ``f(a) = g(1 + ell(a))`` on
  ``[1, w^mu]``.
* ``SumLoop`` (``R_0`` nonempty): the upper subtrees' maps are summed to
  ``[1, nu]`` and repeated ``w^mu`` times; the points ``nu * g`` with ``g``
  a limit go through ``h(ell(g))`` where ``h`` covers the lower part ``Q``.

``apply`` evaluates ``f`` by descending the plan, independently of the
preimage sets, so the two can be cross-checked.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

from . import jtree as J
from . import nperiodic as N
from . import word as W
from .gen import standard_grid, word_probes
from .jtree import JTree
from .logic import Formula, Frame, eval_formula, m_translation, subformulas, to_text
from .nperiodic import HSet
from .ordinal import (
    ONE,
    ZERO,
    Ordinal,
    add,
    as_ordinal,
    cmp,
    divmod_ord,
    ell,
    mul,
    omega_pow,
    omega_tower,
    parse_ordinal,
    sub_left,
)
from .sexp import SExp, format_sexp, parse_sexp

__all__ = [
    "CoveringMap",
    "Single",
    "BaseTree",
    "LiftRoot",
    "SumLoop",
    "cover",
    "apply",
    "preimage",
    "Check",
    "verify",
    "transfer",
    "Certificate",
    "completeness_pipeline",
    "cover_to_sexp",
    "cover_from_sexp",
]


# plans ----------------------------------------------------------------------------


@dataclass(frozen=True)
class Part:
    offset: Ordinal
    cover: "CoveringMap"
    nodes: Tuple[int, ...]  # local id -> id in the enclosing tree


@dataclass(frozen=True)
class Single:
    root: int


@dataclass(frozen=True)
class BaseTree:
    root: int
    mu: Ordinal
    parts: Tuple[Part, ...]


@dataclass(frozen=True)
class LiftRoot:
    mu: Ordinal
    sub: "CoveringMap"


@dataclass(frozen=True)
class SumLoop:
    root: int
    nu: Ordinal
    mu: Ordinal
    parts: Tuple[Part, ...]
    lower: "CoveringMap"
    lower_nodes: Tuple[int, ...]


Plan = Union[Single, BaseTree, LiftRoot, SumLoop]


@dataclass(frozen=True)
class CoveringMap:
    tree: JTree
    lam: Ordinal
    plan: Optional[Plan] = field(compare=False)
    preimages: Tuple[HSet, ...] = field(compare=False)

    @property
    def omega(self) -> Ordinal:
        return add(self.lam, ONE)

    def frame(self) -> Frame:
        return Frame(self.lam, self.tree.signature)


# set plumbing ---------------------------------------------------------------------


def extend(s: HSet, bound: Ordinal) -> HSet:
    """The same set of ordinals viewed inside a larger bound."""
    if s.bound == bound:
        return s
    pad = W.zeros(sub_left(s.bound, bound))
    if s.level == 0:
        return N.from_word(W.concat(s.word, pad))
    terms = [(W.concat(b, pad), extend(a, bound)) for b, a in s.terms()]
    return N.from_terms(s.level, bound, terms)


def place(s: HSet, delta: Ordinal, bound: Ordinal) -> HSet:
    """``{delta + a : a in s, a >= 1}`` inside ``[0, bound)``.

    Correct because ``ell(delta + a) == ell(a)`` for ``a >= 1``.
    """
    rest = W.zeros(sub_left(add(delta, s.bound), bound))
    lead = W.zeros(delta)
    if s.level == 0:
        return N.from_word(W.concat(lead, W.setbit0(s.word, 0), rest))
    terms = [(W.concat(lead, W.setbit0(b, 0), rest), extend(a, bound)) for b, a in s.terms()]
    return N.from_terms(s.level, bound, terms)


def _body(b: W.Word) -> W.Word:
    return W.split(b, ONE)[1]


def repeat(s: HSet, mu: Ordinal, bound: Ordinal) -> HSet:
    """Copies of ``s & [1, nu]`` on every block ``[nu*g + 1, nu*g + nu]`` with
    ``g < w^mu`` (``mu >= 1``), inside ``[0, bound)`` where ``bound = nu*w^mu + 1``."""
    inner = sub_left(ONE, mu)

    def word(b: W.Word) -> W.Word:
        x = W.concat(W.BIT0, W.iter_pow(_body(b), ONE))
        return W.concat(W.iter_pow(x, inner), W.BIT0)

    if s.level == 0:
        return N.from_word(word(s.word))
    terms = [(word(b), extend(a, bound)) for b, a in s.terms()]
    return N.from_terms(s.level, bound, terms)


def shift_down(s: HSet) -> HSet:
    """``{x : 1 + x in s}``; ``ell(1 + x) == ell(x)`` keeps tails valid."""
    bound = sub_left(ONE, s.bound)
    if s.level == 0:
        return N.from_word(_body(s.word))
    terms = []
    for b, a in s.terms():
        if cmp(bound, s.bound) < 0:
            a = N.restrict(a, bound)
        terms.append((_body(b), a))
    return N.from_terms(s.level, bound, terms)


def singleton(alpha: Ordinal, bound: Ordinal) -> HSet:
    return N.from_word(W.concat(W.zeros(alpha), W.BIT1, W.zeros(sub_left(add(alpha, ONE), bound))))


def _masked_full(bound: Ordinal) -> W.Word:
    return W.setbit0(W.ones(bound), 0)


# construction ---------------------------------------------------------------------


def _sub(t: JTree, keep: Sequence[int], shift: int = 0) -> Tuple[JTree, Tuple[int, ...]]:
    return J._restrict(t, list(keep), shift), tuple(keep)


def _sum_parts(t: JTree, comps: Sequence[Sequence[int]]) -> Tuple[Ordinal, Tuple[Part, ...]]:
    parts = []
    off = ZERO
    for comp in comps:
        sub, ids = _sub(t, comp)
        c = cover(sub)
        parts.append(Part(off, c, ids))
        off = add(off, c.lam)
    return off, tuple(parts)


def _summed_preimages(t: JTree, total: Ordinal, parts: Sequence[Part]) -> Dict[int, HSet]:
    out: Dict[int, HSet] = {}
    bound = add(total, ONE)
    for p in parts:
        for local, node in enumerate(p.nodes):
            out[node] = place(p.cover.preimages[local], p.offset, bound)
    return out


@lru_cache(maxsize=1 << 12)
def cover(t: JTree) -> CoveringMap:
    """A covering map for a J_n-tree; memoised per tree."""
    if J.check_frame(t):
        raise J.MalformedTree("; ".join(J.check_frame(t)))
    n = t.signature
    root = t.root
    if t.size == 1:
        one = ONE
        return CoveringMap(t, one, Single(root), (singleton(one, add(one, ONE)),))
    r0 = t.rels[0]
    if n == 0 or r0:
        if n == 0:
            lower_ids = [root]
        else:
            lower_ids = sorted(set(t.nodes) - {v for _, v in r0})
        upper = sorted(set(t.nodes) - set(lower_ids))
        comps = J._components(t, upper)
        nu, parts = _sum_parts(t, comps)
        if n == 0:
            mu = ONE
            lower = None
            lower_nodes: Tuple[int, ...] = (root,)
        else:
            lt, lower_nodes = _sub(t, lower_ids, 1)
            lower = cover(lt)
            mu = lower.lam
        lam = mul(nu, omega_pow(mu))
        omega = add(lam, ONE)
        summed = _summed_preimages(t, nu, parts)
        pre: List[Optional[HSet]] = [None] * t.size
        for node, s in summed.items():
            pre[node] = repeat(s, mu, omega)
        if lower is None:
            pre[root] = singleton(lam, omega)
            return CoveringMap(t, lam, BaseTree(root, nu, parts), tuple(pre))
        lim_word = W.setbit0(W.limit_multiples(nu, omega), 0)
        nu1 = nu.lead_exp
        for local, node in enumerate(lower_nodes):
            tail = place(lower.preimages[local], nu1, omega)
            pre[node] = N.from_terms(n, omega, [(lim_word, tail)])
        plan = SumLoop(root, nu, mu, parts, lower, lower_nodes)
        return CoveringMap(t, lam, plan, tuple(pre))
    sub_tree, _ = _sub(t, list(t.nodes), 1)
    sub = cover(sub_tree)
    mu = sub_left(ONE, sub.lam)
    lam = omega_pow(mu)
    omega = add(lam, ONE)
    full = _masked_full(omega)
    pre = [N.from_terms(n, omega, [(full, extend(shift_down(g), omega))]) for g in sub.preimages]
    return CoveringMap(t, lam, LiftRoot(mu, sub), tuple(pre))


# evaluation -----------------------------------------------------------------------


def _apply_parts(parts: Sequence[Part], beta: Ordinal) -> int:
    for p in parts:
        end = add(p.offset, p.cover.lam)
        if cmp(beta, end) <= 0:
            return p.nodes[apply(p.cover, sub_left(p.offset, beta))]
    raise AssertionError("summed parts do not cover the point")


def apply(c: CoveringMap, alpha) -> int:
    """The node ``f(alpha)`` for ``1 <= alpha <= lam``."""
    alpha = as_ordinal(alpha)
    if not alpha.terms or cmp(alpha, c.lam) > 0:
        raise ValueError(f"{alpha} outside [1, {c.lam}]")
    plan = c.plan
    if plan is None:
        raise ValueError("this cover carries no plan")
    if isinstance(plan, Single):
        return plan.root
    if isinstance(plan, LiftRoot):
        return apply(plan.sub, add(ONE, ell(alpha)))
    if isinstance(plan, BaseTree):
        if alpha == c.lam:
            return plan.root
        nu = plan.mu
        parts = plan.parts
    else:
        nu = plan.nu
        parts = plan.parts
    q, r = divmod_ord(alpha, nu)
    if r.terms:
        return _apply_parts(parts, r)
    if q.is_successor:
        return _apply_parts(parts, nu)
    # alpha = nu * q with q a limit
    if isinstance(plan, BaseTree):
        return plan.root
    return plan.lower_nodes[apply(plan.lower, ell(q))]


def preimage(c: CoveringMap, nodes) -> HSet:
    """``f^-1`` of a node set."""
    acc = N.empty(0, c.omega)
    for w in nodes:
        acc = N.union(acc, c.preimages[w])
    return acc


# verification ---------------------------------------------------------------------


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""

    def to_sexp(self) -> SExp:
        out: List[SExp] = ["check", self.name, "pass" if self.ok else "fail"]
        if self.detail:
            out.append(json.dumps(self.detail))
        return out


def _tree_d(t: JTree, k: int, a: FrozenSet[int]) -> FrozenSet[int]:
    succ = t.succ_masks(k)
    mask = sum(1 << w for w in a)
    return frozenset(w for w in t.nodes if succ[w] & mask)


def _upset(t: JTree, k: int, a: FrozenSet[int]) -> FrozenSet[int]:
    out = set(a)
    for u, v in t.rel(k):
        if u in a:
            out.add(v)
    return frozenset(out)


def probe_points(c: CoveringMap, budget: int = 200) -> List[Ordinal]:
    """Frame points used for pointwise cross-checks."""
    pts = {p for p in standard_grid(c.omega) if p.terms}
    for s in c.preimages:
        for b, _ in s.terms():
            pts.update(p for p in word_probes(b, 60) if p.terms)
    pts.add(c.lam)
    ordered = sorted(pts, key=_key)
    if len(ordered) > budget:
        step = len(ordered) / budget
        ordered = [ordered[int(i * step)] for i in range(budget)] + [c.lam]
    return sorted(set(ordered), key=_key)


def _key(x: Ordinal):
    from .gen import _key as k

    return k(x)


def _open_generators(c: CoveringMap, k: int, pts: Sequence[Ordinal]) -> List[Tuple[str, HSet]]:
    """A documented family of ``theta_k``-open sets: intervals ``(a, b]`` from
    the probe points, optionally cut down by ``U^m_0`` for ``1 <= m <= k``."""
    omega = c.omega
    fr = c.frame()
    gens: List[Tuple[str, HSet]] = []
    sample = list(pts[:: max(1, len(pts) // 8)]) + [c.lam]
    sample = sorted(set(sample), key=_key)
    lows = [ZERO] + sample
    for a in lows:
        for b in sample:
            if cmp(a, b) >= 0:
                continue
            iv = N.from_word(
                W.concat(W.zeros(add(a, ONE)), W.ones(sub_left(add(a, ONE), add(b, ONE))), W.zeros(sub_left(add(b, ONE), omega)))
            )
            gens.append((f"({a}, {b}]", iv))
            for m in range(1, k + 1):
                gens.append((f"({a}, {b}] & U^{m}_0", N.intersect(iv, N.uset(m, ZERO, omega))))
    return [(name, N.intersect(g, fr.full)) for name, g in gens]


def verify(c: CoveringMap, probes: int = 200, j2: bool = True) -> List[Check]:
    """Symbolic checks of the J_n-morphism conditions and the extra
    suitability conditions."""
    t = c.tree
    n = t.signature
    fr = c.frame()
    checks: List[Check] = []

    bound = omega_tower(n + 2)
    checks.append(Check("lambda-bound", cmp(c.lam, bound) < 0, f"lambda = {c.lam}, bound w_{n + 2}"))

    lv = [w for w, s in enumerate(c.preimages) if s.level > n]
    checks.append(Check("levels", not lv, f"preimages above level {n}: {lv}" if lv else ""))

    overlap = []
    for u, v in itertools.combinations(t.nodes, 2):
        if not N.is_empty(N.intersect(c.preimages[u], c.preimages[v])):
            overlap.append((u, v))
    union = preimage(c, t.nodes)
    cover_ok = N.equal(union, fr.full)
    detail = []
    if overlap:
        detail.append(f"overlapping nodes {overlap}")
    if not cover_ok:
        detail.append(f"uncovered point {N.min_of(N.difference(fr.full, union))}")
    checks.append(Check("partition", not overlap and cover_ok, "; ".join(detail)))

    root_ok = N.equal(c.preimages[t.root], singleton(c.lam, c.omega))
    empty_nodes = [w for w in t.nodes if N.is_empty(c.preimages[w])]
    checks.append(Check("root-preimage", root_ok, "" if root_ok else "f^-1(root) is not {lambda}"))
    checks.append(Check("onto", not empty_nodes, f"nodes with empty preimage {empty_nodes}" if empty_nodes else ""))

    # (j1): f^-1(d_n A) == d_n f^-1(A) for every subset A
    bad = []
    for r in range(t.size + 1):
        for a in itertools.combinations(t.nodes, r):
            a = frozenset(a)
            lhs = preimage(c, _tree_d(t, n, a))
            rhs = fr.dia(n, preimage(c, a))
            if not N.equal(lhs, rhs):
                bad.append(sorted(a))
    checks.append(Check("j1", not bad, f"failing subsets {bad}" if bad else f"{2 ** t.size} subsets"))

    # (j3), (j4)
    bad3, bad4 = [], []
    for k in range(n):
        rs = J.r_star(t, k)
        for w in J.hereditary_roots(t, k + 1):
            above = frozenset(v for u, v in rs if u == w)
            for label, s in (("R*", above), ("R*+w", above | {w})):
                if not N.is_open(preimage(c, s), k):
                    bad3.append((k, w, label))
            if not N.is_discrete(c.preimages[w], k):
                bad4.append((k, w))
    checks.append(Check("j3", not bad3, f"not open: {bad3}" if bad3 else ""))
    checks.append(Check("j4", not bad4, f"not discrete: {bad4}" if bad4 else ""))
    # theta_0-discreteness is needed at the hereditary 1-roots (all nodes
    # when n = 0); elsewhere a lifted preimage may legitimately fail it
    need = set(J.hereditary_roots(t, 1)) if n > 0 else set(t.nodes)
    not0 = [w for w in t.nodes if not N.is_discrete(c.preimages[w], 0)]
    bad0 = [w for w in not0 if w in need]
    info = [w for w in not0 if w not in need]
    detail = f"not discrete: {bad0}" if bad0 else ""
    if info:
        detail = (detail + "; " if detail else "") + f"other nodes not discrete (not required): {info}"
    checks.append(Check("discrete-0", not bad0, detail))

    # apply agrees with the preimages pointwise
    pts = probe_points(c, probes)
    mism = []
    for p in pts if c.plan is not None else ():
        w = apply(c, p)
        hits = [v for v in t.nodes if N.member(c.preimages[v], p)]
        if hits != [w]:
            mism.append((str(p), w, hits))
    if c.plan is not None:
        checks.append(
            Check("apply-consistency", not mism, f"mismatches {mism[:5]}" if mism else f"{len(pts)} probe points")
        )

    if j2:
        # (j2), partial: images of generated opens are upsets
        badj2 = []
        tried = 0
        for k in range(n + 1):
            for name, u in _open_generators(c, k, pts):
                if not N.is_open(u, k):
                    continue
                tried += 1
                img = frozenset(w for w in t.nodes if not N.is_empty(N.intersect(c.preimages[w], u)))
                if _upset(t, k, img) != img:
                    badj2.append((k, name))
        checks.append(
            Check("j2-partial", not badj2, f"image not an upset: {badj2[:5]}" if badj2 else f"{tried} open sets")
        )
    return checks


def all_passed(checks: Sequence[Check]) -> bool:
    return all(ch.ok for ch in checks)


# transfer -------------------------------------------------------------------------


def frame_valuation(c: CoveringMap, nu: Mapping[str, Sequence[int]]) -> Dict[str, HSet]:
    """``nu'(p) = f^-1(nu(p))``."""
    return {p: preimage(c, nodes) for p, nodes in sorted(nu.items())}


def transfer(c: CoveringMap, nu: Mapping[str, Sequence[int]], f: Formula) -> Tuple[Dict[str, HSet], List[Check]]:
    """Pull a Kripke valuation back along ``f`` and check
    ``eval(theta) == f^-1(kripke_eval(theta))`` for every subformula."""
    v2 = frame_valuation(c, nu)
    fr = c.frame()
    kv = J.kripke_eval_all(f, nu, c.tree)
    checks = []
    for theta in subformulas(f):
        lhs = eval_formula(theta, v2, frame=fr)
        rhs = preimage(c, kv[theta])
        ok = N.equal(lhs, rhs)
        detail = "" if ok else f"differs at {N.min_of(N.xor(lhs, rhs))}"
        checks.append(Check(f"transfer {to_text(theta)}", ok, detail))
    return v2, checks


# pipeline -------------------------------------------------------------------------


@dataclass
class Certificate:
    formula: Formula
    signature: int
    cover: CoveringMap
    kripke_valuation: Dict[str, FrozenSet[int]]
    valuation: Dict[str, HSet]
    witness: Ordinal
    checks: List[Check]

    @property
    def ok(self) -> bool:
        return all_passed(self.checks)

    def to_sexp(self) -> SExp:
        c = self.cover
        return [
            "certificate",
            ["formula", json.dumps(to_text(self.formula))],
            ["signature", str(self.signature)],
            ["tree", J.tree_to_sexp(c.tree)],
            ["lambda", str(c.lam)],
            ["kripke-valuation"] + [[p] + [str(w) for w in sorted(s)] for p, s in sorted(self.kripke_valuation.items())],
            ["preimages"] + [["node", str(w), N.hset_to_sexp(s)] for w, s in enumerate(c.preimages)],
            ["valuation"] + [[p, N.hset_to_sexp(s)] for p, s in sorted(self.valuation.items())],
            ["witness", str(self.witness)],
            ["checks"] + [ch.to_sexp() for ch in self.checks],
        ]

    def to_json(self) -> Dict:
        c = self.cover
        return {
            "formula": to_text(self.formula),
            "signature": self.signature,
            "tree": format_sexp(J.tree_to_sexp(c.tree)),
            "lambda": str(c.lam),
            "kripke_valuation": {p: sorted(s) for p, s in sorted(self.kripke_valuation.items())},
            "preimages": {str(w): N.format_hset(s) for w, s in enumerate(c.preimages)},
            "valuation": {p: N.format_hset(s) for p, s in sorted(self.valuation.items())},
            "witness": str(self.witness),
            "checks": [{"name": ch.name, "ok": ch.ok, "detail": ch.detail} for ch in self.checks],
        }

    def render(self, fmt: str = "sexp") -> str:
        if fmt == "json":
            return json.dumps(self.to_json(), indent=2) + "\n"
        return format_sexp(self.to_sexp()) + "\n"


def completeness_pipeline(
    f: Formula,
    n: int,
    node_budget: int = 6,
    val_budget: int = 4096,
    seed: int = 0,
    probes: int = 100,
) -> Optional[Certificate]:
    """Countermodel search, covering, verification and transfer in one run.

    Returns None when no countermodel is found within the budgets.
    """
    cm = J.countermodel_search(f, n, node_budget, val_budget, seed)
    if cm is None:
        return None
    c = cover(cm.tree)
    checks = [Check("countermodel", cm.recheck(), f"root {cm.root}")]
    checks += verify(c, probes=probes)
    v2, tchecks = transfer(c, cm.valuation, f)
    checks += tchecks
    fr = c.frame()
    truth = eval_formula(f, v2, frame=fr)
    witness = c.lam
    checks.append(Check("witness", not N.member(truth, witness), f"{witness} outside the truth set"))
    mplus = eval_formula(m_translation(f, n), v2, frame=fr)
    checks.append(Check("witness-mplus", N.member(mplus, witness), "M+ holds at the witness"))
    return Certificate(f, n, c, dict(cm.valuation), v2, witness, checks)


# serialisation of covers ----------------------------------------------------------


def cover_to_sexp(c: CoveringMap) -> SExp:
    return [
        "cover",
        J.tree_to_sexp(c.tree),
        ["lambda", str(c.lam)],
        ["preimages"] + [["node", str(w), N.hset_to_sexp(s)] for w, s in enumerate(c.preimages)],
    ]


def cover_from_sexp(x: SExp) -> CoveringMap:
    """Read a cover back; the result has no plan, so ``apply`` is unavailable."""
    if not isinstance(x, list) or len(x) != 4 or x[0] != "cover":
        raise SyntaxError("expected (cover (jtree ...) (lambda L) (preimages ...))")
    t = J.tree_from_sexp(x[1])
    lam_item, pre_item = x[2], x[3]
    if not isinstance(lam_item, list) or lam_item[0] != "lambda":
        raise SyntaxError("missing lambda")
    lam = parse_ordinal(lam_item[1])
    if not isinstance(pre_item, list) or pre_item[0] != "preimages":
        raise SyntaxError("missing preimages")
    pre: Dict[int, HSet] = {}
    for item in pre_item[1:]:
        if not isinstance(item, list) or len(item) != 3 or item[0] != "node":
            raise SyntaxError("malformed preimage entry")
        pre[int(item[1])] = N.hset_from_sexp(item[2])
    if sorted(pre) != list(t.nodes):
        raise SyntaxError("preimages must list every node once")
    return CoveringMap(t, lam, None, tuple(pre[w] for w in t.nodes))


def format_cover(c: CoveringMap) -> str:
    return format_sexp(cover_to_sexp(c))


def parse_cover(text: str) -> CoveringMap:
    return cover_from_sexp(parse_sexp(text))
