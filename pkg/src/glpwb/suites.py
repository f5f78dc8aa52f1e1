"""Seeded property suites shared by the CLI ``fuzz`` command and the tests.

Every case draws from its own ``random.Random`` seeded by the suite name,
the run seed and the case index, so results do not depend on ``--jobs``.
Failing HSets are shrunk greedily before they are reported.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from . import nperiodic as N
from . import word as W
from .gen import probe_grid, random_hset
from .nperiodic import HSet
from .ordinal import Ordinal, as_ordinal, ell_iter, format_ordinal, omega_tower, parse_ordinal

Deriv = Callable[[HSet, int], HSet]


@dataclass
class Failure:
    case: int
    message: str
    sets: Dict[str, str] = field(default_factory=dict)

    def render(self) -> str:
        lines = [f"case {self.case}: {self.message}"]
        lines += [f"  {k} = {v}" for k, v in self.sets.items()]
        return "\n".join(lines)


@dataclass
class Report:
    suite: str
    count: int
    failures: List[Failure]

    @property
    def ok(self) -> bool:
        return not self.failures

    def render(self) -> str:
        head = f"{self.suite}: {self.count - len(self.failures)}/{self.count} passed"
        return "\n".join([head] + [f.render() for f in self.failures])


# identities -----------------------------------------------------------------------


def identity_failures(x: HSet, y: HSet, top: int = 3, deriv: Deriv = N.derivative) -> List[Tuple[str, int, int]]:
    """Which of the four GLP-algebra identities fail for ``x, y``.

    (i) ``<i>(x | y) = <i>x | <i>y``; (ii) ``<i>x = <i>(x & ~<i>x)``;
    (iii) ``<i>x & <m>y = <i>(x & <m>y)`` for ``m < i``;
    (iv) ``<i>x & <m>x = <i>x`` for ``m <= i``.
    """
    D, U, I, C, E = deriv, N.union, N.intersect, N.complement, N.equal
    bad = []
    for i in range(top + 1):
        dx = D(x, i)
        if not E(D(U(x, y), i), U(dx, D(y, i))):
            bad.append(("i", i, i))
        if not E(dx, D(I(x, C(dx)), i)):
            bad.append(("ii", i, i))
        for m in range(i + 1):
            if m < i and not E(I(dx, D(y, m)), D(I(x, D(y, m)), i)):
                bad.append(("iii", i, m))
            if not E(I(dx, D(x, m)), dx):
                bad.append(("iv", i, m))
    return bad


def _mutant(s: HSet, i: int) -> HSet:
    """A deliberately wrong derivative (keeps the set's own points)."""
    return N.union(N.derivative(s, i), s)


# shrinking ------------------------------------------------------------------------


def _word_candidates(w: W.Word) -> Iterator[W.Word]:
    if W.const_bit(w) is not None:
        return
    yield W.zeros(w.length)
    yield W.ones(w.length)
    if isinstance(w, W.Cat):
        for k, p in enumerate(w.parts):
            for q in _word_candidates(p):
                yield W.concat(*w.parts[:k], q, *w.parts[k + 1:])
    elif isinstance(w, W.Iter):
        for q in _word_candidates(w.body):
            yield W.iter_pow(q, w.e)


def _hset_candidates(s: HSet) -> Iterator[HSet]:
    if s.level == 0:
        for w in _word_candidates(s.word):
            yield N.from_word(w)
        return
    terms = s.terms()
    if len(terms) > 1:
        for k in range(len(terms)):
            yield N.from_terms(s.level, s.bound, terms[:k] + terms[k + 1:])
    for k, (b, a) in enumerate(terms):
        yield N.from_terms(s.level, s.bound, terms[:k] + [(b, None)] + terms[k + 1:])
        for b2 in _word_candidates(b):
            yield N.from_terms(s.level, s.bound, terms[:k] + [(b2, a)] + terms[k + 1:])
    if s.level > 0:
        # drop to level 0 when the tails do not matter
        for b, _ in terms:
            yield N.from_word(b)


def _size(s: HSet) -> int:
    return len(N.format_hset(s))


def shrink(sets: Sequence[HSet], fails: Callable[..., bool], steps: int = 200) -> List[HSet]:
    """Greedy shrinking: replace any argument by a smaller candidate while the
    property still fails."""
    cur = list(sets)
    for _ in range(steps):
        improved = False
        for k in range(len(cur)):
            for cand in _hset_candidates(cur[k]):
                if _size(cand) >= _size(cur[k]):
                    continue
                trial = cur[:k] + [cand] + cur[k + 1:]
                try:
                    bad = fails(*trial)
                except Exception:
                    bad = False
                if bad:
                    cur = trial
                    improved = True
                    break
            if improved:
                break
        if not improved:
            break
    return cur


# suites ---------------------------------------------------------------------------


@dataclass
class Params:
    bound: Ordinal
    signature: int = 3
    mutate: bool = False


def _rng(suite: str, seed: int, case: int) -> random.Random:
    return random.Random(f"{suite}:{seed}:{case}")


def case_glp_identities(case: int, seed: int, p: Params) -> Optional[Failure]:
    rng = _rng("glp-identities", seed, case)
    x = random_hset(rng, rng.randint(0, p.signature), p.bound)
    y = random_hset(rng, rng.randint(0, p.signature), p.bound)
    deriv: Deriv = _mutant if p.mutate else N.derivative
    bad = identity_failures(x, y, p.signature, deriv)
    if not bad:
        return None
    name, i, m = bad[0]

    def still(a: HSet, b: HSet) -> bool:
        return (name, i, m) in identity_failures(a, b, p.signature, deriv)

    x, y = shrink([x, y], still)
    return Failure(case, f"identity ({name}) fails for i={i}, m={m}", {"x": N.format_hset(x), "y": N.format_hset(y)})


def d0_oracle(s: HSet, alpha: Ordinal) -> bool:
    """``alpha`` is a limit point of ``s`` in the interval topology."""
    alpha = as_ordinal(alpha)
    if not alpha.is_limit:
        return False
    return N.sup_below(s, alpha) == alpha


def case_derivative_oracle(case: int, seed: int, p: Params) -> Optional[Failure]:
    rng = _rng("derivative-oracle", seed, case)
    s = random_hset(rng, rng.randint(0, p.signature), p.bound)
    d = N.derivative(s, 0)
    back = N.parse_hset(N.format_hset(d))
    if not N.equal(back, d):
        return Failure(case, "derivative does not re-serialize", {"s": N.format_hset(s)})
    probes = set()
    for b, _ in s.terms():
        probes.update(probe_grid(b))
    for alpha in sorted(probes, key=_key):
        if N.member(d, alpha) != d0_oracle(s, alpha):
            return Failure(case, f"d0 disagrees with the sup oracle at {alpha}", {"s": N.format_hset(s)})
    return None


def case_rank(case: int, seed: int, p: Params) -> Optional[Failure]:
    """Iterating ``d_i`` on the whole space matches the rank ``ell^(i+1)``."""
    rng = _rng("rank", seed, case)
    i = rng.randint(0, p.signature)
    k = rng.randint(1, 3)
    s = N.full(0, p.bound)
    for _ in range(k):
        s = N.derivative(s, i)
    for alpha in probe_grid(W.ones(p.bound)):
        r = ell_iter(i + 1, alpha)
        expect = r.terms != () and (not r.is_finite or r.finite_value() >= k)
        if N.member(s, alpha) != expect:
            return Failure(case, f"d_{i}^{k} disagrees with the rank at {alpha}")
    return None


def case_boolean(case: int, seed: int, p: Params) -> Optional[Failure]:
    rng = _rng("boolean", seed, case)
    x = random_hset(rng, rng.randint(0, p.signature), p.bound)
    y = random_hset(rng, rng.randint(0, p.signature), p.bound)
    ops = {
        "union": (N.union, lambda a, b: a or b),
        "intersect": (N.intersect, lambda a, b: a and b),
        "difference": (N.difference, lambda a, b: a and not b),
        "xor": (N.xor, lambda a, b: a != b),
    }
    results = {k: f(x, y) for k, (f, _) in ops.items()}
    comp = N.complement(x)
    probes = set()
    for s in (x, y):
        for b, _ in s.terms():
            probes.update(probe_grid(b))
    for alpha in sorted(probes, key=_key):
        a, b = N.member(x, alpha), N.member(y, alpha)
        if N.member(comp, alpha) == a:
            return Failure(case, f"complement wrong at {alpha}", {"x": N.format_hset(x)})
        for k, (_, g) in ops.items():
            if N.member(results[k], alpha) != g(a, b):
                return Failure(case, f"{k} wrong at {alpha}", {"x": N.format_hset(x), "y": N.format_hset(y)})
    return None


def case_axioms(case: int, seed: int, p: Params) -> Optional[Failure]:
    from .logic import SCHEMATA, Frame, axiom_instances, eval_formula, to_text

    rng = _rng("axioms", seed, case)
    n = min(p.signature, 2)
    schema = rng.choice([s for s in SCHEMATA if s != "iv" or n >= 1])
    frame = Frame(p.bound, n)
    for f, v in axiom_instances(schema, 1, depth=1, seed=rng.randrange(1 << 30), signature=n, frame=frame):
        w = frame.witness(eval_formula(f, v, frame=frame))
        if w is not None:
            sets = {k: N.format_hset(s) for k, s in sorted(v.items())}
            return Failure(case, f"axiom {schema} instance {to_text(f)} fails at {w}", sets)
    return None


def case_roundtrip(case: int, seed: int, p: Params) -> Optional[Failure]:
    from .gen import random_ordinal_below
    from .logic import parse, random_formula, to_text

    rng = _rng("roundtrip", seed, case)
    a = random_ordinal_below(rng, omega_tower(4), 3)
    if parse_ordinal(format_ordinal(a)) != a:
        return Failure(case, f"ordinal {a} does not round-trip")
    s = random_hset(rng, rng.randint(0, p.signature), p.bound)
    if N.parse_hset(N.format_hset(s)) != s and not N.equal(N.parse_hset(N.format_hset(s)), s):
        return Failure(case, "hset does not round-trip", {"s": N.format_hset(s)})
    f = random_formula(rng, ["p0", "p1"], 3, p.signature)
    if parse(to_text(f)) != f:
        return Failure(case, f"formula {to_text(f)} does not round-trip")
    return None


def case_covering(case: int, seed: int, p: Params) -> Optional[Failure]:
    from .covering import cover, verify
    from .jtree import enumerate_trees

    rng = _rng("covering", seed, case)
    n = rng.randint(0, min(p.signature, 2))
    trees = list(enumerate_trees(n, 4))
    t = rng.choice(trees)
    bad = [ch for ch in verify(cover(t), probes=60, j2=False) if not ch.ok]
    if bad:
        return Failure(case, f"cover of {t} fails {[ch.name for ch in bad]}")
    return None


SUITES: Dict[str, Callable[[int, int, Params], Optional[Failure]]] = {
    "glp-identities": case_glp_identities,
    "derivative-oracle": case_derivative_oracle,
    "rank": case_rank,
    "boolean": case_boolean,
    "axioms": case_axioms,
    "roundtrip": case_roundtrip,
    "covering": case_covering,
}

DEFAULT_BOUNDS = {
    "glp-identities": omega_tower(4),
    "derivative-oracle": omega_tower(4),
    "rank": omega_tower(5),
    "boolean": omega_tower(4),
    "axioms": omega_tower(3),
    "roundtrip": omega_tower(4),
    "covering": omega_tower(4),
}


def _key(x: Ordinal):
    from .gen import _key as k

    return k(x)


def _run_one(args: Tuple[str, int, int, Params]) -> Optional[Failure]:
    suite, case, seed, p = args
    return SUITES[suite](case, seed, p)


def run_suite(suite: str, count: int, seed: int = 0, params: Optional[Params] = None, jobs: int = 1) -> Report:
    if suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    p = params or Params(DEFAULT_BOUNDS[suite])
    work = [(suite, k, seed, p) for k in range(count)]
    if jobs > 1 and count > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_one, work))
    else:
        results = [_run_one(w) for w in work]
    return Report(suite, count, [r for r in results if r is not None])
