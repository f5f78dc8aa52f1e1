"""Level-n periodic sets: finite unions of terms ``B & ell^-1(A)``.

An :class:`HSet` of level 0 wraps a single :class:`~glpwb.word.Word` of
length ``bound``.  An HSet of level ``n >= 1`` is kept in *partition form*:
a tuple of atoms ``(A_j, B_j)`` whose tails ``A_j`` (level ``n-1``) are
pairwise disjoint and cover ``[0, bound)``.  The denotation is

    { a < bound : B_j[a] = 1 where ell(a) is in A_j }.

Partition form makes complement atom-wise and keeps intersections small.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

from . import word as W
from .ordinal import (
    ONE,
    ZERO,
    Ordinal,
    add,
    as_ordinal,
    cmp,
    ell,
    ell_iter,
    parse_ordinal,
    sub_left,
)
from .sexp import SExp, format_sexp, parse_sexp
from .word import Word

__all__ = [
    "HSet",
    "BoundMismatch",
    "from_word",
    "full",
    "empty",
    "coerce",
    "from_terms",
    "complement",
    "union",
    "intersect",
    "difference",
    "xor",
    "member",
    "min_above",
    "first_at_or_after",
    "is_empty",
    "equal",
    "lift_ell",
    "uset",
    "restrict",
    "derivative",
    "d0_term",
    "is_open",
    "is_discrete",
    "sup_below",
    "hset_to_sexp",
    "hset_from_sexp",
    "format_hset",
    "parse_hset",
]


class BoundMismatch(ValueError):
    pass


class HSet:
    __slots__ = ("level", "bound", "word", "atoms", "_hash")

    def __init__(self, level: int, bound: Ordinal, word: Optional[Word] = None, atoms=()):
        self.level = level
        self.bound = bound
        self.word = word
        self.atoms: Tuple[Tuple["HSet", Word], ...] = tuple(atoms)
        self._hash = hash((level, bound, word, self.atoms))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        return self is other or (
            isinstance(other, HSet)
            and self._hash == other._hash
            and self.level == other.level
            and self.bound == other.bound
            and self.word == other.word
            and self.atoms == other.atoms
        )

    def __repr__(self) -> str:
        return f"HSet({format_hset(self)!r})"

    # filter protocol used by the word module
    def contains(self, x: Ordinal) -> bool:
        return cmp(x, self.bound) < 0 and member(self, x)

    def min_above(self, x: Ordinal) -> Optional[Ordinal]:
        return min_above(self, x)

    def terms(self) -> List[Tuple[Word, Optional["HSet"]]]:
        if self.level == 0:
            return [(self.word, None)]
        return [(b, a) for a, b in self.atoms]


# construction -------------------------------------------------------------------


def from_word(w: Word) -> HSet:
    return HSet(0, w.length, word=w)


@lru_cache(maxsize=None)
def full(level: int, bound: Ordinal) -> HSet:
    if level == 0:
        return from_word(W.ones(bound))
    return HSet(level, bound, atoms=((full(level - 1, bound), W.ones(bound)),))


@lru_cache(maxsize=None)
def empty(level: int, bound: Ordinal) -> HSet:
    if level == 0:
        return from_word(W.zeros(bound))
    return HSet(level, bound, atoms=((full(level - 1, bound), W.zeros(bound)),))


@lru_cache(maxsize=1 << 14)
def coerce(s: HSet, level: int) -> HSet:
    """The same set presented at a higher level."""
    if level < s.level:
        raise ValueError(f"cannot lower level {s.level} to {level}")
    if level == s.level:
        return s
    if s.level == 0:
        return coerce(HSet(1, s.bound, atoms=((full(0, s.bound), s.word),)), level)
    return HSet(level, s.bound, atoms=tuple((coerce(a, level - 1), b) for a, b in s.atoms))


def _normalize(level: int, bound: Ordinal, atoms: Iterable[Tuple[HSet, Word]]) -> HSet:
    """Merge atoms carrying the same word and drop empty tails."""
    groups: List[Tuple[Word, HSet]] = []
    for a, b in atoms:
        if is_empty(a):
            continue
        for k, (b2, a2) in enumerate(groups):
            if W.equal(b, b2):
                groups[k] = (b2, union(a2, a))
                break
        else:
            groups.append((b, a))
    if not groups:
        return empty(level, bound)
    return HSet(level, bound, atoms=tuple((a, b) for b, a in groups))


def from_terms(level: int, bound, terms: Sequence[Tuple[Word, Optional[HSet]]]) -> HSet:
    """Union of terms ``B & ell^-1(A)``; a missing tail means no restriction."""
    bound = as_ordinal(bound)
    if level == 0:
        acc = W.zeros(bound)
        for b, a in terms:
            if a is not None:
                raise ValueError("level-0 terms carry no tail")
            acc = W.union(acc, b)
        return from_word(acc)
    atoms: List[Tuple[HSet, Word]] = [(full(level - 1, bound), W.zeros(bound))]
    for b, a in terms:
        if b.length != bound:
            raise BoundMismatch(f"term of length {b.length} in a set bounded by {bound}")
        if not b.has1:
            continue
        if a is None:
            atoms = [(c, W.union(v, b)) for c, v in atoms]
            continue
        if a.bound != bound:
            raise BoundMismatch("tail bound differs from set bound")
        a = coerce(a, level - 1)
        nxt: List[Tuple[HSet, Word]] = []
        for c, v in atoms:
            inside = intersect(c, a)
            outside = difference(c, a)
            if not is_empty(inside):
                nxt.append((inside, W.union(v, b)))
            if not is_empty(outside):
                nxt.append((outside, v))
        atoms = nxt
    return _normalize(level, bound, atoms)


# boolean algebra ----------------------------------------------------------------


def _check(s: HSet, t: HSet) -> None:
    if s.bound != t.bound:
        raise BoundMismatch(f"bounds differ: {s.bound} vs {t.bound}")


@lru_cache(maxsize=1 << 14)
def complement(s: HSet) -> HSet:
    if s.level == 0:
        return from_word(W.complement(s.word))
    return HSet(s.level, s.bound, atoms=tuple((a, W.complement(b)) for a, b in s.atoms))


@lru_cache(maxsize=1 << 15)
def _binary(tt: int, s: HSet, t: HSet) -> HSet:
    _check(s, t)
    n = max(s.level, t.level)
    s, t = coerce(s, n), coerce(t, n)
    if n == 0:
        return from_word(W._zip(tt, s.word, t.word))
    atoms = []
    for a, b in s.atoms:
        for a2, b2 in t.atoms:
            c = intersect(a, a2)
            if not is_empty(c):
                atoms.append((c, W._zip(tt, b, b2)))
    return _normalize(n, s.bound, atoms)


def union(s: HSet, t: HSet) -> HSet:
    return _binary(W.OR, s, t)


def intersect(s: HSet, t: HSet) -> HSet:
    return _binary(W.AND, s, t)


def difference(s: HSet, t: HSet) -> HSet:
    return _binary(W.ANDNOT, s, t)


def xor(s: HSet, t: HSet) -> HSet:
    return _binary(W.XOR, s, t)


# queries --------------------------------------------------------------------------


def member(s: HSet, alpha) -> bool:
    alpha = as_ordinal(alpha)
    if cmp(alpha, s.bound) >= 0:
        raise W.WordRangeError(f"{alpha} outside bound {s.bound}")
    if s.level == 0:
        return W.member(s.word, alpha) == 1
    x = ell(alpha)
    for a, b in s.atoms:
        if member(a, x):
            return W.member(b, alpha) == 1
    raise AssertionError("atoms do not cover the bound")


@lru_cache(maxsize=1 << 15)
def first_at_or_after(s: HSet, start: Ordinal) -> Optional[Ordinal]:
    """Least element ``>= start``, or None."""
    if s.level == 0:
        return W.first_at_or_after(s.word, start)
    best = None
    for a, b in s.atoms:
        r = W.first_at_or_after(b, start, a)
        if r is not None and (best is None or cmp(r, best) < 0):
            best = r
    return best


def min_above(s: HSet, nu) -> Optional[Ordinal]:
    """Least element strictly above ``nu``, or None."""
    return first_at_or_after(s, add(as_ordinal(nu), ONE))


def min_of(s: HSet) -> Optional[Ordinal]:
    return first_at_or_after(s, ZERO)


@lru_cache(maxsize=1 << 15)
def is_empty(s: HSet) -> bool:
    if s.level == 0:
        return not s.word.has1
    return all(not b.has1 or W.min_of(b, a) is None for a, b in s.atoms)


def equal(s: HSet, t: HSet) -> bool:
    return s == t or is_empty(xor(s, t))


# special sets -----------------------------------------------------------------------


@lru_cache(maxsize=1 << 12)
def lift_ell(a: HSet) -> HSet:
    """``ell^-1(A)`` one level up."""
    bound = a.bound
    if is_empty(a):
        return empty(a.level + 1, bound)
    rest = complement(a)
    if is_empty(rest):
        return full(a.level + 1, bound)
    return HSet(a.level + 1, bound, atoms=((a, W.ones(bound)), (rest, W.zeros(bound))))


@lru_cache(maxsize=1 << 12)
def uset(m: int, beta, bound) -> HSet:
    """``U^m_beta = {a < bound : ell^m(a) > beta}`` as a set of level ``m-1``."""
    if m < 1:
        raise ValueError("U-sets need m >= 1")
    beta, bound = as_ordinal(beta), as_ordinal(bound)
    s = from_word(W.u1_word(beta, bound))
    for _ in range(m - 1):
        s = lift_ell(s)
    return s


def restrict(s: HSet, bound) -> HSet:
    """Intersect with ``bound`` and use it as the new ambient bound."""
    bound = as_ordinal(bound)
    if cmp(bound, s.bound) > 0:
        raise BoundMismatch(f"cannot restrict {s.bound} to larger {bound}")
    if s.level == 0:
        return from_word(W.split(s.word, bound)[0])
    atoms = [(restrict(a, bound), W.split(b, bound)[0]) for a, b in s.atoms]
    return _normalize(s.level, bound, atoms)


# derivatives ---------------------------------------------------------------------------


def d0_term(b: Word, a: Optional[HSet] = None, lam=None) -> Word:
    """Interval-topology derivative of ``B & ell^-1(A)``.

    With ``lam`` the derivative is taken within ``[0, lam]`` and has length
    ``lam + 1``; otherwise within ``[0, |B|)``.
    """
    return W.d0(b, lam, a)


@lru_cache(maxsize=1 << 15)
def _word_di(w: Word, i: int) -> Tuple[Word, Word, bool]:
    """Icard derivative ``d_i`` (``i >= 1``) of a word, relative to its start.

    Returns ``(F, G, top)``: inside ``(0, |w|)`` the derivative is
    ``F | (G & U^(i+1)_0)``, and ``top`` says whether ``|w|`` itself would be
    a limit point.
    """
    length = w.length
    if not w.has1 or isinstance(w, W.Bit):
        z = W.zeros(length)
        return z, z, False
    if isinstance(w, W.Cat):
        fs, gs = [], []
        top = False
        for p in w.parts:
            f, g, t = _word_di(p, i)
            fs.append(W.setbit0(f, int(top)))
            gs.append(g)
            top = t
        return W.concat(*fs), W.concat(*gs), top
    p = w.body
    f, g, t = _word_di(p, i)
    succ = int(t)
    lim = p.first
    fw = W.substitute(W._copy_pattern(w.e, succ, 0), f, W.setbit0(f, 1))
    gw = W.substitute(W._copy_pattern(w.e, 0, lim), g, W.setbit0(g, 1))
    top = bool(lim) and ell_iter(i + 1, length).terms != ()
    return fw, gw, top


def _word_derivative(w: Word, i: int, tail: Optional[HSet] = None) -> List[Tuple[Word, Optional[HSet]]]:
    bound = w.length
    f, g, _ = _word_di(w, i)
    terms: List[Tuple[Word, Optional[HSet]]] = []
    lim_tail = uset(i, ZERO, bound)
    if tail is not None:
        terms.append((f, tail))
        lim_tail = intersect(lim_tail, tail)
    else:
        terms.append((f, None))
    terms.append((g, lim_tail))
    return terms


@lru_cache(maxsize=1 << 14)
def derivative(s: HSet, i: int) -> HSet:
    """``d_i(S)`` for the Icard topology ``theta_i``."""
    if i < 0:
        raise ValueError("negative modality index")
    if i == 0:
        if s.level == 0:
            return from_word(W.derive0(s.word))
        acc = W.zeros(s.bound)
        for a, b in s.atoms:
            if b.has1:
                acc = W.union(acc, W.derive0(b, a))
        return from_word(acc)
    level = max(s.level, i)
    terms: List[Tuple[Word, Optional[HSet]]] = []
    for b, a in s.terms():
        if not b.has1:
            continue
        tail = None if a is None else derivative(a, i - 1)
        if tail is not None and is_empty(tail):
            continue
        terms.extend(_word_derivative(b, i, tail))
    return from_terms(level, s.bound, terms)


def is_open(s: HSet, i: int) -> bool:
    return is_empty(intersect(s, derivative(complement(s), i)))


def is_discrete(s: HSet, i: int) -> bool:
    return is_empty(intersect(s, derivative(s, i)))


# independent supremum oracle ---------------------------------------------------------------


def sup_below(s: HSet, alpha) -> Optional[Ordinal]:
    """``sup (S & [0, alpha))`` by a right-to-left scan, or None when empty.

    Used as an oracle for limit points; it never calls a derivative.
    """
    alpha = as_ordinal(alpha)
    if s.level == 0:
        return W.sup_below(s.word, alpha)
    best = None
    for a, b in s.atoms:
        r = _sup_term(W.split(b, alpha)[0], a, ZERO)
        if r is not None and (best is None or cmp(r, best) > 0):
            best = r
    return best


def _sup_term(w: Word, tail: HSet, base: Ordinal) -> Optional[Ordinal]:
    """Supremum of ``{base + d : w[d] = 1, ell(base + d) in tail}``."""
    if not w.has1:
        return None
    if isinstance(w, W.Bit):
        return base if member(tail, ell(base)) else None
    if isinstance(w, W.Cat):
        for off, p in zip(reversed(w.offsets), reversed(w.parts)):
            r = _sup_term(p, tail, add(base, off))
            if r is not None:
                return r
        return None
    if _cofinal_copies(w, tail):
        return add(base, w.length)
    # otherwise no copy past the first contributes and copy 0 has no interior point
    return base if w.first and member(tail, ell(base)) else None


def _cofinal_copies(w: "W.Iter", tail: HSet) -> bool:
    """Do points occur in copies of the body arbitrarily close to the end?

    A copy ``t`` has the same interior ell-values as copy 0; its first
    position has ell-value ``ell(beta)`` when ``t`` is a successor and
    ``b1 + ell(t)`` when ``t`` is a limit.  Limits ``t`` with a given
    ``ell(t) = x`` are cofinal in ``w^e`` exactly when ``x < e``.
    """
    p = w.body
    beta = p.length
    if W.first_at_or_after(p, ONE, tail) is not None:
        return True
    if not p.first:
        return False
    if member(tail, ell(beta)):
        return True
    b1 = beta.lead_exp
    x = min_above(tail, b1)
    return x is not None and cmp(sub_left(b1, x), w.e) < 0


# text forms ---------------------------------------------------------------------------------


def hset_to_sexp(s: HSet) -> SExp:
    out: List[SExp] = ["hset", str(s.level), str(s.bound)]
    if s.level == 0:
        out.append(["term", W.word_to_sexp(s.word)])
    else:
        for a, b in s.atoms:
            out.append(["term", W.word_to_sexp(b), hset_to_sexp(a)])
    return out


def hset_from_sexp(x: SExp, bound: Optional[Ordinal] = None) -> HSet:
    if not isinstance(x, list) or not x or not isinstance(x[0], str):
        raise SyntaxError("malformed hset")
    head = x[0]
    if head == "uset":
        if len(x) not in (3, 4) or not all(isinstance(y, str) for y in x[1:]):
            raise SyntaxError(f"malformed uset: {format_sexp(x)}")
        if len(x) == 4:
            bound = parse_ordinal(x[3])
        if bound is None:
            raise SyntaxError("uset needs a bound")
        return uset(int(x[1]), parse_ordinal(x[2]), bound)
    if head != "hset" or len(x) < 3 or not isinstance(x[1], str) or not isinstance(x[2], str):
        raise SyntaxError(f"malformed hset: {format_sexp(x)}")
    try:
        level = int(x[1])
    except ValueError:
        raise SyntaxError(f"bad level {x[1]!r}") from None
    bound = parse_ordinal(x[2])
    terms = []
    for t in x[3:]:
        if not isinstance(t, list) or not t or t[0] != "term" or len(t) not in (2, 3):
            raise SyntaxError(f"malformed term: {format_sexp(t)}")
        b = W.word_from_sexp(t[1])
        if b.length != bound:
            raise SyntaxError(f"term word has length {b.length}, expected {bound}")
        a = hset_from_sexp(t[2], bound) if len(t) == 3 else None
        if a is not None and a.level >= level:
            raise SyntaxError("tail level must be below the set level")
        terms.append((b, a))
    if level == 0 and len(terms) == 1:
        return from_word(terms[0][0])
    if _is_partition(level, bound, terms):
        # already in partition form, as written by hset_to_sexp: keep it verbatim
        return HSet(level, bound, atoms=tuple((a, b) for b, a in terms))
    return from_terms(level, bound, terms)


def _is_partition(level: int, bound: Ordinal, terms) -> bool:
    if level == 0 or not terms:
        return False
    tails = [a for _, a in terms]
    if any(a is None or a.level != level - 1 or is_empty(a) for a in tails):
        return False
    words = [b for b, _ in terms]
    for i in range(len(terms)):
        for j in range(i):
            if W.equal(words[i], words[j]) or not is_empty(intersect(tails[i], tails[j])):
                return False
    acc = tails[0]
    for a in tails[1:]:
        acc = union(acc, a)
    return is_empty(complement(acc))


def format_hset(s: HSet) -> str:
    return format_sexp(hset_to_sexp(s))


def parse_hset(text: str, bound=None) -> HSet:
    return hset_from_sexp(parse_sexp(text), None if bound is None else as_ordinal(bound))
