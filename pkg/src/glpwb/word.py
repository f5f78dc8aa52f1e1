"""Transfinite binary words denoting hereditarily periodic sets.

A word is built from three node types:

* ``Bit(b)`` of length 1,
* ``Cat(parts)``, a concatenation of at least two parts,
* ``Iter(body, e)``, the ``w^e``-fold repetition of ``body`` (``e >= 1``).

Every word denotes the set of positions carrying a 1.  The smart
constructors :func:`concat`, :func:`iterate` and :func:`iter_pow` keep words
in a light normal form: concatenations are flat, constant runs are merged and
``A A^l`` is absorbed into ``A^l``.  Equality of denotations is decided
semantically by :func:`equal`.

Several functions take an optional *filter*: an object with ``contains(x)``
and ``min_above(x)`` methods restricting attention to positions ``d`` with
``ell(d)`` in the filter.  ``None`` means no restriction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import List, Optional, Tuple

from .ordinal import (
    ONE,
    ZERO,
    Ordinal,
    OrdinalDomainError,
    add,
    as_ordinal,
    cmp,
    divmod_ord,
    ell,
    mul,
    omega_pow,
    parse_ordinal,
    sub_left,
)
from .sexp import SExp, format_sexp, parse_sexp

__all__ = [
    "Word",
    "Bit",
    "Cat",
    "Iter",
    "EMPTY",
    "BIT0",
    "BIT1",
    "UPForm",
    "WordRangeError",
    "const",
    "zeros",
    "ones",
    "concat",
    "iterate",
    "iter_pow",
    "split",
    "member",
    "complement",
    "setbit0",
    "substitute",
    "bool_op",
    "union",
    "intersect",
    "difference",
    "xor",
    "to_up_form",
    "synchronize",
    "min_of",
    "first_at_or_after",
    "sup_below",
    "d0",
    "derive0",
    "nonempty_rel",
    "cofinal_top",
    "equal",
    "u1_word",
    "limit_multiples",
    "word_to_sexp",
    "word_from_sexp",
    "format_word",
    "parse_word",
]


class WordRangeError(IndexError):
    """Position outside the word."""


class Word:
    __slots__ = ("length", "has1", "has0", "first", "_hash")

    def __hash__(self) -> int:
        return self._hash

    def __len__(self) -> int:  # pragma: no cover - lengths are ordinals
        raise TypeError("use .length for the ordinal length")

    def __repr__(self) -> str:
        return f"Word({format_word(self)!r})"

    # filter protocol, so a word can serve as a level-0 tail
    def contains(self, x: Ordinal) -> bool:
        return cmp(x, self.length) < 0 and member(self, x) == 1

    def min_above(self, x: Ordinal) -> Optional[Ordinal]:
        return first_at_or_after(self, add(x, ONE))


class Bit(Word):
    __slots__ = ("bit",)

    def __init__(self, bit: int):
        self.bit = bit
        self.length = ONE
        self.has1 = bit == 1
        self.has0 = bit == 0
        self.first = bit
        self._hash = hash(("bit", bit))

    __hash__ = Word.__hash__

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Bit) and other.bit == self.bit


class Cat(Word):
    __slots__ = ("parts", "offsets")

    def __init__(self, parts: Tuple[Word, ...]):
        self.parts = parts
        offs = []
        c = ZERO
        for p in parts:
            offs.append(c)
            c = add(c, p.length)
        self.offsets = tuple(offs)
        self.length = c
        self.has1 = any(p.has1 for p in parts)
        self.has0 = any(p.has0 for p in parts)
        self.first = parts[0].first if parts else 0
        self._hash = hash(("cat", parts))

    __hash__ = Word.__hash__

    def __eq__(self, other: object) -> bool:
        return self is other or (
            isinstance(other, Cat) and other._hash == self._hash and other.parts == self.parts
        )


class Iter(Word):
    """``body`` repeated ``w^e`` times."""

    __slots__ = ("body", "e", "exp")

    def __init__(self, body: Word, e: Ordinal):
        self.body = body
        self.e = e
        self.exp = omega_pow(e)
        self.length = mul(body.length, self.exp)
        self.has1 = body.has1
        self.has0 = body.has0
        self.first = body.first
        self._hash = hash(("iter", body, e))

    __hash__ = Word.__hash__

    def __eq__(self, other: object) -> bool:
        return self is other or (
            isinstance(other, Iter)
            and other._hash == self._hash
            and other.e == self.e
            and other.body == self.body
        )


EMPTY: Word = Cat(())
BIT0 = Bit(0)
BIT1 = Bit(1)
BITS = (BIT0, BIT1)


def const_bit(w: Word) -> Optional[int]:
    """The constant value of a nonempty constant word, else None."""
    if not w.length.terms:
        return None
    if not w.has1:
        return 0
    if not w.has0:
        return 1
    return None


# construction -------------------------------------------------------------


def _const_parts(b: int, length: Ordinal) -> List[Word]:
    out: List[Word] = []
    for e, c in length.terms:
        unit = BITS[b] if not e.terms else Iter(BITS[b], e)
        out.extend([unit] * c)
    return out


def const(b: int, length) -> Word:
    """The constant word ``b`` of the given length."""
    parts = _const_parts(b, as_ordinal(length))
    if len(parts) == 1:
        return parts[0]
    return Cat(tuple(parts))


def zeros(length) -> Word:
    return const(0, length)


def ones(length) -> Word:
    return const(1, length)


def _body_parts(w: Word) -> Tuple[Word, ...]:
    return w.parts if isinstance(w, Cat) else (w,)


def _normalize_parts(parts: List[Word]) -> Word:
    merged: List[Word] = []
    i = 0
    while i < len(parts):
        p = parts[i]
        b = const_bit(p)
        j = i + 1
        if b is not None:
            total = p.length
            while j < len(parts) and const_bit(parts[j]) == b:
                total = add(total, parts[j].length)
                j += 1
            if j - i > 1:
                merged.extend(_const_parts(b, total))
            else:
                merged.append(p)
        else:
            merged.append(p)
        i = j
    stack: List[Word] = []
    for p in merged:
        if isinstance(p, Iter) and const_bit(p) is None:
            bp = _body_parts(p.body)
            k = len(bp)
            while True:
                if len(stack) >= k and tuple(stack[-k:]) == bp:
                    del stack[-k:]
                elif (
                    stack
                    and isinstance(stack[-1], Iter)
                    and stack[-1].body == p.body
                    and cmp(stack[-1].e, p.e) < 0
                ):
                    stack.pop()
                else:
                    break
        stack.append(p)
    if not stack:
        return EMPTY
    if len(stack) == 1:
        return stack[0]
    return Cat(tuple(stack))


def concat(*ws: Word) -> Word:
    parts: List[Word] = []
    for w in ws:
        if isinstance(w, Cat):
            parts.extend(w.parts)
        elif w.length.terms:
            parts.append(w)
    if len(parts) == 1:
        return parts[0]
    return _concat_parts(tuple(parts))


@lru_cache(maxsize=1 << 16)
def _concat_parts(parts: Tuple[Word, ...]) -> Word:
    return _normalize_parts(list(parts))


def _min_period(parts: Tuple[Word, ...]) -> int:
    m = len(parts)
    for d in range(1, m // 2 + 1):
        if m % d == 0 and all(parts[i] == parts[i % d] for i in range(d, m)):
            return d
    return m


@lru_cache(maxsize=1 << 16)
def iter_pow(a: Word, e: Ordinal) -> Word:
    """``a`` repeated ``w^e`` times, ``e >= 1``."""
    if not e.terms:
        return a
    if not a.length.terms:
        return EMPTY
    b = const_bit(a)
    if b is not None:
        return const(b, mul(a.length, omega_pow(e)))
    if isinstance(a, Iter):
        return iter_pow(a.body, add(a.e, e))
    if isinstance(a, Cat):
        d = _min_period(a.parts)
        if d < len(a.parts):
            return iter_pow(concat(*a.parts[:d]), e)
    return Iter(a, e)


def iterate(a: Word, beta) -> Word:
    """``a`` repeated ``beta`` times; ``beta = 0`` gives the empty word."""
    beta = as_ordinal(beta)
    parts: List[Word] = []
    for e, c in beta.terms:
        unit = a if not e.terms else iter_pow(a, e)
        parts.extend([unit] * c)
    return concat(*parts)


# access -------------------------------------------------------------------


def member(w: Word, alpha) -> int:
    """Bit of ``w`` at position ``alpha``."""
    alpha = as_ordinal(alpha)
    if cmp(alpha, w.length) >= 0:
        raise WordRangeError(f"position {alpha} outside word of length {w.length}")
    while True:
        if isinstance(w, Bit):
            return w.bit
        if not w.has1:
            return 0
        if not w.has0:
            return 1
        if isinstance(w, Iter):
            _, alpha = divmod_ord(alpha, w.body.length)
            w = w.body
            continue
        for off, p in zip(reversed(w.offsets), reversed(w.parts)):
            if cmp(off, alpha) <= 0:
                alpha = sub_left(off, alpha)
                w = p
                break


@lru_cache(maxsize=1 << 16)
def split(w: Word, alpha: Ordinal) -> Tuple[Word, Word]:
    """``(prefix, suffix)`` with ``|prefix| = alpha``."""
    alpha = as_ordinal(alpha)
    k = cmp(alpha, w.length)
    if k > 0:
        raise WordRangeError(f"cannot split word of length {w.length} at {alpha}")
    if not alpha.terms:
        return EMPTY, w
    if k == 0:
        return w, EMPTY
    b = const_bit(w)
    if b is not None:
        return const(b, alpha), const(b, sub_left(alpha, w.length))
    if isinstance(w, Iter):
        a = w.body
        q, r = divmod_ord(alpha, a.length)
        a1, a2 = split(a, r)
        return concat(iterate(a, q), a1), concat(a2, w)
    assert isinstance(w, Cat)
    for i, (off, p) in enumerate(zip(w.offsets, w.parts)):
        end = add(off, p.length)
        if cmp(alpha, end) < 0:
            p1, p2 = split(p, sub_left(off, alpha))
            return concat(*w.parts[:i], p1), concat(p2, *w.parts[i + 1:])
    raise AssertionError("unreachable")


@lru_cache(maxsize=1 << 16)
def complement(w: Word) -> Word:
    if isinstance(w, Bit):
        return BITS[1 - w.bit]
    if isinstance(w, Iter):
        return Iter(complement(w.body), w.e)
    return Cat(tuple(complement(p) for p in w.parts)) if w.parts else EMPTY


def setbit0(w: Word, b: int) -> Word:
    if w.first == b:
        return w
    return concat(BITS[b], split(w, ONE)[1])


def substitute(w: Word, c0: Word, c1: Word) -> Word:
    """Replace every 0 of ``w`` by ``c0`` and every 1 by ``c1``.

    Both blocks must have the same length; the result has length
    ``|c0| * |w|``.
    """
    memo = {}

    def go(x: Word) -> Word:
        got = memo.get(x)
        if got is not None:
            return got
        if isinstance(x, Bit):
            r = c1 if x.bit else c0
        elif isinstance(x, Iter):
            r = iter_pow(go(x.body), x.e)
        else:
            r = concat(*[go(p) for p in x.parts])
        memo[x] = r
        return r

    return go(w)


# ultimately periodic forms --------------------------------------------------


@dataclass(frozen=True)
class UPForm:
    """``offset`` followed by ``period`` repeated ``w^e`` times."""

    offset: Word
    period: Word
    e: Ordinal

    @property
    def exponent(self) -> Ordinal:
        return omega_pow(self.e)

    @property
    def length(self) -> Ordinal:
        return add(self.offset.length, mul(self.period.length, self.exponent))

    def to_word(self) -> Word:
        return concat(self.offset, iter_pow(self.period, self.e))


def _up_form_pow(w: Word) -> UPForm:
    if isinstance(w, Iter):
        a = w.body
        t = a.length.terms
        if len(t) == 1:
            return UPForm(EMPTY, a, w.e)
        if w.e == ONE:
            # A^w = A1 (A2 A1)^w with |A1| the leading CNF term of |A|
            a1, a2 = split(a, Ordinal(t[:1]))
            return UPForm(a1, concat(a2, a1), ONE)
        # A^(w^e) = (A^w)^(w^e') with 1 + e' = e, and |A^w| is a power of w
        return UPForm(EMPTY, iter_pow(a, ONE), sub_left(ONE, w.e))
    if isinstance(w, Cat):
        inner = _up_form_pow(w.parts[-1])
        return UPForm(concat(*w.parts[:-1], inner.offset), inner.period, inner.e)
    raise OrdinalDomainError("a bit has no periodic form")


def to_up_form(w: Word, lam=None) -> UPForm:
    """Offset/period/exponent form of ``w`` restricted to the limit ``lam``.

    The period length has the form ``w^p * n`` and the exponent is ``w^e``.
    """
    lam = w.length if lam is None else as_ordinal(lam)
    if not lam.is_limit:
        raise OrdinalDomainError(f"{lam} is not a limit ordinal")
    x = split(w, lam)[0]
    head, _ = lam.split_last()
    h1, h2 = split(x, head)
    u = _up_form_pow(h2)
    return UPForm(concat(h1, u.offset), u.period, u.e)


def _regroup(u: UPForm, p: Ordinal) -> UPForm:
    """Use ``period^(w^d)`` as the period so its length is ``w^p``."""
    px = u.period.length.lead_exp
    if cmp(px, p) == 0:
        return u
    d = sub_left(px, p)
    return UPForm(u.offset, iter_pow(u.period, d), sub_left(d, u.e))


def _repeat_period(u: UPForm, k: int) -> UPForm:
    if k == 1:
        return u
    return UPForm(u.offset, concat(*[u.period] * k), u.e)


def _whole_periods(u: UPForm, gamma: Ordinal) -> UPForm:
    """Move ``gamma`` whole copies of the period into the offset."""
    return UPForm(concat(u.offset, iterate(u.period, gamma)), u.period, u.e)


def _aligned(u: UPForm, unit: Ordinal) -> UPForm:
    _, s = divmod_ord(u.offset.length, unit)
    return _whole_periods(u, ONE) if s.terms else u


def synchronize(x: UPForm, y: UPForm) -> Tuple[UPForm, UPForm]:
    """Rewrite two forms of equal length with equal offset lengths, equal
    period lengths and equal exponents."""
    if x.length != y.length:
        raise OrdinalDomainError("synchronize needs forms of equal length")
    px, py = x.period.length.lead_exp, y.period.length.lead_exp
    if cmp(px, py) < 0:
        x = _regroup(x, py)
    elif cmp(py, px) < 0:
        y = _regroup(y, px)
    p = x.period.length.lead_exp
    cx = x.period.length.terms[0][1]
    cy = y.period.length.terms[0][1]
    m = cx * cy // gcd(cx, cy)
    x, y = _repeat_period(x, m // cx), _repeat_period(y, m // cy)
    swap = cmp(x.offset.length, y.offset.length) < 0
    if swap:
        x, y = y, x
    # from here on |x.offset| >= |y.offset|
    if x.e != ONE:
        x = _whole_periods(x, omega_pow(ONE))
        mu = sub_left(y.offset.length, x.offset.length)
        lam, rest = divmod_ord(mu, y.period.length)
        assert not rest.terms
        y = _whole_periods(y, lam)
    else:
        unit = omega_pow(p)
        x, y = _aligned(x, unit), _aligned(y, unit)
        if cmp(x.offset.length, y.offset.length) < 0:
            x, y, swap = y, x, not swap
        delta = sub_left(y.offset.length, x.offset.length)
        q, r = divmod_ord(delta, y.period.length)
        y = _whole_periods(y, q)
        if r.terms:
            p1, p2 = split(y.period, r)
            y = UPForm(concat(y.offset, p1), concat(p2, p1), y.e)
    return (y, x) if swap else (x, y)


# boolean operations ---------------------------------------------------------

# a truth table is a 4-bit int; bit (2*a + b) holds op(a, b)
OR, AND, XOR, ANDNOT = 0b1110, 0b1000, 0b0110, 0b0100


def _unary(g: Tuple[int, int], w: Word) -> Word:
    if g == (0, 1):
        return w
    if g == (1, 0):
        return complement(w)
    return const(g[0], w.length)


@lru_cache(maxsize=1 << 17)
def _zip(tt: int, x: Word, y: Word) -> Word:
    length = x.length
    if not length.terms:
        return EMPTY
    cx, cy = const_bit(x), const_bit(y)
    if cx is not None:
        return _unary(((tt >> (2 * cx)) & 1, (tt >> (2 * cx + 1)) & 1), y)
    if cy is not None:
        return _unary(((tt >> cy) & 1, (tt >> (2 + cy)) & 1), x)
    if x == y:
        return _unary((tt & 1, (tt >> 3) & 1), x)
    if length.is_finite:
        n = length.finite_value()
        return concat(
            *[BITS[(tt >> (2 * member(x, i) + member(y, i))) & 1] for i in range(n)]
        )
    t = length.terms
    if len(t) > 1 or t[0][1] > 1:
        head, _ = length.split_last()
        x1, x2 = split(x, head)
        y1, y2 = split(y, head)
        return concat(_zip(tt, x1, y1), _zip(tt, x2, y2))
    if isinstance(x, Cat) and isinstance(y, Cat) and x.offsets == y.offsets:
        return concat(*[_zip(tt, a, b) for a, b in zip(x.parts, y.parts)])
    if isinstance(x, Iter) and isinstance(y, Iter) and x.body.length == y.body.length:
        return iter_pow(_zip(tt, x.body, y.body), x.e)
    ux, uy = synchronize(to_up_form(x), to_up_form(y))
    return concat(
        _zip(tt, ux.offset, uy.offset), iter_pow(_zip(tt, ux.period, uy.period), ux.e)
    )


def bool_op(op: str, x: Word, y: Optional[Word] = None, lam=None) -> Word:
    """Pointwise boolean combination restricted to ``[0, lam)``."""
    lam = x.length if lam is None else as_ordinal(lam)
    x = split(x, lam)[0]
    if op == "complement":
        return complement(x)
    if y is None:
        raise ValueError(f"{op} needs two operands")
    y = split(y, lam)[0]
    tt = {"union": OR, "intersect": AND, "xor": XOR, "difference": ANDNOT}[op]
    return _zip(tt, x, y)


def _same_length(x: Word, y: Word) -> None:
    if x.length != y.length:
        raise OrdinalDomainError(f"length mismatch: {x.length} vs {y.length}")


def union(x: Word, y: Word) -> Word:
    _same_length(x, y)
    return _zip(OR, x, y)


def intersect(x: Word, y: Word) -> Word:
    _same_length(x, y)
    return _zip(AND, x, y)


def difference(x: Word, y: Word) -> Word:
    _same_length(x, y)
    return _zip(ANDNOT, x, y)


def xor(x: Word, y: Word) -> Word:
    _same_length(x, y)
    return _zip(XOR, x, y)


def equal(x: Word, y: Word, lam=None) -> bool:
    """Do ``x`` and ``y`` denote the same set on ``[0, lam)``?"""
    if lam is None:
        _same_length(x, y)
        return x == y or not _zip(XOR, x, y).has1
    return not bool_op("xor", x, y, lam).has1


# filters --------------------------------------------------------------------


def _in(flt, x: Ordinal) -> bool:
    return True if flt is None else flt.contains(x)


def _next_after(flt, x: Ordinal) -> Optional[Ordinal]:
    return add(x, ONE) if flt is None else flt.min_above(x)


def _hits_between(flt, lo: Ordinal, hi: Ordinal) -> bool:
    """Does the filter meet the open interval ``(lo, hi)``?"""
    m = _next_after(flt, lo)
    return m is not None and cmp(m, hi) < 0


# search ---------------------------------------------------------------------


@lru_cache(maxsize=1 << 16)
def _first_rel(w: Word, flt) -> Optional[Ordinal]:
    """Least ``d > 0`` with ``w[d] = 1`` and ``ell(d)`` in the filter."""
    if not w.has1 or isinstance(w, Bit):
        return None
    if isinstance(w, Cat):
        for j, (off, p) in enumerate(zip(w.offsets, w.parts)):
            if j and p.first and _in(flt, ell(off)):
                return off
            r = _first_rel(p, flt)
            if r is not None:
                return add(off, r)
        return None
    p = w.body
    r = _first_rel(p, flt)
    if r is not None:
        return r
    if not p.first:
        return None
    beta = p.length
    if _in(flt, ell(beta)):
        return beta
    b1 = beta.lead_exp
    m = _next_after(flt, b1)
    if m is None:
        return None
    x = sub_left(b1, m)
    if cmp(x, w.e) < 0:
        return mul(beta, omega_pow(x))
    return None


def first_at_or_after(w: Word, start, flt=None) -> Optional[Ordinal]:
    """Least ``a >= start`` with ``w[a] = 1`` and ``ell(a)`` in the filter."""
    start = as_ordinal(start)
    if cmp(start, w.length) >= 0:
        return None
    x = split(w, start)[1]
    if x.first and _in(flt, ell(start)):
        return start
    r = _first_rel(x, flt)
    return None if r is None else add(start, r)


def min_of(w: Word, flt=None) -> Optional[Ordinal]:
    return first_at_or_after(w, ZERO, flt)


def _sup(w: Word) -> Optional[Ordinal]:
    if isinstance(w, Bit):
        return ZERO if w.bit else None
    if not w.has1:
        return None
    if isinstance(w, Iter):
        return w.length
    for off, p in zip(reversed(w.offsets), reversed(w.parts)):
        s = _sup(p)
        if s is not None:
            return add(off, s)
    return None


def sup_below(w: Word, alpha) -> Optional[Ordinal]:
    """``sup {g < alpha : w[g] = 1}``, or None when that set is empty."""
    return _sup(split(w, as_ordinal(alpha))[0])


# interval derivative ----------------------------------------------------------


@lru_cache(maxsize=1 << 16)
def nonempty_rel(w: Word, flt) -> bool:
    """Is there ``d`` in ``(0, |w|)`` with ``w[d] = 1`` and ``ell(d)`` in the filter?"""
    if not w.has1 or isinstance(w, Bit):
        return False
    if isinstance(w, Cat):
        for j, (off, p) in enumerate(zip(w.offsets, w.parts)):
            if j and p.first and _in(flt, ell(off)):
                return True
            if nonempty_rel(p, flt):
                return True
        return False
    p = w.body
    if nonempty_rel(p, flt):
        return True
    if not p.first:
        return False
    beta = p.length
    b1 = beta.lead_exp
    return _in(flt, ell(beta)) or _hits_between(flt, b1, add(b1, w.e))


def cofinal_top(w: Word, flt=None) -> bool:
    """Is the filtered set of ``w`` cofinal in the limit ``|w|``?"""
    while isinstance(w, Cat) and w.parts:
        w = w.parts[-1]
    if not isinstance(w, Iter):
        return False
    return nonempty_rel(w, flt)


def _copy_pattern(e: Ordinal, succ: int, lim) -> Word:
    """Bit word of length ``w^e``: 0 at 0, ``succ`` at successors, and at a
    limit ``t`` either the constant ``lim`` or ``ell(t) > lim`` when ``lim``
    is an ordinal threshold."""
    if isinstance(lim, Ordinal):
        u = u1_word(lim, omega_pow(e))
        if not succ:
            return u
        return _zip(OR, u, _copy_pattern(e, 1, 0))
    if e == ONE:
        return concat(BIT0, const(succ, omega_pow(ONE)))
    block = concat(BITS[lim], const(succ, omega_pow(ONE)))
    return concat(BIT0, const(succ, omega_pow(ONE)), iter_pow(block, sub_left(ONE, e)))


@lru_cache(maxsize=1 << 16)
def derive0(w: Word, flt=None) -> Word:
    """Interval-topology derivative of the filtered set of ``w`` inside ``[0, |w|)``.

    Position 0 of every part is ignored when collecting limit points, which
    is harmless since single points never change a derivative.
    """
    if not w.has1:
        return zeros(w.length)
    if isinstance(w, Bit):
        return BIT0
    if isinstance(w, Cat):
        out = []
        prev = None
        for p in w.parts:
            b = 0
            if prev is not None and prev.length.is_limit and cofinal_top(prev, flt):
                b = 1
            out.append(setbit0(derive0(p, flt), b))
            prev = p
        return concat(*out)
    p = w.body
    beta = p.length
    c = derive0(p, flt)
    succ = int(beta.is_limit and cofinal_top(p, flt))
    if nonempty_rel(p, flt):
        lim = 1
    elif not p.first:
        lim = 0
    elif _in(flt, ell(beta)):
        lim = 1
    else:
        b1 = beta.lead_exp
        m = _next_after(flt, b1)
        if m is None:
            lim = 0
        else:
            em = sub_left(b1, m)
            lim = em if cmp(em, w.e) < 0 else 0
    pattern = _copy_pattern(w.e, succ, lim)
    return substitute(pattern, setbit0(c, 0), setbit0(c, 1))


def d0(w: Word, lam=None, flt=None) -> Word:
    """Limit points of ``w`` within ``[0, lam]``; the result has length ``lam + 1``.

    Without ``lam`` the derivative is taken inside ``[0, |w|)`` and has the
    length of ``w``.
    """
    if lam is None:
        return derive0(w, flt)
    lam = as_ordinal(lam)
    x = split(w, lam)[0]
    top = int(lam.is_limit and cofinal_top(x, flt))
    return concat(derive0(x, flt), BITS[top])


# special sets -------------------------------------------------------------------


def u1_word(mu, length) -> Word:
    """``{a < length : ell(a) > mu}``, the multiples of ``w^(mu+1)`` from ``w^(mu+1)`` on."""
    mu, length = as_ordinal(mu), as_ordinal(length)
    k = omega_pow(add(mu, ONE))
    q, r = divmod_ord(length, k)
    if not q.terms:
        return zeros(length)
    block = concat(BIT1, zeros(k))
    parts = [zeros(k), iterate(block, sub_left(ONE, q))]
    if r.terms:
        parts.append(split(block, r)[0])
    return concat(*parts)


def limit_multiples(beta, length) -> Word:
    """``{beta * a : a limit or 0} & [0, length)``, the copy starts of a period of length ``beta``."""
    beta, length = as_ordinal(beta), as_ordinal(length)
    nu = beta.lead_exp
    return setbit0(u1_word(nu, length), 1) if length.terms else EMPTY


# text forms -----------------------------------------------------------------------


def word_to_sexp(w: Word) -> SExp:
    if isinstance(w, Bit):
        return ["bit", str(w.bit)]
    if isinstance(w, Iter):
        return ["iter", word_to_sexp(w.body), str(w.exp)]
    return ["cat"] + [word_to_sexp(p) for p in w.parts]


def word_from_sexp(x: SExp) -> Word:
    if not isinstance(x, list) or not x or not isinstance(x[0], str):
        raise SyntaxError(f"malformed word: {format_sexp(x) if x else x!r}")
    head = x[0]
    if head == "bit" and len(x) == 2 and x[1] in ("0", "1"):
        return BITS[int(x[1])]
    if head == "cat":
        return concat(*[word_from_sexp(y) for y in x[1:]])
    if head == "iter" and len(x) == 3 and isinstance(x[2], str):
        return iterate(word_from_sexp(x[1]), parse_ordinal(x[2]))
    raise SyntaxError(f"malformed word: {format_sexp(x)}")


def format_word(w: Word) -> str:
    return format_sexp(word_to_sexp(w))


def parse_word(text: str) -> Word:
    return word_from_sexp(parse_sexp(text))
