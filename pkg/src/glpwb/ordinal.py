"""Ordinals below epsilon_0 in Cantor normal form.

An :class:`Ordinal` is an immutable tuple of ``(exponent, coefficient)`` pairs
with strictly decreasing exponents.  Exponents are themselves ordinals, so the
representation is hereditary.  Python ints coerce transparently::

    >>> w = OMEGA
    >>> str(1 + w), str(w + 1), str(w * w)
    ('w', 'w+1', 'w^(2)')
"""

from __future__ import annotations

import re
from functools import lru_cache
from typing import Iterator, Tuple, Union

__all__ = [
    "Ordinal",
    "OrdinalDomainError",
    "ZERO",
    "ONE",
    "OMEGA",
    "as_ordinal",
    "add",
    "mul",
    "omega_pow",
    "cmp",
    "sub_left",
    "ell",
    "ell_iter",
    "divmod_ord",
    "divmod_pow",
    "is_multiple",
    "omega_tower",
    "parse_ordinal",
]


class OrdinalDomainError(ArithmeticError):
    """Raised when an ordinal operation is undefined for its arguments."""


Term = Tuple["Ordinal", int]
OrdLike = Union["Ordinal", int]


class Ordinal:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Tuple[Term, ...] = ()):
        self.terms = terms
        self._hash = hash(terms)

    # construction ---------------------------------------------------------

    @staticmethod
    def of_int(n: int) -> "Ordinal":
        if n < 0:
            raise OrdinalDomainError(f"negative ordinal {n}")
        return _int_ord(n)

    # predicates -----------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not self.terms[0][0].terms)

    @property
    def is_limit(self) -> bool:
        return bool(self.terms) and bool(self.terms[-1][0].terms)

    @property
    def is_successor(self) -> bool:
        return bool(self.terms) and not self.terms[-1][0].terms

    @property
    def lead_exp(self) -> "Ordinal":
        if not self.terms:
            raise OrdinalDomainError("zero has no leading exponent")
        return self.terms[0][0]

    @property
    def is_power_of_omega(self) -> bool:
        return len(self.terms) == 1 and self.terms[0][1] == 1

    def finite_value(self) -> int:
        if not self.is_finite:
            raise OrdinalDomainError(f"{self} is infinite")
        return self.terms[0][1] if self.terms else 0

    def pred(self) -> "Ordinal":
        """Predecessor of a successor ordinal."""
        if not self.is_successor:
            raise OrdinalDomainError(f"{self} has no predecessor")
        *head, (e, c) = self.terms
        if c == 1:
            return Ordinal(tuple(head))
        return Ordinal(tuple(head) + ((e, c - 1),))

    def last_term(self) -> "Ordinal":
        """The last CNF summand omega^e * 1 (not counting the coefficient)."""
        if not self.terms:
            raise OrdinalDomainError("zero has no last term")
        return omega_pow(self.terms[-1][0])

    def split_last(self) -> Tuple["Ordinal", "Ordinal"]:
        """Return ``(head, w^e)`` with ``self == head + w^e`` and ``e = ell(self)``."""
        *head, (e, c) = self.terms
        if c > 1:
            head.append((e, c - 1))
        return Ordinal(tuple(head)), omega_pow(e)

    # comparison -----------------------------------------------------------

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if other.__class__ is Ordinal:
            return self is other or self.terms == other.terms
        if isinstance(other, Ordinal):
            return self is other or self.terms == other.terms
        if isinstance(other, int):
            return self.terms == _int_ord(other).terms if other >= 0 else False
        return NotImplemented

    def __lt__(self, other: OrdLike) -> bool:
        return cmp(self, as_ordinal(other)) < 0

    def __le__(self, other: OrdLike) -> bool:
        return cmp(self, as_ordinal(other)) <= 0

    def __gt__(self, other: OrdLike) -> bool:
        return cmp(self, as_ordinal(other)) > 0

    def __ge__(self, other: OrdLike) -> bool:
        return cmp(self, as_ordinal(other)) >= 0

    # arithmetic -----------------------------------------------------------

    def __add__(self, other: OrdLike) -> "Ordinal":
        return add(self, as_ordinal(other))

    def __radd__(self, other: OrdLike) -> "Ordinal":
        return add(as_ordinal(other), self)

    def __mul__(self, other: OrdLike) -> "Ordinal":
        return mul(self, as_ordinal(other))

    def __rmul__(self, other: OrdLike) -> "Ordinal":
        return mul(as_ordinal(other), self)

    def __pow__(self, other: OrdLike) -> "Ordinal":
        if self != OMEGA:
            raise OrdinalDomainError("only base omega exponentiation is supported")
        return omega_pow(as_ordinal(other))

    # text -----------------------------------------------------------------

    def __str__(self) -> str:
        return format_ordinal(self)

    def __repr__(self) -> str:
        return f"Ordinal({format_ordinal(self)!r})"

    def __iter__(self) -> Iterator[Term]:
        return iter(self.terms)


@lru_cache(maxsize=None)
def _int_ord(n: int) -> Ordinal:
    return Ordinal(((ZERO, n),)) if n else ZERO


ZERO = Ordinal(())
ONE = Ordinal(((ZERO, 1),))
OMEGA = Ordinal(((ONE, 1),))


def as_ordinal(x: OrdLike) -> Ordinal:
    if isinstance(x, Ordinal):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return Ordinal.of_int(x)
    raise TypeError(f"cannot interpret {x!r} as an ordinal")


@lru_cache(maxsize=1 << 16)
def _cmp(a: Ordinal, b: Ordinal) -> int:
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        if ea is not eb:
            c = _cmp(ea, eb)
            if c:
                return c
        if ca != cb:
            return -1 if ca < cb else 1
    la, lb = len(a.terms), len(b.terms)
    return (la > lb) - (la < lb)


def cmp(a: OrdLike, b: OrdLike) -> int:
    """Three-way comparison: -1, 0 or 1."""
    a, b = as_ordinal(a), as_ordinal(b)
    if a is b or a.terms == b.terms:
        return 0
    return _cmp(a, b)


@lru_cache(maxsize=1 << 16)
def _add(a: Ordinal, b: Ordinal) -> Ordinal:
    eb, cb = b.terms[0]
    head = []
    for e, c in a.terms:
        k = cmp(e, eb)
        if k > 0:
            head.append((e, c))
        elif k == 0:
            head.append((e, c + cb))
            return Ordinal(tuple(head) + b.terms[1:])
        else:
            break
    return Ordinal(tuple(head) + b.terms)


def add(a: OrdLike, b: OrdLike) -> Ordinal:
    a, b = as_ordinal(a), as_ordinal(b)
    if not b.terms:
        return a
    if not a.terms:
        return b
    return _add(a, b)


@lru_cache(maxsize=1 << 16)
def _mul(a: Ordinal, b: Ordinal) -> Ordinal:
    a1, ca = a.terms[0]
    out = []
    for e, k in b.terms:
        if e.terms:
            out.append((add(a1, e), k))
        else:
            out.append((a1, ca * k))
            out.extend(a.terms[1:])
    return Ordinal(tuple(out))


def mul(a: OrdLike, b: OrdLike) -> Ordinal:
    a, b = as_ordinal(a), as_ordinal(b)
    if not a.terms or not b.terms:
        return ZERO
    if b == ONE:
        return a
    if a == ONE:
        return b
    return _mul(a, b)


def omega_pow(a: OrdLike) -> Ordinal:
    return Ordinal(((as_ordinal(a), 1),))


def sub_left(a: OrdLike, b: OrdLike) -> Ordinal:
    """The unique ``g`` with ``a + g == b``; requires ``a <= b``."""
    a, b = as_ordinal(a), as_ordinal(b)
    if cmp(a, b) > 0:
        raise OrdinalDomainError(f"sub_left({a}, {b}) undefined: {a} > {b}")
    ta, tb = a.terms, b.terms
    for i, (ea, ca) in enumerate(ta):
        eb, cb = tb[i]
        if ea == eb and ca == cb:
            continue
        if ea == eb:
            return Ordinal(((eb, cb - ca),) + tb[i + 1:])
        return Ordinal(tb[i:])
    return Ordinal(tb[len(ta):])


def ell(a: OrdLike) -> Ordinal:
    """Last Cantor-normal-form exponent; ``ell(0) == 0``."""
    a = as_ordinal(a)
    return a.terms[-1][0] if a.terms else ZERO


def ell_iter(m: int, a: OrdLike) -> Ordinal:
    a = as_ordinal(a)
    for _ in range(m):
        if not a.terms:
            break
        a = a.terms[-1][0]
    return a


@lru_cache(maxsize=1 << 16)
def _divmod(a: Ordinal, b: Ordinal) -> Tuple[Ordinal, Ordinal]:
    b1, cb = b.terms[0]
    q = []
    rest = a
    while rest.terms and cmp(rest, b) >= 0:
        a1, ca = rest.terms[0]
        e = sub_left(b1, a1)
        if e.terms:
            q.append((e, ca))
            rest = Ordinal(rest.terms[1:])
            continue
        k = ca // cb
        if cmp(mul(b, k), rest) > 0:
            k -= 1
        q.append((ZERO, k))
        rest = sub_left(mul(b, k), rest)
        break
    return Ordinal(tuple(q)), rest


def divmod_ord(a: OrdLike, b: OrdLike) -> Tuple[Ordinal, Ordinal]:
    """Left division: ``a == b*q + r`` with ``r < b``."""
    a, b = as_ordinal(a), as_ordinal(b)
    if not b.terms:
        raise OrdinalDomainError("division by zero ordinal")
    if cmp(a, b) < 0:
        return ZERO, a
    return _divmod(a, b)


def divmod_pow(a: OrdLike, beta: OrdLike) -> Tuple[Ordinal, Ordinal]:
    """Division by an ordinal of the form ``w^b * n``."""
    beta = as_ordinal(beta)
    if not beta.terms:
        raise OrdinalDomainError("divmod_pow by zero")
    if len(beta.terms) != 1:
        raise OrdinalDomainError(f"{beta} is not of the form w^b*n")
    return divmod_ord(a, beta)


def is_multiple(a: OrdLike, b: OrdLike) -> bool:
    """True iff ``a == b*g`` for some ``g > 0``."""
    a, b = as_ordinal(a), as_ordinal(b)
    if not a.terms or not b.terms:
        return False
    _, r = divmod_ord(a, b)
    return not r.terms


def omega_tower(k: int) -> Ordinal:
    """``w_0 = 1``, ``w_{k+1} = w^(w_k)``."""
    x = ONE
    for _ in range(k):
        x = omega_pow(x)
    return x


# text form ----------------------------------------------------------------


def format_ordinal(a: Ordinal) -> str:
    if not a.terms:
        return "0"
    parts = []
    for e, c in a.terms:
        if not e.terms:
            parts.append(str(c))
            continue
        base = "w" if e == ONE else f"w^({format_ordinal(e)})"
        parts.append(base if c == 1 else f"{base}*{c}")
    return "+".join(parts)


_TOKEN = re.compile(r"\s*(?:(\d+)|(.))")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = []
        for m in _TOKEN.finditer(text):
            if m.group(1) is not None:
                self.toks.append(("num", int(m.group(1)), m.start(1)))
            elif m.group(2) is not None and not m.group(2).isspace():
                self.toks.append(("sym", m.group(2), m.start(2)))
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("eof", None, len(self.text))

    def take(self, sym: str):
        kind, val, pos = self.peek()
        if kind != "sym" or val != sym:
            raise SyntaxError(f"expected {sym!r} at position {pos} in {self.text!r}")
        self.i += 1

    def expr(self) -> Ordinal:
        x = self.product()
        while self.peek()[:2] == ("sym", "+"):
            self.i += 1
            x = add(x, self.product())
        return x

    def product(self) -> Ordinal:
        x = self.atom()
        while self.peek()[:2] == ("sym", "*"):
            self.i += 1
            kind, val, pos = self.peek()
            if kind != "num":
                raise SyntaxError(f"expected natural number at position {pos} in {self.text!r}")
            self.i += 1
            x = mul(x, val)
        return x

    def atom(self) -> Ordinal:
        kind, val, pos = self.peek()
        if kind == "num":
            self.i += 1
            return as_ordinal(val)
        if kind == "sym" and val == "w":
            self.i += 1
            if self.peek()[:2] == ("sym", "^"):
                self.i += 1
                # a bare exponent binds tightest: w^w^2 is w^(w^2), w^2*3 is (w^2)*3
                return omega_pow(self.atom())
            return OMEGA
        if kind == "sym" and val == "(":
            self.i += 1
            x = self.expr()
            self.take(")")
            return x
        what = "end of input" if kind == "eof" else repr(val)
        raise SyntaxError(f"unexpected {what} at position {pos} in {self.text!r}")


def parse_ordinal(text: str) -> Ordinal:
    """Parse an ordinal literal such as ``w^(w)*2+w^2*3+1`` or ``w^w^w``."""
    p = _Parser(text)
    x = p.expr()
    kind, val, pos = p.peek()
    if kind != "eof":
        raise SyntaxError(f"trailing input at position {pos} in {text!r}")
    return x
