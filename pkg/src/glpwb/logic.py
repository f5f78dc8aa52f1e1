"""Polymodal formulas: syntax, the M / M+ translation and frame evaluation.

Grammar (whitespace is insignificant)::

    F ::= T | F | p<digits> | ident | ~F | F & F | F | F | F -> F
        | [K]F | <K>F | (F)

``->`` binds loosest and associates to the right; ``&`` binds tighter than
``|``; unary operators bind tightest.  The printer omits parentheses around
the outermost binary connective and adds them around every nested one.

A frame is given by a bound ``lam``: its points are ``[1, lam]``.  Truth
sets are :class:`~glpwb.nperiodic.HSet` values over ``[0, lam + 1)`` with
the isolated point 0 always masked out.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from . import nperiodic as N
from . import word as W
from .nperiodic import HSet
from .ordinal import ONE, Ordinal, add, as_ordinal

__all__ = [
    "Formula",
    "Top",
    "Bot",
    "Var",
    "Not",
    "And",
    "Or",
    "Imp",
    "Box",
    "Dia",
    "TOP",
    "BOT",
    "FormulaSyntaxError",
    "UnboundVariable",
    "parse",
    "to_text",
    "conj",
    "subformulas",
    "variables",
    "modal_depth",
    "max_modality",
    "substitute",
    "box_subformulas",
    "m_formula",
    "m_translation",
    "Frame",
    "eval_formula",
    "ValidityResult",
    "is_valid_on_frame",
    "random_valuation",
    "random_formula",
    "axiom",
    "axiom_instances",
    "SCHEMATA",
]


class FormulaSyntaxError(SyntaxError):
    def __init__(self, msg: str, position: int):
        super().__init__(f"{msg} at position {position}")
        self.position = position


class UnboundVariable(KeyError):
    pass


# AST ------------------------------------------------------------------------------


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Var(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Imp(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Box(Formula):
    index: int
    arg: Formula


@dataclass(frozen=True)
class Dia(Formula):
    index: int
    arg: Formula


TOP = Top()
BOT = Bot()

_BINARY = {And: "&", Or: "|", Imp: "->"}


# parser ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(->)|(\[\s*\d+\s*\])|(<\s*\d+\s*>)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1):
            toks.append(("op", "->", m.start(1)))
        elif m.group(2):
            toks.append(("box", m.group(2)[1:-1].strip(), m.start(2)))
        elif m.group(3):
            toks.append(("dia", m.group(3)[1:-1].strip(), m.start(3)))
        elif m.group(4):
            toks.append(("id", m.group(4), m.start(4)))
        elif m.group(5):
            toks.append(("op", m.group(5), m.start(5)))
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> Tuple[str, str, int]:
        if self.i < len(self.toks):
            return self.toks[self.i]
        return ("eof", "", len(self.text))

    def imp(self) -> Formula:
        left = self.disj()
        if self.peek()[:2] == ("op", "->"):
            self.i += 1
            return Imp(left, self.imp())
        return left

    def disj(self) -> Formula:
        x = self.conj()
        while self.peek()[:2] == ("op", "|"):
            self.i += 1
            x = Or(x, self.conj())
        return x

    def conj(self) -> Formula:
        x = self.unary()
        while self.peek()[:2] == ("op", "&"):
            self.i += 1
            x = And(x, self.unary())
        return x

    def unary(self) -> Formula:
        kind, val, pos = self.peek()
        if kind == "op" and val == "~":
            self.i += 1
            return Not(self.unary())
        if kind in ("box", "dia"):
            self.i += 1
            k = int(val)
            arg = self.unary()
            return Box(k, arg) if kind == "box" else Dia(k, arg)
        if kind == "op" and val == "(":
            self.i += 1
            x = self.imp()
            kind, val, pos = self.peek()
            if (kind, val) != ("op", ")"):
                raise FormulaSyntaxError("expected ')'", pos)
            self.i += 1
            return x
        if kind == "id":
            self.i += 1
            if val == "T":
                return TOP
            if val == "F":
                return BOT
            return Var(val)
        if kind == "eof":
            raise FormulaSyntaxError("unexpected end of formula", pos)
        raise FormulaSyntaxError(f"unexpected {val!r}", pos)


def parse(text: str) -> Formula:
    p = _Parser(text)
    x = p.imp()
    kind, val, pos = p.peek()
    if kind != "eof":
        raise FormulaSyntaxError(f"unexpected {val!r}", pos)
    return x


def _show(f: Formula, nested: bool) -> str:
    if isinstance(f, Top):
        return "T"
    if isinstance(f, Bot):
        return "F"
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Not):
        return "~" + _show(f.arg, True)
    if isinstance(f, Box):
        return f"[{f.index}]" + _show(f.arg, True)
    if isinstance(f, Dia):
        return f"<{f.index}>" + _show(f.arg, True)
    op = _BINARY[type(f)]
    s = f"{_show(f.left, True)} {op} {_show(f.right, True)}"
    return f"({s})" if nested else s


def to_text(f: Formula) -> str:
    return _show(f, False)


# structure ------------------------------------------------------------------------


def _children(f: Formula) -> Tuple[Formula, ...]:
    if isinstance(f, (Not, Box, Dia)):
        return (f.arg,)
    if isinstance(f, (And, Or, Imp)):
        return (f.left, f.right)
    return ()


def subformulas(f: Formula) -> List[Formula]:
    """Distinct subformulas, children before parents."""
    seen: Dict[Formula, None] = {}

    def go(x: Formula) -> None:
        if x in seen:
            return
        for c in _children(x):
            go(c)
        seen[x] = None

    go(f)
    return list(seen)


def variables(f: Formula) -> List[str]:
    return sorted({x.name for x in subformulas(f) if isinstance(x, Var)})


def modal_depth(f: Formula) -> int:
    kids = [modal_depth(c) for c in _children(f)]
    inner = max(kids, default=0)
    return inner + 1 if isinstance(f, (Box, Dia)) else inner


def max_modality(f: Formula) -> int:
    """Largest modality index occurring in ``f``, or -1 if modality-free."""
    return max((x.index for x in subformulas(f) if isinstance(x, (Box, Dia))), default=-1)


def substitute(f: Formula, sub: Mapping[str, Formula]) -> Formula:
    if isinstance(f, Var):
        return sub.get(f.name, f)
    if isinstance(f, Not):
        return Not(substitute(f.arg, sub))
    if isinstance(f, Box):
        return Box(f.index, substitute(f.arg, sub))
    if isinstance(f, Dia):
        return Dia(f.index, substitute(f.arg, sub))
    if isinstance(f, (And, Or, Imp)):
        return type(f)(substitute(f.left, sub), substitute(f.right, sub))
    return f


def conj(fs: Sequence[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is ``T``."""
    if not fs:
        return TOP
    acc = fs[0]
    for g in fs[1:]:
        acc = And(acc, g)
    return acc


# M and M+ -------------------------------------------------------------------------


def box_subformulas(f: Formula) -> List[Tuple[int, Formula]]:
    """Pairs ``(m, psi)`` for every subformula ``[m]psi``; ``<m>psi`` counts as
    ``[m]~psi`` since it abbreviates ``~[m]~psi``."""
    out: Dict[Tuple[int, Formula], None] = {}
    for x in subformulas(f):
        if isinstance(x, Box):
            out[(x.index, x.arg)] = None
        elif isinstance(x, Dia):
            out[(x.index, Not(x.arg))] = None
    return list(out)


def m_formula(f: Formula, n: int) -> Formula:
    """``M(f)``: ``[m]psi -> [k]psi`` for each box subformula and ``m < k <= n``."""
    parts = [Imp(Box(m, psi), Box(k, psi)) for m, psi in box_subformulas(f) for k in range(m + 1, n + 1)]
    return conj(parts)


def m_translation(f: Formula, n: int) -> Formula:
    """``M+(f) = M(f) & [0]M(f) & ... & [n]M(f)``."""
    m = m_formula(f, n)
    return conj([m] + [Box(k, m) for k in range(n + 1)])


# frame semantics ------------------------------------------------------------------


class Frame:
    """The ordinal frame ``[1, lam]`` with Icard topologies ``0..signature``."""

    def __init__(self, bound, signature: int):
        self.bound = as_ordinal(bound)
        self.signature = signature
        self.omega = add(self.bound, ONE)
        self.full = N.from_word(W.setbit0(W.ones(self.omega), 0))
        self.empty = N.empty(0, self.omega)

    def mask(self, s: HSet) -> HSet:
        if s.bound != self.omega:
            raise N.BoundMismatch(f"valuation set bounded by {s.bound}, frame needs {self.omega}")
        return N.intersect(s, self.full)

    def neg(self, s: HSet) -> HSet:
        return N.difference(self.full, s)

    def dia(self, i: int, s: HSet) -> HSet:
        return N.intersect(N.derivative(s, i), self.full)

    def witness(self, s: HSet) -> Optional[Ordinal]:
        """Least frame point outside ``s``."""
        return N.min_of(self.neg(s))


def eval_formula(
    f: Formula,
    v: Mapping[str, HSet],
    bound=None,
    signature: Optional[int] = None,
    frame: Optional[Frame] = None,
) -> HSet:
    """Truth set of ``f`` under valuation ``v``."""
    if frame is None:
        if bound is None:
            raise ValueError("need a bound or a frame")
        frame = Frame(bound, max_modality(f) if signature is None else signature)
    memo: Dict[Formula, HSet] = {}
    n = frame.signature

    def go(x: Formula) -> HSet:
        r = memo.get(x)
        if r is not None:
            return r
        if isinstance(x, Top):
            r = frame.full
        elif isinstance(x, Bot):
            r = frame.empty
        elif isinstance(x, Var):
            if x.name not in v:
                raise UnboundVariable(x.name)
            r = frame.mask(v[x.name])
        elif isinstance(x, Not):
            r = frame.neg(go(x.arg))
        elif isinstance(x, And):
            r = N.intersect(go(x.left), go(x.right))
        elif isinstance(x, Or):
            r = N.union(go(x.left), go(x.right))
        elif isinstance(x, Imp):
            r = N.union(frame.neg(go(x.left)), go(x.right))
        elif isinstance(x, (Box, Dia)):
            if x.index > n:
                raise ValueError(f"modality [{x.index}] exceeds signature {n}")
            if isinstance(x, Dia):
                r = frame.dia(x.index, go(x.arg))
            else:
                r = frame.neg(frame.dia(x.index, frame.neg(go(x.arg))))
        else:
            raise TypeError(f"not a formula: {x!r}")
        memo[x] = r
        return r

    return go(f)


def random_valuation(
    rng: random.Random, names: Sequence[str], frame: Frame, level: Optional[int] = None, depth: int = 2
) -> Dict[str, HSet]:
    from .gen import random_hset

    lv = frame.signature if level is None else level
    return {p: frame.mask(random_hset(rng, lv, frame.omega, depth)) for p in names}


@dataclass
class ValidityResult:
    valid: bool
    tried: int
    valuation: Optional[Dict[str, HSet]] = None
    witness: Optional[Ordinal] = None

    def __bool__(self) -> bool:
        return self.valid


def is_valid_on_frame(
    f: Formula,
    bound,
    signature: int,
    valuations: Optional[Sequence[Mapping[str, HSet]]] = None,
    *,
    count: int = 100,
    seed: int = 0,
    level: Optional[int] = None,
    depth: int = 2,
) -> ValidityResult:
    """Check ``f`` against explicit valuations, or ``count`` seeded random ones.

    Passing is evidence, not proof: only finitely many valuations are tried.
    """
    frame = Frame(bound, signature)
    names = variables(f)
    if valuations is None:
        rng = random.Random(seed)
        pool: Iterator[Mapping[str, HSet]] = (
            random_valuation(rng, names, frame, level, depth) for _ in range(count if names else 1)
        )
    else:
        pool = iter(valuations)
    tried = 0
    for v in pool:
        tried += 1
        s = eval_formula(f, v, frame=frame)
        w = frame.witness(s)
        if w is not None:
            return ValidityResult(False, tried, dict(v), w)
    return ValidityResult(True, tried)


# axiom schemata -------------------------------------------------------------------


def _taut(rng: random.Random, a: Formula, b: Formula) -> Formula:
    shapes: List[Callable[[Formula, Formula], Formula]] = [
        lambda x, y: Imp(x, x),
        lambda x, y: Or(x, Not(x)),
        lambda x, y: Imp(And(x, y), x),
        lambda x, y: Imp(x, Imp(y, x)),
        lambda x, y: Imp(Imp(Imp(x, y), x), x),
        lambda x, y: Imp(Not(Not(x)), x),
    ]
    return rng.choice(shapes)(a, b)


def axiom(schema: str, phi: Formula, psi: Optional[Formula] = None, m: int = 0, n: int = 0) -> Formula:
    """One instance of a named schema.

    ``ii`` normality, ``iii`` Lob, ``iv`` ``<m>phi -> [n]<m>phi`` (m < n),
    ``v`` ``[m]phi -> [n]phi`` (m <= n), ``j1`` ``[m]phi -> [n][m]phi`` and
    ``j2`` ``[m]phi -> [m][n]phi`` (m <= n).  ``ii`` and ``iii`` use ``[n]``.
    """
    if schema == "i":
        return Imp(phi, phi) if psi is None else Imp(And(phi, psi), phi)
    if schema == "ii":
        q = psi if psi is not None else phi
        return Imp(Box(n, Imp(phi, q)), Imp(Box(n, phi), Box(n, q)))
    if schema == "iii":
        return Imp(Box(n, Imp(Box(n, phi), phi)), Box(n, phi))
    if schema == "iv":
        if not m < n:
            raise ValueError("schema iv needs m < n")
        return Imp(Dia(m, phi), Box(n, Dia(m, phi)))
    if not m <= n:
        raise ValueError(f"schema {schema} needs m <= n")
    if schema == "v":
        return Imp(Box(m, phi), Box(n, phi))
    if schema == "j1":
        return Imp(Box(m, phi), Box(n, Box(m, phi)))
    if schema == "j2":
        return Imp(Box(m, phi), Box(m, Box(n, phi)))
    raise ValueError(f"unknown schema {schema!r}")


SCHEMATA = ("i", "ii", "iii", "iv", "v", "j1", "j2")


def random_formula(rng: random.Random, names: Sequence[str], depth: int, signature: int) -> Formula:
    if depth <= 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.1:
            return TOP if r < 0.05 else BOT
        return Var(rng.choice(list(names)))
    k = rng.randrange(7)
    sub = lambda: random_formula(rng, names, depth - 1, signature)  # noqa: E731
    if k == 0:
        return Not(sub())
    if k == 1:
        return And(sub(), sub())
    if k == 2:
        return Or(sub(), sub())
    if k == 3:
        return Imp(sub(), sub())
    if k in (4, 5):
        return Box(rng.randint(0, signature), sub())
    return Dia(rng.randint(0, signature), sub())


def axiom_instances(
    schema: str,
    count: int,
    depth: int = 1,
    seed: int = 0,
    signature: int = 2,
    frame: Optional[Frame] = None,
    level: Optional[int] = None,
) -> List[Tuple[Formula, Optional[Dict[str, HSet]]]]:
    """``count`` deterministic pseudorandom instances of a schema.

    Each instance is paired with a random valuation over ``frame`` when one
    is given, otherwise with None.
    """
    if schema not in SCHEMATA:
        raise ValueError(f"unknown schema {schema!r}")
    if schema == "iv" and signature < 1:
        raise ValueError("schema iv needs signature >= 1")
    rng = random.Random(f"{schema}:{seed}")
    names = ["p0", "p1"]
    out: List[Tuple[Formula, Optional[Dict[str, HSet]]]] = []
    for _ in range(count):
        phi = random_formula(rng, names, depth, signature)
        psi = random_formula(rng, names, depth, signature)
        if schema == "iv":
            n = rng.randint(1, signature)
            m = rng.randrange(n)
        else:
            n = rng.randint(0, signature)
            m = rng.randint(0, n)
        f = _taut(rng, phi, psi) if schema == "i" else axiom(schema, phi, psi, m, n)
        v = random_valuation(rng, names, frame, level) if frame is not None else None
        out.append((f, v))
    return out
