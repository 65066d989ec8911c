"""Formula AST, concrete syntax, and syntactic measures.

Formulas are immutable and hashable.  Each node carries a precomputed
structural key which gives a deterministic total order, used wherever a
multiset has to be stored canonically.

Concrete grammar (tightest first)::

    ~            negation (sugar for  f -> false)
    &            conjunction, left associative
    |            disjunction, left associative
    -> > ?>      implication (right associative), would, might
    <->          biconditional (sugar), non associative

A would/might conditional may not be followed by another operator of the
same level without parentheses: ``p > q > r`` and ``p > q -> r`` are
rejected, while ``p -> q > r`` reads as ``p -> (q > r)``.
"""

from __future__ import annotations

import enum
import random
import re
from dataclasses import dataclass, field
from typing import Iterator


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    _key: tuple
    _hash: int

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Formula):
            return NotImplemented
        return self._hash == other._hash and self._key == other._key

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: Formula) -> bool:
        return self._key < other._key

    def __le__(self, other: Formula) -> bool:
        return self._key <= other._key

    def __str__(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        return f"F({to_text(self)!r})"

    @property
    def key(self) -> tuple:
        return self._key


def _seal(obj: Formula, key: tuple) -> None:
    object.__setattr__(obj, "_key", key)
    object.__setattr__(obj, "_hash", hash(key))


@dataclass(frozen=True, eq=False, slots=True, repr=False)
class Atom(Formula):
    name: str
    _key: tuple = field(init=False, compare=False)
    _hash: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        _seal(self, (1, self.name))


@dataclass(frozen=True, eq=False, slots=True, repr=False)
class Bot(Formula):
    _key: tuple = field(init=False, compare=False)
    _hash: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        _seal(self, (0,))


@dataclass(frozen=True, eq=False, slots=True, repr=False)
class _Binary(Formula):
    left: Formula
    right: Formula
    _key: tuple = field(init=False, compare=False)
    _hash: int = field(init=False, compare=False)

    TAG = 9

    def __post_init__(self) -> None:
        _seal(self, (self.TAG, self.left._key, self.right._key))


@dataclass(frozen=True, eq=False, slots=True, repr=False)
class And(_Binary):
    TAG = 2


@dataclass(frozen=True, eq=False, slots=True, repr=False)
class Or(_Binary):
    TAG = 3


@dataclass(frozen=True, eq=False, slots=True, repr=False)
class Imp(_Binary):
    TAG = 4


@dataclass(frozen=True, eq=False, slots=True, repr=False)
class CondBox(_Binary):
    """Would-conditional; ``left`` is the antecedent."""

    TAG = 5


@dataclass(frozen=True, eq=False, slots=True, repr=False)
class CondDiam(_Binary):
    """Might-conditional; ``left`` is the antecedent."""

    TAG = 6


BOT = Bot()
TOP = Imp(BOT, BOT)
BINARY = (And, Or, Imp, CondBox, CondDiam)
CONDITIONALS = (CondBox, CondDiam)


def neg(f: Formula) -> Formula:
    return Imp(f, BOT)


def iff(a: Formula, b: Formula) -> Formula:
    return And(Imp(a, b), Imp(b, a))


def conj(items) -> Formula:
    """Left-folded conjunction; the empty conjunction is top."""
    items = list(items)
    if not items:
        return TOP
    acc = items[0]
    for f in items[1:]:
        acc = And(acc, f)
    return acc


def disj(items) -> Formula:
    """Left-folded disjunction; the empty disjunction is bottom."""
    items = list(items)
    if not items:
        return BOT
    acc = items[0]
    for f in items[1:]:
        acc = Or(acc, f)
    return acc


class Polarity(enum.Enum):
    INPUT = "*"
    OUTPUT = "^"


# ---------------------------------------------------------------- measures


def weight(f: Formula) -> int:
    """Number of binary connectives."""
    if isinstance(f, _Binary):
        return 1 + weight(f.left) + weight(f.right)
    return 0


def is_diamond_free(f: Formula) -> bool:
    if isinstance(f, CondDiam):
        return False
    if isinstance(f, _Binary):
        return is_diamond_free(f.left) and is_diamond_free(f.right)
    return True


def atoms(f: Formula) -> set[str]:
    if isinstance(f, Atom):
        return {f.name}
    if isinstance(f, _Binary):
        return atoms(f.left) | atoms(f.right)
    return set()


def subformulas(f: Formula) -> Iterator[Formula]:
    """Post-order walk, children before parents, duplicates included."""
    if isinstance(f, _Binary):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    yield f


def cond_depth(f: Formula) -> int:
    """Maximal nesting of conditionals."""
    if isinstance(f, _Binary):
        inner = max(cond_depth(f.left), cond_depth(f.right))
        return inner + 1 if isinstance(f, CONDITIONALS) else inner
    return 0


# ---------------------------------------------------------------- parsing


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(
    r"\s*(?:(?P<atom>[a-z][a-zA-Z0-9_]*)"
    r"|(?P<op><->|->|=>|\?>|\[\]|<>|[~&|>()\[\]:,*^{}]))"
)

_KEYWORDS = {"true", "false"}


@dataclass
class _Tok:
    kind: str  # "atom", "op", "end"
    text: str
    pos: int


def tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i = 0
    n = len(text)
    while True:
        while i < n and text[i].isspace():
            i += 1
        if i >= n:
            break
        m = _TOKEN.match(text, i)
        if not m or m.end() == i:
            raise ParseError(f"unknown token {text[i]!r}", i)
        start = m.start("atom") if m.group("atom") else m.start("op")
        if m.group("atom"):
            word = m.group("atom")
            toks.append(_Tok("kw" if word in _KEYWORDS else "atom", word, start))
        else:
            toks.append(_Tok("op", m.group("op"), start))
        i = m.end()
    toks.append(_Tok("end", "", n))
    return toks


class Parser:
    """Recursive-descent parser over a token list.

    The parser is reusable by the sequent and nested-sequent readers, which
    stop formula parsing at their own punctuation.  ``modal`` enables the
    unary ``[]``/``<>`` operators used by the modal translation.
    """

    def __init__(self, text: str, modal: bool = False):
        self.toks = tokenize(text)
        self.i = 0
        self.modal = modal

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, *ops: str) -> bool:
        t = self.tok
        return t.kind == "op" and t.text in ops

    def expect(self, op: str) -> None:
        if not self.at(op):
            t = self.tok
            found = t.text or "end of input"
            raise ParseError(f"expected {op!r}, found {found!r}", t.pos)
        self.advance()

    def formula(self):
        left = self._implication()
        if self.at("<->"):
            self.advance()
            right = self._implication()
            if self.at("<->"):
                raise ParseError("'<->' is not associative", self.tok.pos)
            return iff(left, right)
        return left

    def _implication(self):
        left = self._disjunction()
        if self.at("->"):
            self.advance()
            return Imp(left, self._implication())
        if self.at(">", "?>"):
            op = self.advance().text
            right = self._disjunction()
            if self.at("->", ">", "?>"):
                raise ParseError(
                    "conditional needs parentheses before another conditional or implication",
                    self.tok.pos,
                )
            return CondBox(left, right) if op == ">" else CondDiam(left, right)
        return left

    def _disjunction(self):
        f = self._conjunction()
        while self.at("|"):
            self.advance()
            f = Or(f, self._conjunction())
        return f

    def _conjunction(self):
        f = self._unary()
        while self.at("&"):
            self.advance()
            f = And(f, self._unary())
        return f

    def _unary(self):
        t = self.tok
        if self.at("~"):
            self.advance()
            return neg(self._unary())
        if self.modal and self.at("[]", "<>"):
            from .hilbert.modal import ModalBox, ModalDiamond

            op = self.advance().text
            body = self._unary()
            return ModalBox(body) if op == "[]" else ModalDiamond(body)
        if self.at("("):
            self.advance()
            f = self.formula()
            self.expect(")")
            return f
        if t.kind == "atom":
            self.advance()
            return Atom(t.text)
        if t.kind == "kw":
            self.advance()
            return TOP if t.text == "true" else BOT
        found = t.text or "end of input"
        raise ParseError(f"unexpected {found!r}", t.pos)

    def finish(self) -> None:
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.pos)


def parse(text: str) -> Formula:
    p = Parser(text)
    f = p.formula()
    p.finish()
    return f


# ---------------------------------------------------------------- printing

_LEVEL_COND, _LEVEL_OR, _LEVEL_AND, _LEVEL_UNARY = 1, 2, 3, 4


def _is_neg(f: Formula) -> bool:
    return isinstance(f, Imp) and isinstance(f.right, Bot) and not isinstance(f.left, Bot)


def to_text(f: Formula, level: int = 0) -> str:
    """Print in the concrete grammar with minimal parentheses."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Bot):
        return "false"
    if f == TOP:
        return "true"
    if _is_neg(f):
        return "~" + to_text(f.left, _LEVEL_UNARY)
    if isinstance(f, And):
        s = f"{to_text(f.left, _LEVEL_AND)} & {to_text(f.right, _LEVEL_UNARY)}"
        mine = _LEVEL_AND
    elif isinstance(f, Or):
        s = f"{to_text(f.left, _LEVEL_OR)} | {to_text(f.right, _LEVEL_AND)}"
        mine = _LEVEL_OR
    elif isinstance(f, Imp):
        s = f"{to_text(f.left, _LEVEL_OR)} -> {to_text(f.right, _LEVEL_COND)}"
        mine = _LEVEL_COND
    elif isinstance(f, (CondBox, CondDiam)):
        op = ">" if isinstance(f, CondBox) else "?>"
        s = f"{to_text(f.left, _LEVEL_OR)} {op} {to_text(f.right, _LEVEL_OR)}"
        mine = _LEVEL_COND
    else:
        return str(f)
    return f"({s})" if level > mine else s


_UNI = {And: "∧", Or: "∨", Imp: "→", CondBox: "⊡", CondDiam: "⟐"}
_LATEX = {
    And: r"\land",
    Or: r"\lor",
    Imp: r"\to",
    CondBox: r"\mathrel{\Box\!\!\to}",
    CondDiam: r"\mathrel{\Diamond\!\!\to}",
}


def _pretty(f: Formula, table: dict, atoms_fmt, bot: str, top: str, negs: str, level: int = 0) -> str:
    if isinstance(f, Atom):
        return atoms_fmt(f.name)
    if isinstance(f, Bot):
        return bot
    if f == TOP:
        return top
    if _is_neg(f):
        return negs + _pretty(f.left, table, atoms_fmt, bot, top, negs, _LEVEL_UNARY)
    mine = {And: _LEVEL_AND, Or: _LEVEL_OR}.get(type(f), _LEVEL_COND)
    if isinstance(f, And):
        lv = (_LEVEL_AND, _LEVEL_UNARY)
    elif isinstance(f, Or):
        lv = (_LEVEL_OR, _LEVEL_AND)
    elif isinstance(f, Imp):
        lv = (_LEVEL_OR, _LEVEL_COND)
    else:
        lv = (_LEVEL_OR, _LEVEL_OR)
    s = (
        f"{_pretty(f.left, table, atoms_fmt, bot, top, negs, lv[0])} {table[type(f)]} "
        f"{_pretty(f.right, table, atoms_fmt, bot, top, negs, lv[1])}"
    )
    return f"({s})" if level > mine else s


def to_unicode(f: Formula) -> str:
    return _pretty(f, _UNI, lambda a: a, "⊥", "⊤", "¬")


def to_latex(f: Formula) -> str:
    return _pretty(f, _LATEX, lambda a: a, r"\bot", r"\top", r"\neg ")


# ---------------------------------------------------------------- generation


def atom_names(n: int) -> list[str]:
    base = ["p", "q", "r", "s", "t", "u", "v"]
    return [base[i] if i < len(base) else f"p{i}" for i in range(n)]


def random_formula(max_weight: int, atoms: int, allow_diamond: bool, seed: int) -> Formula:
    """Deterministic random formula of weight at most ``max_weight``."""
    if atoms < 1:
        raise ValueError("need at least one atom")
    rng = random.Random(seed)
    names = atom_names(atoms)
    ops = [And, Or, Imp, CondBox] + ([CondDiam] if allow_diamond else [])

    def build(w: int) -> Formula:
        if w == 0:
            return BOT if rng.random() < 0.15 else Atom(rng.choice(names))
        op = rng.choice(ops)
        k = rng.randint(0, w - 1)
        return op(build(k), build(w - 1 - k))

    return build(rng.randint(0, max_weight))
