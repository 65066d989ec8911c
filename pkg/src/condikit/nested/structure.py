"""Polarised nested sequents, contexts and their formula interpretation.

A component holds input formulas, at most one output formula and a list of
brackets ``[index: body]``.  Equality and hashing ignore the order of
formulas and brackets; the stored order only matters for paths, which
index brackets positionally.  Rule applications never move an existing
bracket, so a path into a conclusion stays valid in its premises.
"""

from __future__ import annotations

from typing import Callable, Iterator, Optional

from ..formula import TOP, And, CondBox, CondDiam, Formula, Imp, ParseError, Parser, to_text

Path = tuple[int, ...]


class MalformedNested(ValueError):
    pass


class NestedSequent:
    __slots__ = ("inputs", "output", "brackets", "_key", "_hash")

    def __init__(self, inputs=(), output: Optional[Formula] = None, brackets=()):
        inputs = tuple(inputs)
        brackets = tuple(brackets)
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "output", output)
        object.__setattr__(self, "brackets", brackets)
        key = (
            tuple(sorted(f._key for f in inputs)),
            () if output is None else (output._key,),
            tuple(sorted(b._key for b in brackets)),
        )
        object.__setattr__(self, "_key", key)
        object.__setattr__(self, "_hash", hash(key))

    def __setattr__(self, name, value):
        raise AttributeError("nested sequents are immutable")

    def __eq__(self, other: object) -> bool:
        return isinstance(other, NestedSequent) and self._key == other._key

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "NestedSequent") -> bool:
        return self._key < other._key

    def __repr__(self) -> str:
        return f"NestedSequent({str(self)!r})"

    def __str__(self) -> str:
        return ", ".join(self.items_text())

    def items_text(self) -> list[str]:
        out = [to_text(f) + "*" for f in self.inputs]
        if self.output is not None:
            out.append(to_text(self.output) + "^")
        out += [str(b) for b in self.brackets]
        return out

    # ------------------------------------------------------------ shape

    @property
    def is_empty(self) -> bool:
        return not self.inputs and self.output is None and not self.brackets

    def count_outputs(self) -> int:
        return (self.output is not None) + sum(b.body.count_outputs() for b in self.brackets)

    @property
    def is_input(self) -> bool:
        return self.count_outputs() == 0

    @property
    def is_nested(self) -> bool:
        return self.count_outputs() == 1

    def walk(self, prefix: Path = ()) -> Iterator[tuple[Path, "NestedSequent"]]:
        """Every component with its path, parents first."""
        yield prefix, self
        for j, b in enumerate(self.brackets):
            yield from b.body.walk(prefix + (j,))

    def output_path(self) -> Optional[Path]:
        for path, comp in self.walk():
            if comp.output is not None:
                return path
        return None

    def formulas(self) -> Iterator[Formula]:
        for _, comp in self.walk():
            yield from comp.inputs
            if comp.output is not None:
                yield comp.output
        for _, comp in self.walk():
            for b in comp.brackets:
                yield b.index

    def size(self) -> int:
        return sum(1 for _ in self.formulas())

    def normalized(self):
        """A key that forgets multiplicities, recursively."""
        return (
            frozenset(self.inputs),
            self.output,
            frozenset((b.index, b.body.normalized()) for b in self.brackets),
        )

    # ------------------------------------------------------------ edits

    def at(self, path: Path) -> "NestedSequent":
        comp = self
        for j in path:
            comp = comp.brackets[j].body
        return comp

    def replace_at(self, path: Path, comp: "NestedSequent") -> "NestedSequent":
        if not path:
            return comp
        j, rest = path[0], path[1:]
        b = self.brackets[j]
        new = Bracket(b.index, b.body.replace_at(rest, comp))
        return NestedSequent(self.inputs, self.output, self.brackets[:j] + (new,) + self.brackets[j + 1:])

    def update(self, path: Path, fn: Callable[["NestedSequent"], "NestedSequent"]) -> "NestedSequent":
        return self.replace_at(path, fn(self.at(path)))

    def plus(self, other: "NestedSequent") -> "NestedSequent":
        """Juxtaposition at the root; the other side's brackets go last."""
        if self.output is not None and other.output is not None:
            raise MalformedNested("two output formulas in one component")
        out = self.output if self.output is not None else other.output
        return NestedSequent(self.inputs + other.inputs, out, self.brackets + other.brackets)

    def add(self, path: Path, other: "NestedSequent") -> "NestedSequent":
        return self.update(path, lambda c: c.plus(other))

    def without_inputs(self, fs) -> "NestedSequent":
        """Remove one occurrence of each formula in ``fs`` from this component."""
        inputs = list(self.inputs)
        for f in fs:
            try:
                i = len(inputs) - 1 - inputs[::-1].index(f)
            except ValueError:
                raise MalformedNested(f"{to_text(f)}* is not present") from None
            del inputs[i]
        return NestedSequent(inputs, self.output, self.brackets)

    def with_output(self, f: Optional[Formula]) -> "NestedSequent":
        return NestedSequent(self.inputs, f, self.brackets)

    def stripped(self) -> "NestedSequent":
        """The same tree with its output formula removed."""
        if self.is_input:
            return self
        return NestedSequent(self.inputs, None, tuple(Bracket(b.index, b.body.stripped()) for b in self.brackets))

    def minus(self, other: "NestedSequent") -> tuple["NestedSequent", list[int]]:
        """Remove ``other`` from this component.

        Returns the remainder and the positions of the removed brackets; the
        last matching occurrences are removed.
        """
        rest = self.without_inputs(other.inputs)
        out = rest.output
        if other.output is not None:
            if out != other.output:
                raise MalformedNested(f"{to_text(other.output)}^ is not present")
            out = None
        taken: list[int] = []
        for b in other.brackets:
            for j in range(len(self.brackets) - 1, -1, -1):
                if j not in taken and self.brackets[j] == b:
                    taken.append(j)
                    break
            else:
                raise MalformedNested(f"{b} is not present")
        brackets = tuple(b for j, b in enumerate(self.brackets) if j not in taken)
        return NestedSequent(rest.inputs, out, brackets), sorted(taken)


class Bracket:
    __slots__ = ("index", "body", "_key", "_hash")

    def __init__(self, index: Formula, body: NestedSequent = NestedSequent()):
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "body", body)
        key = (index._key, body._key)
        object.__setattr__(self, "_key", key)
        object.__setattr__(self, "_hash", hash(key))

    def __setattr__(self, name, value):
        raise AttributeError("brackets are immutable")

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Bracket) and self._key == other._key

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        body = str(self.body)
        return f"[{to_text(self.index)}: {body}]" if body else f"[{to_text(self.index)}: ]"

    def __repr__(self) -> str:
        return f"Bracket({str(self)!r})"


EMPTY = NestedSequent()


def single(f: Formula, output: bool = False) -> NestedSequent:
    return NestedSequent((), f) if output else NestedSequent((f,))


def top_level(left: Formula, right: Formula) -> NestedSequent:
    """``left*, right^``, the shape of the equivalence premises."""
    return NestedSequent((left,), right)


def map_path(src: NestedSequent, dst: NestedSequent, path: Path) -> Path:
    """Translate a path in ``src`` into the equal sequent ``dst``.

    Equal brackets are interchangeable, so the k-th occurrence of a bracket
    in ``src`` is sent to the k-th equal bracket in ``dst``.
    """
    out = []
    a, b = src, dst
    for j in path:
        target = a.brackets[j]
        rank = sum(1 for i in range(j) if a.brackets[i] == target)
        seen = -1
        for i, cand in enumerate(b.brackets):
            if cand == target:
                seen += 1
                if seen == rank:
                    out.append(i)
                    break
        else:
            raise MalformedNested("sequents do not align")
        a, b = target.body, b.brackets[out[-1]].body
    return tuple(out)


# ---------------------------------------------------------------- contexts


class NestedContext:
    """A nested sequent with one hole, given by the component it sits in."""

    def __init__(self, base: NestedSequent, path: Path = ()):
        base.at(path)
        self.base = base
        self.path = tuple(path)

    @property
    def depth(self) -> int:
        return len(self.path)

    @property
    def kind(self) -> str:
        """``•`` when no output occurs outside the hole, ``∘`` when one does."""
        n = self.base.count_outputs()
        if n > 1:
            raise MalformedNested("a context holds at most one output formula")
        return "∘" if n else "•"

    def fill(self, content: NestedSequent) -> NestedSequent:
        if self.kind == "∘" and not content.is_input:
            raise MalformedNested("a ∘-context can only be filled with an input sequent")
        return self.base.add(self.path, content)

    def extend(self, content: NestedSequent) -> "NestedContext":
        """The context with ``content`` placed next to the hole."""
        return NestedContext(self.base.add(self.path, content), self.path)

    def enter(self, index: Formula) -> "NestedContext":
        """The context whose hole sits in a fresh bracket next to the old hole."""
        base = self.base.add(self.path, NestedSequent(brackets=(Bracket(index),)))
        return NestedContext(base, self.path + (len(base.at(self.path).brackets) - 1,))

    def stripped(self) -> "NestedContext":
        return NestedContext(self.base.stripped(), self.path)

    def __str__(self) -> str:
        return _context_text(self.base, self.path)

    def __repr__(self) -> str:
        return f"NestedContext({str(self)!r})"


def _context_text(comp: NestedSequent, path: Path) -> str:
    items = comp.items_text()
    n = len(items) - len(comp.brackets)
    if path:
        j = path[0]
        b = comp.brackets[j]
        items[n + j] = f"[{to_text(b.index)}: {_context_text(b.body, path[1:])}]"
    else:
        items.append("{}")
    return ", ".join(items)


# ---------------------------------------------------------------- parsing


def _prepare(text: str) -> str:
    return text.replace("•", "*").replace("∘", "^")


def _component(p: Parser, holes: list, path: Path, closing: Optional[str]) -> NestedSequent:
    inputs: list[Formula] = []
    output: Optional[Formula] = None
    brackets: list[Bracket] = []

    def at_end() -> bool:
        return p.tok.kind == "end" if closing is None else p.at(closing)

    while not at_end():
        if p.at("["):
            p.advance()
            index = p.formula()
            p.expect(":")
            body = _component(p, holes, path + (len(brackets),), "]")
            p.expect("]")
            brackets.append(Bracket(index, body))
        elif p.at("{"):
            pos = p.tok.pos
            p.advance()
            p.expect("}")
            if holes:
                raise ParseError("second hole", pos)
            holes.append(path)
        else:
            f = p.formula()
            if p.at("*"):
                inputs.append(f)
            elif p.at("^"):
                if output is not None:
                    raise ParseError("two output formulas in one component", p.tok.pos)
                output = f
            else:
                raise ParseError("expected '*' or '^' after a formula", p.tok.pos)
            p.advance()
        if p.at(","):
            p.advance()
        elif not at_end():
            raise ParseError(f"unexpected {p.tok.text!r}", p.tok.pos)
    return NestedSequent(inputs, output, brackets)


def parse_nested(text: str) -> NestedSequent:
    """Read ``p*, q^, [r: s*]``; ``•`` and ``∘`` are accepted for ``*`` and ``^``."""
    p = Parser(_prepare(text))
    holes: list = []
    ns = _component(p, holes, (), None)
    if holes:
        raise ParseError("a nested sequent has no hole", 0)
    if ns.count_outputs() > 1:
        raise MalformedNested("more than one output formula")
    return ns


def parse_context(text: str) -> NestedContext:
    """Read a nested sequent with exactly one hole ``{}``."""
    p = Parser(_prepare(text))
    holes: list = []
    base = _component(p, holes, (), None)
    if not holes:
        raise ParseError("a context needs a hole '{}'", 0)
    ctx = NestedContext(base, holes[0])
    ctx.kind
    return ctx


def nested_goal(f: Formula) -> NestedSequent:
    """The goal ``f^``."""
    return NestedSequent((), f)


# ---------------------------------------------------------------- interpretation


def interpret(ns: NestedSequent) -> Formula:
    """The formula reading of an input or nested sequent.

    Input items are joined by conjunction: formulas first, then brackets,
    each group sorted by printed form, as in the printed sequent; the item carrying the output formula comes last as the
    consequent of an implication.  A leading ``true`` is left out, so only
    the empty input sequent reads as ``true``.
    """
    items: list[tuple[tuple[int, str], Formula]] = []
    tail: Optional[Formula] = None
    for f in ns.inputs:
        items.append(((0, to_text(f)), f))
    for b in ns.brackets:
        if b.body.is_input:
            items.append(((1, str(b)), CondDiam(b.index, interpret(b.body))))
        else:
            tail = CondBox(b.index, interpret(b.body))
    if ns.output is not None:
        tail = ns.output
    items.sort(key=lambda it: it[0])
    acc: Optional[Formula] = None
    for _, f in items:
        acc = f if acc is None else And(acc, f)
    if tail is None:
        return TOP if acc is None else acc
    return tail if acc is None else Imp(acc, tail)
