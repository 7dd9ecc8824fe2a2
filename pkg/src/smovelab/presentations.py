"""Balanced-presentation bookkeeping: named relators, relator moves
(invert / right-multiply / conjugate), generator substitutions applied to
every relator at once, and prolongation by a fresh generator.

File format (one directive per line, ``#`` comments allowed)::

    gens 2
    rel R abA
    rel S b

Moves file::

    inv R
    mulr R S
    conj R a
    nielsen inv a
    nielsen rmul a b
    nielsen lmul a b
    prolong
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Tuple, Union

from .words import (
    InputError,
    Word,
    format_word,
    invert,
    max_generator,
    multiply,
    parse_word,
    reduce,
    substitute,
)


@dataclass(frozen=True)
class Presentation:
    generator_count: int
    relators: Tuple[Tuple[str, Word], ...]

    def __post_init__(self):
        if self.generator_count < 0:
            raise InputError("generator count must be >= 0")
        seen = set()
        fixed = []
        for name, w in self.relators:
            if not name or any(c.isspace() for c in name):
                raise InputError("bad relator name %r" % (name,))
            if name in seen:
                raise InputError("duplicate relator name %r" % name)
            seen.add(name)
            w = reduce(w)
            if max_generator(w) > self.generator_count:
                raise InputError(
                    "relator %s uses generator beyond alphabet of %d"
                    % (name, self.generator_count)
                )
            fixed.append((name, w))
        object.__setattr__(self, "relators", tuple(fixed))

    def names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.relators)

    def word(self, name: str) -> Word:
        for n, w in self.relators:
            if n == name:
                return w
        raise InputError("unknown relator %r" % name)

    def with_relator(self, name: str, w: Word) -> "Presentation":
        self.word(name)  # existence check
        rels = tuple((n, w if n == name else old) for n, old in self.relators)
        return Presentation(self.generator_count, rels)


# --- relator moves (applied to exactly one relator) ---------------------


@dataclass(frozen=True)
class InvertRelator:
    target: str


@dataclass(frozen=True)
class MultiplyRight:
    target: str
    other: str


@dataclass(frozen=True)
class ConjugateRelator:
    target: str
    gen: int  # signed generator letter


QMove = Union[InvertRelator, MultiplyRight, ConjugateRelator]


def apply_qmove(p: Presentation, m: QMove) -> Presentation:
    old = p.word(m.target)
    if isinstance(m, InvertRelator):
        new = invert(old)
    elif isinstance(m, MultiplyRight):
        if m.other == m.target:
            raise InputError("right-multiply needs two distinct relators")
        new = multiply(old, p.word(m.other))
    elif isinstance(m, ConjugateRelator):
        if m.gen == 0 or abs(m.gen) > p.generator_count:
            raise InputError("conjugating letter out of range")
        new = reduce((m.gen,) + tuple(old) + (-m.gen,))
    else:
        raise InputError("unknown relator move %r" % (m,))
    return p.with_relator(m.target, new)


def inverse_qmoves(m: QMove) -> Tuple[QMove, ...]:
    """A move sequence undoing ``m`` letter-for-letter."""
    if isinstance(m, InvertRelator):
        return (m,)
    if isinstance(m, ConjugateRelator):
        return (ConjugateRelator(m.target, -m.gen),)
    if isinstance(m, MultiplyRight):
        return (
            InvertRelator(m.other),
            MultiplyRight(m.target, m.other),
            InvertRelator(m.other),
        )
    raise InputError("unknown relator move %r" % (m,))


# --- generator substitutions (applied to every relator) -----------------


@dataclass(frozen=True)
class NielsenMove:
    kind: str  # "inv" | "rmul" | "lmul"
    gen: int
    other: int = 0

    def __post_init__(self):
        if self.kind not in ("inv", "rmul", "lmul"):
            raise InputError("unknown substitution kind %r" % self.kind)
        if self.gen <= 0:
            raise InputError("substitution target must be a positive generator")
        if self.kind != "inv":
            if self.other <= 0:
                raise InputError("substitution partner must be a positive generator")
            if self.other == self.gen:
                raise InputError("substitution needs two distinct generators")

    def replacement(self) -> Word:
        if self.kind == "inv":
            return Word((-self.gen,))
        if self.kind == "rmul":
            return Word((self.gen, self.other))
        return Word((self.other, self.gen))


def apply_nielsen(p: Presentation, m: NielsenMove) -> Presentation:
    if m.gen > p.generator_count or (m.kind != "inv" and m.other > p.generator_count):
        raise InputError("substitution letter out of range")
    repl = m.replacement()
    rels = tuple((n, substitute(w, m.gen, repl)) for n, w in p.relators)
    return Presentation(p.generator_count, rels)


def apply_nielsen_pair(pair, m: NielsenMove):
    """Apply the same substitution to both presentations of a pair."""
    k, l = pair
    if k.generator_count != l.generator_count:
        raise InputError("paired presentations must share one alphabet")
    return apply_nielsen(k, m), apply_nielsen(l, m)


@dataclass(frozen=True)
class Prolong:
    pass


def prolong(p: Presentation) -> Presentation:
    """Add a fresh generator together with the relator equal to it."""
    n = p.generator_count + 1
    name = "t%d" % n
    if name in p.names():
        raise InputError("relator name %s already taken" % name)
    return Presentation(n, p.relators + ((name, Word((n,))),))


Move = Union[QMove, NielsenMove, Prolong]


def apply_move(p: Presentation, m: Move) -> Presentation:
    if isinstance(m, NielsenMove):
        return apply_nielsen(p, m)
    if isinstance(m, Prolong):
        return prolong(p)
    return apply_qmove(p, m)


# --- text format ---------------------------------------------------------


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_presentation(text: str) -> Presentation:
    n = None
    rels = []
    for lineno, parts in _content_lines(text):
        if parts[0] == "gens":
            if n is not None or len(parts) != 2 or not parts[1].isdigit():
                raise InputError("line %d: bad gens directive" % lineno)
            n = int(parts[1])
        elif parts[0] == "rel":
            if n is None:
                raise InputError("line %d: rel before gens" % lineno)
            if len(parts) != 3:
                raise InputError("line %d: rel needs a name and a word" % lineno)
            rels.append((parts[1], parse_word(parts[2], n)))
        else:
            raise InputError("line %d: unknown directive %r" % (lineno, parts[0]))
    if n is None:
        raise InputError("missing gens directive")
    return Presentation(n, tuple(rels))


def format_presentation(p: Presentation) -> str:
    lines = ["gens %d" % p.generator_count]
    lines += ["rel %s %s" % (n, format_word(w)) for n, w in p.relators]
    return "\n".join(lines) + "\n"


def load_presentation(path) -> Presentation:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_presentation(fh.read())


def _one_letter(tok: str, lineno: int, positive=False) -> int:
    w = parse_word(tok)
    if len(w) != 1:
        raise InputError("line %d: expected a single letter, got %r" % (lineno, tok))
    if positive and w[0] < 0:
        raise InputError("line %d: expected a plain generator letter" % lineno)
    return w[0]


def parse_moves(text: str):
    moves: list[Move] = []
    for lineno, parts in _content_lines(text):
        head = parts[0]
        if head == "inv" and len(parts) == 2:
            moves.append(InvertRelator(parts[1]))
        elif head == "mulr" and len(parts) == 3:
            moves.append(MultiplyRight(parts[1], parts[2]))
        elif head == "conj" and len(parts) == 3:
            moves.append(ConjugateRelator(parts[1], _one_letter(parts[2], lineno)))
        elif head == "nielsen" and len(parts) >= 2:
            kind = parts[1]
            if kind == "inv" and len(parts) == 3:
                moves.append(NielsenMove("inv", _one_letter(parts[2], lineno, True)))
            elif kind in ("rmul", "lmul") and len(parts) == 4:
                moves.append(
                    NielsenMove(
                        kind,
                        _one_letter(parts[2], lineno, True),
                        _one_letter(parts[3], lineno, True),
                    )
                )
            else:
                raise InputError("line %d: bad nielsen move" % lineno)
        elif head == "prolong" and len(parts) == 1:
            moves.append(Prolong())
        else:
            raise InputError("line %d: unknown move %r" % (lineno, " ".join(parts)))
    return moves


def load_moves(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_moves(fh.read())
