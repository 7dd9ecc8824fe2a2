"""Free-group words over a finite generator alphabet.

A word is a sequence of nonzero integers: letter ``k > 0`` is the k-th
generator, ``-k`` its inverse.  Surface syntax uses ``a``..``z`` for
generators 1..26, ``A``..``Z`` for their inverses, and the escape forms
``g<k>`` / ``G<k>`` for larger alphabets.  The empty word is written ``1``.

Free reduction cancels adjacent pairs ``x x^-1``; the normal form is
independent of cancellation order, so a single left-to-right pass with a
pushdown suffices.
"""

from __future__ import annotations

import re
from typing import Iterable, Tuple


class InputError(ValueError):
    """Malformed surface input (word literals, file formats, CLI args)."""


class Word(tuple):
    """An immutable word; not necessarily freely reduced."""

    def __new__(cls, letters: Iterable[int] = ()):
        letters = tuple(int(x) for x in letters)
        for x in letters:
            if x == 0:
                raise InputError("word letters must be nonzero integers")
        return super().__new__(cls, letters)

    def __repr__(self):
        return "Word(%r)" % format_word(self)

    def __str__(self):
        return format_word(self)

    # Concatenate-then-reduce; use tuple(u) + tuple(v) for raw concatenation.
    def __mul__(self, other):
        return multiply(self, other)

    def __invert__(self):
        return invert(self)

    @property
    def is_reduced(self) -> bool:
        return all(a != -b for a, b in zip(self, self[1:]))


EMPTY = Word()

# Escape forms must precede the single-letter alternatives or "g12" would
# tokenize as the letter g followed by stray digits.
_TOKEN = re.compile(r"\s+|g(\d+)|G(\d+)|[a-z]|[A-Z]|.", re.DOTALL)


def parse_word(text: str, n_generators: int | None = None) -> Word:
    """Parse a word literal; ``1`` (or an all-whitespace string) is empty."""
    stripped = text.strip()
    if stripped == "1" or stripped == "":
        return EMPTY
    letters = []
    for m in _TOKEN.finditer(text):
        tok = m.group(0)
        if tok.isspace():
            continue
        if m.group(1) is not None:
            x = int(m.group(1))
        elif m.group(2) is not None:
            x = -int(m.group(2))
        elif "a" <= tok <= "z":
            x = ord(tok) - ord("a") + 1
        elif "A" <= tok <= "Z":
            x = -(ord(tok) - ord("A") + 1)
        else:
            raise InputError("bad word token %r in %r" % (tok, text))
        if x == 0:
            raise InputError("generator index must be >= 1 in %r" % text)
        if n_generators is not None and abs(x) > n_generators:
            raise InputError(
                "generator index %d out of range (alphabet has %d)"
                % (abs(x), n_generators)
            )
        letters.append(x)
    return Word(letters)


def format_word(w: Iterable[int]) -> str:
    out = []
    for x in w:
        k = abs(x)
        if k <= 26:
            c = chr(ord("a") + k - 1)
            out.append(c if x > 0 else c.upper())
        else:
            out.append(("g%d" if x > 0 else "G%d") % k)
    return "".join(out) if out else "1"


def reduce(w: Iterable[int]) -> Word:
    """Freely reduce: single left-to-right pass with a pushdown."""
    stack: list[int] = []
    for x in w:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return Word(stack)


def invert(w: Iterable[int]) -> Word:
    return Word(-x for x in reversed(tuple(w)))


def multiply(u: Iterable[int], v: Iterable[int]) -> Word:
    return reduce(tuple(u) + tuple(v))


def conjugate(w: Iterable[int], by: Iterable[int]) -> Word:
    """reduce(by . w . by^-1)."""
    by = tuple(by)
    return reduce(by + tuple(w) + tuple(invert(by)))


def commutator(u: Iterable[int], v: Iterable[int]) -> Word:
    """reduce(u . v . u^-1 . v^-1)."""
    u, v = tuple(u), tuple(v)
    return reduce(u + v + tuple(invert(u)) + tuple(invert(v)))


def equal(u: Iterable[int], v: Iterable[int]) -> bool:
    """Equality in the free group (compare reduced forms)."""
    return reduce(u) == reduce(v)


def substitute(w: Iterable[int], gen: int, repl: Iterable[int]) -> Word:
    """Replace generator ``gen`` by ``repl`` (inverse occurrences get
    the inverted replacement), then reduce."""
    if gen <= 0:
        raise InputError("substitute target must be a positive generator index")
    repl = Word(repl)
    repl_inv = invert(repl)
    out: list[int] = []
    for x in w:
        if x == gen:
            out.extend(repl)
        elif x == -gen:
            out.extend(repl_inv)
        else:
            out.append(x)
    return reduce(out)


def max_generator(w: Iterable[int]) -> int:
    """Largest generator index used (0 for the empty word)."""
    return max((abs(x) for x in w), default=0)


Letters = Tuple[int, ...]
