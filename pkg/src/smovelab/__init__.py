"""smovelab: combinatorial lab for commutator criteria, slicings and
local invariants of balanced presentations."""

__version__ = "0.1.0"

from .words import InputError, Word, parse_word, format_word, reduce, invert  # noqa: F401
