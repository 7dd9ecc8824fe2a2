"""Level-by-level readings of attached 2-cells.

A slice is the intersection of a height level with the attached cells:
circles (closed components, carrying the labels fused into them) and arcs
(relator strands in transit, accumulating circulation letters).  A slice
sequence records every intermediate slice together with the local move
taken between consecutive levels; ``validate`` replays every move and
compares, ``boundary_trace`` reads the attaching word back out of the
circulation letters.

Readout convention: every builder registers its relator strands in the
cyclic order of the attaching curve.  A positively labelled strand
contributes its circulation letters as accumulated; an inversely labelled
strand circulates letterwise-inverted (order preserved) and is read in
reverse, which restores the genuine inverse word; the doubled curve of a
bag is read once forward and once fully inverted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

from .words import InputError, Word, format_word, invert, parse_word, reduce
from . import criterion as crit
from .words import commutator as comm_word


class SliceError(ValueError):
    """Structurally invalid slice sequence or move application."""


# --- components -----------------------------------------------------------


@dataclass(frozen=True)
class Circle:
    marks: Tuple[str, ...]


@dataclass(frozen=True)
class Arc:
    left: str
    right: str
    trace: Word = Word()


Component = Union[Circle, Arc]


@dataclass(frozen=True)
class Slice:
    level: int
    components: Tuple[Component, ...]


# --- local moves ----------------------------------------------------------


@dataclass(frozen=True)
class BirthCircle:
    marks: Tuple[str, ...]


@dataclass(frozen=True)
class DeathCircle:
    index: int


@dataclass(frozen=True)
class SplitCircleToArc:
    index: int
    left: str
    right: str


@dataclass(frozen=True)
class JoinArcsToCircle:
    index: int
    other: Optional[int] = None  # None closes a single arc onto itself
    mark: str = "Q"


@dataclass(frozen=True)
class CirculateStep:
    index: int
    letter: int
    strand: str


@dataclass(frozen=True)
class MergeArcs:
    index: int
    other: int
    mark: str = "M"
    absorb: bool = False  # keep the first arc's endpoints, swallow the other


@dataclass(frozen=True)
class IdentifyEdges:
    keep: str
    drop: str


@dataclass(frozen=True)
class ReorderStep:
    index: int  # exchange the endpoint order of one arc


@dataclass(frozen=True)
class SaddlePair:
    index: int  # introduces a pair of saddle points; slice picture unchanged


@dataclass(frozen=True)
class JoinCells:
    index: int
    other: int


@dataclass(frozen=True)
class SplitCells:
    index: int
    marks_first: Tuple[str, ...]
    marks_second: Tuple[str, ...]


LocalMove = Union[
    BirthCircle,
    DeathCircle,
    SplitCircleToArc,
    JoinArcsToCircle,
    CirculateStep,
    MergeArcs,
    IdentifyEdges,
    ReorderStep,
    SaddlePair,
    JoinCells,
    SplitCells,
]


def _need(cond: bool, msg: str):
    if not cond:
        raise SliceError(msg)


def apply_move(components: Tuple[Component, ...], m: LocalMove) -> Tuple[Component, ...]:
    cs = list(components)

    def at(i, want=None):
        _need(0 <= i < len(cs), "component index %d out of range" % i)
        c = cs[i]
        if want is not None:
            _need(isinstance(c, want), "component %d is not a %s" % (i, want.__name__))
        return c

    if isinstance(m, BirthCircle):
        cs.append(Circle(tuple(m.marks)))
    elif isinstance(m, DeathCircle):
        at(m.index, Circle)
        del cs[m.index]
    elif isinstance(m, SplitCircleToArc):
        at(m.index, Circle)
        cs[m.index] = Arc(m.left, m.right)
    elif isinstance(m, JoinArcsToCircle):
        a = at(m.index, Arc)
        if m.other is None:
            cs[m.index] = Circle((a.left, a.right))
        else:
            b = at(m.other, Arc)
            _need(m.other != m.index, "join needs two distinct arcs")
            lo, hi = sorted((m.index, m.other))
            cs[lo] = Circle((a.left, a.right, b.left, b.right))
            del cs[hi]
    elif isinstance(m, CirculateStep):
        a = at(m.index, Arc)
        _need(m.letter != 0, "circulation letter must be nonzero")
        cs[m.index] = Arc(a.left, a.right, Word(tuple(a.trace) + (m.letter,)))
    elif isinstance(m, MergeArcs):
        a = at(m.index, Arc)
        b = at(m.other, Arc)
        _need(m.other != m.index, "merge needs two distinct arcs")
        trace = Word(tuple(a.trace) + tuple(b.trace))
        merged = Arc(a.left, a.right if m.absorb else b.right, trace)
        lo, hi = sorted((m.index, m.other))
        cs[lo] = merged
        del cs[hi]
    elif isinstance(m, IdentifyEdges):
        def rn(label):
            return m.keep if label == m.drop else label

        cs = [
            Circle(tuple(rn(x) for x in c.marks))
            if isinstance(c, Circle)
            else Arc(rn(c.left), rn(c.right), c.trace)
            for c in cs
        ]
    elif isinstance(m, ReorderStep):
        a = at(m.index, Arc)
        cs[m.index] = Arc(a.right, a.left, a.trace)
    elif isinstance(m, SaddlePair):
        at(m.index)
    elif isinstance(m, JoinCells):
        a = at(m.index, Circle)
        b = at(m.other, Circle)
        _need(m.other != m.index, "cell join needs two distinct circles")
        lo, hi = sorted((m.index, m.other))
        cs[lo] = Circle(a.marks + b.marks)
        del cs[hi]
    elif isinstance(m, SplitCells):
        a = at(m.index, Circle)
        _need(
            a.marks == tuple(m.marks_first) + tuple(m.marks_second),
            "cell split must partition the marks in order",
        )
        cs[m.index] = Circle(tuple(m.marks_first))
        cs.append(Circle(tuple(m.marks_second)))
    else:
        raise SliceError("unknown move %r" % (m,))
    return tuple(cs)


# --- sequences ------------------------------------------------------------


@dataclass(frozen=True)
class ReadoutStrand:
    key: str
    transform: str  # "as_is" | "reverse" | "invert"


@dataclass(frozen=True)
class SliceSequence:
    slices: Tuple[Slice, ...]
    moves: Tuple[LocalMove, ...]
    readout: Tuple[ReadoutStrand, ...] = ()


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    index: Optional[int] = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def validate(seq: SliceSequence) -> ValidationResult:
    """Replay every move; report the first slice that does not match."""
    if len(seq.moves) != len(seq.slices) - 1 or not seq.slices:
        return ValidationResult(False, 0, "need |moves| = |slices| - 1 >= 0")
    for k, s in enumerate(seq.slices):
        if s.level != k:
            return ValidationResult(False, k, "levels must be sequential")
    for k, m in enumerate(seq.moves):
        try:
            got = apply_move(seq.slices[k].components, m)
        except SliceError as e:
            return ValidationResult(False, k + 1, str(e))
        if got != seq.slices[k + 1].components:
            return ValidationResult(False, k + 1, "move replay mismatch")
    return ValidationResult(True)


def inverse_trace(w) -> Word:
    """Letterwise-inverted reading: flip every letter, keep the order."""
    return Word(-x for x in w)


def boundary_trace(seq: SliceSequence) -> Word:
    """Concatenate the strand contributions in attaching-curve order and
    freely reduce.  Requires a validated sequence."""
    v = validate(seq)
    if not v:
        raise SliceError("sequence invalid at slice %s: %s" % (v.index, v.reason))
    collected: dict[str, list[int]] = {}
    for m in seq.moves:
        if isinstance(m, CirculateStep):
            collected.setdefault(m.strand, []).append(m.letter)
    out: list[int] = []
    for strand in seq.readout:
        letters = collected.get(strand.key, [])
        if strand.transform == "as_is":
            out.extend(letters)
        elif strand.transform == "reverse":
            out.extend(reversed(letters))
        elif strand.transform == "invert":
            out.extend(-x for x in reversed(letters))
        else:
            raise SliceError("unknown readout transform %r" % strand.transform)
    return reduce(out)


class _Builder:
    def __init__(self):
        self.components: Tuple[Component, ...] = ()
        self.slices = [Slice(0, ())]
        self.moves: list[LocalMove] = []

    def push(self, m: LocalMove):
        self.components = apply_move(self.components, m)
        self.moves.append(m)
        self.slices.append(Slice(len(self.slices), self.components))

    def done(self, readout=()) -> SliceSequence:
        return SliceSequence(tuple(self.slices), tuple(self.moves), tuple(readout))


# --- piece builders -------------------------------------------------------


def slice_bag(w, identify: bool = False) -> SliceSequence:
    """Doubled curve with boundary W.W^-1: two circles split to arcs, the
    relator arc circulates W, everything rejoins and dies at the maximum."""
    w = Word(w)
    b = _Builder()
    b.push(BirthCircle(("W^-1", "W")))
    b.push(BirthCircle(("w^-1", "w")))
    b.push(SplitCircleToArc(0, "W^-1", "W"))
    b.push(SplitCircleToArc(1, "w^-1", "w"))
    if identify:
        b.push(IdentifyEdges("W", "W^-1"))
        b.push(IdentifyEdges("w", "w^-1"))
    for x in w:
        b.push(CirculateStep(0, x, "W"))
    b.push(JoinArcsToCircle(0, 1, "Q"))
    b.push(DeathCircle(0))
    return b.done((ReadoutStrand("W", "as_is"), ReadoutStrand("W", "invert")))


def slice_inverse_pair(r) -> SliceSequence:
    """A relator and its inverse, circulating in step in opposite
    directions, each exiting through its own circle."""
    r = Word(r)
    b = _Builder()
    b.push(BirthCircle(("R", "r")))
    b.push(BirthCircle(("R^-1", "r^-1")))
    b.push(SplitCircleToArc(0, "R", "r"))
    b.push(SplitCircleToArc(1, "R^-1", "r^-1"))
    for x in r:
        b.push(CirculateStep(0, x, "R"))
        b.push(CirculateStep(1, -x, "R^-1"))
    b.push(JoinArcsToCircle(0))
    b.push(JoinArcsToCircle(1))
    b.push(DeathCircle(1))
    b.push(DeathCircle(0))
    return b.done((ReadoutStrand("R", "as_is"), ReadoutStrand("R^-1", "reverse")))


_COMM_READOUT = (
    ReadoutStrand("R", "as_is"),
    ReadoutStrand("S", "as_is"),
    ReadoutStrand("R^-1", "reverse"),
    ReadoutStrand("S^-1", "reverse"),
)


def slice_commutator(r, s, dominant: str = "R", identify: bool = False) -> SliceSequence:
    """Commutator cell [R,S]: four circles, the dominant pair circulates
    to the midlevel where the arcs merge pairwise, then the other pair
    circulates to the top, joins and dies.

    ``identify`` inserts the fixed identification ladder (edge-path pairs,
    then the relator pairs, then one endpoint reorder) right after the
    splits; the midlevel and top identifications coincide with the merges
    already present.
    """
    r, s = Word(r), Word(s)
    if dominant not in ("R", "S"):
        raise InputError("dominant must be 'R' or 'S'")
    b = _Builder()
    b.push(BirthCircle(("S^-1", "R")))
    b.push(BirthCircle(("r", "S")))
    b.push(BirthCircle(("s", "r^-1")))
    b.push(BirthCircle(("R^-1", "s^-1")))
    b.push(SplitCircleToArc(0, "S^-1", "R"))
    b.push(SplitCircleToArc(1, "r", "S"))
    b.push(SplitCircleToArc(2, "s", "r^-1"))
    b.push(SplitCircleToArc(3, "R^-1", "s^-1"))
    if identify:
        b.push(IdentifyEdges("r", "r^-1"))
        b.push(IdentifyEdges("s", "s^-1"))
        b.push(IdentifyEdges("R", "R^-1"))
        b.push(IdentifyEdges("S", "S^-1"))
        b.push(ReorderStep(1))
    if dominant == "R":
        for x in r:
            b.push(CirculateStep(0, x, "R"))
            b.push(CirculateStep(3, -x, "R^-1"))
        b.push(MergeArcs(0, 1, "M"))
        b.push(MergeArcs(1, 2, "M"))
        for x in s:
            b.push(CirculateStep(0, x, "S"))
            b.push(CirculateStep(0, -x, "S^-1"))
    else:
        for x in s:
            b.push(CirculateStep(1, x, "S"))
            b.push(CirculateStep(0, -x, "S^-1"))
        b.push(MergeArcs(1, 2, "M"))
        b.push(MergeArcs(2, 0, "M"))
        for x in r:
            b.push(CirculateStep(0, x, "R"))
            b.push(CirculateStep(0, -x, "R^-1"))
    b.push(JoinArcsToCircle(0, 1, "Q"))
    b.push(DeathCircle(0))
    return b.done(_COMM_READOUT)


def slice_product(r, s) -> SliceSequence:
    """Product cell R.S^-1: the R arc circulates to the midlevel, is
    absorbed into the other arc, and the S^-1 circulation runs to the top."""
    r, s = Word(r), Word(s)
    b = _Builder()
    b.push(BirthCircle(("r", "R")))
    b.push(BirthCircle(("S^-1", "s^-1")))
    b.push(SplitCircleToArc(0, "r", "R"))
    b.push(SplitCircleToArc(1, "S^-1", "s^-1"))
    for x in r:
        b.push(CirculateStep(0, x, "R"))
    b.push(MergeArcs(1, 0, "M", absorb=True))
    for x in s:
        b.push(CirculateStep(0, -x, "S^-1"))
    b.push(JoinArcsToCircle(0, mark="Q"))
    b.push(DeathCircle(0))
    return b.done((ReadoutStrand("R", "as_is"), ReadoutStrand("S^-1", "reverse")))


def _shift_move(m: LocalMove, off: int, prefix: str) -> LocalMove:
    if isinstance(m, DeathCircle):
        return DeathCircle(m.index + off)
    if isinstance(m, SplitCircleToArc):
        return SplitCircleToArc(m.index + off, m.left, m.right)
    if isinstance(m, JoinArcsToCircle):
        other = None if m.other is None else m.other + off
        return JoinArcsToCircle(m.index + off, other, m.mark)
    if isinstance(m, CirculateStep):
        return CirculateStep(m.index + off, m.letter, prefix + m.strand)
    if isinstance(m, MergeArcs):
        return MergeArcs(m.index + off, m.other + off, m.mark, m.absorb)
    if isinstance(m, ReorderStep):
        return ReorderStep(m.index + off)
    if isinstance(m, SaddlePair):
        return SaddlePair(m.index + off)
    if isinstance(m, JoinCells):
        return JoinCells(m.index + off, m.other + off)
    if isinstance(m, SplitCells):
        return SplitCells(m.index + off, m.marks_first, m.marks_second)
    return m  # BirthCircle, IdentifyEdges carry no component indices


def connect(pieces) -> SliceSequence:
    """One sequence containing every piece: a single absolute-minimum root
    circle, each piece entered at its own local minima; with two or more
    pieces each piece's final circle is joined into the root cell and split
    back out before dying.  Circulation moves are replayed verbatim."""
    pieces = list(pieces)
    if not pieces:
        raise InputError("connect needs at least one piece")
    for p in pieces:
        if not validate(p):
            raise SliceError("connect requires validated pieces")
    b = _Builder()
    b.push(BirthCircle(("root",)))
    readout: list[ReadoutStrand] = []
    if len(pieces) == 1:
        for m in pieces[0].moves:
            b.push(_shift_move(m, 1, "0:"))
        readout += [ReadoutStrand("0:" + r.key, r.transform) for r in pieces[0].readout]
        b.push(DeathCircle(0))
        return b.done(readout)

    leftovers: list[tuple[int, int]] = []  # (piece id, live index of its circle)
    for pid, p in enumerate(pieces):
        moves = list(p.moves)
        trailing = 0
        while moves and isinstance(moves[-1], DeathCircle):
            moves.pop()
            trailing += 1
        off = len(b.components)
        for m in moves:
            b.push(_shift_move(m, off, "%d:" % pid))
        got = len(b.components) - off
        if got != trailing:
            raise SliceError("piece %d does not end in its own circles" % pid)
        leftovers += [(pid, off + i) for i in range(got)]
        readout += [ReadoutStrand("%d:%s" % (pid, r.key), r.transform) for r in p.readout]
    # join each piece circle into the root cell, split it back, let it die
    for _ in leftovers:
        c = b.components[1]
        _need(isinstance(c, Circle), "piece leftover must be a circle")
        root = b.components[0]
        b.push(JoinCells(0, 1))
        b.push(SplitCells(0, root.marks, c.marks))
        b.push(DeathCircle(len(b.components) - 1))
    b.push(DeathCircle(0))
    return b.done(readout)


# --- text dump ------------------------------------------------------------


def _move_text(m: LocalMove) -> str:
    name = type(m).__name__
    vals = []
    for f in m.__dataclass_fields__:
        v = getattr(m, f)
        if isinstance(v, tuple):
            vals.append(",".join(v) if v else "-")
        elif isinstance(v, bool):
            vals.append("absorb" if v else "plain")
        elif v is None:
            vals.append("-")
        else:
            vals.append(str(v))
    return "-- %s %s" % (name, " ".join(vals))


def format_sequence(seq: SliceSequence) -> str:
    lines = []
    for k, s in enumerate(seq.slices):
        lines.append("slice %d" % s.level)
        for c in s.components:
            if isinstance(c, Circle):
                lines.append("C[%s]" % ",".join(c.marks))
            else:
                lines.append("A[%s,%s;trace=%s]" % (c.left, c.right, format_word(c.trace)))
        if k < len(seq.moves):
            lines.append(_move_text(seq.moves[k]))
    return "\n".join(lines) + "\n"


# --- abstract slice sequences --------------------------------------------


@dataclass(frozen=True)
class SphereToken:
    pass


@dataclass(frozen=True)
class CellToken:
    word: Word


@dataclass(frozen=True)
class SpElToken:
    kind: str  # "bag" | "invpair"
    word: Word
    index: int


@dataclass(frozen=True)
class CommutatorToken:
    word: Word
    index: int


Token = Union[SphereToken, CellToken, SpElToken, CommutatorToken]

LONGITUDINAL = "longitudinal"
MERIDIAN = "meridian"


def token_text(t: Token) -> str:
    if isinstance(t, SphereToken):
        return "S2"
    if isinstance(t, CellToken):
        return "cell:%s" % format_word(t.word)
    if isinstance(t, SpElToken):
        return "spel:%s:%s" % (t.kind, format_word(t.word))
    if isinstance(t, CommutatorToken):
        return "comm:%s" % format_word(t.word)
    raise InputError("unknown token %r" % (t,))


@dataclass(frozen=True)
class AbstractSlice:
    level: int
    tokens: Tuple[Token, ...]


_TRANSITIONS = ("Transform", "Split", "Join", "Transform", "Join", "Split", "Transform")


@dataclass(frozen=True)
class AbstractSequence:
    slices: Tuple[AbstractSlice, ...]
    identification: str
    factor_count: int
    perturbation_index: int = 3
    transitions: Tuple[str, ...] = _TRANSITIONS


def spel_kinds(identification: str) -> Tuple[str, str]:
    """(kind on the r-side relators, kind on the s-side relators)."""
    if identification == LONGITUDINAL:
        return ("invpair", "bag")
    if identification == MERIDIAN:
        return ("bag", "invpair")
    raise InputError("unknown identification type %r" % identification)


def build_abstract(
    inst,
    identification: str,
    residual: Optional[Word] = None,
    residual_side: str = "r",
    orientation: int = 1,
) -> AbstractSequence:
    """Canonical eight-slice sequence for a verified instance.

    ``residual`` adds the leftover cell riding with the product cell on
    both sides of the perturbation transition; the instance then only has
    to satisfy the residual-corrected criterion for the stated side.
    ``orientation = -1`` reads every 2-cell with reversed boundary
    orientation (all token words inverted), which is how the swapped-side
    comparison is built.
    """
    if orientation not in (1, -1):
        raise InputError("orientation must be +1 or -1")
    if residual is None:
        ok = crit.verify(inst)
    elif residual_side == "r":
        ok = reduce(tuple(residual) + tuple(crit.verification_word(inst))) == ()
    elif residual_side == "s":
        ok = (
            reduce(
                tuple(inst.r_word)
                + tuple(invert(inst.s_word))
                + tuple(residual)
                + tuple(crit.commutator_product(inst))
            )
            == ()
        )
    else:
        raise InputError("residual_side must be 'r' or 's'")
    if not ok:
        raise crit.InvalidInstance("instance fails the commutator criterion")
    orient = (lambda w: w) if orientation == 1 else invert
    kind_r, kind_s = spel_kinds(identification)
    spels: list[Token] = []
    comms: list[Token] = []
    for i, (rw, sw) in enumerate(inst.expanded()):
        spels.append(SpElToken(kind_r, orient(rw), i))
        spels.append(SpElToken(kind_s, orient(sw), i))
        comms.append(CommutatorToken(orient(comm_word(sw, rw)), i))
    cell_r = CellToken(orient(inst.r_word))
    cell_s_inv = CellToken(orient(invert(inst.s_word)))
    prod = CellToken(orient(reduce(tuple(inst.r_word) + tuple(invert(inst.s_word)))))
    riders: tuple = (CellToken(orient(Word(residual))),) if residual is not None else ()
    seq = (
        (),
        (SphereToken(), SphereToken()),
        (cell_r, cell_s_inv) + tuple(spels),
        (prod,) + riders + tuple(spels),
        (prod,) + riders + tuple(comms),
        (CellToken(Word()),),
        (SphereToken(), SphereToken()),
        (),
    )
    slices = tuple(AbstractSlice(k, toks) for k, toks in enumerate(seq))
    return AbstractSequence(slices, identification, len(inst.factors))


def abstract_ok(aseq: AbstractSequence) -> bool:
    """Structural sanity: empty ends, product cell flanked by the
    spherical elements before and the commutators after the perturbation."""
    s = aseq.slices
    if len(s) != 8 or s[0].tokens or s[-1].tokens:
        return False
    if any(sl.level != k for k, sl in enumerate(s)):
        return False
    p = aseq.perturbation_index
    before, after = s[p].tokens, s[p + 1].tokens
    n = aseq.factor_count
    spel = [t for t in before if isinstance(t, SpElToken)]
    comm = [t for t in after if isinstance(t, CommutatorToken)]
    cells_before = [t for t in before if isinstance(t, CellToken)]
    cells_after = [t for t in after if isinstance(t, CellToken)]
    return (
        len(spel) == 2 * n
        and len(comm) == n
        and len(spel) + len(cells_before) == len(before)
        and len(comm) + len(cells_after) == len(after)
        and cells_before == cells_after
    )


def format_abstract(aseq: AbstractSequence) -> str:
    lines = ["identification %s" % aseq.identification]
    for sl in aseq.slices:
        toks = " ".join(sorted(token_text(t) for t in sl.tokens))
        marker = "  <- perturbation" if sl.level == aseq.perturbation_index else ""
        lines.append("slice %d: %s%s" % (sl.level, toks if toks else "(empty)", marker))
    return "\n".join(lines) + "\n"
