"""State sums of colored trivalent graphs and derived invariants.

Vertex weights come from a fully symmetric 3j table; a graph evaluates to
the sum over all edge/circle colorings of the product of its vertex
weights.  Slicings contribute through products of local-move differences,
reduced modulo the ideal generated by declared move relations; the
symbolic expansion shows where multiplicativity of that product breaks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .ring import Polynomial, parse_scalar, poly_gcd, poly_inverse_mod, poly_mod
from .words import InputError

Value = Union[Fraction, Polynomial]
Triple = Tuple[int, int, int]


def _value_eq(a: Value, b: Value) -> bool:
    if isinstance(a, Polynomial) or isinstance(b, Polynomial):
        return (a - b if isinstance(a, Polynomial) else b - a).is_zero()
    return a == b


@dataclass(frozen=True)
class ThreeJTable:
    color_count: int
    entries: Dict[Triple, Value]

    def lookup(self, a: int, b: int, c: int) -> Value:
        for x in (a, b, c):
            if not 0 <= x < self.color_count:
                raise InputError("color %d out of range" % x)
        return self.entries.get(tuple(sorted((a, b, c))), Fraction(0))


def complete_table(partial: Iterable[Tuple[Triple, Value]], color_count: int) -> ThreeJTable:
    """Close the given entries under full triple symmetry; conflicting
    assignments to one orbit are an input error."""
    if color_count < 1:
        raise InputError("need at least one color")
    entries: Dict[Triple, Value] = {}
    for triple, value in partial:
        key = tuple(sorted(triple))
        if key in entries and not _value_eq(entries[key], value):
            raise InputError(
                "3j symmetry conflict on %s: %s vs %s" % (key, entries[key], value)
            )
        entries[key] = value
    return ThreeJTable(color_count, entries)


@dataclass(frozen=True)
class TrivalentGraph:
    vertices: Tuple[int, ...] = ()
    edges: Tuple[Tuple[int, int], ...] = ()
    circles: int = 0
    points: int = 0

    def __post_init__(self):
        degree = {v: 0 for v in self.vertices}
        if len(set(self.vertices)) != len(self.vertices):
            raise InputError("duplicate vertex ids")
        for a, b in self.edges:
            for v in (a, b):
                if v not in degree:
                    raise InputError("edge endpoint %d is not a vertex" % v)
                degree[v] += 1
        bad = [v for v, d in degree.items() if d != 3]
        if bad:
            raise InputError("vertices %s do not have degree 3" % bad)
        if self.circles < 0 or self.points < 0:
            raise InputError("negative component count")

    def slots(self) -> int:
        return len(self.edges) + self.circles


def certificate(g: TrivalentGraph):
    """Brute-force canonical form under vertex relabeling (desk scale)."""
    n = len(g.vertices)
    best = None
    for perm in permutations(range(n)):
        relabel = {v: perm[i] for i, v in enumerate(g.vertices)}
        edges = tuple(sorted(tuple(sorted((relabel[a], relabel[b]))) for a, b in g.edges))
        if best is None or edges < best:
            best = edges
    return (n, best or (), g.circles, g.points)


def isomorphic(g1: TrivalentGraph, g2: TrivalentGraph) -> bool:
    return certificate(g1) == certificate(g2)


def eval_coloring(g: TrivalentGraph, coloring: Sequence[int], t: ThreeJTable) -> Value:
    """Product of |abc| over vertices and |ccc| over circles."""
    if len(coloring) != g.slots():
        raise InputError("coloring must assign every edge and circle")
    total: Value = Fraction(1)
    for v in g.vertices:
        incident = []
        for i, (a, b) in enumerate(g.edges):
            if a == v:
                incident.append(coloring[i])
            if b == v:
                incident.append(coloring[i])
        total = total * t.lookup(*incident)
    for j in range(g.circles):
        c = coloring[len(g.edges) + j]
        total = total * t.lookup(c, c, c)
    return total


def state_sum(g: TrivalentGraph, t: ThreeJTable) -> Value:
    total: Value = Fraction(0)
    for coloring in product(range(t.color_count), repeat=g.slots()):
        total = total + eval_coloring(g, coloring, t)
    return total


def wedge(g1: TrivalentGraph, g2: TrivalentGraph, t: Optional[ThreeJTable] = None) -> TrivalentGraph:
    """Disjoint union; the wedge point carries no weight.  With a table
    given, multiplicativity of the state sum is checked on the spot."""
    offset = max(g1.vertices, default=-1) + 1
    g = TrivalentGraph(
        g1.vertices + tuple(v + offset for v in g2.vertices),
        g1.edges + tuple((a + offset, b + offset) for a, b in g2.edges),
        g1.circles + g2.circles,
        g1.points + g2.points,
    )
    if t is not None:
        combined = state_sum(g, t)
        split = state_sum(g1, t) * state_sum(g2, t)
        if not _value_eq(combined, split):
            raise InputError("state sum failed multiplicativity: %s vs %s" % (combined, split))
    return g


def move_value(before: TrivalentGraph, after: TrivalentGraph, t: ThreeJTable) -> Value:
    return state_sum(after, t) - state_sum(before, t)


MovePair = Tuple[TrivalentGraph, TrivalentGraph]


@dataclass(frozen=True)
class MoveSequence:
    moves: Tuple[MovePair, ...]
    relations: Tuple[Tuple[Tuple[MovePair, ...], Tuple[MovePair, ...]], ...] = ()


def _moves_product(moves: Sequence[MovePair], t: ThreeJTable) -> Value:
    total: Value = Fraction(1)
    for before, after in moves:
        total = total * move_value(before, after, t)
    return total


def ideal_reduce(value: Value, generators: Sequence[Value]) -> Value:
    """Reduce modulo the ideal the generators span: numeric generators
    collapse everything to 0 unless all vanish; univariate polynomial
    generators reduce by remainder mod their gcd."""
    gens = [g for g in generators if not _value_eq(g, Fraction(0))]
    if not gens:
        return value
    polys = [g for g in gens if isinstance(g, Polynomial)]
    names = {n for g in polys for n in g.variables()}
    if isinstance(value, Polynomial):
        names |= set(value.variables())
    if len(names) > 1:
        raise InputError("ideal reduction supports one indeterminate, got %s" % sorted(names))
    if not names:
        return Fraction(0)  # a nonzero constant generates the whole ring
    modulus = None
    for g in gens:
        g = g if isinstance(g, Polynomial) else Polynomial.const(g)
        modulus = g if modulus is None else poly_gcd(modulus, g)
    if modulus.is_constant():
        return Fraction(0)
    value = value if isinstance(value, Polynomial) else Polynomial.const(value)
    return poly_mod(value, modulus)


def invariant(ms: MoveSequence, t: ThreeJTable) -> Value:
    """Product of the move values, reduced modulo the relation ideal."""
    for k in range(len(ms.moves) - 1):
        if not isomorphic(ms.moves[k][1], ms.moves[k + 1][0]):
            raise InputError("move list breaks the chain at step %d" % k)
    total = _moves_product(ms.moves, t)
    generators = [
        _moves_product(a, t) - _moves_product(b, t) for a, b in ms.relations
    ]
    return ideal_reduce(total, generators)


# --- the non-multiplicativity computation ----------------------------------


def nonmult_expand() -> Polynomial:
    """Difference between the factored and the direct two-step products,
    pinned down to one variable.  The result is the exact quartic
    2S^4 - 4S^3 + 4S^2 - 4S + 2, which has no rational root besides the
    trivial locus S = 1."""
    ks, ks1, ks2 = (Polynomial.var(n) for n in ("Ks", "Ks1", "Ks2"))
    ls, ls1, ls2 = (Polynomial.var(n) for n in ("Ls", "Ls1", "Ls2"))
    expr1 = (ks1 * ls1 - ks * ls) * (ks2 * ls2 - ks1 * ls1)
    expr2 = (ks1 - ks) * (ks2 - ks1) * (ls1 - ls) * (ls2 - ls1)
    diff = expr2 - expr1
    s = Polynomial.var("S")
    one = Polynomial.const(1)
    return diff.subs({"Ls": one, "Ls2": one, "Ks": one, "Ks2": one, "Ks1": s, "Ls1": s})


@dataclass(frozen=True)
class NonMultReport:
    s_value: Value
    value: Value
    multiplicative: Optional[bool]  # None when symbolic

    def __str__(self):
        if self.multiplicative is None:
            return "symbolic: %s" % self.value
        if self.multiplicative:
            return "S = %s sits on the multiplicative locus" % self.s_value
        return "non-multiplicative at S = %s: defect %s" % (self.s_value, self.value)


def nonmult_check(t: ThreeJTable) -> NonMultReport:
    s_val: Value = Fraction(0)
    for a in range(t.color_count):
        s_val = s_val + t.lookup(a, a, a)
    quartic = nonmult_expand()
    if isinstance(s_val, Polynomial) and not s_val.is_constant():
        return NonMultReport(s_val, quartic, None)
    plain = s_val.constant_value() if isinstance(s_val, Polynomial) else s_val
    value = quartic(S=plain)
    return NonMultReport(plain, value, value == 0)


# --- polynomial local invariant ---------------------------------------------


def poly_local_invariant(ps: Sequence[Polynomial], g: Polynomial, x3: Fraction) -> Polynomial:
    """Product of the level-transition quotients Q_k = P_{k+1}/P_k mod g,
    with the fourth level replaced by its perturbed version P_4(c3·x)."""
    ps = list(ps)
    if len(ps) != 6:
        raise InputError("need exactly six level polynomials")
    names = set(g.variables())
    for p in ps:
        names |= set(p.variables())
    if len(names) > 1:
        raise InputError("level polynomials must share one variable")
    var = names.pop() if names else "x"
    for k, p in enumerate(ps, start=1):
        if poly_gcd(p, g, var) != Polynomial.const(1):
            raise InputError("P_%d is not invertible modulo the ideal" % k)
    c3 = ps[2].subs({var: Fraction(x3)}).constant_value()
    if c3 in (0, 1):
        raise InputError("evaluation point gives c3 = %s; need c3 outside {0, 1}" % c3)

    def quotient(num: Polynomial, den: Polynomial) -> Polynomial:
        return poly_mod(num * poly_inverse_mod(den, g, var), g, var)

    qs = {k: quotient(ps[k], ps[k - 1]) for k in (1, 2, 3, 5)}
    perturbed = ps[3].subs({var: Polynomial.var(var) * c3})
    q4 = quotient(perturbed, ps[3])
    out = Polynomial.const(1)
    for q in (qs[1], qs[2], qs[3], q4, qs[5]):
        out = out * q
    return poly_mod(out, g, var)


# --- file I/O ----------------------------------------------------------------


def parse_table(text: str) -> ThreeJTable:
    """CSV lines ``a,b,c,value``; value is an integer, a rational p/q, or
    an indeterminate name."""
    rows: List[Tuple[Triple, Value]] = []
    top = -1
    for ln in text.splitlines():
        ln = ln.split("#", 1)[0].strip()
        if not ln:
            continue
        parts = [p.strip() for p in ln.split(",")]
        if len(parts) != 4:
            raise InputError("3j line needs a,b,c,value: %r" % ln)
        try:
            a, b, c = (int(p) for p in parts[:3])
        except ValueError:
            raise InputError("bad colors in %r" % ln) from None
        rows.append(((a, b, c), parse_scalar(parts[3])))
        top = max(top, a, b, c)
    return complete_table(rows, max(top + 1, 1))


def load_table(path: str) -> ThreeJTable:
    with open(path) as fh:
        return parse_table(fh.read())


def parse_graph(text: str) -> TrivalentGraph:
    """Lines: ``v <id>``, ``e <v1> <v2> [ports...]``, ``circle``."""
    vertices: List[int] = []
    edges: List[Tuple[int, int]] = []
    circles = 0
    for ln in text.splitlines():
        ln = ln.split("#", 1)[0].strip()
        if not ln:
            continue
        parts = ln.split()
        if parts[0] == "v" and len(parts) == 2:
            vertices.append(int(parts[1]))
        elif parts[0] == "e" and len(parts) in (3, 5):
            edges.append((int(parts[1]), int(parts[2])))
        elif parts[0] == "circle" and len(parts) == 1:
            circles += 1
        else:
            raise InputError("bad graph line %r" % ln)
    return TrivalentGraph(tuple(vertices), tuple(edges), circles)


def load_graph(path: str) -> TrivalentGraph:
    with open(path) as fh:
        return parse_graph(fh.read())
