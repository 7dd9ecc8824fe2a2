"""Commutator-product verification for relator pairs.

A pair of relators R (in presentation K) and S (in presentation L) passes
the criterion when R.S^-1 equals a product of commutators of conjugated
relators, one commutator per decomposition factor.  Two equivalent word
equations are computed:

* product form:       R.S^-1 = [R_n,S_n]...[R_1,S_1]   (reversed order)
* verification form:  R.S^-1.[S_1,R_1]...[S_n,R_n] = 1

where R_i, S_i are the expanded conjugated relators of factor i.  The
residual of a relator move records the leftover cell: replacing R by R'
leaves L' with L'.R' = R, replacing S by S' leaves M'^-1 with
S'^-1.M'^-1 = S^-1.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, replace
from typing import Optional, Tuple

from . import presentations as pres
from .presentations import Presentation, QMove, NielsenMove, apply_nielsen, apply_qmove
from .words import (
    InputError,
    Word,
    commutator,
    equal,
    format_word,
    invert,
    parse_word,
    reduce,
    substitute,
)


class InvalidInstance(ValueError):
    """A precondition on a criterion instance does not hold."""


@dataclass(frozen=True)
class ConjugatedRelator:
    conjugator: Word
    base: str
    exponent: int = 1

    def __post_init__(self):
        if self.exponent not in (1, -1):
            raise InputError("exponent must be +1 or -1")

    def expand(self, p: Presentation) -> Word:
        w = p.word(self.base)
        if self.exponent == -1:
            w = invert(w)
        c = tuple(self.conjugator)
        return reduce(c + tuple(w) + tuple(invert(Word(c))))


@dataclass(frozen=True)
class Factor:
    r: ConjugatedRelator  # resolves in K
    s: ConjugatedRelator  # resolves in L


@dataclass(frozen=True)
class CriterionInstance:
    k: Presentation
    l: Presentation
    r_name: str
    s_name: str
    factors: Tuple[Factor, ...]

    def __post_init__(self):
        self.k.word(self.r_name)
        self.l.word(self.s_name)
        for f in self.factors:
            self.k.word(f.r.base)
            self.l.word(f.s.base)

    @property
    def r_word(self) -> Word:
        return self.k.word(self.r_name)

    @property
    def s_word(self) -> Word:
        return self.l.word(self.s_name)

    def expanded(self) -> Tuple[Tuple[Word, Word], ...]:
        """Per factor: (expanded r-side word, expanded s-side word)."""
        return tuple((f.r.expand(self.k), f.s.expand(self.l)) for f in self.factors)


def commutator_product(inst: CriterionInstance) -> Word:
    """[S_1,R_1]...[S_n,R_n] in decomposition order."""
    out: tuple = ()
    for rw, sw in inst.expanded():
        out = out + tuple(commutator(sw, rw))
    return reduce(out)


def verification_word(inst: CriterionInstance) -> Word:
    """R.S^-1.[S_1,R_1]...[S_n,R_n], freely reduced."""
    return reduce(
        tuple(inst.r_word)
        + tuple(invert(inst.s_word))
        + tuple(commutator_product(inst))
    )


def verify(inst: CriterionInstance) -> bool:
    return len(verification_word(inst)) == 0


def product_sides(inst: CriterionInstance) -> Tuple[Word, Word]:
    """The product form: (reduce(R.S^-1), [R_n,S_n]...[R_1,S_1])."""
    lhs = reduce(tuple(inst.r_word) + tuple(invert(inst.s_word)))
    out: tuple = ()
    for rw, sw in reversed(inst.expanded()):
        out = out + tuple(commutator(rw, sw))
    return lhs, reduce(out)


# --- residuals -----------------------------------------------------------


def residual_r(r: Word, r_new: Word) -> Word:
    """Leftover cell of replacing R by R_new: L' with L'.R_new = R."""
    return reduce(tuple(r) + tuple(invert(r_new)))


def residual_s(s: Word, s_new: Word) -> Word:
    """Leftover cell of replacing S by S_new: M'^-1 with S_new^-1.M'^-1 = S^-1."""
    return reduce(tuple(s_new) + tuple(invert(s)))


@dataclass(frozen=True)
class ResidualCommutatorCheck:
    ok: bool
    l_prime: Word
    inverse_commutator_product: Word
    m_prime_inv: Word


def residual_commutator_check(inst: CriterionInstance) -> ResidualCommutatorCheck:
    """For the move replacing R by S itself: the leftover L' must equal the
    inverse of the commutator product, and the two residual routes agree."""
    if not verify(inst):
        raise InvalidInstance("instance does not verify")
    l_prime = residual_r(inst.r_word, inst.s_word)
    m_prime_inv = residual_s(inst.s_word, inst.r_word)
    inv_prod = invert(commutator_product(inst))
    ok = equal(l_prime, inv_prod) and equal(l_prime, m_prime_inv)
    return ResidualCommutatorCheck(ok, l_prime, inv_prod, m_prime_inv)


# --- gauge (role swap of the two sides) ----------------------------------


def gauge(inst: CriterionInstance) -> CriterionInstance:
    """Swap the two sides: compare S against R.  Factors reverse their
    order and swap their r/s roles (the commutator product inverts)."""
    return CriterionInstance(
        k=inst.l,
        l=inst.k,
        r_name=inst.s_name,
        s_name=inst.r_name,
        factors=tuple(Factor(r=f.s, s=f.r) for f in reversed(inst.factors)),
    )


# --- seeded instance generation ------------------------------------------


def _random_reduced_word(rng: random.Random, n_gens: int, length: int) -> Word:
    letters: list[int] = []
    while len(letters) < length:
        x = rng.choice([g for g in range(1, n_gens + 1)] + [-g for g in range(1, n_gens + 1)])
        if letters and letters[-1] == -x:
            continue
        letters.append(x)
    return Word(letters)


def build_instance(
    seed: int,
    n_generators: int = 2,
    n_factors: int = 2,
    max_conjugator_len: int = 3,
) -> CriterionInstance:
    """Deterministically draw a verifying instance: random conjugated
    relators and S, then R defined by the product form."""
    if n_generators < 1 or n_factors < 0:
        raise InputError("need at least one generator and a nonnegative factor count")
    rng = random.Random(seed)
    k_aux = [
        ("x%d" % (i + 1), _random_reduced_word(rng, n_generators, rng.randint(1, 3)))
        for i in range(max(n_factors, 1))
    ]
    l_aux = [
        ("y%d" % (i + 1), _random_reduced_word(rng, n_generators, rng.randint(1, 3)))
        for i in range(max(n_factors, 1))
    ]
    factors = []
    for _ in range(n_factors):
        factors.append(
            Factor(
                r=ConjugatedRelator(
                    _random_reduced_word(rng, n_generators, rng.randint(0, max_conjugator_len)),
                    rng.choice(k_aux)[0],
                    rng.choice((1, -1)),
                ),
                s=ConjugatedRelator(
                    _random_reduced_word(rng, n_generators, rng.randint(0, max_conjugator_len)),
                    rng.choice(l_aux)[0],
                    rng.choice((1, -1)),
                ),
            )
        )
    s_word = _random_reduced_word(rng, n_generators, rng.randint(1, 4))
    l = Presentation(n_generators, (("S", s_word),) + tuple(l_aux))
    k_probe = Presentation(n_generators, (("R", Word()),) + tuple(k_aux))
    probe = CriterionInstance(k_probe, l, "R", "S", tuple(factors))
    prod: tuple = ()
    for rw, sw in reversed(probe.expanded()):
        prod = prod + tuple(commutator(rw, sw))
    r_word = reduce(prod + tuple(s_word))
    k = Presentation(n_generators, (("R", r_word),) + tuple(k_aux))
    inst = CriterionInstance(k, l, "R", "S", tuple(factors))
    assert verify(inst)
    return inst


def mutate_conjugator(inst: CriterionInstance, seed: int) -> CriterionInstance:
    """Change one letter of one decomposition conjugator (test helper).

    A letter change can be absorbed when it lies in the centralizer of the
    base relator (conjugating ``a`` by ``a`` does nothing), so candidates
    are redrawn until the expanded decomposition actually differs.
    """
    if not inst.factors:
        raise InvalidInstance("no factors to mutate")
    rng = random.Random(seed)
    for _ in range(64):
        i = rng.randrange(len(inst.factors))
        f = inst.factors[i]
        side = rng.choice(("r", "s"))
        c = f.r if side == "r" else f.s
        letters = list(c.conjugator)
        x = rng.choice(
            [g for g in range(1, inst.k.generator_count + 1)]
            + [-g for g in range(1, inst.k.generator_count + 1)]
        )
        if letters:
            j = rng.randrange(len(letters))
            if letters[j] == x:
                x = -x
            letters[j] = x
        else:
            letters.append(x)
        c2 = ConjugatedRelator(Word(letters), c.base, c.exponent)
        f2 = Factor(r=c2, s=f.s) if side == "r" else Factor(r=f.r, s=c2)
        factors = tuple(f2 if j == i else g for j, g in enumerate(inst.factors))
        mutated = replace(inst, factors=factors)
        if mutated.expanded() != inst.expanded():
            return mutated
    raise InvalidInstance("could not find a non-absorbed mutation")


# --- transport under relator moves and substitutions ---------------------


@dataclass(frozen=True)
class QMoveTransport:
    instance: CriterionInstance  # carries the moved relator
    residual: Word  # L' (move on R) or M'^-1 (move on S)
    side: str  # "R" | "S"
    ok: bool  # the transported equation reduces to 1


def transport_qmove(inst: CriterionInstance, m: QMove) -> QMoveTransport:
    """Apply a relator move to R or S and record the leftover cell.

    The transported equation prepends L' to the product (move on R) or
    splices M'^-1 behind the moved S (move on S); either way it must
    still reduce to the empty word.
    """
    comm = commutator_product(inst)
    if m.target == inst.r_name:
        k2 = apply_qmove(inst.k, m)
        new = k2.word(inst.r_name)
        res = residual_r(inst.r_word, new)
        eqn = reduce(
            tuple(res) + tuple(new) + tuple(invert(inst.s_word)) + tuple(comm)
        )
        return QMoveTransport(replace(inst, k=k2), res, "R", len(eqn) == 0)
    if m.target == inst.s_name:
        l2 = apply_qmove(inst.l, m)
        new = l2.word(inst.s_name)
        res = residual_s(inst.s_word, new)
        eqn = reduce(
            tuple(inst.r_word) + tuple(invert(new)) + tuple(res) + tuple(comm)
        )
        return QMoveTransport(replace(inst, l=l2), res, "S", len(eqn) == 0)
    raise InvalidInstance(
        "move target %r is neither %s nor %s" % (m.target, inst.r_name, inst.s_name)
    )


def nielsen_transport(
    inst: CriterionInstance, m: NielsenMove, one_sided: bool = False
) -> CriterionInstance:
    """Substitute a generator in both presentations and in every
    decomposition conjugator.  ``one_sided`` applies the substitution to K
    only (deliberately losing the s-side control)."""
    k2 = apply_nielsen(inst.k, m)
    l2 = inst.l if one_sided else apply_nielsen(inst.l, m)
    repl = m.replacement()

    def sub_conj(c: ConjugatedRelator) -> ConjugatedRelator:
        return ConjugatedRelator(substitute(c.conjugator, m.gen, repl), c.base, c.exponent)

    factors = tuple(Factor(r=sub_conj(f.r), s=sub_conj(f.s)) for f in inst.factors)
    return replace(inst, k=k2, l=l2, factors=factors)


# --- file formats ---------------------------------------------------------


def parse_decomposition(text: str) -> Tuple[Factor, ...]:
    """Lines: ``factor wR=<word> R=<name>^<+1|-1> wS=<word> S=<name>^<+1|-1>``."""
    factors = []
    for lineno, parts in pres._content_lines(text):
        if parts[0] != "factor" or len(parts) != 5:
            raise InputError("line %d: bad factor line" % lineno)
        fields = {}
        for part in parts[1:]:
            if "=" not in part:
                raise InputError("line %d: bad field %r" % (lineno, part))
            key, val = part.split("=", 1)
            fields[key] = val
        if set(fields) != {"wR", "R", "wS", "S"}:
            raise InputError("line %d: need wR=, R=, wS=, S= fields" % lineno)

        def split_ref(val: str) -> Tuple[str, int]:
            if "^" not in val:
                raise InputError("line %d: relator reference needs ^+1 or ^-1" % lineno)
            name, exp = val.rsplit("^", 1)
            if exp not in ("+1", "-1") or not name:
                raise InputError("line %d: bad relator reference %r" % (lineno, val))
            return name, 1 if exp == "+1" else -1

        r_base, r_exp = split_ref(fields["R"])
        s_base, s_exp = split_ref(fields["S"])
        factors.append(
            Factor(
                r=ConjugatedRelator(parse_word(fields["wR"]), r_base, r_exp),
                s=ConjugatedRelator(parse_word(fields["wS"]), s_base, s_exp),
            )
        )
    return tuple(factors)


def format_decomposition(factors) -> str:
    lines = []
    for f in factors:
        lines.append(
            "factor wR=%s R=%s^%s wS=%s S=%s^%s"
            % (
                format_word(f.r.conjugator),
                f.r.base,
                "+1" if f.r.exponent == 1 else "-1",
                format_word(f.s.conjugator),
                f.s.base,
                "+1" if f.s.exponent == 1 else "-1",
            )
        )
    return "\n".join(lines) + ("\n" if lines else "")


def parse_instance(text: str, base_dir: str = ".") -> CriterionInstance:
    """Instance file: ``K <path>``, ``L <path>``, ``R <name>``, ``S <name>``,
    ``decomp <path>`` (paths resolved against the instance file's directory)."""
    fields = {}
    for lineno, parts in pres._content_lines(text):
        if len(parts) != 2 or parts[0] not in ("K", "L", "R", "S", "decomp"):
            raise InputError("line %d: bad instance directive" % lineno)
        if parts[0] in fields:
            raise InputError("line %d: duplicate %s" % (lineno, parts[0]))
        fields[parts[0]] = parts[1]
    missing = {"K", "L", "R", "S", "decomp"} - set(fields)
    if missing:
        raise InputError("instance file missing %s" % ", ".join(sorted(missing)))
    k = pres.load_presentation(os.path.join(base_dir, fields["K"]))
    l = pres.load_presentation(os.path.join(base_dir, fields["L"]))
    with open(os.path.join(base_dir, fields["decomp"]), "r", encoding="utf-8") as fh:
        factors = parse_decomposition(fh.read())
    return CriterionInstance(k, l, fields["R"], fields["S"], factors)


def load_instance(path) -> CriterionInstance:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(fh.read(), os.path.dirname(os.path.abspath(path)))
