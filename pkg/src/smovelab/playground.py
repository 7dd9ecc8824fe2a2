"""Matrix playground for abstract slice sequences.

Cell tokens get pairwise-commuting invertible matrices over a prime
field; slices multiply out to endomorphisms A_k, levels are connected by
transition maps F_k with F_k · A_k = A_{k+1}, and the invariant of a
sequence is what survives perturbing the spherical-element transition.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import permutations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import criterion as crit
from . import modmat
from .slicing import (
    AbstractSequence,
    CellToken,
    CommutatorToken,
    LONGITUDINAL,
    MERIDIAN,
    SpElToken,
    SphereToken,
    Token,
    build_abstract,
)
from .words import InputError, Word, format_word, invert

DIAGONAL = "diagonal"
POLY_IN_M = "poly"

PRODUCT = "product"
PERMUTATION_SUM = "permutation_sum"

SPHERE_LABEL = "S2"


def other_type(identification: str) -> str:
    if identification == LONGITUDINAL:
        return MERIDIAN
    if identification == MERIDIAN:
        return LONGITUDINAL
    raise InputError("unknown identification type %r" % identification)


def _canonical(w: Word) -> Word:
    wi = invert(w)
    return w if tuple(w) <= tuple(wi) else wi


def token_label(t: Token, alias: bool = True) -> str:
    """Stable assignment key.  With ``alias`` a word and its inverse get
    the same key, which is how Z(V) = Z(V⁻¹) is enforced."""
    canon = _canonical if alias else (lambda w: w)
    if isinstance(t, SphereToken):
        return SPHERE_LABEL
    if isinstance(t, CellToken):
        return "cell:%s" % format_word(canon(t.word))
    if isinstance(t, SpElToken):
        return "spel:%s:%s" % (t.kind, format_word(canon(t.word)))
    if isinstance(t, CommutatorToken):
        return "comm:%s" % format_word(canon(t.word))
    raise InputError("unknown token %r" % (t,))


def collect_labels(*aseqs: AbstractSequence, alias: bool = True) -> List[str]:
    labels = {SPHERE_LABEL, "cell:1"}
    for aseq in aseqs:
        for sl in aseq.slices:
            for t in sl.tokens:
                labels.add(token_label(t, alias))
    return sorted(labels)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


@dataclass(frozen=True)
class Backend:
    p: int
    dim: int
    family: str
    assignment: Dict[str, np.ndarray]
    alias: bool = True

    @property
    def sphere(self) -> np.ndarray:
        return self.assignment[SPHERE_LABEL]

    def label(self, t: Token) -> str:
        return token_label(t, self.alias)

    def value(self, t: Token) -> np.ndarray:
        lab = self.label(t)
        if lab not in self.assignment:
            raise InputError("token %s has no assigned matrix" % lab)
        return self.assignment[lab]

    def check(self):
        if not is_prime(self.p):
            raise InputError("p must be prime, got %d" % self.p)
        if self.dim < 1:
            raise InputError("dimension must be positive")
        mats = [self.assignment[k] for k in sorted(self.assignment)]
        for m in mats:
            modmat.inverse(m, self.p)  # raises when singular
        for i, a in enumerate(mats):
            for b in mats[i + 1 :]:
                if not modmat.equal(modmat.mul(a, b, self.p), modmat.mul(b, a, self.p), self.p):
                    raise InputError("assigned matrices do not commute")
        if not np.any(self.sphere % self.p):
            raise InputError("sphere value must be nonzero")


def make_backend(
    labels: Iterable[str],
    p: int = 101,
    d: int = 4,
    seed: int = 0,
    family: str = DIAGONAL,
    spel_identity: bool = False,
    alias: bool = True,
) -> Backend:
    """Deterministic commuting assignment for a finite label set.

    ``spel_identity`` pins every spherical-element label to the identity
    (the vacuous-perturbation control); ``alias=False`` keys matrices by
    raw words, deliberately breaking Z(V) = Z(V⁻¹) for negative tests.
    """
    if not is_prime(p):
        raise InputError("p must be prime, got %d" % p)
    if d < 1:
        raise InputError("dimension must be positive")
    rng = random.Random(seed)
    base = None
    if family == POLY_IN_M:
        for _ in range(64):
            cand = np.array([[rng.randrange(p) for _ in range(d)] for _ in range(d)], dtype=np.int64)
            try:
                modmat.inverse(cand, p)
            except InputError:
                continue
            base = cand
            break
        if base is None:
            raise InputError("could not draw an invertible base matrix")
    elif family != DIAGONAL:
        raise InputError("unknown backend family %r" % family)

    assignment: Dict[str, np.ndarray] = {}
    for lab in sorted(set(labels) | {SPHERE_LABEL}):
        if lab == SPHERE_LABEL:
            assignment[lab] = (rng.randrange(2, p) * modmat.identity(d)) % p
        elif spel_identity and lab.startswith("spel:"):
            assignment[lab] = modmat.identity(d)
        elif family == DIAGONAL:
            assignment[lab] = modmat.random_invertible_diagonal(rng, d, p)
        else:
            assignment[lab] = modmat.random_poly_in(rng, base, p)
    b = Backend(p, d, family, assignment, alias)
    b.check()
    return b


# --- state modules and transitions -----------------------------------------


def slice_endo(aslice, b: Backend) -> np.ndarray:
    """Product of the token matrices; empty slice gives the identity.
    Backend commutativity makes the fixed (sorted-label) order immaterial."""
    mats = sorted(((b.label(t), b.value(t)) for t in aslice.tokens), key=lambda kv: kv[0])
    return modmat.product((m for _, m in mats), b.p, b.dim)


@dataclass(frozen=True)
class StateModuleSeq:
    endos: Tuple[np.ndarray, ...]
    p: int
    dim: int


def state_modules(aseq: AbstractSequence, b: Backend) -> StateModuleSeq:
    endos = tuple(slice_endo(sl, b) for sl in aseq.slices)
    if not modmat.is_identity(endos[0], b.p) or not modmat.is_identity(endos[-1], b.p):
        raise InputError("state module sequence must start and end at the identity")
    return StateModuleSeq(endos, b.p, b.dim)


def transitions(sm: StateModuleSeq) -> List[np.ndarray]:
    """F_k with F_k·A_k = A_{k+1}; their full composition telescopes to
    the identity."""
    out = []
    for k in range(len(sm.endos) - 1):
        try:
            inv_k = modmat.inverse(sm.endos[k], sm.p)
        except InputError:
            raise InputError("slice endomorphism %d is singular" % k) from None
        out.append(modmat.mul(sm.endos[k + 1], inv_k, sm.p))
    return out


def compose(maps: Sequence[np.ndarray], p: int, dim: int) -> np.ndarray:
    """Apply left to right: returns maps[-1] ··· maps[1] · maps[0]."""
    return modmat.product(reversed(list(maps)), p, dim)


def spel_product(aseq: AbstractSequence, b: Backend) -> np.ndarray:
    toks = [t for t in aseq.slices[aseq.perturbation_index].tokens if isinstance(t, SpElToken)]
    mats = sorted(((b.label(t), b.value(t)) for t in toks), key=lambda kv: kv[0])
    return modmat.product((m for _, m in mats), b.p, b.dim)


def perturbed_invariant(aseq: AbstractSequence, b: Backend) -> np.ndarray:
    """Replace the spherical-element transition by the perturbed map and
    compose everything; later maps stay those of the unperturbed sequence.

    The perturbed level endomorphism composes, separately for each factor
    index, the commutator matrix with that factor's spherical-element
    matrices, on top of the plain cells.  Telescoping leaves exactly the
    product of the spherical-element matrices, which is asserted against
    the brute-force composition.
    """
    sm = state_modules(aseq, b)
    fs = transitions(sm)
    k = aseq.perturbation_index
    after = aseq.slices[k + 1].tokens
    before = aseq.slices[k].tokens
    cells = [b.value(t) for t in after if isinstance(t, CellToken)]
    comm_by_index = {t.index: b.value(t) for t in after if isinstance(t, CommutatorToken)}
    spel_by_index: Dict[int, List[np.ndarray]] = {}
    for t in before:
        if isinstance(t, SpElToken):
            spel_by_index.setdefault(t.index, []).append(b.value(t))
    perturbed = modmat.product(cells, b.p, b.dim)
    for idx in sorted(comm_by_index):
        perturbed = modmat.mul(perturbed, comm_by_index[idx], b.p)
        for m in spel_by_index.get(idx, ()):
            perturbed = modmat.mul(perturbed, m, b.p)
    f_pert = modmat.mul(perturbed, modmat.inverse(sm.endos[k], b.p), b.p)
    maps = list(fs)
    maps[k] = f_pert
    total = compose(maps, b.p, b.dim)
    assert modmat.equal(total, spel_product(aseq, b), b.p)
    return total


# --- invariance analyses ----------------------------------------------------


@dataclass(frozen=True)
class InvarianceReport:
    verdict: str  # "Pass" | "Fail" | "Obstructed"
    witness: Optional[str] = None
    detail: str = ""

    def __bool__(self):
        return self.verdict == "Pass"


def _eq_witness(name: str, a: np.ndarray, b_mat: np.ndarray) -> str:
    return "%s: %s != %s" % (name, modmat.to_text(a), modmat.to_text(b_mat))


def qmove_rider(inst, qmove, identification: str) -> AbstractSequence:
    """The transported instance's sequence with the leftover cell riding.
    Exposed so callers can collect its labels before drawing a backend."""
    t = crit.transport_qmove(inst, qmove)
    if not t.ok:
        raise crit.InvalidInstance("transported instance does not satisfy the corrected criterion")
    return build_abstract(t.instance, identification, residual=t.residual, residual_side=t.side.lower())


def check_inside_invariance(inst, qmove, b: Backend, identification: str = LONGITUDINAL) -> InvarianceReport:
    """Transport a relator move through the instance and compare the
    perturbed invariants without and with the residual token riding."""
    base = build_abstract(inst, identification)
    t = crit.transport_qmove(inst, qmove)
    if not t.ok:
        return InvarianceReport("Fail", "transported instance does not satisfy the corrected criterion")
    rider = build_abstract(t.instance, identification, residual=t.residual, residual_side=t.side.lower())
    plain = perturbed_invariant(base, b)
    carried = perturbed_invariant(rider, b)
    if modmat.equal(plain, carried, b.p):
        return InvarianceReport("Pass", detail="residual %s cancels" % format_word(t.residual))
    return InvarianceReport("Fail", _eq_witness("invariant", plain, carried))


def check_gauge(inst, b: Backend, identification: str = LONGITUDINAL) -> InvarianceReport:
    """Compare against the side-swapped instance read with the opposite
    identification and reversed orientation; equal exactly when the
    backend aliases inverse words."""
    own = perturbed_invariant(build_abstract(inst, identification), b)
    gauged_seq = build_abstract(crit.gauge(inst), other_type(identification), orientation=-1)
    gauged = perturbed_invariant(gauged_seq, b)
    if modmat.equal(own, gauged, b.p):
        return InvarianceReport("Pass")
    return InvarianceReport("Fail", _eq_witness("gauge", own, gauged))


def between_type_obstruction(inst, b: Backend, identification: str = LONGITUDINAL) -> InvarianceReport:
    """Attempt to carry the perturbed invariant across identification
    types along two readings of the joined picture.

    The longer reading refines one step of the shorter one through the
    switched-type spherical elements; the chain equalities are recomputed
    as matrices, and the leftover forced equality F'2 = F2 can only hold
    when the switched spherical-element product is the identity.
    """
    own_seq = build_abstract(inst, identification)
    other_seq = build_abstract(inst, other_type(identification))
    p, d = b.p, b.dim
    e_own = spel_product(own_seq, b)
    e_other = spel_product(other_seq, b)
    comm = modmat.product(
        (b.value(t) for t in own_seq.slices[4].tokens if isinstance(t, CommutatorToken)), p, d
    )
    z_empty = b.value(CellToken(Word()))
    cell = modmat.product(
        (b.value(t) for t in own_seq.slices[3].tokens if isinstance(t, CellToken)), p, d
    )
    s2 = b.sphere
    u = modmat.mul(s2, s2, p)

    def m3(x, y, z):
        return modmat.mul(modmat.mul(x, y, p), z, p)

    a1 = m3(z_empty, e_own, s2)
    mid = m3(z_empty, e_own, e_other)
    a2 = m3(z_empty, e_own, cell)
    a3 = m3(z_empty, comm, cell)
    f_states = [u, a1, a2, a3, u]
    h_states = [a1, mid, a2, a3, u]
    f = transitions(StateModuleSeq(tuple(f_states), p, d))
    h = transitions(StateModuleSeq(tuple(h_states), p, d))
    checks = (
        modmat.equal(f[2], h[2], p),
        modmat.equal(f[3], h[3], p),
        modmat.equal(modmat.mul(h[1], h[0], p), f[1], p),
    )
    if not all(checks):
        raise RuntimeError("thread chain equalities failed to recompute")
    f2_perturbed = modmat.mul(f[2], e_other, p)
    if modmat.is_identity(e_other, p):
        return InvarianceReport("Pass", detail="switched spherical elements are trivial")
    return InvarianceReport(
        "Obstructed",
        witness=_eq_witness("forced F'2 = F2", f2_perturbed, f[2]),
        detail="switched spherical-element product is not the identity",
    )


# --- global combination and the three tests ---------------------------------


def global_combine(mats: Sequence[np.ndarray], mode: str, p: int, dim: Optional[int] = None) -> np.ndarray:
    mats = list(mats)
    if dim is None:
        if not mats:
            raise InputError("empty list needs an explicit dimension")
        dim = mats[0].shape[0]
    if any(m.shape != (dim, dim) for m in mats):
        raise InputError("dimension mismatch in global combination")
    prod = modmat.product(mats, p, dim)
    if mode == PRODUCT:
        return prod
    if mode == PERMUTATION_SUM:
        if len(mats) > 6:
            raise InputError("permutation sum limited to 6 factors")
        total = np.zeros((dim, dim), dtype=np.int64)
        for perm in permutations(range(len(mats))):
            total = (total + modmat.product((mats[i] for i in perm), p, dim)) % p
        commuting = all(
            modmat.equal(modmat.mul(a, c, p), modmat.mul(c, a, p), p)
            for i, a in enumerate(mats)
            for c in mats[i + 1 :]
        )
        if commuting:
            fact = 1
            for i in range(2, len(mats) + 1):
                fact = (fact * i) % p
            assert modmat.equal(total, (fact * prod) % p, p)
        return total
    raise InputError("unknown combination mode %r" % mode)


@dataclass(frozen=True)
class ThreeTestsResult:
    matches: Tuple[bool, bool, bool]
    report: Optional[str] = None

    def __iter__(self):
        return iter(self.matches)


def three_tests(k_pairs, l_pairs, b: Backend, mode: str = PRODUCT) -> ThreeTestsResult:
    """Compare the combined invariants of the two presentations directly
    and through either gauge; an all-negative triple is flagged.

    Each side is a sequence of (instance, identification) pairs, one per
    relator pair; the gauged reading swaps each pair's identification.
    """
    k_pairs, l_pairs = list(k_pairs), list(l_pairs)
    if len(k_pairs) != len(l_pairs):
        raise InputError("relator pairing mismatch: %d vs %d" % (len(k_pairs), len(l_pairs)))

    def combined(pairs, gauged=False):
        locals_ = []
        for inst, identification in pairs:
            if gauged:
                seq = build_abstract(crit.gauge(inst), other_type(identification), orientation=-1)
            else:
                seq = build_abstract(inst, identification)
            locals_.append(perturbed_invariant(seq, b))
        return global_combine(locals_, mode, b.p, b.dim)

    i_k = combined(k_pairs)
    i_l = combined(l_pairs)
    i_k_gauge = combined(k_pairs, gauged=True)
    i_l_gauge = combined(l_pairs, gauged=True)
    flags = (
        modmat.equal(i_k, i_l, b.p),
        modmat.equal(i_k_gauge, i_l, b.p),
        modmat.equal(i_k, i_l_gauge, b.p),
    )
    report = None
    if not any(flags):
        report = (
            "all three comparisons failed: Andrews-Curtis counterexample "
            "candidate flagged (protocol report, not a proof)"
        )
    return ThreeTestsResult(flags, report)


def stabilization_demo(
    b: Backend,
    v: int,
    inv_k: Optional[np.ndarray] = None,
    inv_l: Optional[np.ndarray] = None,
) -> InvarianceReport:
    """Why sphere stabilization cannot rescue the invariant: both sides
    pick up the same invertible factor Z(S²)^v, so equality after
    stabilization forces equality before it; and over a field no nonzero
    weight annihilates Z(S²)."""
    if v < 1:
        raise InputError("stabilization count must be >= 1")
    if inv_k is None or inv_l is None:
        others = [m for lab, m in sorted(b.assignment.items()) if lab != SPHERE_LABEL]
        half = len(others) // 2
        inv_k = modmat.product(others[:half], b.p, b.dim)
        inv_l = modmat.product(others[half:], b.p, b.dim)
    s2v = modmat.matpow(b.sphere, v, b.p)
    stab_k = modmat.mul(inv_k, s2v, b.p)
    stab_l = modmat.mul(inv_l, s2v, b.p)
    s2v_inv = modmat.inverse(s2v, b.p)
    recovered_k = modmat.mul(stab_k, s2v_inv, b.p)
    recovered_l = modmat.mul(stab_l, s2v_inv, b.p)
    if not modmat.equal(recovered_k, inv_k, b.p) or not modmat.equal(recovered_l, inv_l, b.p):
        raise RuntimeError("stabilization factor failed to divide out")
    annihilators = [
        w for w in range(1, b.p) if not np.any((w * b.sphere) % b.p)
    ]
    if annihilators:
        raise RuntimeError("field produced a zero divisor")
    witness = (
        "I_K.Z(S2)^%d = I_L.Z(S2)^%d forces I_K = I_L since Z(S2)^%d is invertible; "
        "no nonzero weight annihilates Z(S2) over GF(%d)" % (v, v, v, b.p)
    )
    detail = "unstabilized invariants %s" % (
        "already equal" if modmat.equal(inv_k, inv_l, b.p) else "differ, and stay distinguishable"
    )
    return InvarianceReport("Obstructed", witness=witness, detail=detail)


# --- dump / load ------------------------------------------------------------


def dump_backend(b: Backend) -> str:
    lines = ["p %d d %d" % (b.p, b.dim)]
    for lab in sorted(b.assignment):
        flat = " ".join(str(int(x)) for x in b.assignment[lab].ravel())
        lines.append("tok %s %s" % (lab, flat))
    return "\n".join(lines) + "\n"


def load_backend(text: str) -> Backend:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("p "):
        raise InputError("backend dump must start with 'p <p> d <d>'")
    head = lines[0].split()
    try:
        p, d = int(head[1]), int(head[3])
    except (IndexError, ValueError):
        raise InputError("bad backend header %r" % lines[0]) from None
    assignment: Dict[str, np.ndarray] = {}
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] != "tok" or len(parts) != 2 + d * d:
            raise InputError("bad backend line %r" % ln)
        vals = np.array([int(x) for x in parts[2:]], dtype=np.int64).reshape(d, d)
        assignment[parts[1]] = vals % p
    b = Backend(p, d, "loaded", assignment)
    b.check()
    return b
