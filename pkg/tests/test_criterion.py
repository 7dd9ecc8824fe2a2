from __future__ import annotations

import random

import pytest

from smovelab.criterion import (
    ConjugatedRelator,
    CriterionInstance,
    Factor,
    InvalidInstance,
    QMoveTransport,
    build_instance,
    commutator_product,
    format_decomposition,
    gauge,
    load_instance,
    mutate_conjugator,
    nielsen_transport,
    parse_decomposition,
    parse_instance,
    product_sides,
    residual_commutator_check,
    residual_r,
    residual_s,
    transport_qmove,
    verification_word,
    verify,
)
from smovelab.presentations import (
    ConjugateRelator,
    InvertRelator,
    MultiplyRight,
    NielsenMove,
    Presentation,
    format_presentation,
)
from smovelab.words import InputError, Word, commutator, invert, parse_word, reduce


def _hand_instance():
    """One factor, built so the product form holds by construction."""
    k_aux = ("x1", parse_word("a"))
    l_aux = ("y1", parse_word("b"))
    f = Factor(
        r=ConjugatedRelator(parse_word("b"), "x1", 1),
        s=ConjugatedRelator(Word(), "y1", 1),
    )
    s_word = parse_word("a")
    r_1 = parse_word("baB")
    s_1 = parse_word("b")
    r_word = reduce(tuple(commutator(r_1, s_1)) + tuple(s_word))
    k = Presentation(2, (("R", r_word), k_aux))
    l = Presentation(2, (("S", s_word), l_aux))
    return CriterionInstance(k, l, "R", "S", (f,))


def _random_reduced(rng, max_len=8):
    letters = []
    n = rng.randint(0, max_len)
    while len(letters) < n:
        x = rng.choice([1, -1, 2, -2, 3, -3])
        if letters and letters[-1] == -x:
            continue
        letters.append(x)
    return Word(letters)


def test_residual_r_recovers_replaced_relator():
    r = parse_word("abA")
    r_new = parse_word("abAb")
    res = residual_r(r, r_new)
    assert reduce(tuple(res) + tuple(r_new)) == r
    # replacing R by its inverse leaves the doubled relator
    assert residual_r(parse_word("ab"), invert(parse_word("ab"))) == parse_word("abab")


def test_residual_s_recovers_replaced_relator():
    s = parse_word("ba")
    s_new = parse_word("bab")
    res = residual_s(s, s_new)
    assert reduce(tuple(invert(s_new)) + tuple(res)) == invert(s)


def test_residual_formulas_random_pairs():
    rng = random.Random(31)
    for _ in range(200):
        w, w_new = _random_reduced(rng), _random_reduced(rng)
        assert reduce(tuple(residual_r(w, w_new)) + tuple(w_new)) == reduce(w)
        assert reduce(tuple(invert(w_new)) + tuple(residual_s(w, w_new))) == invert(reduce(w))
        # unchanged relator leaves no residual
        assert residual_r(w, w) == ()
        assert residual_s(w, w) == ()


def test_hand_instance_verifies_in_both_forms():
    inst = _hand_instance()
    assert verify(inst)
    assert verification_word(inst) == ()
    lhs, rhs = product_sides(inst)
    assert lhs == rhs
    # [baB, b]·a = baB·b·bAB·B·a with the inner Bb pair cancelling
    assert inst.r_word == parse_word("babABBa")


def test_expanded_conjugation_and_exponent():
    inst = _hand_instance()
    (rw, sw), = inst.expanded()
    assert rw == parse_word("baB")
    assert sw == parse_word("b")
    flipped = ConjugatedRelator(parse_word("b"), "x1", -1)
    assert flipped.expand(inst.k) == parse_word("bAB")
    with pytest.raises(InputError):
        ConjugatedRelator(Word(), "x1", 2)


def test_build_instance_is_deterministic_and_verifies():
    for seed in range(25):
        a = build_instance(seed)
        b = build_instance(seed)
        assert a == b
        assert verify(a)
        lhs, rhs = product_sides(a)
        assert lhs == rhs
    assert build_instance(1) != build_instance(2)


def test_build_instance_parameter_ranges():
    inst = build_instance(3, n_generators=3, n_factors=4, max_conjugator_len=2)
    assert len(inst.factors) == 4
    assert verify(inst)
    with pytest.raises(InputError):
        build_instance(0, n_generators=0)
    with pytest.raises(InputError):
        build_instance(0, n_factors=-1)


def test_empty_decomposition_means_equal_relators():
    inst = build_instance(5, n_factors=0)
    assert inst.factors == ()
    assert commutator_product(inst) == ()
    assert inst.r_word == inst.s_word
    assert verify(inst)


def test_mutation_breaks_verification():
    broken = 0
    total = 60
    for seed in range(total):
        inst = build_instance(seed)
        mut = mutate_conjugator(inst, seed + 1000)
        assert mut.expanded() != inst.expanded()
        if not verify(mut):
            broken += 1
    # a genuinely changed decomposition can still cancel by accident,
    # but only rarely
    assert broken >= total - 2


def test_gauge_swaps_sides_and_still_verifies():
    for seed in range(20):
        inst = build_instance(seed)
        g = gauge(inst)
        assert g.r_word == inst.s_word
        assert g.s_word == inst.r_word
        assert verify(g)
        assert gauge(g) == inst
        lhs = reduce(tuple(inst.r_word) + tuple(invert(inst.s_word)))
        glhs = reduce(tuple(g.r_word) + tuple(invert(g.s_word)))
        assert glhs == invert(lhs)


def test_residual_commutator_check_on_built_instances():
    for seed in range(20):
        chk = residual_commutator_check(build_instance(seed))
        assert chk.ok
        assert reduce(chk.l_prime) == reduce(chk.inverse_commutator_product)
        assert reduce(chk.l_prime) == reduce(chk.m_prime_inv)
    with pytest.raises(InvalidInstance):
        residual_commutator_check(mutate_conjugator(build_instance(0), 77))


@pytest.mark.parametrize(
    "move",
    [
        InvertRelator("R"),
        InvertRelator("S"),
        ConjugateRelator("R", 1),
        ConjugateRelator("S", -2),
        MultiplyRight("R", "x1"),
        MultiplyRight("S", "y1"),
    ],
)
def test_transport_qmove_keeps_equation_closed(move):
    for seed in (0, 7, 19):
        inst = build_instance(seed)
        t = transport_qmove(inst, move)
        assert isinstance(t, QMoveTransport)
        assert t.ok
        assert t.side == ("R" if move.target == "R" else "S")
        if t.side == "R":
            assert t.residual == residual_r(inst.r_word, t.instance.r_word)
            assert reduce(tuple(t.residual) + tuple(t.instance.r_word)) == inst.r_word
        else:
            assert t.residual == residual_s(inst.s_word, t.instance.s_word)


def test_transport_qmove_rejects_other_targets():
    inst = build_instance(2)
    with pytest.raises(InvalidInstance):
        transport_qmove(inst, InvertRelator("x1"))


def test_nielsen_transport_two_sided_preserves_verification():
    moves = [
        NielsenMove("inv", 1),
        NielsenMove("inv", 2),
        NielsenMove("rmul", 1, 2),
        NielsenMove("lmul", 2, 1),
    ]
    for seed in range(15):
        inst = build_instance(seed)
        for m in moves:
            assert verify(nielsen_transport(inst, m))


def test_nielsen_transport_one_sided_loses_control():
    inst = build_instance(0)
    t = nielsen_transport(inst, NielsenMove("rmul", 1, 2), one_sided=True)
    assert not verify(t)
    # the untouched side keeps its relators
    assert t.l == inst.l


def test_decomposition_text_round_trip():
    inst = build_instance(4)
    text = format_decomposition(inst.factors)
    assert parse_decomposition(text) == inst.factors
    assert parse_decomposition("") == ()
    assert format_decomposition(()) == ""


def test_parse_decomposition_errors():
    for bad in (
        "factor wR=a R=x1^+1 wS=b",
        "factor wR=a R=x1 wS=b S=y1^+1",
        "factor wR=a R=x1^2 wS=b S=y1^+1",
        "factor wR=a R=x1^+1 wS=b S=y1^+1 extra=1",
        "notfactor wR=a R=x1^+1 wS=b S=y1^+1",
    ):
        with pytest.raises(InputError):
            parse_decomposition(bad)


def test_instance_file_round_trip(tmp_path):
    inst = build_instance(9)
    (tmp_path / "K.txt").write_text(format_presentation(inst.k), encoding="utf-8")
    (tmp_path / "L.txt").write_text(format_presentation(inst.l), encoding="utf-8")
    (tmp_path / "d.txt").write_text(format_decomposition(inst.factors), encoding="utf-8")
    inst_file = tmp_path / "inst.txt"
    inst_file.write_text(
        "K K.txt\nL L.txt\nR R\nS S\ndecomp d.txt\n", encoding="utf-8"
    )
    loaded = load_instance(inst_file)
    assert loaded == inst
    assert verify(loaded)


def test_parse_instance_errors(tmp_path):
    with pytest.raises(InputError):
        parse_instance("K a.txt\nL b.txt\nR R\nS S\n")  # missing decomp
    with pytest.raises(InputError):
        parse_instance("K a.txt\nK b.txt\nL c.txt\nR R\nS S\ndecomp d.txt\n")
    with pytest.raises(InputError):
        parse_instance("Q a.txt\n")


def test_instance_requires_known_relator_names():
    inst = _hand_instance()
    with pytest.raises(InputError):
        CriterionInstance(inst.k, inst.l, "missing", "S", inst.factors)
    bad_factor = Factor(
        r=ConjugatedRelator(Word(), "missing", 1),
        s=ConjugatedRelator(Word(), "y1", 1),
    )
    with pytest.raises(InputError):
        CriterionInstance(inst.k, inst.l, "R", "S", (bad_factor,))
