"""Command-line front end.

Every command prints a plain-text report followed by a machine-readable
CSV block behind a ``---csv---`` line.  Exit codes: 0 pass/success,
1 fail/false, 2 input error, 3 obstructed.  ``SMOVE_SEED`` supplies the
default seed.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from typing import List, Optional, Tuple

from . import criterion as crit
from . import modmat
from . import playground as pg
from . import presentations as pres
from . import slicing
from . import statesum as ss
from .words import InputError, Word, commutator, format_word, invert, multiply, parse_word, reduce

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_OBSTRUCTED = 3


class Report:
    def __init__(self):
        self.lines: List[str] = []
        self.rows: List[Tuple[str, str]] = []
        self.code = EXIT_PASS

    def say(self, text: str = ""):
        self.lines.append(text)

    def csv(self, key: str, value):
        self.rows.append((key, str(value)))

    def emit(self) -> int:
        out = list(self.lines)
        out.append("---csv---")
        out.append("key,value")
        for k, v in self.rows:
            out.append("%s,%s" % (k, v.replace("\n", " ")))
        sys.stdout.write("\n".join(out) + "\n")
        return self.code


def _default_seed() -> int:
    try:
        return int(os.environ.get("SMOVE_SEED", "0"))
    except ValueError:
        raise InputError("SMOVE_SEED must be an integer") from None


def _verdict_code(verdict: str) -> int:
    return {"Pass": EXIT_PASS, "Fail": EXIT_FAIL, "Obstructed": EXIT_OBSTRUCTED}[verdict]


# --- word -------------------------------------------------------------------


def cmd_word(args) -> Report:
    r = Report()
    words = [parse_word(w) for w in args.words]
    if args.op == "reduce":
        if len(words) != 1:
            raise InputError("word reduce takes one word")
        res = Word(reduce(words[0]))
    elif args.op == "invert":
        if len(words) != 1:
            raise InputError("word invert takes one word")
        res = invert(words[0])
    elif args.op == "multiply":
        if len(words) < 2:
            raise InputError("word multiply takes two or more words")
        res = words[0]
        for w in words[1:]:
            res = multiply(res, w)
    else:  # comm
        if len(words) != 2:
            raise InputError("word comm takes two words")
        res = commutator(words[0], words[1])
    r.say(format_word(res))
    r.csv("op", args.op)
    r.csv("result", format_word(res))
    return r


# --- pres -------------------------------------------------------------------


def cmd_pres(args) -> Report:
    r = Report()
    p = pres.load_presentation(args.file)
    moves = pres.load_moves(args.moves) if args.moves else []
    for m in moves:
        p = pres.apply_move(p, m)
    r.say(pres.format_presentation(p).rstrip("\n"))
    r.csv("generators", p.generator_count)
    r.csv("relators", len(p.relators))
    r.csv("moves_applied", len(moves))
    return r


# --- crit -------------------------------------------------------------------


def _residual_move_word(base: Word, spec: str) -> Word:
    if spec == "inv":
        return invert(base)
    if spec.startswith("mulr:"):
        return multiply(base, parse_word(spec[5:]))
    if spec.startswith("conj:"):
        w = parse_word(spec[5:])
        if len(w) != 1:
            raise InputError("conj takes a single letter")
        return Word((w[0],)) * base * Word((-w[0],))
    raise InputError("move must be inv, mulr:<word>, or conj:<letter>")


def cmd_crit(args) -> Report:
    r = Report()
    if args.action == "residual":
        if not args.R or not args.move:
            raise InputError("crit residual needs --R and --move")
        base = parse_word(args.R)
        new = _residual_move_word(base, args.move)
        res = crit.residual_r(base, new)
        r.say(format_word(res))
        r.csv("residual", format_word(res))
        return r
    if not args.instance:
        raise InputError("crit %s needs --instance" % args.action)
    inst = crit.load_instance(args.instance)
    if args.action == "verify":
        ok = crit.verify(inst)
        lhs, rhs = crit.product_sides(inst)
        forms_agree = (lhs == rhs) == ok
        r.say("verify: %s" % str(ok).lower())
        r.say("product form agrees: %s" % str(forms_agree).lower())
        r.csv("verify", str(ok).lower())
        r.code = EXIT_PASS if ok else EXIT_FAIL
    elif args.action == "gauge":
        g = crit.gauge(inst)
        ok = crit.verify(g)
        r.say("gauge verifies: %s" % str(ok).lower())
        r.csv("gauge_verify", str(ok).lower())
        r.code = EXIT_PASS if ok else EXIT_FAIL
    elif args.action == "check":
        chk = crit.residual_commutator_check(inst)
        r.say("L' = %s" % format_word(chk.l_prime))
        r.say("inverse commutator product = %s" % format_word(chk.inverse_commutator_product))
        r.say("M'^-1 = %s" % format_word(chk.m_prime_inv))
        r.say("agree: %s" % str(chk.ok).lower())
        r.csv("l_prime", format_word(chk.l_prime))
        r.csv("agree", str(chk.ok).lower())
        r.code = EXIT_PASS if chk.ok else EXIT_FAIL
    else:
        raise InputError("unknown crit action %r" % args.action)
    return r


# --- slice ------------------------------------------------------------------


def cmd_slice(args) -> Report:
    r = Report()
    rw = parse_word(args.R)
    if args.type == "bag":
        seq = slicing.slice_bag(rw, identify=args.identify)
    elif args.type == "invpair":
        seq = slicing.slice_inverse_pair(rw)
    elif args.type == "comm":
        if args.S is None:
            raise InputError("--S is required for commutator pieces")
        seq = slicing.slice_commutator(rw, parse_word(args.S), dominant=args.dominant, identify=args.identify)
    elif args.type == "prod":
        if args.S is None:
            raise InputError("--S is required for product pieces")
        seq = slicing.slice_product(rw, parse_word(args.S))
    else:
        raise InputError("unknown piece type %r" % args.type)
    v = slicing.validate(seq)
    trace = slicing.boundary_trace(seq) if v else Word()
    r.say(slicing.format_sequence(seq).rstrip("\n"))
    r.say("validates: %s" % str(bool(v)).lower())
    r.say("boundary: %s" % format_word(trace))
    r.csv("validates", str(bool(v)).lower())
    r.csv("boundary", format_word(trace))
    r.csv("moves", len(seq.moves))
    r.code = EXIT_PASS if v else EXIT_FAIL
    return r


# --- smove ------------------------------------------------------------------


_TYPES = {"long": slicing.LONGITUDINAL, "mer": slicing.MERIDIAN}


def _load_or_build_instance(args) -> crit.CriterionInstance:
    if getattr(args, "instance", None):
        return crit.load_instance(args.instance)
    return crit.build_instance(args.seed, n_factors=getattr(args, "factors", 2))


def cmd_smove(args) -> Report:
    r = Report()
    inst = _load_or_build_instance(args)
    aseq = slicing.build_abstract(inst, _TYPES[args.type])
    r.say(slicing.format_abstract(aseq).rstrip("\n"))
    r.say("structure ok: %s" % str(slicing.abstract_ok(aseq)).lower())
    r.csv("identification", aseq.identification)
    r.csv("factors", aseq.factor_count)
    r.csv("perturbation_index", aseq.perturbation_index)
    return r


# --- inv playground -----------------------------------------------------------


def _parse_qmove_spec(inst: crit.CriterionInstance, spec: str) -> pres.QMove:
    parts = spec.split()
    if not parts:
        raise InputError("empty qmove spec")
    if parts[0] == "inv" and len(parts) == 2:
        return pres.InvertRelator(parts[1])
    if parts[0] == "mulr" and len(parts) == 3:
        return pres.MultiplyRight(parts[1], parts[2])
    if parts[0] == "conj" and len(parts) == 3:
        w = parse_word(parts[2])
        if len(w) != 1:
            raise InputError("conj takes a single letter")
        return pres.ConjugateRelator(parts[1], w[0])
    raise InputError("qmove spec must be 'inv <rel>', 'mulr <rel> <rel>' or 'conj <rel> <letter>'")


def _backend_for(args, *aseqs) -> pg.Backend:
    if getattr(args, "backend", None):
        with open(args.backend, "r", encoding="utf-8") as fh:
            return pg.load_backend(fh.read())
    labels = pg.collect_labels(*aseqs)
    return pg.make_backend(labels, p=args.p, d=args.d, seed=args.seed, family=args.family)


def cmd_inv_playground(args) -> Report:
    r = Report()
    inst = _load_or_build_instance(args)
    ident = _TYPES[args.type]
    base = slicing.build_abstract(inst, ident)
    sequences = [base, slicing.build_abstract(inst, pg.other_type(ident))]
    gauged = slicing.build_abstract(crit.gauge(inst), pg.other_type(ident), orientation=-1)
    sequences.append(gauged)
    qmove = None
    if args.qmove:
        qmove = _parse_qmove_spec(inst, args.qmove)
        sequences.append(pg.qmove_rider(inst, qmove, ident))
    b = _backend_for(args, *sequences)
    if args.dump_backend:
        with open(args.dump_backend, "w", encoding="utf-8") as fh:
            fh.write(pg.dump_backend(b))
        r.say("backend written to %s" % args.dump_backend)

    if args.obstruction:
        rep = pg.between_type_obstruction(inst, b, ident)
    elif args.gauge:
        rep = pg.check_gauge(inst, b, ident)
    elif qmove is not None:
        rep = pg.check_inside_invariance(inst, qmove, b, ident)
    else:
        inv = pg.perturbed_invariant(base, b)
        r.say("invariant: %s" % modmat.to_text(inv))
        r.csv("invariant", modmat.to_text(inv))
        r.csv("p", b.p)
        r.csv("d", b.dim)
        return r
    r.say("verdict: %s" % rep.verdict)
    if rep.witness:
        r.say("witness: %s" % rep.witness)
    if rep.detail:
        r.say("detail: %s" % rep.detail)
    r.csv("verdict", rep.verdict)
    r.code = _verdict_code(rep.verdict)
    return r


# --- inv statesum --------------------------------------------------------------


def _parse_moves_file(path: str) -> List[Tuple[str, str]]:
    out = []
    base = os.path.dirname(os.path.abspath(path))
    with open(path, "r", encoding="utf-8") as fh:
        for ln in fh:
            ln = ln.split("#", 1)[0].strip()
            if not ln:
                continue
            parts = ln.split()
            if len(parts) != 2:
                raise InputError("move line needs two graph paths: %r" % ln)
            out.append((os.path.join(base, parts[0]), os.path.join(base, parts[1])))
    return out


def _parse_relations_file(path: str):
    relations = []
    base = os.path.dirname(os.path.abspath(path))
    with open(path, "r", encoding="utf-8") as fh:
        for ln in fh:
            ln = ln.split("#", 1)[0].strip()
            if not ln:
                continue
            if "=" not in ln:
                raise InputError("relation line needs '=': %r" % ln)
            left, right = ln.split("=", 1)

            def side(text):
                names = text.split()
                if len(names) % 2:
                    raise InputError("relation side needs before/after path pairs")
                return tuple(
                    (
                        ss.load_graph(os.path.join(base, names[i])),
                        ss.load_graph(os.path.join(base, names[i + 1])),
                    )
                    for i in range(0, len(names), 2)
                )

            relations.append((side(left), side(right)))
    return tuple(relations)


def _fmt_value(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else str(v)
    return str(v)


def cmd_inv_statesum(args) -> Report:
    r = Report()
    table = ss.load_table(args.table)
    graphs = [ss.load_graph(p) for p in args.graphs]
    sums = [ss.state_sum(g, table) for g in graphs]
    for path, value in zip(args.graphs, sums):
        r.say("state sum %s: %s" % (os.path.basename(path), _fmt_value(value)))
        r.csv("sum:%s" % os.path.basename(path), _fmt_value(value))
    if len(graphs) >= 2:
        combined = graphs[0]
        for g in graphs[1:]:
            combined = ss.wedge(combined, g)
        total = ss.state_sum(combined, table)
        split = sums[0]
        for v in sums[1:]:
            split = split * v
        ok = ss._value_eq(total, split)
        r.say("multiplicativity: %s" % ("PASS" if ok else "FAIL"))
        r.csv("multiplicativity", "PASS" if ok else "FAIL")
        if not ok:
            r.code = EXIT_FAIL
    if args.moves:
        pairs = [(ss.load_graph(a), ss.load_graph(b)) for a, b in _parse_moves_file(args.moves)]
        relations = _parse_relations_file(args.relations) if args.relations else ()
        value = ss.invariant(ss.MoveSequence(tuple(pairs), relations), table)
        r.say("move invariant: %s" % _fmt_value(value))
        r.csv("move_invariant", _fmt_value(value))
    return r


# --- demos and tests ----------------------------------------------------------


def cmd_demo_nonmult(args) -> Report:
    r = Report()
    quartic = ss.nonmult_expand()
    r.say(str(quartic))
    r.csv("quartic", str(quartic))
    if args.table:
        rep = ss.nonmult_check(ss.load_table(args.table))
        r.say(str(rep))
        r.csv("s_value", _fmt_value(rep.s_value))
        r.csv("defect", _fmt_value(rep.value))
    return r


def cmd_demo_stabilization(args) -> Report:
    r = Report()
    inst = crit.build_instance(args.seed)
    seqs = [
        slicing.build_abstract(inst, slicing.LONGITUDINAL),
        slicing.build_abstract(inst, slicing.MERIDIAN),
    ]
    b = _backend_for(args, *seqs)
    inv_k = pg.perturbed_invariant(seqs[0], b)
    inv_l = pg.perturbed_invariant(seqs[1], b)
    rep = pg.stabilization_demo(b, args.v, inv_k, inv_l)
    r.say("verdict: %s" % rep.verdict)
    r.say("witness: %s" % rep.witness)
    r.say("detail: %s" % rep.detail)
    r.csv("verdict", rep.verdict)
    r.csv("v", args.v)
    r.code = _verdict_code(rep.verdict)
    return r


def cmd_test_three(args) -> Report:
    r = Report()
    instances = [crit.build_instance(args.seed + i) for i in range(args.pairs)]
    k_side = [(inst, slicing.LONGITUDINAL) for inst in instances]
    l_side = [(inst, slicing.MERIDIAN) for inst in instances]
    seqs = []
    for inst in instances:
        seqs.append(slicing.build_abstract(inst, slicing.LONGITUDINAL))
        seqs.append(slicing.build_abstract(inst, slicing.MERIDIAN))
        seqs.append(slicing.build_abstract(crit.gauge(inst), slicing.MERIDIAN, orientation=-1))
        seqs.append(slicing.build_abstract(crit.gauge(inst), slicing.LONGITUDINAL, orientation=-1))
    b = _backend_for(args, *seqs)
    mode = pg.PRODUCT if args.combine == "product" else pg.PERMUTATION_SUM
    res = pg.three_tests(k_side, l_side, b, mode)
    names = ("I(K)=I(L)", "I_gauge(K)=I(L)", "I(K)=I_gauge(L)")
    for name, flag in zip(names, res.matches):
        r.say("%s: %s" % (name, str(flag).lower()))
        r.csv(name, str(flag).lower())
    if res.report:
        r.say(res.report)
        r.csv("flag", res.report)
    r.code = EXIT_PASS if any(res.matches) else EXIT_FAIL
    return r


# --- parser -------------------------------------------------------------------


def _add_backend_args(sp):
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--p", type=int, default=101)
    sp.add_argument("--d", type=int, default=4)
    sp.add_argument("--family", choices=(pg.DIAGONAL, pg.POLY_IN_M), default=pg.DIAGONAL)
    sp.add_argument("--backend", help="load a backend dump instead of drawing one")
    sp.add_argument("--dump-backend", help="write the backend used to this path")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="smovelab", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    w = sub.add_parser("word", help="free word operations")
    w.add_argument("op", choices=("reduce", "invert", "multiply", "comm"))
    w.add_argument("words", nargs="+")
    w.set_defaults(fn=cmd_word)

    p = sub.add_parser("pres", help="load a presentation and apply a moves file")
    p.add_argument("--file", required=True)
    p.add_argument("--moves")
    p.set_defaults(fn=cmd_pres)

    c = sub.add_parser("crit", help="criterion instance checks")
    c.add_argument("action", choices=("verify", "residual", "gauge", "check"))
    c.add_argument("--instance")
    c.add_argument("--R", help="relator word for residual computations")
    c.add_argument("--move", help="inv | mulr:<word> | conj:<letter>")
    c.set_defaults(fn=cmd_crit)

    s = sub.add_parser("slice", help="piece slicings")
    ssub = s.add_subparsers(dest="what", required=True)
    sp = ssub.add_parser("piece")
    sp.add_argument("--type", required=True, choices=("bag", "invpair", "comm", "prod"))
    sp.add_argument("--R", required=True)
    sp.add_argument("--S")
    sp.add_argument("--identify", action="store_true")
    sp.add_argument("--dominant", choices=("R", "S"), default="R")
    sp.set_defaults(fn=cmd_slice)

    sm = sub.add_parser("smove", help="abstract slice sequences")
    smsub = sm.add_subparsers(dest="what", required=True)
    sb = smsub.add_parser("build")
    sb.add_argument("--type", required=True, choices=("long", "mer"))
    sb.add_argument("--instance")
    sb.add_argument("--seed", type=int, default=None)
    sb.add_argument("--factors", type=int, default=2)
    sb.set_defaults(fn=cmd_smove)

    inv = sub.add_parser("inv", help="invariants")
    invsub = inv.add_subparsers(dest="what", required=True)
    ip = invsub.add_parser("playground")
    ip.add_argument("--instance")
    ip.add_argument("--type", choices=("long", "mer"), default="long")
    ip.add_argument("--factors", type=int, default=2)
    ip.add_argument("--qmove")
    ip.add_argument("--gauge", action="store_true")
    ip.add_argument("--obstruction", action="store_true")
    _add_backend_args(ip)
    ip.set_defaults(fn=cmd_inv_playground)
    ist = invsub.add_parser("statesum")
    ist.add_argument("--graphs", nargs="+", required=True)
    ist.add_argument("--table", required=True)
    ist.add_argument("--moves")
    ist.add_argument("--relations")
    ist.set_defaults(fn=cmd_inv_statesum)

    d = sub.add_parser("demo", help="executable demonstrations")
    dsub = d.add_subparsers(dest="what", required=True)
    dn = dsub.add_parser("nonmult")
    dn.add_argument("--table")
    dn.set_defaults(fn=cmd_demo_nonmult)
    dst = dsub.add_parser("stabilization")
    dst.add_argument("--v", type=int, default=1)
    _add_backend_args(dst)
    dst.set_defaults(fn=cmd_demo_stabilization)

    t = sub.add_parser("test", help="multi-part test protocols")
    tsub = t.add_subparsers(dest="what", required=True)
    tt = tsub.add_parser("three-tests")
    tt.add_argument("--pairs", type=int, default=1)
    tt.add_argument("--combine", choices=("product", "permsum"), default="product")
    _add_backend_args(tt)
    tt.set_defaults(fn=cmd_test_three)

    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "seed", None) is None and hasattr(args, "seed"):
        args.seed = _default_seed()
    try:
        report = args.fn(args)
    except (InputError, crit.InvalidInstance, slicing.SliceError) as e:
        sys.stdout.write("error: %s\n" % e)
        return EXIT_INPUT
    except OSError as e:
        sys.stdout.write("error: %s\n" % e)
        return EXIT_INPUT
    return report.emit()


if __name__ == "__main__":
    sys.exit(main())
