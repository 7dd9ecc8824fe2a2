"""Exact polynomial arithmetic with rational coefficients.

Small and purpose-built: multivariate addition/multiplication for the
symbolic state-sum work, and univariate division/xgcd for reducing
modulo a principal ideal.  Everything is Fraction-exact; no floats.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

from .words import InputError

Monomial = Tuple[Tuple[str, int], ...]
Scalar = Union[int, Fraction]


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    exps: Dict[str, int] = dict(a)
    for name, e in b:
        exps[name] = exps.get(name, 0) + e
    return tuple(sorted((n, e) for n, e in exps.items() if e))


class Polynomial:
    """Canonical form: monomial -> nonzero Fraction coefficient."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Monomial, Scalar]] = None):
        clean: Dict[Monomial, Fraction] = {}
        for mono, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                mono = tuple(sorted((n, e) for n, e in mono if e))
                clean[mono] = clean.get(mono, Fraction(0)) + c
                if not clean[mono]:
                    del clean[mono]
        self.terms = clean

    @classmethod
    def const(cls, c: Scalar) -> "Polynomial":
        return cls({(): Fraction(c)})

    @classmethod
    def var(cls, name: str, exp: int = 1) -> "Polynomial":
        if exp < 0:
            raise InputError("negative exponent")
        return cls({((name, exp),): Fraction(1)}) if exp else cls.const(1)

    # -- ring operations --

    def __add__(self, other):
        other = _coerce(other)
        merged = dict(self.terms)
        for mono, c in other.terms.items():
            merged[mono] = merged.get(mono, Fraction(0)) + c
        return Polynomial(merged)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise InputError("negative power")
        out = Polynomial.const(1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        try:
            other = _coerce(other)
        except InputError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    # -- queries --

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise InputError("polynomial is not constant")
        return self.terms.get((), Fraction(0))

    def variables(self) -> Tuple[str, ...]:
        names = {n for m in self.terms for n, _ in m}
        return tuple(sorted(names))

    def degree(self, var: Optional[str] = None) -> int:
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e for _, e in m) for m in self.terms)
        return max((e for m in self.terms for n, e in m if n == var), default=0)

    def coeff(self, var: str, exp: int) -> "Polynomial":
        """Coefficient of var**exp, itself a polynomial in the others."""
        out: Dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            exps = dict(m)
            if exps.get(var, 0) == exp:
                rest = tuple(sorted((n, e) for n, e in exps.items() if n != var))
                out[rest] = out.get(rest, Fraction(0)) + c
        return Polynomial(out)

    def subs(self, mapping: Mapping[str, Union["Polynomial", Scalar]]) -> "Polynomial":
        out = Polynomial()
        for m, c in self.terms.items():
            term = Polynomial.const(c)
            for name, e in m:
                repl = mapping.get(name)
                base = _coerce(repl) if repl is not None else Polynomial.var(name)
                term = term * base**e
            out = out + term
        return out

    def __call__(self, **values) -> Fraction:
        r = self.subs({k: Fraction(v) for k, v in values.items()})
        return r.constant_value()

    # -- formatting --

    def __str__(self):
        if not self.terms:
            return "0"
        def order(item):
            m, _ = item
            return (-sum(e for _, e in m), m)
        parts = []
        for m, c in sorted(self.terms.items(), key=order):
            mono = "*".join(n if e == 1 else "%s^%d" % (n, e) for n, e in m)
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            elif mag.denominator == 1:
                body = "%d%s" % (mag.numerator, mono)
            else:
                body = "%s*%s" % (mag, mono)
            if not parts:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts)

    def __repr__(self):
        return "Polynomial(%s)" % self


def _coerce(v) -> Polynomial:
    if isinstance(v, Polynomial):
        return v
    if isinstance(v, (int, Fraction)):
        return Polynomial.const(v)
    raise InputError("cannot coerce %r to a polynomial" % (v,))


# --- univariate toolkit -----------------------------------------------------


def _univar(p: Polynomial, var: Optional[str]) -> str:
    names = p.variables()
    if len(names) > 1 or (var and names and names != (var,)):
        raise InputError("expected a univariate polynomial in %s" % (var or "one variable"))
    return var or (names[0] if names else "x")


def poly_divmod(a: Polynomial, b: Polynomial, var: Optional[str] = None) -> Tuple[Polynomial, Polynomial]:
    var = _univar(a * b, var)
    if b.is_zero():
        raise InputError("polynomial division by zero")
    q = Polynomial()
    r = a
    db, lead_b = b.degree(var), b.coeff(var, b.degree(var)).constant_value()
    while not r.is_zero() and r.degree(var) >= db:
        dr = r.degree(var)
        c = r.coeff(var, dr).constant_value() / lead_b
        t = Polynomial({((var, dr - db),) if dr != db else (): c})
        q = q + t
        r = r - t * b
    return q, r


def poly_mod(a: Polynomial, g: Polynomial, var: Optional[str] = None) -> Polynomial:
    return poly_divmod(a, g, var)[1]


def poly_monic(a: Polynomial, var: Optional[str] = None) -> Polynomial:
    if a.is_zero():
        return a
    var = _univar(a, var)
    lead = a.coeff(var, a.degree(var)).constant_value()
    return a * (Fraction(1) / lead)


def poly_gcd(a: Polynomial, b: Polynomial, var: Optional[str] = None) -> Polynomial:
    var = _univar(a * b, var)
    while not b.is_zero():
        a, b = b, poly_mod(a, b, var)
    return poly_monic(a, var) if not a.is_zero() else a


def poly_xgcd(a: Polynomial, b: Polynomial, var: Optional[str] = None):
    """(g, u, v) with u·a + v·b = g, g monic."""
    var = _univar(a * b, var)
    r0, r1 = a, b
    u0, u1 = Polynomial.const(1), Polynomial()
    v0, v1 = Polynomial(), Polynomial.const(1)
    while not r1.is_zero():
        q, r = poly_divmod(r0, r1, var)
        r0, r1 = r1, r
        u0, u1 = u1, u0 - q * u1
        v0, v1 = v1, v0 - q * v1
    if r0.is_zero():
        return r0, u0, v0
    lead = r0.coeff(var, r0.degree(var)).constant_value()
    s = Polynomial.const(Fraction(1) / lead)
    return r0 * s, u0 * s, v0 * s


def poly_inverse_mod(a: Polynomial, g: Polynomial, var: Optional[str] = None) -> Polynomial:
    var = _univar(a * g, var)
    d, u, _ = poly_xgcd(a, g, var)
    if d != Polynomial.const(1):
        raise InputError("polynomial is not invertible modulo the ideal")
    return poly_mod(u, g, var)


def parse_scalar(text: str):
    """CSV cell: integer, rational p/q, or an indeterminate name."""
    text = text.strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        pass
    if text.isidentifier():
        return Polynomial.var(text)
    raise InputError("cannot parse ring value %r" % text)
