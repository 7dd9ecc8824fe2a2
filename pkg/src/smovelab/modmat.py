"""Small exact matrices over a prime field, on top of numpy int64.

Everything is kept reduced mod p; inverses run Gauss-Jordan with modular
scalar inverses, so all arithmetic is exact.
"""

from __future__ import annotations

import numpy as np

from .words import InputError


def _as_mod(a, p: int) -> np.ndarray:
    m = np.asarray(a, dtype=np.int64) % p
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError("expected a square matrix")
    return m


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=np.int64)


def mul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    return (a @ b) % p


def matpow(a: np.ndarray, e: int, p: int) -> np.ndarray:
    if e < 0:
        return matpow(inverse(a, p), -e, p)
    out = identity(a.shape[0])
    base = a % p
    while e:
        if e & 1:
            out = mul(out, base, p)
        base = mul(base, base, p)
        e >>= 1
    return out


def inverse(a: np.ndarray, p: int) -> np.ndarray:
    """Gauss-Jordan over GF(p); raises if singular."""
    a = _as_mod(a, p)
    n = a.shape[0]
    work = np.concatenate([a, identity(n)], axis=1)
    for col in range(n):
        piv = next((r for r in range(col, n) if work[r, col] % p), None)
        if piv is None:
            raise InputError("matrix is singular mod %d" % p)
        if piv != col:
            work[[col, piv]] = work[[piv, col]]
        inv = pow(int(work[col, col]), -1, p)
        work[col] = (work[col] * inv) % p
        for r in range(n):
            if r != col and work[r, col]:
                work[r] = (work[r] - work[r, col] * work[col]) % p
    return work[:, n:]


def is_identity(a: np.ndarray, p: int) -> bool:
    return bool(np.array_equal(a % p, identity(a.shape[0])))


def equal(a: np.ndarray, b: np.ndarray, p: int) -> bool:
    return bool(np.array_equal(a % p, b % p))


def product(mats, p: int, dim: int) -> np.ndarray:
    """Left-to-right product; empty product is the identity."""
    out = identity(dim)
    for m in mats:
        out = mul(out, m, p)
    return out


def random_invertible_diagonal(rng, dim: int, p: int) -> np.ndarray:
    d = [rng.randrange(1, p) for _ in range(dim)]
    return np.diag(np.array(d, dtype=np.int64))


def random_poly_in(rng, base: np.ndarray, p: int, max_degree: int = 3) -> np.ndarray:
    """A random invertible polynomial in one fixed matrix; such matrices
    all commute with each other."""
    dim = base.shape[0]
    for _ in range(64):
        coeffs = [rng.randrange(p) for _ in range(max_degree + 1)]
        out = np.zeros((dim, dim), dtype=np.int64)
        power = identity(dim)
        for c in coeffs:
            out = (out + c * power) % p
            power = mul(power, base, p)
        try:
            inverse(out, p)
        except InputError:
            continue
        return out
    raise InputError("could not draw an invertible polynomial")


def to_text(a: np.ndarray) -> str:
    return ";".join(",".join(str(int(x)) for x in row) for row in a)


def from_text(text: str, p: int) -> np.ndarray:
    try:
        rows = [[int(x) for x in row.split(",")] for row in text.strip().split(";")]
    except ValueError as e:
        raise InputError("bad matrix text: %s" % e) from None
    a = np.array(rows, dtype=np.int64)
    return _as_mod(a, p)
