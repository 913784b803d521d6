"""Exact linear algebra over the rationals.

Matrices are numpy object arrays holding ``fractions.Fraction`` entries, so
``@``, ``.T`` and slicing work and zero-size shapes survive.  Subspaces are
represented by the rows of a ``(k, n)`` array.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

__all__ = [
    "frac",
    "exact",
    "zeros",
    "identity",
    "is_zero",
    "equal",
    "rref",
    "rank",
    "nullspace",
    "solve",
    "row_span",
    "intersect_rows",
    "to_strings",
    "to_float",
]


def frac(x) -> Fraction:
    """Exact conversion; floats are taken at their binary value."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (float, np.floating)):
        return Fraction(float(x))
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(x)


def exact(a, ndim: int | None = None) -> np.ndarray:
    arr = np.asarray(a, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        out[idx] = frac(x)
    if ndim is not None and out.ndim != ndim:
        raise ValueError(f"expected a {ndim}-dimensional array, got shape {out.shape}")
    return out


def zeros(rows: int, cols: int) -> np.ndarray:
    out = np.empty((rows, cols), dtype=object)
    out.fill(Fraction(0))
    return out


def identity(n: int) -> np.ndarray:
    out = zeros(n, n)
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def is_zero(a) -> bool:
    return all(x == 0 for x in np.asarray(a, dtype=object).flat)


def equal(a, b) -> bool:
    a, b = np.asarray(a, dtype=object), np.asarray(b, dtype=object)
    return a.shape == b.shape and is_zero(a - b)


def rref(a):
    """Reduced row echelon form; returns ``(nonzero_rows, pivot_columns)``."""
    a = np.asarray(a, dtype=object)
    n = a.shape[1]
    m = [[frac(x) for x in row] for row in a]
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == len(m):
            break
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    out = zeros(r, n)
    for i in range(r):
        out[i, :] = m[i]
    return out, tuple(pivots)


def rank(a) -> int:
    return len(rref(a)[1])


def nullspace(a) -> np.ndarray:
    """Rows spanning ``{x : a x = 0}``."""
    a = np.asarray(a, dtype=object)
    n = a.shape[1]
    red, piv = rref(a)
    free = [c for c in range(n) if c not in piv]
    out = zeros(len(free), n)
    for k, f in enumerate(free):
        out[k, f] = Fraction(1)
        for row, p in zip(red, piv):
            out[k, p] = -row[f]
    return out


def solve(a, b):
    """A particular solution of ``a x = b`` with free variables zero, or None."""
    a = np.asarray(a, dtype=object)
    n = a.shape[1]
    aug = np.concatenate([a, np.asarray(b, dtype=object).reshape(-1, 1)], axis=1)
    red, piv = rref(aug)
    if n in piv:
        return None
    x = np.array([Fraction(0)] * n, dtype=object)
    for row, p in zip(red, piv):
        x[p] = row[n]
    return x


def row_span(rows) -> np.ndarray:
    """Canonical basis (RREF) of the row span; equal spans give equal arrays."""
    return rref(rows)[0]


def intersect_rows(u, v) -> np.ndarray:
    """Basis of ``span(u) ∩ span(v)`` via annihilators."""
    u, v = np.asarray(u, dtype=object), np.asarray(v, dtype=object)
    n = u.shape[1]
    if u.shape[0] == 0 or v.shape[0] == 0:
        return zeros(0, n)
    ann = np.concatenate([nullspace(u), nullspace(v)], axis=0)
    return row_span(nullspace(ann)) if ann.shape[0] else row_span(identity(n))


def to_strings(a):
    a = np.asarray(a, dtype=object)
    if a.ndim == 0:
        return str(frac(a.item()))
    return [to_strings(x) for x in a]


def to_float(a) -> np.ndarray:
    return np.asarray(a, dtype=object).astype(float)
