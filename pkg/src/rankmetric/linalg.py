"""Dense exact linear algebra over GF(p) and over a small field given by tables.

Prime-field routines take int arrays understood mod p.  Subfield routines
(GF(q), q = p^e) take entries as small indices in [0, q) together with a
:class:`FieldTables` bundle of lookup tables, so they never touch polynomial
representations.  Everything here is cold-path; the hot enumeration kernels
live in :mod:`rankmetric.kernels`.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np


class FieldTables(NamedTuple):
    """Lookup tables for a small field on indices [0, q)."""

    add: np.ndarray   # (q, q)
    mul: np.ndarray   # (q, q)
    inv: np.ndarray   # (q,), inv[0] unused
    neg: np.ndarray   # (q,)


class SingularMatrix(ValueError):
    pass


# ---------------------------------------------------------------------------
# GF(p)
# ---------------------------------------------------------------------------

def rref_mod_p(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod p; returns (R, pivot column list)."""
    r = np.array(a, dtype=np.int64) % p
    if r.ndim != 2:
        raise ValueError("matrix required")
    rows, cols = r.shape
    pivots: list[int] = []
    rr = 0
    for c in range(cols):
        if rr == rows:
            break
        sel = np.nonzero(r[rr:, c])[0]
        if sel.size == 0:
            continue
        i = rr + int(sel[0])
        if i != rr:
            r[[rr, i]] = r[[i, rr]]
        r[rr] = r[rr] * pow(int(r[rr, c]), p - 2, p) % p
        other = np.nonzero(r[:, c])[0]
        other = other[other != rr]
        if other.size:
            r[other] = (r[other] - np.outer(r[other, c], r[rr])) % p
        pivots.append(c)
        rr += 1
    return r, pivots


def rank_mod_p(a: np.ndarray, p: int) -> int:
    return len(rref_mod_p(a, p)[1])


def nullspace_mod_p(a: np.ndarray, p: int) -> np.ndarray:
    """Rows spanning {v : a @ v = 0 mod p}; shape (cols - rank, cols)."""
    a = np.asarray(a, dtype=np.int64)
    r, pivots = rref_mod_p(a, p)
    cols = a.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, fc in enumerate(free):
        basis[k, fc] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = (-r[i, fc]) % p
    return basis


def solve_mod_p(a: np.ndarray, b: np.ndarray, p: int):
    """One solution x of a @ x = b mod p, or None if inconsistent."""
    a = np.asarray(a, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64) % p
    aug = np.hstack([a, b.reshape(-1, 1)])
    r, pivots = rref_mod_p(aug, p)
    cols = a.shape[1]
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = r[i, cols]
    return x


def inv_mod_p(a: np.ndarray, p: int) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    m = a.shape[0]
    if a.shape != (m, m):
        raise ValueError("square matrix required")
    aug = np.hstack([a % p, np.eye(m, dtype=np.int64)])
    r, pivots = rref_mod_p(aug, p)
    if pivots != list(range(m)):
        raise SingularMatrix("matrix is singular mod p")
    return r[:, m:]


def in_rowspace_mod_p(rows: np.ndarray, v: np.ndarray, p: int) -> bool:
    rows = np.asarray(rows, dtype=np.int64)
    if rows.shape[0] == 0:
        return not np.any(np.asarray(v) % p)
    return rank_mod_p(np.vstack([rows, v]), p) == rank_mod_p(rows, p)


# ---------------------------------------------------------------------------
# GF(q) via tables, entries as small indices
# ---------------------------------------------------------------------------

def rref_gfq(a: np.ndarray, t: FieldTables) -> tuple[np.ndarray, list[int]]:
    r = np.array(a, dtype=np.int64)
    rows, cols = r.shape
    pivots: list[int] = []
    rr = 0
    for c in range(cols):
        if rr == rows:
            break
        sel = np.nonzero(r[rr:, c])[0]
        if sel.size == 0:
            continue
        i = rr + int(sel[0])
        if i != rr:
            r[[rr, i]] = r[[i, rr]]
        r[rr] = t.mul[int(t.inv[r[rr, c]]), r[rr]]
        other = np.nonzero(r[:, c])[0]
        other = other[other != rr]
        if other.size:
            scaled = t.mul[r[other, c][:, None], r[rr][None, :]]
            r[other] = t.add[r[other], t.neg[scaled]]
        pivots.append(c)
        rr += 1
    return r, pivots


def rank_gfq(a: np.ndarray, t: FieldTables) -> int:
    return len(rref_gfq(a, t)[1])


def nullspace_gfq(a: np.ndarray, t: FieldTables) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    r, pivots = rref_gfq(a, t)
    cols = a.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, fc in enumerate(free):
        basis[k, fc] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = t.neg[r[i, fc]]
    return basis


def solve_gfq(a: np.ndarray, b: np.ndarray, t: FieldTables):
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    aug = np.hstack([a, b.reshape(-1, 1)])
    r, pivots = rref_gfq(aug, t)
    cols = a.shape[1]
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = r[i, cols]
    return x


def inv_gfq(a: np.ndarray, t: FieldTables) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    m = a.shape[0]
    eye = np.zeros((m, m), dtype=np.int64)
    eye[np.arange(m), np.arange(m)] = 1
    r, pivots = rref_gfq(np.hstack([a, eye]), t)
    if pivots != list(range(m)):
        raise SingularMatrix("matrix is singular over GF(q)")
    return r[:, m:]


def matmul_gfq(a: np.ndarray, b: np.ndarray, t: FieldTables) -> np.ndarray:
    """Exact GF(q) matrix product on small indices."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for k in range(a.shape[1]):
        term = t.mul[a[:, k][:, None], b[k][None, :]]
        out = t.add[out, term]
    return out
