"""Hot enumeration kernels: numba @njit with a pure-numpy fallback.

Two loops dominate the package runtime and both live here:

* rank sweeps: enumerate every nonzero word of a GF(p)-span of square
  matrices and histogram the GF(p) ranks (MRD checks, rank distributions);
* monomial witness scans: test every candidate (twist, rho, r, c, d)
  monomial equivalence map against a target code's annihilator.

The active backend is numba when importable; setting RANKMETRIC_FORCE_NUMPY=1
in the environment selects the pure-numpy path instead.  Every public entry
point also takes an explicit ``backend=`` override so the two implementations
can be compared directly (see benchmarks/bench_kernels.py).
"""

from __future__ import annotations

import os

import numpy as np

from . import linalg

_FORCE_NUMPY = os.environ.get("RANKMETRIC_FORCE_NUMPY", "").lower() in ("1", "true", "yes")

try:
    if _FORCE_NUMPY:
        raise ImportError("numpy fallback forced")
    from numba import njit

    BACKEND = "numba"
except ImportError:  # pragma: no cover - exercised via env flag
    njit = None
    BACKEND = "numpy"

_KERNEL_COUNT_LIMIT = 4096  # max p^d for the batched kernel-counting rank


def available_backends() -> tuple[str, ...]:
    return ("numba", "numpy") if njit is not None else ("numpy",)


def _pick(backend: str | None) -> str:
    b = backend or BACKEND
    if b == "numba" and njit is None:
        raise RuntimeError("numba backend requested but numba is unavailable")
    if b not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {b!r}")
    return b


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------

if njit is not None:

    @njit(cache=True)
    def _inv_mod_small(v, p):
        for t in range(1, p):
            if (t * v) % p == 1:
                return t
        return 0

    @njit(cache=True)
    def _rank_into(m, a, p):
        dd = m.shape[0]
        cc = m.shape[1]
        for i in range(dd):
            for j in range(cc):
                a[i, j] = m[i, j]
        rank = 0
        for col in range(cc):
            piv = -1
            for i in range(rank, dd):
                if a[i, col] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != rank:
                for j in range(col, cc):
                    t = a[rank, j]
                    a[rank, j] = a[piv, j]
                    a[piv, j] = t
            inv = _inv_mod_small(a[rank, col], p)
            for j in range(col, cc):
                a[rank, j] = a[rank, j] * inv % p
            for i in range(rank + 1, dd):
                f = a[i, col]
                if f != 0:
                    for j in range(col, cc):
                        a[i, j] = (a[i, j] - f * a[rank, j]) % p
            rank += 1
            if rank == dd:
                break
        return rank

    @njit(cache=True)
    def _rank_one_nb(m, p):
        a = np.zeros_like(m)
        return _rank_into(m, a, p)

    @njit(cache=True)
    def _batch_rank_nb(mats, p):
        b = mats.shape[0]
        out = np.zeros(b, dtype=np.int64)
        scratch = np.zeros((mats.shape[1], mats.shape[2]), dtype=np.int64)
        for i in range(b):
            out[i] = _rank_into(mats[i], scratch, p)
        return out

    @njit(cache=True)
    def _sweep_nb(gens, p):
        n_gen = gens.shape[0]
        dd = gens.shape[1]
        hist = np.zeros(dd + 1, dtype=np.int64)
        cur = np.zeros((dd, dd), dtype=np.int64)
        scratch = np.zeros((dd, dd), dtype=np.int64)
        digit = np.zeros(n_gen + 1, dtype=np.int64)
        for lead in range(n_gen):
            for i in range(dd):
                for j in range(dd):
                    cur[i, j] = gens[lead, i, j]
            for t in range(lead + 1, n_gen):
                digit[t] = 0
            while True:
                hist[_rank_into(cur, scratch, p)] += 1
                t = lead + 1
                while t < n_gen:
                    digit[t] += 1
                    for i in range(dd):
                        for j in range(dd):
                            v = cur[i, j] + gens[t, i, j]
                            cur[i, j] = v - p if v >= p else v
                    if digit[t] < p:
                        break
                    digit[t] = 0
                    t += 1
                if t == n_gen:
                    break
        for i in range(dd + 1):
            hist[i] *= p - 1
        return hist

    @njit(cache=True)
    def _mono_scan_nb(basis, ann, exp, log, digits, pmod, p, e, n, d, ws, rho_max, maxhits):
        m1 = basis.shape[0]
        na = ann.shape[0]
        order = log.shape[0]
        big_m = order - 1
        nd = n * d
        hits = np.zeros((maxhits, 5), dtype=np.int64)
        cnt = 0
        vec = np.zeros(nd, dtype=np.int64)
        for wi in range(ws.shape[0]):
            w = ws[wi]
            for rho in range(rho_max):
                for r in range(n):
                    pk_a = pmod[(rho + e * r) % d]
                    for c in range(1, order):
                        lc = log[c]
                        for dv in range(1, order):
                            ld = log[dv]
                            ok = True
                            for b in range(m1):
                                for t in range(nd):
                                    vec[t] = 0
                                for j in range(n):
                                    a = basis[b, j]
                                    if a == 0:
                                        continue
                                    limg = (lc + log[a] * pk_a
                                            + ld * pmod[(e * (j + r)) % d]) % big_m
                                    img = exp[limg]
                                    slot = j + w
                                    if slot >= n:
                                        slot -= n
                                    for t in range(d):
                                        vec[slot * d + t] = digits[img, t]
                                for ai in range(na):
                                    s = 0
                                    for t in range(nd):
                                        if vec[t] != 0:
                                            s += ann[ai, t] * vec[t]
                                    if s % p != 0:
                                        ok = False
                                        break
                                if not ok:
                                    break
                            if ok:
                                hits[cnt, 0] = w
                                hits[cnt, 1] = rho
                                hits[cnt, 2] = r
                                hits[cnt, 3] = c
                                hits[cnt, 4] = dv
                                cnt += 1
                                if cnt == maxhits:
                                    return hits[:cnt]
        return hits[:cnt]


# ---------------------------------------------------------------------------
# numpy fallbacks
# ---------------------------------------------------------------------------

def _batch_rank_np(mats: np.ndarray, p: int) -> np.ndarray:
    mats = np.asarray(mats, dtype=np.int64) % p
    b, dd, cc = mats.shape
    if dd != cc or p ** dd > _KERNEL_COUNT_LIMIT:
        return np.array([linalg.rank_mod_p(m, p) for m in mats], dtype=np.int64)
    # rank from the kernel size: count vectors v with M v = 0
    npts = p ** dd
    pts = ((np.arange(npts)[None, :] // p ** np.arange(dd)[:, None]) % p).astype(np.float64)
    prods = (mats.astype(np.float64).reshape(b * dd, dd) @ pts) % p
    zeros = (prods.reshape(b, dd, npts) == 0).all(axis=1).sum(axis=1)
    powers = p ** np.arange(dd + 1)
    return dd - np.searchsorted(powers, zeros).astype(np.int64)


def _sweep_np(gens: np.ndarray, p: int) -> np.ndarray:
    n_gen, dd, _ = gens.shape
    hist = np.zeros(dd + 1, dtype=np.int64)
    flat = gens.reshape(n_gen, dd * dd).astype(np.float64)
    chunk = 1 << 14
    for lead in range(n_gen):
        tail = n_gen - lead - 1
        total = p ** tail
        tail_pw = p ** np.arange(tail)
        for start in range(0, total, chunk):
            cnt = min(chunk, total - start)
            ar = np.arange(start, start + cnt)
            digs = ((ar[:, None] // tail_pw[None, :]) % p).astype(np.float64)
            mats = (flat[lead][None, :] + digs @ flat[lead + 1:]) % p
            ranks = _batch_rank_np(mats.reshape(cnt, dd, dd).astype(np.int64), p)
            hist += np.bincount(ranks, minlength=dd + 1)
    return hist * (p - 1)


def _mono_scan_np(basis, ann, exp, log, digits, pmod, p, e, n, d, ws, rho_max, maxhits):
    m1 = basis.shape[0]
    order = log.shape[0]
    big_m = order - 1
    hits: list[tuple[int, int, int, int, int]] = []
    lidx = log[1:order]  # log of every nonzero element, in index order
    lc_full = np.repeat(lidx, big_m)
    ld_full = np.tile(lidx, big_m)
    idx_full = np.arange(big_m * big_m, dtype=np.int64)
    for w in ws:
        w = int(w)
        for rho in range(rho_max):
            for r in range(n):
                pk_a = int(pmod[(rho + e * r) % d])
                ids = idx_full
                lc, ld = lc_full, ld_full
                for b in range(m1):
                    if ids.size == 0:
                        break
                    acc = np.zeros((ids.size, ann.shape[0]), dtype=np.int64)
                    for j in range(n):
                        a = int(basis[b, j])
                        if a == 0:
                            continue
                        limg = (lc + log[a] * pk_a + ld * int(pmod[(e * (j + r)) % d])) % big_m
                        dg = digits[exp[limg]]
                        slot = (j + w) % n
                        acc += dg @ ann[:, slot * d:(slot + 1) * d].T
                    good = (acc % p == 0).all(axis=1)
                    ids, lc, ld = ids[good], lc[good], ld[good]
                if ids.size:
                    if maxhits == 1:
                        f = int(ids.min())
                        return np.array([[w, rho, r, f // big_m + 1, f % big_m + 1]],
                                        dtype=np.int64)
                    for f in np.sort(ids):
                        hits.append((w, rho, r, int(f) // big_m + 1, int(f) % big_m + 1))
                        if len(hits) == maxhits:
                            return np.array(hits, dtype=np.int64)
    if not hits:
        return np.zeros((0, 5), dtype=np.int64)
    return np.array(hits, dtype=np.int64)


# ---------------------------------------------------------------------------
# public dispatch
# ---------------------------------------------------------------------------

def rank_mod_p(mat: np.ndarray, p: int, backend: str | None = None) -> int:
    """GF(p) rank of a single integer matrix."""
    mat = np.ascontiguousarray(np.asarray(mat, dtype=np.int64) % p)
    if _pick(backend) == "numba":
        return int(_rank_one_nb(mat, p))
    return linalg.rank_mod_p(mat, p)


def batch_rank_mod_p(mats: np.ndarray, p: int, backend: str | None = None) -> np.ndarray:
    """GF(p) ranks of a stack of matrices, shape (B, m, n) -> (B,)."""
    mats = np.ascontiguousarray(np.asarray(mats, dtype=np.int64) % p)
    if mats.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    if _pick(backend) == "numba":
        return _batch_rank_nb(mats, p)
    return _batch_rank_np(mats, p)


def rank_sweep_hist(gens: np.ndarray, p: int, backend: str | None = None) -> np.ndarray:
    """Histogram of GF(p) ranks over every nonzero word of span(gens).

    ``gens`` has shape (D, dd, dd); the span has p^D - 1 nonzero words and the
    returned histogram (length dd+1) counts each exactly once.  Enumeration
    walks projective representatives (first nonzero digit 1) and multiplies
    by p - 1, since rank is scale invariant.
    """
    gens = np.ascontiguousarray(np.asarray(gens, dtype=np.int64) % p)
    if gens.shape[0] == 0:
        return np.zeros(gens.shape[1] + 1 if gens.ndim == 3 else 1, dtype=np.int64)
    if _pick(backend) == "numba":
        return _sweep_nb(gens, p)
    return _sweep_np(gens, p)


def monomial_scan(basis: np.ndarray, ann: np.ndarray, exp: np.ndarray, log: np.ndarray,
                  digits: np.ndarray, pmod: np.ndarray, p: int, e: int, n: int, d: int,
                  ws: np.ndarray, rho_max: int, maxhits: int = 1,
                  backend: str | None = None) -> np.ndarray:
    """Scan monomial equivalence candidates against a target annihilator.

    A candidate (w, rho, r, c, dv) realizes the map
    f -> c X^{q^r} o f^{p^rho} o dv X^{q^{(w - r) mod n}}, whose image of the
    coefficient in slot j lands in slot (j + w) mod n with value
    c * a_j^{p^(rho + e r)} * dv^{q^(j+r)}.  A candidate survives iff every
    image of a basis row of ``basis`` is annihilated by every row of ``ann``
    (membership in the target span).  Returns up to ``maxhits`` survivors as
    rows (w, rho, r, c, dv), in lexicographic scan order.
    """
    basis = np.ascontiguousarray(np.asarray(basis, dtype=np.int64))
    ann = np.ascontiguousarray(np.asarray(ann, dtype=np.int64) % p)
    ws = np.ascontiguousarray(np.asarray(ws, dtype=np.int64))
    if _pick(backend) == "numba":
        return _mono_scan_nb(basis, ann, exp, log, digits, pmod,
                             p, e, n, d, ws, rho_max, maxhits)
    return _mono_scan_np(basis, ann, exp, log, digits, pmod,
                         p, e, n, d, ws, rho_max, maxhits)
