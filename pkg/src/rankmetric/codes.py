"""Rank-metric code families as GF(q)-linear spans of q-polynomials.

A LinCode stores a GF(q)-basis, never an enumerated set; enumeration is an
explicit guarded operation.  The twisted family H_{k,s}(eta, h) consists of

    a_0 x + a_1 x^(q^s) + ... + a_(k-1) x^(q^(s(k-1))) + eta a_0^(q^h) x^(q^(sk))

and degenerates to the Gabidulin family G_{k,s} at eta = 0.  Construction is
permitted even when the norm eligibility gate fails (negative controls need
it); the params object records eligibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from . import kernels, linalg, linpoly
from .errors import (
    BadParams,
    ContextMismatch,
    DependentAnchors,
    NonIntegralK,
    TooLarge,
)
from .galois import FieldCtx, build_field
from .linpoly import LinPoly

ENUM_GUARD = 1 << 26


# ---------------------------------------------------------------------------
# family parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FamilyParams:
    """Parameters (k, s, h, eta) of a twisted family over ctx; h stored mod n."""

    ctx: FieldCtx
    k: int
    s: int
    h: int
    eta: int

    @property
    def eligible(self) -> bool:
        return norm_condition(self)

    def describe(self) -> str:
        fam = "gg" if self.eta == 0 else "gtg"
        return (f"family={fam} k={self.k} s={self.s} h={self.h} "
                f"eta=idx:{self.eta}")


def family_params(ctx: FieldCtx, k: int, s: int, h: int, eta: int) -> FamilyParams:
    n = ctx.n
    if not 1 <= k < n:
        raise BadParams(f"need 1 <= k < n, got k={k}, n={n}")
    if math.gcd(s, n) != 1:
        raise BadParams(f"need gcd(s, n) = 1, got s={s}, n={n}")
    eta = ctx.check_elem(eta)
    return FamilyParams(ctx, k, s % n if n > 1 else 0, h % n, eta)


def norm_condition(params: FamilyParams) -> bool:
    """Eligibility gate: N(eta) != (-1)^(nk) in GF(q); eta = 0 always passes."""
    if params.eta == 0:
        return True
    ctx = params.ctx
    return ctx.rel_norm(params.eta) != ctx.minus_one_power(ctx.n * params.k)


# ---------------------------------------------------------------------------
# codes
# ---------------------------------------------------------------------------

class LinCode:
    """GF(q)-linear span of q-polynomials, held by a basis."""

    def __init__(self, ctx: FieldCtx, basis: Sequence[LinPoly],
                 family: Optional[FamilyParams] = None):
        self.ctx = ctx
        self.basis = tuple(basis)
        self.family = family
        for b in self.basis:
            if b.ctx is not ctx:
                raise ContextMismatch("basis polynomial from another context")
        self._digit_rows = None
        self._ann = None
        if self.basis:
            if linalg.rank_gfq(self.coord_matrix(), ctx.qtables) != len(self.basis):
                raise BadParams("basis polynomials are GF(q)-dependent")

    @property
    def dim(self) -> int:
        """GF(q)-dimension."""
        return len(self.basis)

    @property
    def size(self) -> int:
        return self.ctx.q ** self.dim

    def coord_matrix(self) -> np.ndarray:
        return np.array([b.coord_vec() for b in self.basis], dtype=np.int64)

    def digit_rows(self) -> np.ndarray:
        """GF(p)-generators of the span: digits of gq^t * b_j, shape (e*dim, n*d)."""
        if self._digit_rows is None:
            ctx = self.ctx
            rows = []
            for b in self.basis:
                for t in range(ctx.e):
                    rows.append(b.scale(ctx.idx_pow(ctx.subfield_gen, t)).digit_vec())
            self._digit_rows = (np.array(rows, dtype=np.int64)
                                if rows else np.zeros((0, ctx.n * ctx.d), dtype=np.int64))
        return self._digit_rows

    def annihilator(self) -> np.ndarray:
        """Rows y with (digit vector of any member) . y = 0 mod p."""
        if self._ann is None:
            self._ann = linalg.nullspace_mod_p(self.digit_rows(), self.ctx.p)
        return self._ann

    def contains(self, f: LinPoly) -> bool:
        if f.ctx is not self.ctx:
            raise ContextMismatch("membership across contexts")
        ann = self.annihilator()
        if ann.shape[0] == 0:
            return True
        return not np.any(ann.dot(f.digit_vec()) % self.ctx.p)

    def contains_digit_rows(self, rows: np.ndarray) -> np.ndarray:
        """Vectorized membership for digit-vector rows; returns a bool mask."""
        ann = self.annihilator()
        if ann.shape[0] == 0:
            return np.ones(rows.shape[0], dtype=bool)
        return ~np.any(rows.dot(ann.T) % self.ctx.p, axis=1)

    def __repr__(self):
        fam = f", {self.family.describe()}" if self.family else ""
        return f"LinCode(dim={self.dim} over GF({self.ctx.q}^{self.ctx.n}){fam})"


def span_code(ctx: FieldCtx, polys: Sequence[LinPoly],
              family: Optional[FamilyParams] = None, reduce: bool = False) -> LinCode:
    """Wrap polynomials as a code; with reduce=True, extract an independent basis."""
    if not reduce:
        return LinCode(ctx, polys, family)
    if not polys:
        return LinCode(ctx, (), family)
    mat = np.array([f.coord_vec() for f in polys], dtype=np.int64)
    r, pivots = linalg.rref_gfq(mat, ctx.qtables)
    basis = [linpoly.from_coord_vec(ctx, r[i]) for i in range(len(pivots))]
    return LinCode(ctx, basis, family)


def membership(code: LinCode, f: LinPoly) -> bool:
    return code.contains(f)


def codes_equal(c1: LinCode, c2: LinCode) -> bool:
    """Span equality by mutual membership of bases."""
    if c1.ctx is not c2.ctx:
        raise ContextMismatch("comparison across contexts")
    if c1.dim != c2.dim:
        return False
    return (bool(np.all(c2.contains_digit_rows(c1.digit_rows())))
            and bool(np.all(c1.contains_digit_rows(c2.digit_rows()))))


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------

def gg_construct(ctx: FieldCtx, k: int, s: int) -> LinCode:
    """Gabidulin span of the monomial blocks beta_m X^(q^(si)), i < k."""
    params = family_params(ctx, k, s, 0, 0)
    basis = [linpoly.monomial(ctx, int(b), (s * i) % ctx.n)
             for i in range(k) for b in ctx.beta]
    return LinCode(ctx, basis, params)


def gtg_construct(params: FamilyParams) -> LinCode:
    """Twisted span; records eligibility in its params but never refuses on it."""
    ctx, k, s, h, eta = params.ctx, params.k, params.s, params.h, params.eta
    n = ctx.n
    basis = []
    top = (s * k) % n
    for b in ctx.beta:
        lead = linpoly.monomial(ctx, int(b), 0)
        if eta:
            twist = linpoly.monomial(ctx, ctx.mul(eta, ctx.frob_q(int(b), h)), top)
            lead = lead + twist
        basis.append(lead)
    for i in range(1, k):
        for b in ctx.beta:
            basis.append(linpoly.monomial(ctx, int(b), (s * i) % n))
    return LinCode(ctx, basis, params)


# ---------------------------------------------------------------------------
# enumeration and statistics
# ---------------------------------------------------------------------------

def _guard(code: LinCode, override: bool):
    if not override and code.size > ENUM_GUARD:
        raise TooLarge(f"{code.size} codewords exceeds the enumeration guard")


def enumerate_codewords(code: LinCode, override: bool = False) -> Iterator[LinPoly]:
    """Yield all q^dim codewords once (coefficient odometer, first basis fastest)."""
    _guard(code, override)
    ctx = code.ctx
    if code.dim == 0:
        yield linpoly.zero(ctx)
        return
    q = ctx.q
    digits = [0] * code.dim
    scaled = [[b.scale(int(ctx.small_to_idx[c])) for c in range(q)] for b in code.basis]
    while True:
        f = linpoly.zero(ctx)
        for j, c in enumerate(digits):
            if c:
                f = f + scaled[j][c]
        yield f
        t = 0
        while t < code.dim:
            digits[t] += 1
            if digits[t] < q:
                break
            digits[t] = 0
            t += 1
        if t == code.dim:
            return


def codeword_digit_matrix(code: LinCode, override: bool = False) -> np.ndarray:
    """(q^dim, n*d) GF(p) digit vectors of every codeword, odometer order."""
    _guard(code, override)
    ctx = code.ctx
    rows = code.digit_rows()
    total = code.size
    npos = rows.shape[0]
    pw = ctx.p ** np.arange(npos)
    digs = (np.arange(total)[:, None] // pw[None, :]) % ctx.p
    return digs.dot(rows) % ctx.p


def _rank_histogram(code: LinCode, override: bool) -> np.ndarray:
    """GF(q)-rank histogram over all nonzero codewords (index = rank)."""
    _guard(code, override)
    ctx = code.ctx
    if code.dim == 0:
        return np.zeros(ctx.n + 1, dtype=np.int64)
    gens = []
    for b in code.basis:
        for t in range(ctx.e):
            gens.append(b.scale(ctx.idx_pow(ctx.subfield_gen, t)).action_matrix_p())
    hist_p = kernels.rank_sweep_hist(np.array(gens, dtype=np.int64), ctx.p)
    hist_q = np.zeros(ctx.n + 1, dtype=np.int64)
    for r_p, cnt in enumerate(hist_p):
        if cnt:
            if r_p % ctx.e:  # pragma: no cover - ranks of GF(q)-maps
                raise RuntimeError("rank histogram not divisible by e")
            hist_q[r_p // ctx.e] += cnt
    return hist_q


@dataclass(frozen=True)
class RankDistribution:
    counts: dict[int, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def rank_distribution(code: LinCode, override: bool = False) -> RankDistribution:
    hist = _rank_histogram(code, override)
    counts = {0: 1}
    for r in range(1, len(hist)):
        if hist[r]:
            counts[r] = int(hist[r])
    return RankDistribution(counts)


def is_mrd(code: LinCode, override: bool = False) -> tuple[int, bool]:
    """(min_dist, mrd): exhaustive min rank against the Singleton target n-k+1."""
    ctx = code.ctx
    if code.family is not None:
        k = code.family.k
    else:
        if code.dim % ctx.n:
            raise NonIntegralK(f"dimension {code.dim} is not a multiple of n={ctx.n}")
        k = code.dim // ctx.n
    if code.dim == 0:
        return ctx.n + 1, False
    hist = _rank_histogram(code, override)
    nz = np.nonzero(hist[1:])[0]
    min_dist = int(nz[0]) + 1 if nz.size else ctx.n + 1
    return min_dist, min_dist == ctx.n - k + 1


def singleton_bound(m: int, n: int, d: int, q: int) -> int:
    """Max size q^(max(m,n) (min(m,n) - d + 1)) of a distance-d code."""
    if not 1 <= d <= min(m, n):
        raise BadParams(f"need 1 <= d <= min(m, n), got d={d}")
    return q ** (max(m, n) * (min(m, n) - d + 1))


def matrix_export(code: LinCode, anchors: Sequence[int],
                  override: bool = False) -> Iterator[np.ndarray]:
    """Per codeword f, the m x n matrix with rows coords(f(anchor_i))."""
    ctx = code.ctx
    anchors = [ctx.check_elem(a) for a in anchors]
    rows = ctx.coords[np.array(anchors, dtype=np.int64)]
    if linalg.rank_gfq(rows, ctx.qtables) != len(anchors):
        raise DependentAnchors("anchors are GF(q)-linearly dependent")
    for f in enumerate_codewords(code, override):
        yield np.array([ctx.coords[f.evaluate(a)] for a in anchors], dtype=np.int64)


# ---------------------------------------------------------------------------
# subspace restriction probe
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProbeReport:
    p: int
    m: int
    n: int
    l: int
    delta: int
    trials: int
    seed: int
    max_intersection_dim: int
    passed: bool


def restriction_probe(p: int, m: int, n: int, l: int, delta: int,
                      trials: int, seed: int) -> ProbeReport:
    """Sample GF(p^m)-subspaces U <= GF(p^(mn))^l, dim delta, and bound
    the GF(p)-dimension of U intersected with GF(p^n)^l.

    PASS iff the maximum observed intersection dimension is <= delta.
    """
    if math.gcd(m, n) != 1:
        raise BadParams(f"need gcd(m, n) = 1, got m={m}, n={n}")
    if not 1 <= delta <= l:
        raise BadParams(f"need 1 <= delta <= l, got delta={delta}, l={l}")
    ctx = build_field(p, m, n)
    d = ctx.d
    rng = np.random.default_rng(seed)

    # GF(p)-basis of the degree-n intermediate field: fixed points of x -> x^(p^n)
    fmat = np.array([ctx.digits[ctx.frob_p(int(ctx._pw[i]), n)]
                     for i in range(d)], dtype=np.int64).T
    fixed = linalg.nullspace_mod_p((fmat - np.eye(d, dtype=np.int64)) % p, p)
    assert fixed.shape[0] == n
    w_rows = np.zeros((n * l, l * d), dtype=np.int64)
    for comp in range(l):
        for i in range(n):
            w_rows[comp * n + i, comp * d:(comp + 1) * d] = fixed[i]

    max_dim = 0
    for _ in range(trials):
        while True:
            vecs = rng.integers(0, ctx.order, size=(delta, l))
            coords = ctx.coords[vecs].reshape(delta, l * ctx.n)
            if linalg.rank_gfq(coords, ctx.qtables) == delta:
                break
        u_rows = np.zeros((delta * m, l * d), dtype=np.int64)
        for i in range(delta):
            for t in range(m):
                scale = ctx.idx_pow(ctx.subfield_gen, t)
                for comp in range(l):
                    v = ctx.mul(int(vecs[i, comp]), scale)
                    u_rows[i * m + t, comp * d:(comp + 1) * d] = ctx.digits[v]
        stacked = np.vstack([u_rows, w_rows])
        inter = delta * m + n * l - linalg.rank_mod_p(stacked, p)
        max_dim = max(max_dim, inter)
    return ProbeReport(p, m, n, l, delta, trials, seed, max_dim, max_dim <= delta)
