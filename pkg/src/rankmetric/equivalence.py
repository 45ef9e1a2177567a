"""Equivalence machinery for q-polynomial codes.

Two codes are equivalent when C2 = {L1 o f^rho o L2 : f in C1} for permutation
q-polynomials L1, L2 and a coefficient automorphism rho (a p-power map).
This module provides, in increasing order of cost:

* support invariants and the A^B unique-sum operation, giving the cheap
  inequivalence filter (a proof when it fires, inconclusive otherwise);
* a complete search of the monomial witness class L1 = c X^(q^r),
  L2 = d X^(q^(w-r)), where the support shift w is forced by the two
  universal supports;
* the closed-form classification predicate for twisted-family pairs;
* an exhaustive semilinear oracle over all of GL(n, q) for tiny instances.

rho convention: rho_exp in [0, e*n) applies a -> a^(p^rho_exp) to
coefficients; pass strict_rho=True to restrict to Aut(GF(q)), [0, e).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from . import kernels, linalg, linpoly
from .codes import FamilyParams, LinCode, codeword_digit_matrix, gtg_construct
from .errors import (
    BadWitnessShape,
    BudgetExceeded,
    ContextMismatch,
    OutOfTheoremRange,
    SingularWitness,
)
from .galois import FieldCtx
from .linpoly import LinPoly

SCAN_GUARD = 1 << 27        # candidate tuples per monomial search
FILTER_GUARD = 24           # max n for the 2^n support-set scan


# ---------------------------------------------------------------------------
# witnesses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EquivWitness:
    """C1 -> C2 map f |-> L1 o f^(p^rho_exp) o L2."""

    L1: LinPoly
    L2: LinPoly
    rho_exp: int


@dataclass(frozen=True)
class MonomialWitness:
    """Witness with monomial sides: L1 = c X^(q^r), L2 = d X^(q^((twist-r) mod n)).

    twist is the support shift of the induced map; it is 0 for every witness
    in the classification theorem's case (a) and -sk mod n in case (b).
    """

    c: int
    d: int
    r: int
    rho_exp: int
    twist: int = 0

    def as_equiv(self, ctx: FieldCtx) -> EquivWitness:
        l1 = linpoly.monomial(ctx, self.c, self.r)
        l2 = linpoly.monomial(ctx, self.d, (self.twist - self.r) % ctx.n)
        return EquivWitness(l1, l2, self.rho_exp)

    def describe(self) -> str:
        base = f"c=idx:{self.c} d=idx:{self.d} r={self.r} rho={self.rho_exp}"
        return base if self.twist == 0 else base + f" t={self.twist}"


def compose_monomial(ctx: FieldCtx, w1: MonomialWitness, w2: MonomialWitness) -> MonomialWitness:
    """Witness of tau_{w1} o tau_{w2} (apply w2 first); twist-0 witnesses only."""
    if w1.twist or w2.twist:
        raise BadWitnessShape("composition law implemented for twist-0 witnesses")
    n, e = ctx.n, ctx.e
    c = ctx.mul(w1.c, ctx.frob_p(w2.c, w1.rho_exp + e * w1.r))
    d = ctx.mul(ctx.frob_p(w2.d, w1.rho_exp), ctx.frob_q(w1.d, (n - w2.r) % n))
    return MonomialWitness(c, d, (w1.r + w2.r) % n,
                           (w1.rho_exp + w2.rho_exp) % (e * n), 0)


def verify_witness(code1: LinCode, code2: LinCode, w: EquivWitness) -> bool:
    """True iff the witness maps code1 onto code2 (basis images + equal dim)."""
    ctx = code1.ctx
    if code2.ctx is not ctx or w.L1.ctx is not ctx:
        raise ContextMismatch("witness across contexts")
    n = ctx.n
    if w.L1.rank_kernel()[0] != n or w.L2.rank_kernel()[0] != n:
        raise SingularWitness("witness sides must be permutation q-polynomials")
    if code1.dim != code2.dim:
        return False
    for f in code1.basis:
        image = w.L1.compose(f.coeff_frobenius(w.rho_exp)).compose(w.L2)
        if not code2.contains(image):
            return False
    return True


# ---------------------------------------------------------------------------
# supports
# ---------------------------------------------------------------------------

def universal_support(code: LinCode) -> frozenset[int]:
    """Indices carrying a nonzero coefficient somewhere in the code.

    For a linear code the union over a basis is the union over all words.
    """
    out: set[int] = set()
    for b in code.basis:
        out |= b.support()
    return frozenset(out)


def set_power(a: Iterable[int], b: Iterable[int], n: int) -> frozenset[int]:
    """A^B: residues mod n expressible as i+j, (i,j) in A x B, exactly once."""
    counts: dict[int, int] = {}
    for i in a:
        for j in b:
            k = (i + j) % n
            counts[k] = counts.get(k, 0) + 1
    return frozenset(k for k, v in counts.items() if v == 1)


def canonical_supports(params: FamilyParams) -> tuple[frozenset[int], ...]:
    """The independent-support family used to drive the filter.

    eta = 0: the singletons {is}, i < k.  eta != 0: the singletons {is},
    1 <= i < k, plus the linked pair {0, ks} (one support set, carried by the
    a_0 slice of the family).
    """
    n, k, s = params.ctx.n, params.k, params.s
    if params.eta == 0:
        return tuple(frozenset({(i * s) % n}) for i in range(k))
    singles = tuple(frozenset({(i * s) % n}) for i in range(1, k))
    return singles + (frozenset({0, (k * s) % n}),)


def check_independent_support(code: LinCode, b_set: Iterable[int],
                              witnesses: Mapping[int, tuple[int, int]]) -> bool:
    """Verify that b_set is an independent support of the code.

    witnesses[i] = (gamma_i, e_i) encodes the monomial map
    h_i(a) = gamma_i a^(q^(e_i)); monomial maps are GF(q)-linear, so checking
    the slice {sum_i h_i(a) X^(q^i)} on a basis of a-values suffices.
    """
    ctx = code.ctx
    b_set = frozenset(i % ctx.n for i in b_set)
    if set(witnesses.keys()) != set(b_set):
        raise BadWitnessShape("witness keys must be exactly the support set")
    for i, (gamma, _) in witnesses.items():
        if not 0 <= gamma < ctx.order:
            raise BadWitnessShape(f"witness coefficient {gamma} outside the field")
    if any(gamma == 0 for gamma, _ in witnesses.values()):
        return False
    for bm in ctx.beta:
        coeffs = [0] * ctx.n
        for i, (gamma, e_exp) in witnesses.items():
            coeffs[i] = ctx.mul(gamma, ctx.frob_q(int(bm), e_exp))
        if not code.contains(LinPoly(ctx, tuple(coeffs))):
            return False
    return True


@dataclass(frozen=True)
class FilterVerdict:
    inequivalent: bool
    candidates: tuple[frozenset[int], ...]   # surviving A sets when inconclusive


def support_filter(t1: Sequence[Iterable[int]], s2: Iterable[int], n: int) -> FilterVerdict:
    """Scan all nonempty A: no A with A^B in S2 for every B in T1 proves
    inequivalence; otherwise the surviving candidates are returned."""
    if n > FILTER_GUARD:
        raise BudgetExceeded(f"support filter guarded at n <= {FILTER_GUARD}")
    t1 = [frozenset(i % n for i in b) for b in t1]
    s2 = frozenset(i % n for i in s2)
    survivors = []
    for mask in range(1, 1 << n):
        a = frozenset(i for i in range(n) if mask >> i & 1)
        if all(set_power(a, b, n) <= s2 for b in t1):
            survivors.append(a)
    return FilterVerdict(not survivors, tuple(survivors))


def support_filter_pair(params1: FamilyParams, params2: FamilyParams) -> FilterVerdict:
    """Run the filter with T1 from params1 against the support of params2."""
    n = params1.ctx.n
    s2 = universal_support(gtg_construct(params2))
    return support_filter(canonical_supports(params1), s2, n)


# ---------------------------------------------------------------------------
# monomial search
# ---------------------------------------------------------------------------

def _as_code(x) -> LinCode:
    return gtg_construct(x) if isinstance(x, FamilyParams) else x


def _shift_candidates(s1: frozenset[int], s2: frozenset[int], n: int) -> list[int]:
    return [w for w in range(n) if all((i + w) % n in s2 for i in s1)]


def monomial_search(code1, code2, strict_rho: bool = False,
                    all_hits: bool = False, ws: Optional[Sequence[int]] = None,
                    backend: Optional[str] = None):
    """Search the monomial witness class for a map sending code1 onto code2.

    Scans support shifts w (forced by the universal supports unless ``ws`` is
    given), then rho, r, c, d in lexicographic order, testing every basis
    image for membership in code2.  Returns the first MonomialWitness, or
    None; with all_hits=True, the list of all witnesses found.
    """
    code1, code2 = _as_code(code1), _as_code(code2)
    ctx = code1.ctx
    if code2.ctx is not ctx:
        raise ContextMismatch("search across contexts")
    empty: list[MonomialWitness] = []
    if code1.dim != code2.dim:
        return empty if all_hits else None
    if code1.dim == 0:
        w = MonomialWitness(1, 1, 0, 0)
        return [w] if all_hits else w
    n, e = ctx.n, ctx.e
    if ws is None:
        ws = _shift_candidates(universal_support(code1), universal_support(code2), n)
    if not ws:
        return empty if all_hits else None
    rho_max = e if strict_rho else e * n
    space = len(ws) * rho_max * n * ctx.mult_order ** 2
    if space > SCAN_GUARD:
        raise BudgetExceeded(f"monomial scan of {space} candidates exceeds the guard")
    if all_hits and space > 1 << 22:
        raise BudgetExceeded(f"collecting all hits over {space} candidates is guarded")
    basis = np.array([f.coeffs for f in code1.basis], dtype=np.int64)
    maxhits = space if all_hits else 1
    hits = kernels.monomial_scan(basis, code2.annihilator(), ctx.exp, ctx.log,
                                 ctx.digits, ctx.pmod, ctx.p, e, n, ctx.d,
                                 np.array(sorted(ws), dtype=np.int64), rho_max,
                                 maxhits=maxhits, backend=backend)
    found = [MonomialWitness(int(c), int(d), int(r), int(rho), int(w))
             for w, rho, r, c, d in hits]
    if all_hits:
        return found
    return found[0] if found else None


def monomial_automorphisms(params_or_code, strict_rho: bool = False) -> list[MonomialWitness]:
    """All (c, d, r, rho) with L1 = c X^(q^r), L2 = d X^(q^(n-r)) fixing the code."""
    code = _as_code(params_or_code)
    return monomial_search(code, code, strict_rho=strict_rho, all_hits=True, ws=[0])


# ---------------------------------------------------------------------------
# classification predicate for twisted-family pairs
# ---------------------------------------------------------------------------

def _cond_exponents(ctx: FieldCtx, sk: int, g_exp: int, r: int) -> tuple[int, int]:
    """(A, B) with the condition reading  c^A d^B = rhs  in the exponent group."""
    m = ctx.mult_order
    q = ctx.q
    a = (pow(q, g_exp % ctx.n, m) - 1) % m
    b = (pow(q, (r + g_exp) % ctx.n, m) - pow(q, (r + sk) % ctx.n, m)) % m
    return a, b


def _solvable(a: int, b: int, t: int, m: int) -> bool:
    return t % math.gcd(math.gcd(a, m), math.gcd(b, m)) == 0


def thm_equiv_predicate(params1: FamilyParams, params2: FamilyParams,
                        strict_rho: bool = False) -> bool:
    """Closed-form equivalence test for H_{k,s}(eta, g) vs H_{k,t}(theta, h).

    Requires 2 <= k <= n-2 (the classification's range).  True iff
    (a) s = t, g = h mod n and theta c^(q^h - 1) d^(q^(r+h) - q^(r+sk))
        = eta^(rho q^r) has a solution, or
    (b) s = -t, g = -h mod n and c^(q^g - 1) d^(q^(r+g) - q^(r+sk))
        = eta^(rho q^r) theta^(q^(sk)) has one.
    Zero twists degenerate: both zero reduces to s = +-t (equal Gabidulin
    spans up to a Frobenius shift); a single zero is never equivalent.
    """
    ctx = params1.ctx
    if params2.ctx is not ctx:
        raise ContextMismatch("predicate across contexts")
    n, e, m = ctx.n, ctx.e, ctx.mult_order
    k = params1.k
    if not 2 <= k <= n - 2 or not 2 <= params2.k <= n - 2:
        raise OutOfTheoremRange("classification covers 2 <= k <= n-2 only")
    if params2.k != k:
        return False
    s, t = params1.s, params2.s
    g_exp, h_exp = params1.h, params2.h
    eta, theta = params1.eta, params2.eta
    if eta == 0 and theta == 0:
        return (s - t) % n == 0 or (s + t) % n == 0
    if eta == 0 or theta == 0:
        return False
    sk = (s * k) % n
    rho_max = e if strict_rho else e * n
    le, lt = int(ctx.log[eta]), int(ctx.log[theta])
    if (s - t) % n == 0 and (g_exp - h_exp) % n == 0:
        for rho in range(rho_max):
            for r in range(n):
                a, b = _cond_exponents(ctx, sk, h_exp, r)
                target = (le * int(ctx.pmod[(rho + e * r) % ctx.d]) - lt) % m
                if _solvable(a, b, target, m):
                    return True
    if (s + t) % n == 0 and (g_exp + h_exp) % n == 0:
        for rho in range(rho_max):
            for r in range(n):
                a, b = _cond_exponents(ctx, sk, g_exp, r)
                target = (le * int(ctx.pmod[(rho + e * r) % ctx.d])
                          + lt * int(ctx.pmod[(e * sk) % ctx.d])) % m
                if _solvable(a, b, target, m):
                    return True
    return False


def condition_a_solutions(ctx: FieldCtx, k: int, s: int, h_exp: int,
                          eta: int, theta: int,
                          strict_rho: bool = False) -> Iterable[MonomialWitness]:
    """All (c, d, r, rho) satisfying condition (a) for the pair
    (eta, h) -> (theta, h) at s = t; yields twist-0 MonomialWitness objects."""
    n, e, m = ctx.n, ctx.e, ctx.mult_order
    sk = (s * k) % n
    le, lt = int(ctx.log[eta]), int(ctx.log[theta])
    rho_max = e if strict_rho else e * n
    for rho in range(rho_max):
        for r in range(n):
            a, b = _cond_exponents(ctx, sk, h_exp, r)
            target = (le * int(ctx.pmod[(rho + e * r) % ctx.d]) - lt) % m
            gb = math.gcd(b, m)
            for x in range(m):
                rhs = (target - a * x) % m
                if rhs % gb:
                    continue
                if b == 0:
                    ys = range(m) if rhs == 0 else range(0)
                else:
                    y0 = (rhs // gb) * pow(b // gb, -1, m // gb) % (m // gb)
                    ys = range(y0, m, m // gb)
                for y in ys:
                    yield MonomialWitness(int(ctx.exp[x]), int(ctx.exp[y]), r, rho, 0)


def theta_from_condition_a(ctx: FieldCtx, k: int, s: int, h_exp: int, eta: int,
                           c: int, d: int, r: int, rho: int) -> int:
    """Solve condition (a) for theta given everything else (eta != 0)."""
    n = ctx.n
    sk = (s * k) % n
    rhs = ctx.frob_p(eta, rho + ctx.e * r)
    adj = ctx.mul(ctx.idx_pow(c, ctx.q ** (h_exp % n) - 1),
                  ctx.idx_pow(d, ctx.q ** ((r + h_exp) % n) - ctx.q ** ((r + sk) % n)))
    return ctx.mul(rhs, ctx.inv(adj))


# ---------------------------------------------------------------------------
# exhaustive oracle
# ---------------------------------------------------------------------------

def gl_size(n: int, q: int) -> int:
    total = 1
    qn = q ** n
    for i in range(n):
        total *= qn - q ** i
    return total


def gl_matrices(ctx: FieldCtx) -> Iterable[np.ndarray]:
    """All invertible n x n matrices over GF(q), lexicographic by row tuples."""
    n, q = ctx.n, ctx.q
    t = ctx.qtables
    rows: list[np.ndarray] = []

    def spanned(prefix: list[np.ndarray]) -> set[tuple[int, ...]]:
        out = {(0,) * n}
        for row in prefix:
            additions = []
            for v in out:
                va = np.array(v, dtype=np.int64)
                for lam in range(1, q):
                    additions.append(tuple(t.add[va, t.mul[lam, row]]))
            out.update(additions)
        return out

    def rec(prefix):
        if len(prefix) == n:
            yield np.array(prefix, dtype=np.int64)
            return
        seen = spanned(prefix)
        for idx in range(1, q ** n):
            cand = np.array([(idx // q ** i) % q for i in range(n)], dtype=np.int64)
            if tuple(cand) in seen:
                continue
            yield from rec(prefix + [cand])

    yield from rec(rows)


def _right_compose_digit_matrix(ctx: FieldCtx, w: LinPoly) -> np.ndarray:
    """(nd x nd) GF(p) matrix R with digit_vec(g o w) = R @ digit_vec(g).

    (g o w)_l = sum_{i+j=l} g_i^(1) ... linear in g: block (l, i) is the
    mult-by-w_j^(q^i) matrix with j = l - i, pre-twisted by nothing on g side.
    """
    n, d, p = ctx.n, ctx.d, ctx.p
    out = np.zeros((n * d, n * d), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            wj = w.coeffs[j]
            if not wj:
                continue
            c = ctx.frob_q(wj, i)
            l = (i + j) % n
            # mult-by-c block: column t = digits(c * x^t)
            col_elems = ctx._vec_mul(np.int64(c), ctx._pw)
            out[l * d:(l + 1) * d, i * d:(i + 1) * d] += ctx.digits[col_elems].T
    return out % p


def _action_map(ctx: FieldCtx) -> np.ndarray:
    """(d*d x nd) map: digit_vec(f) -> action_matrix_p(f).reshape(-1)."""
    n, d = ctx.n, ctx.d
    cols = []
    for j in range(n):
        for t in range(d):
            f = linpoly.monomial(ctx, int(ctx._pw[t]), j)
            cols.append(f.action_matrix_p().reshape(-1))
    return np.array(cols, dtype=np.int64).T % ctx.p


def exhaustive_oracle(code1: LinCode, code2: LinCode, budget: int = 100_000,
                      collect_all: bool = False):
    """Brute-force witness search over all invertible L2 and all rho.

    For each (L2, rho), the basis images b_i = f_i^rho o L2 span the image
    C1'; a full-rank u in C1' pivots the L1 search: every witness must have
    L1 = g o u^{-1} for some g in code2, so the candidate L1 set is one
    matrix product away and is pruned by membership of successive basis
    images.  Returns the first verified EquivWitness (or all of them with
    collect_all=True), or None.
    """
    ctx = code1.ctx
    if code2.ctx is not ctx:
        raise ContextMismatch("oracle across contexts")
    n, p, e, d = ctx.n, ctx.p, ctx.e, ctx.d
    size = gl_size(n, ctx.q)
    if size > budget:
        raise BudgetExceeded(f"|GL({n},{ctx.q})| = {size} exceeds budget {budget}")
    results: list[EquivWitness] = []
    if code1.dim != code2.dim:
        return results if collect_all else None

    nd = n * d
    g2_digits = codeword_digit_matrix(code2)          # (q^dim, nd)
    ann2 = code2.annihilator()
    act = _action_map(ctx).astype(np.float64)         # digit poly -> action matrix
    rho_ops = []                                      # digit matrices of f -> f^rho per rho
    basis1 = list(code1.basis)
    rho_max = e * n
    rho_basis_digits = []
    for rho in range(rho_max):
        rho_basis_digits.append(
            np.array([f.coeff_frobenius(rho).digit_vec() for f in basis1], dtype=np.int64))

    for mat in gl_matrices(ctx):
        l2 = linpoly.matrix_to_linpoly(ctx, mat)
        r_l2 = _right_compose_digit_matrix(ctx, l2).astype(np.float64)
        for rho in range(rho_max):
            bdig = rho_basis_digits[rho].astype(np.float64)
            images = (bdig @ r_l2.T) % p              # digit rows of b_i
            # pick a full-rank pivot u among the images
            acts = (images @ act.T) % p
            ranks = kernels.batch_rank_mod_p(
                acts.astype(np.int64).reshape(-1, d, d), p)
            full = np.nonzero(ranks == d)[0]
            if full.size == 0:
                u = _find_full_rank_in_span(ctx, images.astype(np.int64))
                if u is None:
                    # no full-rank word at all: scan all invertible L1 directly
                    found = _oracle_scan_all_l1(ctx, code1, code2, l2, rho, budget,
                                                collect_all)
                    if collect_all:
                        results.extend(found)
                        continue
                    if found:
                        return found
                    continue
            else:
                u = linpoly.from_digit_vec(ctx, images[full[0]].astype(np.int64))
            u_inv = u.inverse()
            r_uinv = _right_compose_digit_matrix(ctx, u_inv).astype(np.float64)
            cands = (g2_digits[1:].astype(np.float64) @ r_uinv.T) % p  # drop g = 0
            cand_ids = np.arange(1, g2_digits.shape[0])
            for i in range(len(basis1)):
                if cand_ids.size == 0:
                    break
                r_bi = _right_compose_digit_matrix(
                    ctx, linpoly.from_digit_vec(ctx, images[i].astype(np.int64)))
                img_i = (cands @ r_bi.T.astype(np.float64)) % p
                if ann2.shape[0]:
                    ok = ~np.any(img_i.astype(np.int64) @ ann2.T % p, axis=1)
                else:
                    ok = np.ones(cands.shape[0], dtype=bool)
                cands, cand_ids = cands[ok], cand_ids[ok]
            if cand_ids.size == 0:
                continue
            # rank-check survivors, then full verification
            acts_c = (cands @ act.T) % p
            ranks_c = kernels.batch_rank_mod_p(
                acts_c.astype(np.int64).reshape(-1, d, d), p)
            for pos in np.nonzero(ranks_c == d)[0]:
                l1 = linpoly.from_digit_vec(ctx, cands[pos].astype(np.int64))
                wit = EquivWitness(l1, l2, rho)
                if verify_witness(code1, code2, wit):
                    if collect_all:
                        results.append(wit)
                    else:
                        return wit
    return results if collect_all else None


def _find_full_rank_in_span(ctx: FieldCtx, rows: np.ndarray) -> Optional[LinPoly]:
    """First full-rank word in the GF(p)-span of digit rows (small spans only)."""
    npos = rows.shape[0]
    if ctx.p ** npos > 1 << 16:
        return None
    pw = ctx.p ** np.arange(npos)
    for idx in range(1, ctx.p ** npos):
        digs = (idx // pw) % ctx.p
        f = linpoly.from_digit_vec(ctx, digs.dot(rows) % ctx.p)
        if f.rank_kernel()[0] == ctx.n:
            return f
    return None


def _oracle_scan_all_l1(ctx: FieldCtx, code1: LinCode, code2: LinCode,
                        l2: LinPoly, rho: int, budget: int, collect_all: bool):
    """Cold fallback used when the image span has no full-rank word."""
    results = []
    for mat in gl_matrices(ctx):
        l1 = linpoly.matrix_to_linpoly(ctx, mat)
        wit = EquivWitness(l1, l2, rho)
        if verify_witness(code1, code2, wit):
            if collect_all:
                results.append(wit)
            else:
                return wit
    return results if collect_all else None
