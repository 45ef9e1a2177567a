"""Delsarte duality for q-polynomial codes, and adjoint codes.

The bilinear form is b(f, g) = Tr_{q^n/q}(sum_i f_i g_i) on coefficient
vectors.  Duals are computed as GF(q)-nullspaces in the n^2-dimensional
coefficient coordinate space; the Gram data of the basis is assembled once
per field context and cached.
"""

from __future__ import annotations

import functools

import numpy as np

from . import linalg, linpoly
from .codes import FamilyParams, LinCode, span_code
from .errors import BadParams, ContextMismatch
from .galois import FieldCtx
from .linpoly import LinPoly


def form_b(f: LinPoly, g: LinPoly) -> int:
    """Tr_{q^n/q}(sum f_i g_i); symmetric, GF(q)-bilinear, values in GF(q)."""
    if f.ctx is not g.ctx:
        raise ContextMismatch("bilinear form across contexts")
    c = f.ctx
    acc = 0
    for a, b in zip(f.coeffs, g.coeffs):
        if a and b:
            acc = c.add(acc, c.mul(a, b))
    return c.rel_trace(acc)


@functools.cache
def trace_gram(ctx: FieldCtx) -> np.ndarray:
    """(n, n) GF(q) Gram matrix T[j, m] = Tr(beta_j beta_m), small indices."""
    n = ctx.n
    t = np.zeros((n, n), dtype=np.int64)
    for j in range(n):
        for m in range(j, n):
            v = ctx.idx_to_small[ctx.rel_trace(ctx.mul(int(ctx.beta[j]), int(ctx.beta[m])))]
            t[j, m] = t[m, j] = v
    return t


def _form_rows(code: LinCode) -> np.ndarray:
    """Rows u_g with b(f, g) = <coord_vec(f), u_g> over GF(q)."""
    ctx = code.ctx
    t = trace_gram(ctx)
    rows = np.zeros((code.dim, ctx.n * ctx.n), dtype=np.int64)
    for i, g in enumerate(code.basis):
        cv = g.coord_vec().reshape(ctx.n, ctx.n)
        rows[i] = linalg.matmul_gfq(cv, t, ctx.qtables).reshape(-1)
    return rows


def delsarte_dual(code: LinCode) -> LinCode:
    """Full annihilator of the code under form_b; dimension n^2 - dim."""
    ctx = code.ctx
    if code.dim == 0:
        basis = [linpoly.monomial(ctx, int(b), i) for i in range(ctx.n) for b in ctx.beta]
        return LinCode(ctx, basis)
    null = linalg.nullspace_gfq(_form_rows(code), ctx.qtables)
    basis = [linpoly.from_coord_vec(ctx, row) for row in null]
    dual = LinCode(ctx, basis)
    if dual.dim != ctx.n * ctx.n - code.dim:  # pragma: no cover - form nondegenerate
        raise RuntimeError("dual dimension mismatch")
    return dual


def dual_closed_form(params: FamilyParams) -> LinCode:
    """The twisted family's dual, written down directly.

    For eta != 0 the span is
        {b_0 x - (1/eta) b_0^(q^h) x^(q^(ks))} + {b_i x^(q^(is)) : k+1 <= i <= n-1};
    at eta = 0 it is the complementary Gabidulin block
        {b_i x^(q^(is)) : k <= i <= n-1}.
    """
    ctx, k, s, h, eta = params.ctx, params.k, params.s, params.h, params.eta
    n = ctx.n
    basis = []
    if eta == 0:
        for i in range(k, n):
            for b in ctx.beta:
                basis.append(linpoly.monomial(ctx, int(b), (s * i) % n))
        return LinCode(ctx, basis)
    top = (k * s) % n
    neg_inv_eta = ctx.neg(ctx.inv(eta))
    for b in ctx.beta:
        lead = linpoly.monomial(ctx, int(b), 0)
        twist = linpoly.monomial(ctx, ctx.mul(neg_inv_eta, ctx.frob_q(int(b), h)), top)
        basis.append(lead + twist)
    for i in range(k + 1, n):
        for b in ctx.beta:
            basis.append(linpoly.monomial(ctx, int(b), (s * i) % n))
    code = LinCode(ctx, basis)
    if code.dim != n * (n - k):
        raise BadParams("closed-form dual has wrong dimension")  # pragma: no cover
    return code


def adjoint_code(code: LinCode) -> LinCode:
    """{f-hat : f in code}; adjoint is GF(q)-linear, so the basis adjoints span it."""
    return span_code(code.ctx, [b.adjoint() for b in code.basis])
