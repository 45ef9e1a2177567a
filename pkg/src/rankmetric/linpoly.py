"""The algebra of q-polynomials sum a_i X^(q^i) over GF(q^n), modulo X^(q^n) - X.

A LinPoly stores exactly n coefficients (element indices of its FieldCtx);
exponent indices are always reduced mod n, so equality of values is equality
of coefficient tuples.  These objects are the codewords of every code in the
package: evaluation realizes them as GF(q)-linear maps on GF(q^n), to_matrix
as n x n matrices over GF(q) in the power basis of the field generator.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from . import kernels, linalg
from .errors import ContextMismatch, SingularMap
from .galois import FieldCtx, format_elem, parse_elem


@dataclass(frozen=True)
class LinPoly:
    ctx: FieldCtx
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.ctx.n:
            raise ValueError(f"need exactly {self.ctx.n} coefficients")

    # -- basics ---------------------------------------------------------------

    @property
    def n(self) -> int:
        return self.ctx.n

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def support(self) -> frozenset[int]:
        return frozenset(i for i, a in enumerate(self.coeffs) if a)

    def _check_ctx(self, other):
        if other.ctx is not self.ctx:
            raise ContextMismatch("operands from different field contexts")

    def __add__(self, other: "LinPoly") -> "LinPoly":
        self._check_ctx(other)
        add = self.ctx.add
        return LinPoly(self.ctx, tuple(add(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "LinPoly") -> "LinPoly":
        self._check_ctx(other)
        c = self.ctx
        return LinPoly(c, tuple(c.sub(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    def scale(self, a: int) -> "LinPoly":
        """Left scalar multiple a*f, a an element of GF(q^n)."""
        mul = self.ctx.mul
        return LinPoly(self.ctx, tuple(mul(a, c) for c in self.coeffs))

    # -- the operations ---------------------------------------------------------

    def evaluate(self, v: int) -> int:
        """f(v) = sum a_i v^(q^i)."""
        c = self.ctx
        acc = 0
        for i, a in enumerate(self.coeffs):
            if a:
                acc = c.add(acc, c.mul(a, c.frob_q(v, i)))
        return acc

    def compose(self, g: "LinPoly") -> "LinPoly":
        """f o g; (f o g)(v) = f(g(v)).  Exponents reduce mod n eagerly."""
        self._check_ctx(g)
        c = self.ctx
        n = c.n
        out = [0] * n
        for i, fi in enumerate(self.coeffs):
            if not fi:
                continue
            for j, gj in enumerate(g.coeffs):
                if not gj:
                    continue
                l = (i + j) % n
                out[l] = c.add(out[l], c.mul(fi, c.frob_q(gj, i)))
        return LinPoly(c, tuple(out))

    def adjoint(self) -> "LinPoly":
        """sum a_(n-i)^(q^i) X^(q^i): the polynomial side of matrix transpose."""
        c = self.ctx
        n = c.n
        return LinPoly(c, tuple(c.frob_q(self.coeffs[(n - i) % n], i) for i in range(n)))

    def coeff_frobenius(self, j: int) -> "LinPoly":
        """Apply a -> a^(p^j) to every coefficient; exponents unchanged."""
        c = self.ctx
        return LinPoly(c, tuple(c.frob_p(a, j) for a in self.coeffs))

    def to_matrix(self) -> np.ndarray:
        """n x n matrix over GF(q) (small indices); column j = coords of f(beta_j)."""
        c = self.ctx
        cols = [c.coords[self.evaluate(int(b))] for b in c.beta]
        return np.array(cols, dtype=np.int64).T

    def action_matrix_p(self) -> np.ndarray:
        """d x d GF(p) matrix of v -> f(v) acting on digit vectors."""
        c = self.ctx
        cols = [c.digits[self.evaluate(int(c._pw[i]))] for i in range(c.d)]
        return np.array(cols, dtype=np.int64).T

    def rank_kernel(self) -> tuple[int, int]:
        """(rank, kernel_dim) of the induced GF(q)-linear map; q^kernel_dim roots."""
        c = self.ctx
        rank_p = kernels.rank_mod_p(self.action_matrix_p(), c.p)
        if rank_p % c.e:  # pragma: no cover - kernel is always a GF(q)-space
            raise RuntimeError("GF(p) rank not divisible by e")
        rank = rank_p // c.e
        return rank, c.n - rank

    def inverse(self) -> "LinPoly":
        """Compositional inverse of a permutation q-polynomial."""
        c = self.ctx
        m = self.to_matrix()
        try:
            minv = linalg.inv_gfq(m, c.qtables)
        except linalg.SingularMatrix:
            raise SingularMap("q-polynomial is not a permutation") from None
        return matrix_to_linpoly(c, minv)

    # -- coordinate views --------------------------------------------------------

    def coord_vec(self) -> np.ndarray:
        """(n*n,) GF(q)-coordinates of the coefficient vector (small indices)."""
        return self.ctx.coords[np.array(self.coeffs, dtype=np.int64)].reshape(-1)

    def digit_vec(self) -> np.ndarray:
        """(n*d,) GF(p) digits of the coefficient vector."""
        return self.ctx.digits[np.array(self.coeffs, dtype=np.int64)].reshape(-1)

    def __str__(self):
        return format_linpoly(self)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def zero(ctx: FieldCtx) -> LinPoly:
    return LinPoly(ctx, (0,) * ctx.n)

def monomial(ctx: FieldCtx, a: int, i: int) -> LinPoly:
    """a X^(q^i), exponent taken mod n."""
    coeffs = [0] * ctx.n
    coeffs[i % ctx.n] = ctx.check_elem(a)
    return LinPoly(ctx, tuple(coeffs))

def x_poly(ctx: FieldCtx) -> LinPoly:
    return monomial(ctx, 1, 0)

def from_coeffs(ctx: FieldCtx, coeffs) -> LinPoly:
    return LinPoly(ctx, tuple(ctx.check_elem(a) for a in coeffs))

def from_coord_vec(ctx: FieldCtx, vec) -> LinPoly:
    """Inverse of LinPoly.coord_vec."""
    rows = np.asarray(vec, dtype=np.int64).reshape(ctx.n, ctx.n)
    return LinPoly(ctx, tuple(int(v) for v in ctx.from_coords(rows)))

def from_digit_vec(ctx: FieldCtx, vec) -> LinPoly:
    rows = np.asarray(vec, dtype=np.int64).reshape(ctx.n, ctx.d) % ctx.p
    return LinPoly(ctx, tuple(int(v) for v in rows.dot(ctx._pw)))


@functools.cache
def _matrix_basis_inverse(ctx: FieldCtx) -> np.ndarray:
    """Inverse of the GF(q)-linear map coefficients -> matrix entries.

    Columns run over the basis beta_m X^(q^i) of the q-polynomial space,
    flattened to coordinate vectors on both sides.
    """
    n = ctx.n
    cols = []
    for i in range(n):
        for m in range(n):
            cols.append(monomial(ctx, int(ctx.beta[m]), i).to_matrix().reshape(-1))
    t = np.array(cols, dtype=np.int64).T
    return linalg.inv_gfq(t, ctx.qtables)


def matrix_to_linpoly(ctx: FieldCtx, mat: np.ndarray) -> LinPoly:
    """The unique q-polynomial whose to_matrix equals ``mat`` (small indices)."""
    mat = np.asarray(mat, dtype=np.int64)
    if mat.shape != (ctx.n, ctx.n):
        raise ValueError(f"need an {ctx.n} x {ctx.n} matrix")
    inv = _matrix_basis_inverse(ctx)
    sol = linalg.matmul_gfq(inv, mat.reshape(-1, 1), ctx.qtables)[:, 0]
    coeffs = []
    for i in range(ctx.n):
        block = sol[i * ctx.n:(i + 1) * ctx.n]
        acc = 0
        for m in range(ctx.n):
            acc = ctx.add(acc, ctx.mul(int(ctx.small_to_idx[block[m]]), int(ctx.beta[m])))
        coeffs.append(acc)
    return LinPoly(ctx, tuple(coeffs))


# ---------------------------------------------------------------------------
# text form: `lp <elem>,<elem>,...`
# ---------------------------------------------------------------------------

def format_linpoly(f: LinPoly) -> str:
    return "lp " + ",".join(format_elem(a) for a in f.coeffs)


def parse_linpoly(ctx: FieldCtx, line: str) -> LinPoly:
    parts = line.strip().split(None, 1)
    if not parts or parts[0] != "lp":
        raise ValueError(f"not a linpoly line: {line!r}")
    lits = parts[1].split(",") if len(parts) > 1 else []
    if len(lits) != ctx.n:
        raise ValueError(f"need {ctx.n} coefficients")
    return LinPoly(ctx, tuple(parse_elem(ctx, t) for t in lits))
