"""Exact arithmetic in GF(p^d) with a marked subfield tower GF(p) <= GF(q) <= GF(q^n).

Conventions
-----------
* q = p^e and d = e*n.  The big field is a single extension GF(p)[x]/(modulus);
  GF(q) is the marked subfield fixed by the p^e-power map, never a separate
  context, so no tower isomorphisms need tracking.
* An element is a plain int: the index sum(digit_i * p^i) of its digit vector
  over the power basis {1, x, ..., x^(d-1)}.  Index 0 is zero, index 1 is one.
* When no modulus is supplied, the monic degree-d polynomials over GF(p) are
  scanned in increasing order of the integer with base-p digits
  (c_0, c_1, ..., c_(d-1)) and the first irreducible one wins.
* The stored generator is the smallest index of multiplicative order p^d - 1.

All operation tables (exp/log, Frobenius, relative trace/norm, GF(q)
coordinates in the power basis of the generator) are precomputed at
construction, which is why field orders above 2^16 are rejected as beyond
desk scale.  A FieldCtx is immutable after construction and safe to share.
"""

from __future__ import annotations

import functools

import numpy as np

from . import linalg
from .errors import (
    ContextMismatch,
    DegreeMismatch,
    NonDivisorDegree,
    NonPrime,
    ReducibleModulus,
    TooLargeField,
    ZeroInverse,
)

MAX_ORDER = 1 << 16


# ---------------------------------------------------------------------------
# small integer / dense polynomial helpers (construction time only)
# ---------------------------------------------------------------------------

def is_prime(m: int) -> bool:
    if m < 2:
        return False
    i = 2
    while i * i <= m:
        if m % i == 0:
            return False
        i += 1
    return True


def factor(m: int) -> dict[int, int]:
    """Trial-division factorization, adequate at desk scale."""
    out: dict[int, int] = {}
    i = 2
    while i * i <= m:
        while m % i == 0:
            out[i] = out.get(i, 0) + 1
            m //= i
        i += 1
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def _trim(a: list[int]) -> list[int]:
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a or [0]


def _poly_mod(a: list[int], f: list[int], p: int) -> list[int]:
    # f monic; coefficients ascending degree
    a = [v % p for v in a]
    df = len(f) - 1
    for i in range(len(a) - 1, df - 1, -1):
        c = a[i]
        if c:
            a[i] = 0
            for j in range(df):
                a[i - df + j] = (a[i - df + j] - c * f[j]) % p
    return _trim(a[:df] if len(a) > df else a)


def _poly_mulmod(a: list[int], b: list[int], f: list[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_mod(out, f, p)


def _poly_powmod(a: list[int], k: int, f: list[int], p: int) -> list[int]:
    result = [1]
    base = _poly_mod(list(a), f, p)
    while k:
        if k & 1:
            result = _poly_mulmod(result, base, f, p)
        base = _poly_mulmod(base, base, f, p)
        k >>= 1
    return result


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim([v % p for v in a]), _trim([v % p for v in b])
    while b != [0]:
        lc_inv = pow(b[-1], p - 2, p)
        bm = [v * lc_inv % p for v in b]
        # a mod bm
        r = list(a)
        db = len(bm) - 1
        for i in range(len(r) - 1, db - 1, -1):
            c = r[i]
            if c:
                r[i] = 0
                for j in range(db):
                    r[i - db + j] = (r[i - db + j] - c * bm[j]) % p
        a, b = b, _trim(r[:db] if len(r) > db else r)
    return a


def is_irreducible(coeffs: list[int] | tuple[int, ...], p: int) -> bool:
    """Rabin's test for a monic polynomial over GF(p), ascending coefficients."""
    f = [v % p for v in coeffs]
    d = len(f) - 1
    if d < 1 or f[-1] != 1:
        return False
    if d == 1:
        return True
    # iterate x^(p^i) mod f
    frob_iter = [0, 1]
    iterates = {0: [0, 1]}
    for i in range(1, d + 1):
        frob_iter = _poly_powmod(frob_iter, p, f, p)
        iterates[i] = frob_iter
    if iterates[d] != [0, 1]:
        return False
    for r in factor(d):
        g = list(iterates[d // r])
        while len(g) < 2:
            g.append(0)
        g[1] = (g[1] - 1) % p          # x^(p^(d/r)) - x
        if len(_poly_gcd(g, f, p)) > 1:
            return False
    return True


@functools.lru_cache(maxsize=None)
def first_irreducible(p: int, d: int) -> tuple[int, ...]:
    """First irreducible monic degree-d polynomial in the canonical scan order."""
    for c_int in range(p ** d):
        coeffs = []
        m = c_int
        for _ in range(d):
            coeffs.append(m % p)
            m //= p
        coeffs.append(1)
        if is_irreducible(coeffs, p):
            return tuple(coeffs)
    raise ReducibleModulus(f"no irreducible of degree {d} over GF({p})")  # pragma: no cover


# ---------------------------------------------------------------------------
# field context
# ---------------------------------------------------------------------------

class FieldCtx:
    """GF(p^(e*n)) with GF(p^e) marked as the coefficient subfield.

    Do not call directly; use :func:`build_field`, which validates inputs and
    caches contexts so equal parameters share one instance.
    """

    def __init__(self, p: int, e: int, n: int, modulus: tuple[int, ...]):
        self.p = p
        self.e = e
        self.n = n
        self.d = e * n
        self.q = p ** e
        self.order = p ** self.d
        self.modulus = modulus
        self.mult_order = self.order - 1

        self._pw = np.array([p ** i for i in range(self.d)], dtype=np.int64)
        # digit matrix: row a = base-p digits of index a
        idx = np.arange(self.order, dtype=np.int64)
        self.digits = (idx[:, None] // self._pw[None, :]) % p

        self.gen = self._find_generator()
        self._build_exp_log()
        self._build_frobenius()
        self._build_trace_norm()
        self._build_subfield()
        self._build_coords()

    # -- construction helpers ----------------------------------------------

    def _idx_digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.d):
            out.append(a % self.p)
            a //= self.p
        return out

    def _digits_idx(self, dg) -> int:
        out = 0
        for i, c in enumerate(dg):
            out += (c % self.p) * self.p ** i
        return out

    def _raw_mul(self, a: int, b: int) -> int:
        prod = _poly_mulmod(self._idx_digits(a), self._idx_digits(b),
                            list(self.modulus), self.p)
        return self._digits_idx(prod)

    def _raw_pow(self, a: int, k: int) -> int:
        result, base = 1, a
        while k:
            if k & 1:
                result = self._raw_mul(result, base)
            base = self._raw_mul(base, base)
            k >>= 1
        return result

    def _find_generator(self) -> int:
        m = self.mult_order
        if m == 1:
            return 1
        checks = [m // r for r in factor(m)]
        for g in range(2, self.order):
            if all(self._raw_pow(g, c) != 1 for c in checks):
                return g
        raise RuntimeError("no generator found")  # pragma: no cover

    def _mult_matrix(self, c: int) -> np.ndarray:
        """d x d GF(p) matrix of v -> c*v, acting on digit columns."""
        cols = [self._idx_digits(self._raw_mul(c, int(self.p ** i)))
                for i in range(self.d)]
        return np.array(cols, dtype=np.int64).T

    def _build_exp_log(self):
        m = self.mult_order
        block = min(512, m)
        mg = self._mult_matrix(self.gen)
        rows = np.zeros((m, self.d), dtype=np.int64)
        v = np.zeros(self.d, dtype=np.int64)
        v[0] = 1
        for i in range(block):
            rows[i] = v
            v = mg.dot(v) % self.p
        mb = np.eye(self.d, dtype=np.int64)
        for _ in range(block):
            mb = mb.dot(mg) % self.p
        pos = block
        while pos < m:
            take = min(block, m - pos)
            rows[pos:pos + take] = rows[pos - block:pos - block + take].dot(mb.T) % self.p
            pos += take
        exp = rows.dot(self._pw)
        self.exp = np.concatenate([exp, exp]).astype(np.int64)   # doubled: no mod needed for i < 2m
        log = np.full(self.order, -1, dtype=np.int64)
        log[exp] = np.arange(m, dtype=np.int64)
        self.log = log
        if log[self.gen] != 1 and m > 1:  # pragma: no cover
            raise RuntimeError("exp/log table inconsistency")

    def _build_frobenius(self):
        m = self.mult_order
        frob = np.zeros((self.d, self.order), dtype=np.int64)
        nz = np.arange(1, self.order)
        pmod = np.zeros(self.d, dtype=np.int64)
        for j in range(self.d):
            mult = pow(self.p, j, m) if m > 1 else 0
            pmod[j] = mult
            frob[j, nz] = self.exp[(self.log[nz] * mult) % m] if m > 1 else 1
        self.frob = frob
        self.pmod = pmod  # pmod[j] = p^j mod (order-1); Frobenius in log space

    def _build_trace_norm(self):
        acc = np.zeros((self.order, self.d), dtype=np.int64)
        for i in range(self.n):
            acc += self.digits[self.frob[(self.e * i) % self.d]]
        self.trace_q = (acc % self.p).dot(self._pw).astype(np.int64)
        m = self.mult_order
        norm = np.zeros(self.order, dtype=np.int64)
        if m > 1:
            t = m // (self.q - 1)
            nz = np.arange(1, self.order)
            norm[nz] = self.exp[(self.log[nz] * t) % m]
        else:
            norm[1:] = 1
        self.norm_q = norm

    def _build_subfield(self):
        q, m = self.q, self.mult_order
        small_to_idx = np.zeros(q, dtype=np.int64)
        if q - 1 == m:
            gq = self.gen
        else:
            gq = int(self.exp[m // (q - 1)]) if m > 1 else 1
        # GF(p)-power basis {1, gq, gq^2, ...} of the subfield; a prime-field
        # constant c < p has element index c itself.
        for c in range(1, q):
            dg, acc, t = c, 0, 0
            while dg:
                cd = dg % self.p
                if cd:
                    acc = self.add(acc, self.mul(self.idx_pow(gq, t), cd))
                dg //= self.p
                t += 1
            small_to_idx[c] = acc
        self.subfield_gen = gq
        self.small_to_idx = small_to_idx
        idx_to_small = np.full(self.order, -1, dtype=np.int64)
        idx_to_small[small_to_idx] = np.arange(q)
        self.idx_to_small = idx_to_small
        grid = small_to_idx[np.arange(q)]
        self.q_add = idx_to_small[self._vec_add(grid[:, None], grid[None, :])].astype(np.int64)
        self.q_mul = idx_to_small[self._vec_mul(grid[:, None], grid[None, :])].astype(np.int64)
        self.q_neg = idx_to_small[self._vec_neg(grid)].astype(np.int64)
        q_inv = np.zeros(q, dtype=np.int64)
        for c in range(1, q):
            q_inv[c] = idx_to_small[self.inv(int(small_to_idx[c]))]
        self.q_inv = q_inv
        if np.any(self.q_add < 0) or np.any(self.q_mul < 0):  # pragma: no cover
            raise RuntimeError("marked subfield not closed")

    def _build_coords(self):
        # beta_j = gen^j is a GF(q)-basis of the field; columns of bp are the
        # GF(p) digit vectors of gq^t * beta_j, giving the change of basis
        # between GF(q)-coordinate digits and plain digits.
        n, e, d = self.n, self.e, self.d
        self.beta = np.array([self.idx_pow(self.gen, j) for j in range(n)], dtype=np.int64)
        cols = np.zeros((d, d), dtype=np.int64)
        for j in range(n):
            for t in range(e):
                v = self.mul(int(self.beta[j]), self.idx_pow(self.subfield_gen, t))
                cols[:, j * e + t] = self.digits[v]
        bp_inv = linalg.inv_mod_p(cols, self.p)
        cdigits = self.digits.dot(bp_inv.T) % self.p
        pw_e = np.array([self.p ** t for t in range(e)], dtype=np.int64)
        self.coords = cdigits.reshape(self.order, n, e).dot(pw_e).astype(np.int64)
        # contribution table for the inverse map: contrib[c, j] = small(c) * beta_j
        grid = self.small_to_idx[:, None].repeat(n, axis=1)
        self.coord_contrib = self._vec_mul(grid, self.beta[None, :].repeat(self.q, axis=0))

    # -- vectorized digit arithmetic (table construction + kernels) ---------

    def _vec_add(self, a, b):
        dg = (self.digits[a] + self.digits[b]) % self.p
        return dg.dot(self._pw)

    def _vec_neg(self, a):
        dg = (-self.digits[a]) % self.p
        return dg.dot(self._pw)

    def _vec_mul(self, a, b):
        a = np.asarray(a)
        b = np.asarray(b)
        m = self.mult_order
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        nz = (a != 0) & (b != 0)
        av, bv = np.broadcast_arrays(a, b)
        out[nz] = self.exp[self.log[av[nz]] + self.log[bv[nz]]] if m > 1 else 1
        return out

    # -- scalar element operations -------------------------------------------

    def check_elem(self, a: int) -> int:
        a = int(a)
        if not 0 <= a < self.order:
            raise ContextMismatch(f"element index {a} outside field of order {self.order}")
        return a

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        return int(self._vec_add(np.int64(a), np.int64(b)))

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        return int(self._vec_neg(np.int64(a)))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroInverse("0 has no multiplicative inverse")
        return int(self.exp[self.mult_order - self.log[a]]) if self.mult_order > 1 else 1

    def idx_pow(self, a: int, k: int) -> int:
        """a**k with k any integer (negative k requires a != 0)."""
        if a == 0:
            if k == 0:
                return 1
            if k < 0:
                raise ZeroInverse("0 to a negative power")
            return 0
        m = self.mult_order
        if m == 1:
            return 1
        return int(self.exp[(self.log[a] * k) % m])

    def frob_p(self, a: int, j: int) -> int:
        """a^(p^j); j taken mod d."""
        return int(self.frob[j % self.d, a])

    def frob_q(self, a: int, i: int) -> int:
        """a^(q^i); i taken mod n."""
        return int(self.frob[(self.e * i) % self.d, a])

    def rel_trace(self, a: int) -> int:
        """Trace from GF(q^n) onto the marked subfield GF(q)."""
        return int(self.trace_q[a])

    def rel_norm(self, a: int) -> int:
        """Norm a^((q^n-1)/(q-1)) onto GF(q), with 0 -> 0."""
        return int(self.norm_q[a])

    def in_subfield(self, a: int, sub_e: int) -> bool:
        """True iff a lies in GF(p^sub_e); sub_e must divide d."""
        if sub_e <= 0 or self.d % sub_e != 0:
            raise NonDivisorDegree(f"{sub_e} does not divide {self.d}")
        return int(self.frob[sub_e % self.d, a]) == a

    def minus_one_power(self, k: int) -> int:
        """(-1)^k evaluated in GF(p)."""
        return 1 if (self.p == 2 or k % 2 == 0) else self.p - 1

    @property
    def qtables(self) -> linalg.FieldTables:
        """Lookup-table bundle for GF(q) linear algebra on small indices."""
        return linalg.FieldTables(self.q_add, self.q_mul, self.q_inv, self.q_neg)

    # -- conversions ---------------------------------------------------------

    def from_coords(self, c) -> int | np.ndarray:
        """Element(s) from GF(q)-coordinate rows over the basis beta."""
        c = np.asarray(c, dtype=np.int64)
        single = c.ndim == 1
        rows = c.reshape(-1, self.n)
        acc = np.zeros((rows.shape[0], self.d), dtype=np.int64)
        for j in range(self.n):
            acc += self.digits[self.coord_contrib[rows[:, j], j]]
        out = (acc % self.p).dot(self._pw)
        return int(out[0]) if single else out

    def elem_digit_rows(self, idxs) -> np.ndarray:
        """GF(p) digit rows for an array of element indices."""
        return self.digits[np.asarray(idxs, dtype=np.int64)]

    # -- misc ------------------------------------------------------------------

    def elements(self) -> range:
        return range(self.order)

    def nonzero_elements(self) -> range:
        return range(1, self.order)

    def subfield_elements(self) -> np.ndarray:
        return self.small_to_idx.copy()

    def __repr__(self):
        return f"FieldCtx(p={self.p}, e={self.e}, n={self.n}, mod={list(self.modulus)})"

    # context identity is object identity; build_field caches instances
    __hash__ = object.__hash__


@functools.lru_cache(maxsize=None)
def _build_field_cached(p: int, e: int, n: int, modulus: tuple[int, ...]) -> FieldCtx:
    return FieldCtx(p, e, n, modulus)


def build_field(p: int, e: int, n: int, modulus=None) -> FieldCtx:
    """Construct (or fetch the cached) GF(p^(e*n)) with GF(p^e) marked.

    Raises NonPrime, DegreeMismatch, ReducibleModulus, or TooLargeField.
    """
    if not is_prime(p):
        raise NonPrime(f"p={p} is not prime")
    if e < 1 or n < 1:
        raise DegreeMismatch("e and n must be positive")
    d = e * n
    if d > 32 or p ** d > MAX_ORDER:
        raise TooLargeField(f"GF({p}^{d}) is beyond desk scale")
    if modulus is None:
        modulus = first_irreducible(p, d)
    else:
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != d + 1 or modulus[-1] != 1:
            raise DegreeMismatch(f"modulus must be monic of degree {d}")
        if not is_irreducible(list(modulus), p):
            raise ReducibleModulus(f"modulus {list(modulus)} is reducible over GF({p})")
    return _build_field_cached(p, e, n, modulus)


# ---------------------------------------------------------------------------
# text forms
# ---------------------------------------------------------------------------

def format_elem(a: int) -> str:
    return f"idx:{int(a)}"


def parse_elem(ctx: FieldCtx, text: str) -> int:
    """Parse an element literal, `idx:<int>` or `gen^<int>`."""
    text = text.strip()
    if text.startswith("idx:"):
        return ctx.check_elem(int(text[4:]))
    if text.startswith("gen^"):
        return ctx.idx_pow(ctx.gen, int(text[4:]))
    raise ValueError(f"bad element literal {text!r}")


def format_field_line(ctx: FieldCtx) -> str:
    mod = ",".join(str(c) for c in ctx.modulus)
    return f"field p={ctx.p} e={ctx.e} n={ctx.n} mod={mod}"


def parse_field_line(line: str) -> FieldCtx:
    """Parse `field p=<int> e=<int> n=<int> mod=<c0,c1,...,cd>` (mod optional)."""
    parts = line.strip().split()
    if not parts or parts[0] != "field":
        raise ValueError(f"not a field line: {line!r}")
    kv = {}
    for tok in parts[1:]:
        key, _, val = tok.partition("=")
        kv[key] = val
    p = int(kv["p"])
    e = int(kv["e"])
    n = int(kv["n"])
    modulus = None
    if "mod" in kv:
        modulus = tuple(int(c) for c in kv["mod"].split(","))
    return build_field(p, e, n, modulus)
