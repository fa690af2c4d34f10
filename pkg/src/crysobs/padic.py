"""Matrices over Z/p^N with a single absolute precision and a loss counter.

A :class:`PadicMatrix` stores residues in ``[0, p^N)``.  Its ``loss`` records
how many of the top digits can no longer be trusted, so every entry is only
meaningful modulo ``p^(N - loss)``.  The elimination routines pick pivots of
minimal valuation, which keeps the Schur complement exact at the trusted
precision; only back substitution (kernels) consumes digits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import PrecisionExhausted


def valuation(x: int, p: int, cap: int | None = None) -> int:
    """Return the p-adic valuation of ``x``, or ``cap`` if ``x`` is zero.

    When ``cap`` is given the result never exceeds it.
    """
    if x == 0:
        if cap is None:
            raise ValueError("valuation of zero needs a cap")
        return cap
    v = 0
    while x % p == 0:
        x //= p
        v += 1
        if cap is not None and v >= cap:
            return cap
    return v


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PadicContext:
    """The prime ``p`` and the absolute precision ``N``."""

    p: int
    N: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.N < 1:
            raise ValueError("precision must be at least 1")

    @property
    def modulus(self) -> int:
        return self.p**self.N


@dataclass(frozen=True, eq=False)
class PadicMatrix:
    ctx: PadicContext
    entries: tuple
    loss: int = 0
    nrows: int = field(init=False)
    ncols: int = field(init=False)

    def __post_init__(self):
        rows = tuple(tuple(int(x) % self.ctx.modulus for x in row) for row in self.entries)
        widths = {len(r) for r in rows}
        if len(widths) > 1:
            raise ValueError("ragged matrix")
        if not 0 <= self.loss <= self.ctx.N:
            raise ValueError("loss must lie in [0, N]")
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "nrows", len(rows))
        object.__setattr__(self, "ncols", widths.pop() if widths else 0)

    @classmethod
    def from_rows(cls, ctx: PadicContext, rows: Iterable[Sequence[int]], loss: int = 0, ncols: int | None = None):
        rows = [list(r) for r in rows]
        m = cls(ctx, tuple(tuple(r) for r in rows), loss)
        if not rows and ncols:
            object.__setattr__(m, "ncols", ncols)
        return m

    @classmethod
    def identity(cls, ctx: PadicContext, n: int):
        return cls(ctx, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zero(cls, ctx: PadicContext, nrows: int, ncols: int):
        m = cls(ctx, tuple((0,) * ncols for _ in range(nrows)))
        object.__setattr__(m, "ncols", ncols)
        return m

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def N(self) -> int:
        return self.ctx.N

    @property
    def precision(self) -> int:
        """Number of trusted digits, ``N - loss``."""
        return self.ctx.N - self.loss

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def symmetric(self) -> list[list[int]]:
        """Entries lifted to the symmetric interval modulo the trusted precision."""
        q = self.p**self.precision
        return [[_sym(x % q, q) for x in r] for r in self.entries]

    def column(self, j: int) -> list[int]:
        return [r[j] for r in self.entries]

    def transpose(self) -> PadicMatrix:
        m = PadicMatrix(self.ctx, tuple(zip(*self.entries)), self.loss)
        object.__setattr__(m, "nrows", self.ncols)
        object.__setattr__(m, "ncols", self.nrows)
        return m

    def with_loss(self, loss: int) -> PadicMatrix:
        return PadicMatrix(self.ctx, self.entries, min(max(loss, self.loss), self.N))

    def _combine(self, other: PadicMatrix, op) -> PadicMatrix:
        if self.shape != other.shape or self.ctx != other.ctx:
            raise ValueError("incompatible matrices")
        rows = tuple(tuple(op(a, b) for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries))
        return PadicMatrix(self.ctx, rows, max(self.loss, other.loss))

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def scale(self, c: int) -> PadicMatrix:
        return PadicMatrix(self.ctx, tuple(tuple(c * x for x in r) for r in self.entries), self.loss)

    def __matmul__(self, other: PadicMatrix) -> PadicMatrix:
        if self.ncols != other.nrows or self.ctx != other.ctx:
            raise ValueError("incompatible matrices")
        cols = list(zip(*other.entries)) if other.nrows else [()] * other.ncols
        mod = self.ctx.modulus
        rows = tuple(tuple(sum(a * b for a, b in zip(r, c)) % mod for c in cols) for r in self.entries)
        out = PadicMatrix(self.ctx, rows, max(self.loss, other.loss))
        if not rows:
            object.__setattr__(out, "ncols", other.ncols)
        return out

    def is_zero(self) -> bool:
        """True when every entry vanishes at the trusted precision."""
        q = self.p**self.precision
        return all(x % q == 0 for r in self.entries for x in r)

    def __eq__(self, other):
        if not isinstance(other, PadicMatrix):
            return NotImplemented
        return (self.ctx, self.entries, self.loss, self.shape) == (other.ctx, other.entries, other.loss, other.shape)

    def __hash__(self):
        return hash((self.ctx, self.entries, self.loss))

    def __repr__(self):
        return f"PadicMatrix({self.nrows}x{self.ncols} mod {self.p}^{self.N}, loss={self.loss})"


def _sym(x: int, q: int) -> int:
    return x - q if x > q // 2 else x


@dataclass(frozen=True)
class HowellForm:
    """Row-reduced matrix with the pivots that produced it.

    Pivot ``k`` sits at ``pivot_positions[k] = (k, col)``.  Column indices
    refer to the input matrix; the echelon staircase is with respect to the
    column order ``pivot columns in pivot order, then the free columns``.
    """

    H: PadicMatrix
    pivot_positions: tuple
    pivot_valuations: tuple

    @property
    def pivot_columns(self) -> tuple:
        return tuple(c for _, c in self.pivot_positions)

    @property
    def column_order(self) -> tuple:
        piv = self.pivot_columns
        return piv + tuple(j for j in range(self.H.ncols) if j not in set(piv))


def howell_form(M: PadicMatrix) -> HowellForm:
    """Eliminate with full pivoting on minimal valuation.

    Entries whose valuation reaches the trusted precision count as zero.
    Ties between pivots of equal valuation go to the lowest column index,
    then to the lowest row index.
    """
    trusted = M.precision
    if trusted <= 0:
        raise PrecisionExhausted("matrix has no trusted digits left")
    p, mod = M.p, M.ctx.modulus
    A = [list(r) for r in M.entries]
    nr, nc = M.shape
    used_cols: set[int] = set()
    positions, vals = [], []
    for k in range(min(nr, nc)):
        best = None
        for j in range(nc):
            if j in used_cols:
                continue
            for i in range(k, nr):
                x = A[i][j]
                if x == 0:
                    continue
                v = valuation(x, p, trusted)
                if v < trusted and (best is None or v < best[0]):
                    best = (v, j, i)
                    if v == 0:
                        break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, j, i = best
        A[k], A[i] = A[i], A[k]
        pivot_row = A[k]
        unit_inv = pow(pivot_row[j] // p**v, -1, mod)
        pv = p**v
        for i2 in range(k + 1, nr):
            row = A[i2]
            if row[j] == 0:
                continue
            factor = (row[j] // pv) * unit_inv % mod
            for c in range(nc):
                if pivot_row[c]:
                    row[c] = (row[c] - factor * pivot_row[c]) % mod
        used_cols.add(j)
        positions.append((k, j))
        vals.append(v)
    H = PadicMatrix(M.ctx, tuple(tuple(r) for r in A), M.loss)
    object.__setattr__(H, "ncols", nc)
    return HowellForm(H, tuple(positions), tuple(vals))


def rank_lower_bound(M: PadicMatrix) -> int:
    """Number of pivots that are nonzero at the trusted precision."""
    if M.precision <= 0 or M.nrows == 0 or M.ncols == 0:
        return 0
    return len(howell_form(M).pivot_positions)


def kernel_mod_pN(M: PadicMatrix) -> PadicMatrix:
    """Columns spanning the free part of the right kernel of ``M``.

    Each column has a coordinate equal to 1 (a free variable).  Back
    substitution divides by pivots, so the result loses the largest pivot
    valuation on top of the input loss.
    """
    hf = howell_form(M)
    H = hf.H
    p, mod = M.p, M.ctx.modulus
    nc = M.ncols
    pivots = hf.pivot_positions
    pivot_cols = {c for _, c in pivots}
    free = [j for j in range(nc) if j not in pivot_cols]
    lost = max(hf.pivot_valuations, default=0)
    loss = M.loss + lost
    if loss >= M.N and free:
        raise PrecisionExhausted("kernel computation consumed all digits")
    basis = []
    for f in free:
        x = [0] * nc
        x[f] = 1
        for (k, c), v in reversed(list(zip(pivots, hf.pivot_valuations))):
            row = H.entries[k]
            s = sum(row[j] * x[j] for j in range(nc) if j != c and row[j] and x[j]) % mod
            pv = p**v
            unit = row[c] // pv
            x[c] = -(s // pv) * pow(unit, -1, mod) % mod
        basis.append(x)
    rows = tuple(tuple(b[i] for b in basis) for i in range(nc))
    K = PadicMatrix(M.ctx, rows, min(loss, M.N))
    object.__setattr__(K, "ncols", len(basis))
    return K


def charpoly_mod_pN(M: PadicMatrix) -> list[int]:
    """Coefficients of ``det(tI - M)``, constant term first (Berkowitz).

    No division is performed, so the coefficients are trusted to the same
    precision as ``M``.
    """
    if M.nrows != M.ncols:
        raise ValueError("matrix must be square")
    return [c % M.ctx.modulus for c in berkowitz(M.tolist(), M.ctx.modulus)]


def berkowitz(A: Sequence[Sequence[int]], modulus: int | None = None) -> list[int]:
    """Characteristic polynomial ``det(tI - A)`` over Z or Z/modulus.

    Returns coefficients with the constant term first.
    """
    n = len(A)

    def red(x):
        return x % modulus if modulus else x

    cur = [1]  # highest degree first while building
    for k in range(n):
        a = A[k][k]
        r = [A[k][j] for j in range(k)]
        w = [A[i][k] for i in range(k)]
        v = [1, red(-a)]
        for _ in range(k):
            v.append(red(-sum(x * y for x, y in zip(r, w))))
            w = [red(sum(A[i][j] * w[j] for j in range(k))) for i in range(k)]
        cur = [red(sum(v[i - j] * cur[j] for j in range(max(0, i - len(v) + 1), min(i, k) + 1))) for i in range(k + 2)]
    return cur[::-1]


def poly_eval_matrix(coeffs: Sequence[int], M: PadicMatrix) -> PadicMatrix:
    """Evaluate a polynomial (constant term first) at a square matrix."""
    n = M.nrows
    result = PadicMatrix.zero(M.ctx, n, n).with_loss(M.loss)
    for c in reversed(coeffs):
        result = result @ M
        if c:
            result = result + PadicMatrix.identity(M.ctx, n).scale(c)
    return result
