"""Dense linear algebra modulo p^W on numpy limb arrays.

A residue modulo ``p^W`` is stored as ``L`` limbs in base ``B = p^h``, so an
array of residues of shape ``S`` becomes an int64 array of shape ``(L, *S)``.
Products of limb matrices are done in float64 BLAS, which is exact because
``h`` is chosen so that ``inner * B^2 < 2^53``.  Everything stays in machine
integers; big Python integers only appear at conversion time.
"""

from __future__ import annotations

import numpy as np

_EXACT = 2**53


class LimbRing:
    """Arithmetic in Z/p^W for matrices with inner dimension up to ``inner``."""

    def __init__(self, p: int, W: int, inner: int = 1):
        h = 1
        while max(inner, 1) * (p ** (h + 1)) ** 2 < _EXACT:
            h += 1
        if max(inner, 1) * p**2 >= _EXACT:
            raise ValueError("prime too large for limb arithmetic")
        self.p = p
        self.h = h
        self.L = -(-W // h)
        self.W = self.h * self.L
        self.B = p**h
        self.modulus = p**self.W

    # conversions -----------------------------------------------------------

    def to_limbs(self, arr) -> np.ndarray:
        a = np.asarray(arr, dtype=object) % self.modulus
        out = np.empty((self.L,) + a.shape, dtype=np.int64)
        for k in range(self.L):
            out[k] = (a % self.B).astype(np.int64)
            a = a // self.B
        return out

    def from_limbs(self, X: np.ndarray) -> np.ndarray:
        X = self.normalize(X.copy())
        acc = X[-1].astype(object)
        for k in range(self.L - 2, -1, -1):
            acc = acc * self.B + X[k].astype(object)
        return acc

    def scalar_limbs(self, c: int) -> list[int]:
        c %= self.modulus
        out = []
        for _ in range(self.L):
            c, r = divmod(c, self.B)
            out.append(r)
        return out

    def zeros(self, shape) -> np.ndarray:
        return np.zeros((self.L,) + tuple(shape), dtype=np.int64)

    # arithmetic ------------------------------------------------------------

    def normalize(self, X: np.ndarray) -> np.ndarray:
        """Propagate carries in place so each limb lies in [0, B)."""
        B = self.B
        for k in range(self.L - 1):
            carry = X[k] // B
            X[k] -= carry * B
            X[k + 1] += carry
        X[-1] %= B
        return X

    def matmul(self, A: np.ndarray, X: np.ndarray, A_float: np.ndarray | None = None) -> np.ndarray:
        """Limbs of ``A @ X`` for normalized limb arrays ``A`` and ``X``."""
        L = self.L
        Af = A.astype(np.float64) if A_float is None else A_float
        Xf = X.astype(np.float64)
        shape = A.shape[1:-1] + X.shape[2:]
        out = np.zeros((L,) + shape, dtype=np.int64)
        for t in range(L):
            for a in range(t + 1):
                out[t] += (Af[a] @ Xf[t - a]).astype(np.int64)
            if t < L - 1:
                carry = out[t] // self.B
                out[t] -= carry * self.B
                out[t + 1] += carry
        out[-1] %= self.B
        return out

    def mul_scalar(self, X: np.ndarray, c: int) -> np.ndarray:
        cl = self.scalar_limbs(c)
        out = np.zeros_like(X)
        for t in range(self.L):
            for a in range(t + 1):
                if cl[a]:
                    out[t] += cl[a] * X[t - a]
            if t < self.L - 1:
                carry = out[t] // self.B
                out[t] -= carry * self.B
                out[t + 1] += carry
        out[-1] %= self.B
        return out

    def inverse(self, A) -> np.ndarray:
        """Limbs of the inverse of a square integer matrix invertible mod p.

        The inverse mod p is lifted by Newton iteration ``X <- X(2 - AX)``.
        """
        A_obj = np.asarray(A, dtype=object) % self.modulus
        n = A_obj.shape[0]
        X0 = _inverse_mod_prime(np.asarray(A_obj % self.p, dtype=np.int64), self.p)
        A_l = self.to_limbs(A_obj)
        Af = A_l.astype(np.float64)
        X = self.to_limbs(X0)
        eye = self.to_limbs(np.eye(n, dtype=np.int64).astype(object) * 2)
        prec = 1
        while prec < self.W:
            AX = self.matmul(A_l, X, Af)
            T = self.normalize(eye - AX)
            X = self.matmul(X, T)
            prec *= 2
        return X


def _inverse_mod_prime(A: np.ndarray, p: int) -> np.ndarray:
    n = A.shape[0]
    M = np.concatenate([A % p, np.eye(n, dtype=np.int64)], axis=1)
    for k in range(n):
        nz = np.nonzero(M[k:, k])[0]
        if len(nz) == 0:
            raise ZeroDivisionError("matrix is singular modulo p")
        piv = k + nz[0]
        if piv != k:
            M[[k, piv]] = M[[piv, k]]
        M[k] = M[k] * pow(int(M[k, k]), -1, p) % p
        col = M[:, k].copy()
        col[k] = 0
        M -= np.outer(col, M[k]) % p
        M %= p
    return M[:, n:]


def row_reduce_mod_prime(A: np.ndarray, p: int) -> list[int]:
    """Pivot columns of the row echelon form of ``A`` over F_p, left to right."""
    M = np.array(A, dtype=np.int64) % p
    nr, nc = M.shape
    pivots = []
    r = 0
    for c in range(nc):
        if r == nr:
            break
        nz = np.nonzero(M[r:, c])[0]
        if len(nz) == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            M[[r, piv]] = M[[piv, r]]
        M[r] = M[r] * pow(int(M[r, c]), -1, p) % p
        below = M[r + 1 :, c].copy()
        nzb = np.nonzero(below)[0]
        if len(nzb):
            M[r + 1 + nzb] = (M[r + 1 + nzb] - np.outer(below[nzb], M[r])) % p
        pivots.append(c)
        r += 1
    return pivots
