"""Monomial bases of primitive cohomology and pole order reduction.

For a smooth hypersurface ``f = 0`` of degree ``d`` in ``P^{n+1}`` the
primitive middle cohomology has a basis of forms ``x^b Omega / f^l`` where
``x^b`` runs over monomials of degree ``l*d - n - 2`` that are standard for
the Jacobian ideal modulo ``p``.  Lower pole order means deeper in the
Hodge filtration, so ordering by degree gives a filtration adapted basis.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import upoly
from .errors import BadInput, SingularReduction
from .limbs import LimbRing, row_reduce_mod_prime
from .padic import PadicContext, PadicMatrix, is_prime, valuation
from .polyring import GradedPoly, hilbert_coefficient, macaulay_matrix, monomial_index, monomials

HYPERSURFACE = "hypersurface"
PLANE_CURVE = "jacobian-plane-curve"
HYPERELLIPTIC = "jacobian-hyperelliptic"


@dataclass(frozen=True)
class HypersurfaceInput:
    """Input variety.

    In hyperelliptic mode ``f`` is the coefficient list (constant first) of
    the right hand side of ``y^2 = f(x)``; otherwise a homogeneous form.
    """

    f: object
    mode: str = HYPERSURFACE
    variables: tuple = ()

    def __post_init__(self):
        if self.mode not in (HYPERSURFACE, PLANE_CURVE, HYPERELLIPTIC):
            raise BadInput(f"unknown mode {self.mode!r}")
        if self.mode == HYPERELLIPTIC:
            coeffs = upoly.trim([int(c) for c in self.f])
            if len(coeffs) < 4:
                raise BadInput("hyperelliptic polynomial must have degree at least 3")
            object.__setattr__(self, "f", tuple(coeffs))
        else:
            if not isinstance(self.f, GradedPoly):
                raise BadInput("expected a homogeneous polynomial")
            if self.mode == PLANE_CURVE and self.f.nvars != 3:
                raise BadInput("plane curves need three variables")
            if self.f.degree < 2:
                raise BadInput("degree must be at least 2")
        if not self.variables:
            nv = 1 if self.mode == HYPERELLIPTIC else self.f.nvars
            object.__setattr__(self, "variables", tuple(f"x{i}" for i in range(nv)))

    @property
    def n(self) -> int:
        return 1 if self.mode == HYPERELLIPTIC else self.f.nvars - 2

    @property
    def d(self) -> int:
        return len(self.f) - 1 if self.mode == HYPERELLIPTIC else self.f.degree

    @property
    def genus(self) -> int:
        if self.mode == HYPERELLIPTIC:
            return (self.d - 1) // 2
        if self.mode == PLANE_CURVE:
            return (self.d - 1) * (self.d - 2) // 2
        raise ValueError("genus is only defined for curves")

    @property
    def twist(self) -> int:
        """Weight ``r`` of the Tate classes studied: ``H^{2r}``."""
        if self.mode == HYPERSURFACE:
            if self.n % 2:
                raise BadInput("hypersurface mode needs even dimension")
            return self.n // 2
        return 1


class PrimeCheck(str, enum.Enum):
    OK = "ok"
    BAD_CHARACTERISTIC = "BadCharacteristic"
    DIVIDES_DEGREE = "DividesDegree"
    SINGULAR_REDUCTION = "SingularReduction"


def good_prime_check(inp: HypersurfaceInput, p: int, char_bound: int = 3) -> PrimeCheck:
    if not is_prime(p):
        raise BadInput(f"{p} is not prime")
    if p <= max(2 * inp.twist + 6, inp.n + 1, char_bound):
        return PrimeCheck.BAD_CHARACTERISTIC
    return reduction_check(inp, p)


def reduction_check(inp: HypersurfaceInput, p: int) -> PrimeCheck:
    """Degree and smoothness conditions on the reduction modulo ``p``."""
    if inp.mode == HYPERELLIPTIC:
        fx = list(inp.f)
        if p == 2 or fx[-1] % p == 0:
            return PrimeCheck.SINGULAR_REDUCTION
        if upoly.degree(upoly.gcd_mod_p(fx, upoly.derivative(fx), p)) > 0:
            return PrimeCheck.SINGULAR_REDUCTION
        return PrimeCheck.OK
    if inp.d % p == 0:
        return PrimeCheck.DIVIDES_DEGREE
    top = (inp.n + 2) * (inp.d - 2) + 1
    M = macaulay_matrix(inp.f.gradient(), top, p)
    if len(row_reduce_mod_prime(M.astype(np.int64), p)) < M.shape[0]:
        return PrimeCheck.SINGULAR_REDUCTION
    return PrimeCheck.OK


def standard_monomials(grad: Sequence[GradedPoly], D: int, p: int) -> tuple:
    """Monomials of degree ``D`` that are not leading terms of ``J mod p``.

    The generators ``x^a * df/dx_i`` are row reduced over F_p with columns in
    decreasing grevlex order; pivot columns are leading monomials.
    Returned in increasing grevlex order.
    """
    nvars = grad[0].nvars
    mons = monomials(nvars, D)
    if D < grad[0].degree:
        return mons
    M = macaulay_matrix(grad, D, p)  # rows: decreasing monomials
    pivots = set(row_reduce_mod_prime(M.T.astype(np.int64), p))
    size = len(mons)
    return tuple(m for i, m in enumerate(mons) if size - 1 - i not in pivots)


@dataclass(frozen=True)
class GriffithsBasis:
    monomials: tuple
    pole_orders: tuple
    filtration_cuts: tuple
    polarization_slot: bool
    n: int
    d: int
    variables: tuple = ()

    @property
    def size(self) -> int:
        return len(self.monomials)

    @property
    def dimension(self) -> int:
        """Size of the full middle cohomology (polarization included)."""
        return self.size + int(self.polarization_slot)

    @property
    def weights(self) -> tuple:
        """Hodge weight ``n + 1 - l`` of each primitive basis element."""
        return tuple(self.n + 1 - l for l in self.pole_orders)

    def blocks(self) -> dict:
        out: dict = {}
        for l in self.pole_orders:
            out[l] = out.get(l, 0) + 1
        return out

    def manifest(self) -> dict:
        return {
            "variable_order": list(self.variables),
            "monomials": [list(m) for m in self.monomials],
            "pole_orders": list(self.pole_orders),
            "filtration_cuts": list(self.filtration_cuts),
            "polarization_slot": self.polarization_slot,
        }

    def manifest_json(self) -> str:
        return json.dumps(self.manifest(), sort_keys=True)


def griffiths_basis(inp: HypersurfaceInput, p: int, N: int | None = None) -> GriffithsBasis:
    """Filtration adapted monomial basis of primitive middle cohomology.

    ``filtration_cuts[j]`` is the number of leading basis elements spanning
    ``F^j``; the list is indexed by ``j = 0 .. n``.
    """
    if inp.mode == HYPERELLIPTIC:
        raise BadInput("hyperelliptic curves use the basis x^i dx/y")
    check = reduction_check(inp, p)
    if check is PrimeCheck.SINGULAR_REDUCTION:
        raise SingularReduction(f"reduction modulo {p} is singular")
    if check is PrimeCheck.DIVIDES_DEGREE:
        raise BadInput(f"{p} divides the degree")
    n, d = inp.n, inp.d
    grad = inp.f.gradient()
    mons, poles = [], []
    for l in range(1, n + 2):
        D = l * d - n - 2
        if D < 0:
            continue
        std = standard_monomials(grad, D, p)
        expected = hilbert_coefficient(n + 2, d, D)
        if len(std) != expected:
            raise SingularReduction(f"degree {D}: {len(std)} standard monomials, expected {expected}")
        mons.extend(std)
        poles.extend([l] * len(std))
    cuts = tuple(sum(1 for l in poles if l <= n + 1 - j) for j in range(n + 1))
    return GriffithsBasis(tuple(mons), tuple(poles), cuts, n % 2 == 0, n, d, tuple(inp.variables))


class GriffithsDworkReducer:
    """Pole order reduction modulo ``p^W`` for a fixed smooth form ``f``.

    For each degree ``D`` a square matrix ``[M_C | E_std]`` is inverted, where
    ``M_C`` is a set of columns of the Macaulay matrix independent modulo
    ``p`` and ``E_std`` selects the standard monomials.  Applying the inverse
    writes ``A = sum g_i df/dx_i + r`` with ``r`` standard.
    """

    def __init__(self, f: GradedPoly, p: int, W: int, max_degree: int | None = None, ring: LimbRing | None = None):
        self.f = f
        self.p = p
        self.grad = f.gradient()
        self.nvars = f.nvars
        self.n = f.nvars - 2
        self.d = f.degree
        top = max_degree if max_degree is not None else (self.n + 2) * self.d - self.n - 2
        self.ring = ring or LimbRing(p, W, max(len(monomials(self.nvars, top)), 1))
        self._cache: dict = {}
        self._lift: dict = {}

    @property
    def W(self) -> int:
        return self.ring.W

    def standard(self, D: int) -> tuple:
        return self.decomposition(D)[0]

    def decomposition(self, D: int):
        """Return ``(std, to_remainder, to_next)`` for degree ``D``.

        ``to_remainder`` maps a numerator to its standard part and
        ``to_next`` maps it to ``sum_i d(g_i)/dx_i`` in degree ``D - d``; both
        are limb matrices acting on vectors in increasing grevlex order.
        """
        if D in self._cache:
            return self._cache[D]
        ring = self.ring
        mons = monomials(self.nvars, D)
        size = len(mons)
        std = standard_monomials(self.grad, D, self.p) if D >= 0 else ()
        M = macaulay_matrix(self.grad, D, None)[::-1, :]  # rows increasing
        src_cols = []
        for i, g in enumerate(self.grad):
            for src in reversed(monomials(self.nvars, D - g.degree)):
                src_cols.append((i, src))
        C = row_reduce_mod_prime(np.asarray(M % self.p, dtype=np.int64), self.p) if M.shape[1] else []
        if len(C) + len(std) != size:
            raise SingularReduction(f"degree {D}: Jacobian ideal has the wrong rank modulo p")
        idx = monomial_index(self.nvars, D)
        S = np.zeros((size, size), dtype=object)
        if C:
            S[:, : len(C)] = M[:, C]
        for k, m in enumerate(std):
            S[idx[m], len(C) + k] = 1
        Sinv = ring.inverse(S) if size else ring.zeros((0, 0))
        to_rem = Sinv[:, len(C) :, :]
        self._lift[D] = (C, src_cols, Sinv[:, : len(C), :])
        Dn = D - self.d
        if Dn >= 0 and C:
            nidx = monomial_index(self.nvars, Dn)
            T = np.zeros((len(nidx), len(C)), dtype=np.int64)
            for k, c in enumerate(C):
                i, src = src_cols[c]
                if src[i]:
                    e = list(src)
                    e[i] -= 1
                    T[nidx[tuple(e)], k] += src[i]
            to_next = ring.matmul(ring.to_limbs(T), Sinv[:, : len(C), :])
        else:
            to_next = ring.zeros((max(len(monomials(self.nvars, Dn)), 0), size))
        out = (std, to_rem, to_next)
        self._cache[D] = out
        return out

    def lift_matrix(self, D: int) -> np.ndarray:
        """Limb matrix sending ``A`` in degree ``D`` to ``(g_i)`` with ``A = sum g_i df/dx_i + r``.

        Rows are the pairs ``(i, monomial of degree D - d + 1)`` with ``i``
        varying slowest and monomials in increasing grevlex order.
        """
        self.decomposition(D)
        C, src_cols, coef = self._lift[D]
        mons = monomials(self.nvars, D - self.d + 1)
        idx = monomial_index(self.nvars, D - self.d + 1)
        out = self.ring.zeros((len(self.grad) * len(mons), coef.shape[2]))
        for k, c in enumerate(C):
            i, src = src_cols[c]
            out[:, i * len(mons) + idx[src], :] = coef[:, k, :]
        return out

    def reduce(self, vectors, pole: int, scale: int = 0):
        """Reduce numerators of pole order ``pole`` down to the basis.

        ``vectors`` is a limb array of shape ``(L, |P_D|, k)`` holding ``k``
        numerators of degree ``D = pole*d - n - 2`` whose true values carry
        a factor ``p^(-scale)``.  Returns ``{pole order: (limbs, scale)}`` with
        the standard coordinates contributed at each pole order.
        """
        ring = self.ring
        out = {}
        X = vectors
        for m in range(pole, 0, -1):
            D = m * self.d - self.n - 2
            std, to_rem, to_next = self.decomposition(D)
            if std:
                out[m] = (ring.matmul(to_rem, X), scale)
            if m == 1:
                break
            X = ring.matmul(to_next, X)
            v = valuation(m - 1, self.p)
            X = ring.mul_scalar(X, pow((m - 1) // self.p**v, -1, ring.modulus))
            scale += v
        return out


@dataclass(frozen=True)
class ReducedClass:
    """Coordinates of a cohomology class, true value ``coords * p^(-shift)``."""

    coords: PadicMatrix
    shift: int


def griffiths_dwork_reduce(numerator: GradedPoly, pole_order: int, basis: GriffithsBasis, ctx: PadicContext, f: GradedPoly) -> ReducedClass:
    """Express ``numerator / f^pole_order * Omega`` in the Griffiths basis.

    Divisions by ``m - 1`` that are divisible by ``p`` are postponed and
    returned as ``shift``; the coordinates are exact modulo ``p^N`` before
    that division.
    """
    n, d = basis.n, basis.d
    D = pole_order * d - n - 2
    if numerator.degree != D:
        raise BadInput(f"numerator must have degree {D}")
    extra = sum(valuation(m - 1, ctx.p) for m in range(2, pole_order + 1))
    W = ctx.N + extra
    red = GriffithsDworkReducer(f, ctx.p, W, max(D, (n + 2) * d - n - 2))
    ring = red.ring
    vec = np.array(numerator.to_vector(), dtype=object).reshape(-1, 1)
    parts = red.reduce(ring.to_limbs(vec), pole_order)
    final = max((s for _, s in parts.values()), default=0)
    position = {(l, m): k for k, (l, m) in enumerate(zip(basis.pole_orders, basis.monomials))}
    coords = [0] * basis.size
    for l, (limbs, s) in parts.items():
        vals = ring.from_limbs(limbs)[:, 0]
        for m, c in zip(red.standard(l * d - n - 2), vals):
            coords[position[(l, m)]] = int(c) * ctx.p ** (final - s)
    shift = final
    while shift and all(c % ctx.p == 0 for c in coords):
        coords = [c // ctx.p for c in coords]
        shift -= 1
    out_ctx = PadicContext(ctx.p, ctx.N + shift)
    return ReducedClass(PadicMatrix.from_rows(out_ctx, [[c] for c in coords]), shift)
