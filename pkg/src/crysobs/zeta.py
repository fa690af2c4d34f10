"""Exact characteristic polynomials from p-adic approximations.

Conventions: ``F`` acts on a space of dimension ``m`` with eigenvalues of
absolute value ``q^r`` (or ``q^(1/2)`` for the first cohomology of a
curve).  ``e_i`` are the elementary symmetric functions of the eigenvalues,
so ``det(t - F) = sum (-1)^i e_i t^(m-i)`` and ``det(1 - tF) = sum (-1)^i e_i t^i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import upoly
from .errors import InconsistentLift


def _ceil_log(x: int, p: int) -> int:
    """Smallest ``k`` with ``p^k >= x``."""
    k, acc = 0, 1
    while acc < x:
        acc *= p
        k += 1
    return k


def min_precision(m: int, q: int, r: int, requested: int = 1, curve: bool = False) -> int:
    """Digits needed to pin down every coefficient from its residue.

    Surface mode bounds ``|e_i|`` by ``binom(m, ceil(m/2)) q^(r ceil(m/2))``;
    curve mode (``m = 2g``) uses ``binom(2g, g) q^(g/2)``.  A coefficient is
    determined once ``p^N`` exceeds twice the bound.
    """
    if m < 1:
        raise ValueError("m must be positive")
    if curve:
        g = m // 2
        # p^N > 2 binom(2g, g) q^(g/2)  <=>  p^(2N) > 4 binom^2 q^g
        target = 4 * math.comb(2 * g, g) ** 2 * q**g
        k = 0
        while q ** (2 * k) <= target:
            k += 1
        return max(requested, k)
    h = (m + 1) // 2
    bound = 2 * math.comb(m, h) * q ** (r * h)
    return max(requested, _ceil_log(bound + 1, q))


def coefficient_bounds(m: int, q: int, r: int, curve: bool = False) -> list[Fraction | int]:
    """Upper bounds on ``|e_i|``; in curve mode the squares of the bounds are returned."""
    if curve:
        return [math.comb(m, i) ** 2 * q**i for i in range(m + 1)]
    return [math.comb(m, i) * q ** (r * i) for i in range(m + 1)]


def hodge_precisions(N: int, weights: Sequence[int]) -> list[int]:
    """Digits to which each ``e_i`` is known when ``F`` is known to ``N`` digits.

    If column ``c`` of the true matrix is divisible by ``p^(w_c)``, an error
    of ``p^N`` in one column of an ``i x i`` principal minor is multiplied by
    the other ``i - 1`` columns, so ``e_i`` is known to ``N`` plus the sum of
    the ``i - 1`` smallest weights.
    """
    w = sorted(weights)
    out = [N]
    for i in range(1, len(w) + 1):
        out.append(N + sum(w[: i - 1]))
    return out


def charpoly_with_precisions(entries: Sequence[Sequence[int]], p: int, N: int, weights: Sequence[int]) -> tuple[list[int], list[int]]:
    """``det(t - F)`` together with the precision of each ``e_i``.

    Entries are taken modulo ``p^N``; column ``c`` must be divisible by
    ``p^(weights[c])``.  The characteristic polynomial is computed modulo the
    largest precision from :func:`hodge_precisions`, so the extra digits
    contributed by the column divisibility are actually present.
    """
    from .padic import berkowitz

    prec = hodge_precisions(N, weights)
    mod = p**N
    rows = [[x % mod for x in row] for row in entries]
    for c, w in enumerate(weights):
        if any(row[c] % p ** min(w, N) for row in rows):
            raise InconsistentLift(f"column {c} is not divisible by p^{w}")
    return berkowitz(rows, p ** max(prec)), prec


def frobenius_precision_needed(weights: Sequence[int], q: int, r: int, requested: int = 1, curve: bool = False) -> int:
    """Smallest Frobenius precision for which the Weil lift is determined.

    Uses :func:`hodge_precisions` and lets each pair ``(e_i, e_{m-i})`` be
    recovered from whichever member is known better.
    """
    m = len(weights)
    bounds = coefficient_bounds(m, q, r, curve)
    N = max(requested, 1)
    while True:
        prec = hodge_precisions(N, weights)
        if all(_pair_ok(i, m, prec, bounds, q, r, curve) for i in range(m // 2 + 1)):
            return N
        N += 1


def _known(i, prec, bounds, q, curve):
    # 2 |e_i| < q^prec
    if curve:
        return 4 * bounds[i] < q ** (2 * prec[i])
    return 2 * bounds[i] < q ** prec[i]


def _pair_ok(i, m, prec, bounds, q, r, curve):
    j = m - i
    if _known(i, prec, bounds, q, curve):
        return True
    # e_i = +- e_j / q^(r(m - 2i)): precision of e_i from e_j
    shift = (m - 2 * i) // 2 if curve else r * (m - 2 * i)
    alt = list(prec)
    alt[i] = prec[j] - shift
    return _known(i, alt, bounds, q, curve)


@dataclass(frozen=True)
class WeilPolynomial:
    """``P(t) = det(1 - tF)`` with exact integer coefficients."""

    coefficients: tuple
    q: int
    r: int
    curve: bool = False

    @property
    def m(self) -> int:
        return len(self.coefficients) - 1

    @property
    def elementary(self) -> list[int]:
        return [(-1) ** i * c for i, c in enumerate(self.coefficients)]

    def charpoly(self) -> list[int]:
        """``det(t - F)``, constant term first."""
        return list(reversed(self.coefficients))

    def scaled_charpoly(self) -> list[Fraction]:
        """``det(t - F/q^w)`` with ``w = r`` (``1/2`` is not used: curves have no scaled form)."""
        m = self.m
        return [Fraction(self.coefficients[m - k], self.q ** (self.r * (m - k))) for k in range(m + 1)]

    def roots_ok(self, tol: float = 1e-6) -> bool:
        """All complex roots of ``P`` have absolute value ``q^(-weight/2)``.

        Roots are found numerically on the squarefree part after rescaling
        so that they should lie on the unit circle.
        """
        weight = 1 if self.curve else 2 * self.r
        sqfree = squarefree_part(list(self.coefficients))
        if len(sqfree) <= 1:
            return True
        s = self.q ** (weight / 2)
        scaled = [float(c) / s**k for k, c in enumerate(sqfree)]
        top = max(abs(c) for c in scaled)
        roots = np.roots([c / top for c in reversed(scaled)])
        return bool(np.all(np.abs(np.abs(roots) - 1) < tol))

    def __str__(self):
        return format_poly(list(self.coefficients), ascending=True)


def _sym(x: int, mod: int) -> int:
    x %= mod
    return x - mod if 2 * x > mod else x


def weil_lift(
    charpoly_mod: Sequence[int],
    m: int,
    q: int,
    r: int,
    sign: int | None,
    N: int,
    precisions: Sequence[int] | None = None,
    curve: bool = False,
) -> WeilPolynomial:
    """Recover the exact ``det(1 - tF)`` from ``det(t - F)`` known modulo ``q^N``.

    ``charpoly_mod`` lists ``det(t - F)`` constant term first.  ``precisions``
    optionally gives a per-``e_i`` precision (see :func:`hodge_precisions`).
    The lower half of the ``e_i`` is lifted to the symmetric interval and the
    upper half follows from ``e_{m-i} = sign q^{r(m-2i)} e_i``; when a lower
    coefficient is too imprecise its partner is lifted instead.  With
    ``sign=None`` both signs are tried and the consistent one kept.
    """
    if len(charpoly_mod) != m + 1:
        raise ValueError("charpoly has the wrong degree")
    prec = list(precisions) if precisions is not None else [N] * (m + 1)
    e_mod = [(-1) ** i * charpoly_mod[m - i] for i in range(m + 1)]
    bounds = coefficient_bounds(m, q, r, curve)
    signs = [sign] if sign is not None else [1, -1]
    if curve:
        signs = [1]
    results = []
    for eps in signs:
        try:
            results.append(_lift_with_sign(e_mod, m, q, r, eps, prec, bounds, curve))
        except InconsistentLift:
            continue
    if not results:
        raise InconsistentLift("no sign gives a consistent Weil polynomial")
    if len({tuple(x) for x in results}) > 1:
        raise InconsistentLift("functional equation sign is ambiguous at this precision")
    e = results[0]
    poly = WeilPolynomial(tuple((-1) ** i * e[i] for i in range(m + 1)), q, r, curve)
    if not poly.roots_ok():
        raise InconsistentLift("lifted polynomial fails the root absolute value check")
    return poly


def _shift(i, m, r, curve):
    return (m - 2 * i) // 2 if curve else r * (m - 2 * i)


def _lift_with_sign(e_mod, m, q, r, eps, prec, bounds, curve):
    e = [None] * (m + 1)
    for i in range(m // 2 + 1):
        j = m - i
        sh = _shift(i, m, r, curve)
        own = _known(i, prec, bounds, q, curve)
        if i == j or own or prec[j] - sh <= prec[i]:
            if not own:
                raise InconsistentLift(f"coefficient {i} is not determined at this precision")
            e[i] = _sym(e_mod[i], q ** prec[i])
        else:
            via = list(prec)
            via[i] = prec[j] - sh
            if not _known(i, via, bounds, q, curve):
                raise InconsistentLift(f"coefficient {i} is not determined at this precision")
            ej = _sym(e_mod[j], q ** prec[j])
            if ej % q**sh:
                raise InconsistentLift(f"coefficient {j} is not divisible by q^{sh}")
            e[i] = eps * ej // q**sh
        e[j] = eps * q**sh * e[i]
        if i == j and eps == -1 and e[i] != 0:
            raise InconsistentLift("odd symmetry forces the middle coefficient to vanish")
    # certified layer: agreement with the input at the known precision
    for i in range(m + 1):
        if prec[i] > 0 and (e[i] - e_mod[i]) % q ** prec[i]:
            raise InconsistentLift(f"lift disagrees with the input at coefficient {i}")
    for i in range(m + 1):
        if abs(e[i]) ** (2 if curve else 1) > bounds[i]:
            raise InconsistentLift(f"coefficient {i} exceeds the Weil bound")
    return e


def squarefree_part(a: Sequence[int]) -> list[Fraction]:
    """``a / gcd(a, a')`` over the rationals."""
    a = upoly.trim([Fraction(x) for x in a])
    g = _gcd_q(a, upoly.derivative(a))
    return upoly.exact_divide(a, g) if len(g) > 1 else a


def _gcd_q(a, b):
    a, b = upoly.trim(list(a)), upoly.trim(list(b))
    while b:
        a, b = b, _rem_q(a, b)
    return [x / a[-1] for x in a]


def _rem_q(a, b):
    a = list(a)
    while len(a) >= len(b) and a:
        c = a[-1] / b[-1]
        off = len(a) - len(b)
        for j, y in enumerate(b):
            a[off + j] -= c * y
        upoly.trim(a)
    return a


# cyclotomic polynomials ------------------------------------------------------


def _factorize(n: int) -> dict:
    out, k = {}, 2
    while k * k <= n:
        while n % k == 0:
            out[k] = out.get(k, 0) + 1
            n //= k
        k += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def euler_phi(i: int) -> int:
    out = i
    for q in _factorize(i):
        out = out // q * (q - 1)
    return out


def _mobius(n: int) -> int:
    fac = _factorize(n)
    if any(e > 1 for e in fac.values()):
        return 0
    return -1 if len(fac) % 2 else 1


@lru_cache(maxsize=None)
def cyclotomic(i: int) -> tuple:
    """Coefficients of the ``i``-th cyclotomic polynomial, constant term first.

    Uses ``Phi_i = prod_{k | i} (x^k - 1)^mu(i/k)``.
    """
    num, den = [1], [1]
    for k in range(1, i + 1):
        if i % k:
            continue
        mu = _mobius(i // k)
        factor = [-1] + [0] * (k - 1) + [1]
        if mu == 1:
            num = upoly.mul(num, factor)
        elif mu == -1:
            den = upoly.mul(den, factor)
    q, r = upoly.divmod_monic(num, den)
    if r:
        raise ArithmeticError("cyclotomic construction failed")
    return tuple(q)


def scaled_cyclotomic(i: int, s: int) -> list[int]:
    """``s^deg * Phi_i(t / s)``: the monic integer polynomial with roots ``s*zeta``."""
    phi = cyclotomic(i)
    deg = len(phi) - 1
    return [c * s ** (deg - k) for k, c in enumerate(phi)]


@dataclass(frozen=True)
class CyclotomicSplit:
    """``chi = h * prod Phi_i^gamma_i`` for the scaled polynomial ``chi``.

    ``factors`` holds ``(i, Phi_i, gamma_i)``; ``remainder`` is ``h`` as an
    integer polynomial ``h_int`` with ``h(t) = h_int(t) / denominator``.
    """

    factors: tuple
    remainder: tuple
    denominator: int

    @property
    def u(self) -> int:
        return math.lcm(*[i for i, _, _ in self.factors]) if self.factors else 1

    @property
    def v(self) -> int:
        return max((len(phi) - 1 for _, phi, _ in self.factors), default=0)

    @property
    def rank(self) -> int:
        return sum(g * (len(phi) - 1) for _, phi, g in self.factors)

    def remainder_string(self) -> str:
        body = format_poly(list(self.remainder))
        return body if self.denominator == 1 else f"({body})/{self.denominator}"

    def reassemble(self) -> list[Fraction]:
        acc = [Fraction(c, self.denominator) for c in self.remainder]
        for _, phi, g in self.factors:
            for _ in range(g):
                acc = upoly.mul(acc, list(phi))
        return acc


def cyclotomic_split(charpoly: Sequence[int], scale: int) -> CyclotomicSplit:
    """Split ``det(t - F)`` along roots ``scale * zeta`` with ``zeta`` roots of unity.

    Trial division happens over the integers by ``scale^deg Phi_i(t/scale)``
    for every ``i`` with ``phi(i) <= deg``.  The remainder is returned in the
    normalized variable ``t -> t * scale`` as an integer polynomial over its
    denominator.
    """
    c = upoly.trim([int(x) for x in charpoly])
    m = len(c) - 1
    factors = []
    i = 1
    max_i = _max_index(m)
    while i <= max_i:
        if euler_phi(i) <= m:
            div = scaled_cyclotomic(i, scale)
            gamma = 0
            while len(c) - 1 >= len(div) - 1:
                q, rem = upoly.divmod_monic(c, div)
                if rem:
                    break
                c = q
                gamma += 1
            if gamma:
                factors.append((i, cyclotomic(i), gamma))
        i += 1
    # h(t) = c(scale * t) / scale^deg c
    deg = len(c) - 1
    hs = [Fraction(x * scale**k, scale**deg) for k, x in enumerate(c)]
    den = math.lcm(*[x.denominator for x in hs]) if hs else 1
    h_int = [int(x * den) for x in hs]
    g = math.gcd(den, *h_int)
    return CyclotomicSplit(tuple(factors), tuple(x // g for x in h_int), den // g)


def _max_index(m: int) -> int:
    # phi(i) >= sqrt(i / 2) for all i, so phi(i) <= m forces i <= 2 m^2
    return max(2 * m * m, 2)


def format_poly(coeffs: Sequence, var: str = "t", ascending: bool = False) -> str:
    """Render integer coefficients (constant first) in the style ``t^2 + 1``."""
    terms = []
    order = range(len(coeffs)) if ascending else range(len(coeffs) - 1, -1, -1)
    for k in order:
        c = coeffs[k]
        if c == 0:
            continue
        mag = abs(c)
        if k == 0:
            body = str(mag)
        else:
            mono = var if k == 1 else f"{var}^{k}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        terms.append(("-" if c < 0 else "+", body))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for s, body in terms[1:]:
        out += f" {s} {body}"
    return out


def factor_string(i: int) -> str:
    return format_poly(list(cyclotomic(i)))


# exact polynomials of induced representations --------------------------------


def power_sums_from_charpoly(charpoly: Sequence[int], K: int) -> list[Fraction]:
    """Newton: power sums ``p_1 .. p_K`` of the roots of a monic polynomial."""
    c = [Fraction(x) for x in charpoly]
    m = len(c) - 1
    e = [Fraction((-1) ** i) * c[m - i] for i in range(m + 1)]
    ps = [Fraction(m)]
    for k in range(1, K + 1):
        s = Fraction((-1) ** (k - 1) * k) * (e[k] if k <= m else 0)
        for i in range(1, k):
            if i <= m:
                s += (-1) ** (i - 1) * e[i] * ps[k - i]
        ps.append(s)
    return ps


def charpoly_from_power_sums(ps: Sequence[Fraction], m: int) -> list[int]:
    """Inverse Newton: monic polynomial of degree ``m`` with the given power sums."""
    e = [Fraction(1)]
    for k in range(1, m + 1):
        s = Fraction(0)
        for i in range(1, k + 1):
            s += (-1) ** (i - 1) * e[k - i] * ps[i]
        e.append(s / k)
    coeffs = [(-1) ** (m - k) * e[m - k] for k in range(m + 1)]
    if any(x.denominator != 1 for x in coeffs):
        raise InconsistentLift("induced characteristic polynomial is not integral")
    return [int(x) for x in coeffs]


def wedge_square_charpoly(charpoly: Sequence[int]) -> list[int]:
    """``det(t - L2 F)`` from ``det(t - F)``."""
    m = len(charpoly) - 1
    M = m * (m - 1) // 2
    ps = power_sums_from_charpoly(charpoly, 2 * M)
    out = [Fraction(0)] + [(ps[k] ** 2 - ps[2 * k]) / 2 for k in range(1, M + 1)]
    return charpoly_from_power_sums(out, M)


def tensor_square_charpoly(charpoly: Sequence[int]) -> list[int]:
    """``det(t - F (x) F)`` from ``det(t - F)``."""
    m = len(charpoly) - 1
    M = m * m
    ps = power_sums_from_charpoly(charpoly, M)
    out = [Fraction(0)] + [ps[k] ** 2 for k in range(1, M + 1)]
    return charpoly_from_power_sums(out, M)
