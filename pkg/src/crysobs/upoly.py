"""Dense univariate polynomials as coefficient lists, constant term first."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def degree(a: Sequence) -> int:
    a = trim(list(a))
    return len(a) - 1


def add(a: Sequence, b: Sequence, modulus: int | None = None) -> list:
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]
    return trim([x % modulus for x in out] if modulus else out)


def sub(a: Sequence, b: Sequence, modulus: int | None = None) -> list:
    return add(a, [-x for x in b], modulus)


def mul(a: Sequence, b: Sequence, modulus: int | None = None) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim([x % modulus for x in out] if modulus else out)


def scale(a: Sequence, c, modulus: int | None = None) -> list:
    return trim([x * c % modulus for x in a] if modulus else [x * c for x in a])


def divmod_monic(a: Sequence, b: Sequence, modulus: int | None = None) -> tuple[list, list]:
    """Quotient and remainder by a monic ``b``."""
    a = list(a)
    db = len(b) - 1
    if b[-1] != 1:
        raise ValueError("divisor must be monic")
    if len(a) <= db:
        return [], trim(a)
    q = [0] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k] % modulus if modulus else a[k]
        if c:
            q[k - db] = c
            for j in range(db + 1):
                a[k - db + j] -= c * b[j]
    r = a[:db]
    if modulus:
        q = [x % modulus for x in q]
        r = [x % modulus for x in r]
    return trim(q), trim(r)


def divmod_field(a: Sequence, b: Sequence, p: int) -> tuple[list, list]:
    b = trim([x % p for x in b])
    inv = pow(b[-1], -1, p)
    q, r = divmod_monic(a, [x * inv % p for x in b], p)
    return scale(q, inv, p), r


def gcd_mod_p(a: Sequence, b: Sequence, p: int) -> list:
    a = trim([x % p for x in a])
    b = trim([x % p for x in b])
    while b:
        a, b = b, divmod_field(a, b, p)[1]
    if not a:
        return []
    return scale(a, pow(a[-1], -1, p), p)


def xgcd_mod_p(a: Sequence, b: Sequence, p: int) -> tuple[list, list, list]:
    """Return ``(g, s, t)`` with ``s*a + t*b = g`` monic over F_p."""
    r0, r1 = trim([x % p for x in a]), trim([x % p for x in b])
    s0, s1, t0, t1 = [1], [], [], [1]
    while r1:
        q, r = divmod_field(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(q, s1, p), p)
        t0, t1 = t1, sub(t0, mul(q, t1, p), p)
    inv = pow(r0[-1], -1, p)
    return scale(r0, inv, p), scale(s0, inv, p), scale(t0, inv, p)


def inverse_mod(a: Sequence, m: Sequence, p: int, N: int) -> list:
    """Inverse of ``a`` modulo the monic ``m`` over Z/p^N, via Newton lifting."""
    g, s, _ = xgcd_mod_p(a, m, p)
    if g != [1]:
        raise ZeroDivisionError("polynomials are not coprime modulo p")
    mod = p**N
    inv = s
    prec = 1
    while prec < N:
        prec = min(2 * prec, N)
        e = divmod_monic(mul(a, inv, mod), m, mod)[1]
        corr = sub([2], e, mod)
        inv = divmod_monic(mul(inv, corr, mod), m, mod)[1]
    return inv


def derivative(a: Sequence) -> list:
    return trim([i * a[i] for i in range(1, len(a))])


def evaluate(a: Sequence, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def compose_power(a: Sequence, k: int) -> list:
    """``a(x^k)``."""
    out = [0] * ((len(a) - 1) * k + 1) if a else []
    for i, c in enumerate(a):
        out[i * k] = c
    return out


def exact_divide(a: Sequence, b: Sequence) -> list:
    """Exact division over Q; raises if the remainder is nonzero."""
    a = [Fraction(x) for x in a]
    b = trim(list(b))
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    for k in range(len(a) - 1, len(b) - 2, -1):
        c = a[k] / b[-1]
        if c:
            q[k - len(b) + 1] = c
            for j, y in enumerate(b):
                a[k - len(b) + 1 + j] -= c * y
    if any(a):
        raise ValueError("division is not exact")
    return [x for x in q]
