import json

import pytest

from crysobs.cli import parse_input
from crysobs.errors import SingularReduction
from crysobs.griffiths import (
    HypersurfaceInput,
    PrimeCheck,
    good_prime_check,
    griffiths_basis,
    griffiths_dwork_reduce,
    reduction_check,
)
from crysobs.padic import PadicContext
from crysobs.polyring import GradedPoly, monomials, parse_homogeneous, poly_mul

from .conftest import GENUS3, K3, QUARTIC_CM


def primitive_dimension(n, d):
    # Euler characteristic of a smooth degree d hypersurface of dimension n
    return ((d - 1) ** (n + 2) + (-1) ** n * (d - 1)) // d


def surface(text):
    return parse_input(text, "surface")


@pytest.mark.parametrize(
    "text,n,d",
    [
        ("x^4 + y^4 + z^4 + w^4", 2, 4),
        (K3, 2, 4),
        ("x^5 + y^5 + z^5 + w^5", 2, 5),
        (QUARTIC_CM, 1, 4),
        (GENUS3, 1, 4),
        ("x^3 + y^3 + z^3", 1, 3),
    ],
)
def test_basis_dimension(text, n, d):
    inp = parse_input(text, "jacobian" if n == 1 else "surface")
    basis = griffiths_basis(inp, 31 if d != 3 else 13)
    assert (basis.n, basis.d) == (n, d)
    assert basis.size == primitive_dimension(n, d)
    assert basis.dimension == basis.size + (n % 2 == 0)


def test_hodge_blocks_of_quartic_surface():
    basis = griffiths_basis(surface(K3), 89)
    assert basis.blocks() == {1: 1, 2: 19, 3: 1}
    assert basis.weights == (2,) + (1,) * 19 + (0,)
    assert basis.filtration_cuts == (21, 20, 1)


def test_plane_curve_weights():
    basis = griffiths_basis(parse_input(GENUS3, "jacobian"), 31)
    assert basis.weights == (1,) * 3 + (0,) * 3


def test_manifest_round_trip():
    basis = griffiths_basis(surface(K3), 89)
    data = json.loads(basis.manifest_json())
    assert data["variable_order"] == list(basis.variables)
    assert [tuple(m) for m in data["monomials"]] == list(basis.monomials)
    assert data["polarization_slot"] is True


def test_cone_is_singular():
    f, names = parse_homogeneous("x^4 + y^4 + z^4", ["x", "y", "z", "w"])
    cone = HypersurfaceInput(f, "hypersurface", tuple(names))
    assert good_prime_check(cone, 31) == PrimeCheck.SINGULAR_REDUCTION
    with pytest.raises(SingularReduction):
        griffiths_basis(cone, 31)


def test_prime_checks():
    inp = surface("x^4 + y^4 + z^4 + w^4")
    assert good_prime_check(inp, 7) == PrimeCheck.BAD_CHARACTERISTIC
    assert good_prime_check(inp, 11) == PrimeCheck.OK
    quintic = surface("x^5 + y^5 + z^5 + w^5")
    assert good_prime_check(quintic, 5) in (PrimeCheck.BAD_CHARACTERISTIC, PrimeCheck.DIVIDES_DEGREE)
    hyper = HypersurfaceInput((1, 1, 0, 0, 0, 1), "jacobian-hyperelliptic")
    assert good_prime_check(hyper, 7) == PrimeCheck.BAD_CHARACTERISTIC
    # x^5 + x + 1 has the double root 4 modulo 7
    assert reduction_check(hyper, 7) == PrimeCheck.SINGULAR_REDUCTION
    assert good_prime_check(hyper, 11) == PrimeCheck.OK


def test_singular_basis_raises():
    singular = surface("x^2*y^2 + z^4 + w^4 + x^4")
    with pytest.raises(SingularReduction):
        griffiths_basis(singular, 31)


def _reduce(f, numerator, pole, basis, ctx):
    out = griffiths_dwork_reduce(numerator, pole, basis, ctx, f)
    return out.coords.tolist(), out.shift


def test_basis_elements_reduce_to_themselves():
    f, _ = parse_homogeneous(K3)
    inp = surface(K3)
    basis = griffiths_basis(inp, 89)
    ctx = PadicContext(89, 3)
    for k in (0, 5, 20):
        mono, l = basis.monomials[k], basis.pole_orders[k]
        coords, shift = _reduce(f, GradedPoly({mono: 1}, 4, sum(mono)), l, basis, ctx)
        assert shift == 0
        assert [row[0] for row in coords] == [int(i == k) for i in range(basis.size)]


@pytest.mark.parametrize("pole", [3, 4])
def test_exact_forms_reduce_consistently(pole):
    # (l - 1) sum A_i df/dx_i / f^l  and  sum dA_i/dx_i / f^(l-1)  are cohomologous
    f, _ = parse_homogeneous("x^4 + y^4 + z^4 + w^4 + x*y*z*w")
    inp = surface("x^4 + y^4 + z^4 + w^4 + x*y*z*w")
    p = 13
    basis = griffiths_basis(inp, p)
    ctx = PadicContext(p, 4)
    deg_a = pole * 4 - 4 - 3
    mons = monomials(4, deg_a)
    A = [GradedPoly({mons[(7 * i + 3) % len(mons)]: i + 1, mons[(11 * i + 5) % len(mons)]: 2 - i}, 4, deg_a) for i in range(4)]
    grad = f.gradient()
    high: dict = {}
    low: dict = {}
    for a, g in zip(A, grad):
        for m, c in poly_mul(a.coeffs, g.coeffs).items():
            high[m] = high.get(m, 0) + (pole - 1) * c
    for i, a in enumerate(A):
        for m, c in a.derivative(i).coeffs.items():
            low[m] = low.get(m, 0) + c
    hi, s1 = _reduce(f, GradedPoly(high, 4, deg_a + 3), pole, basis, ctx)
    lo, s2 = _reduce(f, GradedPoly(low, 4, deg_a - 1), pole - 1, basis, ctx)
    s = max(s1, s2)
    mod = p ** (ctx.N)
    a = [row[0] * p ** (s - s1) % mod for row in hi]
    b = [row[0] * p ** (s - s2) % mod for row in lo]
    assert a == b
