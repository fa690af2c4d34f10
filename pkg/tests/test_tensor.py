import random

import pytest
import sympy

from crysobs.errors import BadInput
from crysobs.frobenius import import_frobenius
from crysobs.padic import charpoly_mod_pN
from crysobs.tensor import tensor_square, wedge_square
from crysobs.zeta import tensor_square_charpoly, wedge_square_charpoly

from .conftest import GENUS2_H1, GENUS3_H1, frobenius_json


def h1(entries, g):
    return import_frobenius(frobenius_json(entries, "jacobian-h1", [1] * g + [0] * g))


@pytest.mark.parametrize("entries,g", [(GENUS2_H1, 2), (GENUS3_H1, 3)])
def test_wedge_square_shape_and_weights(entries, g):
    W = wedge_square(h1(entries, g))
    m = 2 * g
    assert len(W.pairs) == m * (m - 1) // 2
    assert list(W.pairs) == sorted(W.pairs)
    assert W.frobenius.mode == "jacobian-h2" and W.frobenius.r == 1
    # Hodge numbers of H^2 of a Jacobian: (g choose 2, g^2, g choose 2)
    weights = W.frobenius.weights
    assert [weights.count(k) for k in (2, 1, 0)] == [g * (g - 1) // 2, g * g, g * (g - 1) // 2]
    assert W.obstruction_codim == g * (g - 1) // 2
    assert W.filtration_cut == len(W.pairs) - W.obstruction_codim


@pytest.mark.parametrize("entries,g", [(GENUS2_H1, 2), (GENUS3_H1, 3)])
def test_tensor_square_order(entries, g):
    T = tensor_square(h1(entries, g))
    weights = list(T.frobenius.weights)
    assert len(T.pairs) == 4 * g * g
    assert weights == sorted(weights, reverse=True)
    assert T.obstruction_codim == g * g
    assert T.index((0, 0)) == 0


def test_induced_matrices_have_induced_charpolys():
    F = h1(GENUS2_H1, 2)
    base = charpoly_mod_pN(F.matrix)
    q = 31**3
    exact = [c if 2 * c < q else c - q for c in base]
    W, T = wedge_square(F), tensor_square(F)
    assert charpoly_mod_pN(W.matrix) == [c % q for c in wedge_square_charpoly(exact)]
    assert charpoly_mod_pN(T.matrix) == [c % q for c in tensor_square_charpoly(exact)]


def test_wedge_entries_are_minors():
    rng = random.Random(11)
    F = h1(GENUS3_H1, 3)
    W = wedge_square(F)
    A = sympy.Matrix(F.matrix.tolist())
    q = 31**3
    for _ in range(20):
        (a, b), (c, d) = rng.choice(W.pairs), rng.choice(W.pairs)
        minor = A.extract([a, b], [c, d]).det()
        assert W.matrix.entries[W.index((a, b))][W.index((c, d))] == minor % q


def test_requires_adapted_h1_basis():
    with pytest.raises(BadInput):
        wedge_square(import_frobenius(frobenius_json(GENUS2_H1, "jacobian-h1", [0, 0, 1, 1])))
    with pytest.raises(BadInput):
        tensor_square(import_frobenius(frobenius_json([[31, 0], [0, 31]], "surface", [1, 1])))
