"""Frobenius on the wedge square and tensor square of H^1.

For a Jacobian, ``H^2`` is the wedge square of ``H^1`` and the divisorial
correspondences of ``C x C`` sit in the tensor square.  Both inherit a
Hodge filtration from a filtration adapted basis of ``H^1``: a basis pair
``(a, b)`` has weight ``w_a + w_b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from .errors import BadInput
from .frobenius import JACOBIAN_H1, JACOBIAN_H2, FrobeniusApprox
from .padic import PadicMatrix


@dataclass(frozen=True)
class InducedStructure:
    frobenius: FrobeniusApprox
    pairs: tuple
    genus: int
    kind: str

    @property
    def matrix(self) -> PadicMatrix:
        return self.frobenius.matrix

    @property
    def obstruction_codim(self) -> int:
        """Number of pairs outside the first filtration step."""
        return sum(1 for w in self.frobenius.weights if w < 1)

    @property
    def filtration_cut(self) -> int:
        """Pairs before this index span ``F^1``; the rest form the obstruction codomain."""
        return len(self.pairs) - self.obstruction_codim

    def index(self, pair) -> int:
        return self.pairs.index(tuple(pair))


def _check(F: FrobeniusApprox) -> int:
    if F.mode != JACOBIAN_H1:
        raise BadInput("induced structures are built from H^1")
    g, rem = divmod(F.dimension, 2)
    if rem or list(F.weights) != [1] * g + [0] * g:
        raise BadInput("H^1 basis must be filtration adapted: g holomorphic elements first")
    return g


def _induced(F, pairs, entry, kind, g):
    M = F.matrix
    mod = M.ctx.modulus
    rows = [[entry(M.entries, a, b, c, d) % mod for (c, d) in pairs] for (a, b) in pairs]
    weights = tuple(F.weights[a] + F.weights[b] for a, b in pairs)
    op = "^" if kind == "wedge" else "*"
    labels = tuple({"label": f"e{a}{op}e{b}", "weight": w} for (a, b), w in zip(pairs, weights))
    matrix = PadicMatrix.from_rows(M.ctx, rows, M.loss)
    info = dict(F.provenance, induced=kind)
    G = FrobeniusApprox(matrix, 1, JACOBIAN_H2, weights, labels, F.variable_order, info)
    return InducedStructure(G, tuple(pairs), g, kind)


def wedge_square(F: FrobeniusApprox) -> InducedStructure:
    """``Lambda^2`` of Frobenius, pairs ``a < b`` in lexicographic order."""
    g = _check(F)
    pairs = list(combinations(range(2 * g), 2))
    return _induced(F, pairs, lambda M, a, b, c, d: M[a][c] * M[b][d] - M[a][d] * M[b][c], "wedge", g)


def tensor_square(F: FrobeniusApprox) -> InducedStructure:
    """Kronecker square of Frobenius, pairs ordered by decreasing weight then lexicographically."""
    g = _check(F)
    pairs = sorted(product(range(2 * g), repeat=2), key=lambda ab: -sum(1 for i in ab if i < g))
    return _induced(F, pairs, lambda M, a, b, c, d: M[a][c] * M[b][d], "tensor", g)
