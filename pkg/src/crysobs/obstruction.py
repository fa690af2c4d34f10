"""Tate classes, the obstruction map and the Picard number bound.

For each cyclotomic factor ``Phi_i^gamma`` of the Frobenius characteristic
polynomial, the classes on which ``F / q^r`` acts through ``Phi_i`` form a
Frobenius stable space ``T_i``.  Only the subspace ``L_i`` of ``T_i`` whose
whole Frobenius orbit lies in ``F^r`` can consist of algebraic classes, so
``sum dim L_i`` bounds the Picard number.  ``L_i`` is the kernel of the
stacked map ``v -> (pi F^j v)_j``, where ``pi`` projects away from ``F^r``,
and a certified lower bound on the rank of that map gives an upper bound on
``dim L_i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import PrecisionExhausted
from .frobenius import FrobeniusApprox
from .griffiths import GriffithsBasis
from .padic import PadicContext, PadicMatrix, kernel_mod_pN, rank_lower_bound
from .zeta import CyclotomicSplit, factor_string

GALOIS = "galois"
VANILLA = "vanilla"


def obstruction_matrix(source, r: int | None = None) -> PadicMatrix:
    """Projection onto the coordinates outside ``F^r``.

    ``source`` is a :class:`FrobeniusApprox` (its weights decide, and in
    surface mode the polarization class is skipped) or a
    :class:`GriffithsBasis`, which gives the projection on the full
    cohomology with the polarization class in slot 0.
    """
    if isinstance(source, GriffithsBasis):
        r = source.n // 2 if r is None else r
        weights = ((r,) if source.polarization_slot else ()) + source.weights
        ctx = PadicContext(2, 1)
    else:
        r = source.r if r is None else r
        weights = source.weights
        ctx = source.matrix.ctx
    skip = 1 if isinstance(source, GriffithsBasis) and source.polarization_slot else 0
    if isinstance(source, FrobeniusApprox) and source.has_polarization:
        skip = 1
    keep = [c for c, w in enumerate(weights) if w < r and c >= skip]
    rows = [[1 if c == k else 0 for c in range(len(weights))] for k in keep]
    return PadicMatrix.from_rows(ctx, rows, ncols=len(weights))


@dataclass(frozen=True)
class TateFactor:
    i: int
    phi: tuple
    gamma: int
    basis: PadicMatrix
    is_polarization: bool = False

    @property
    def dim(self) -> int:
        """Declared dimension ``gamma * deg Phi_i``."""
        return self.gamma * (len(self.phi) - 1)

    @property
    def observed_dim(self) -> int:
        return self.basis.ncols

    @property
    def label(self) -> str:
        return factor_string(self.i)


def _homogenized(phi: Sequence[int], F: PadicMatrix, qr: int) -> PadicMatrix:
    """``q^(r deg) Phi(F / q^r)``, an integer matrix polynomial in ``F``."""
    deg = len(phi) - 1
    n = F.nrows
    acc = PadicMatrix.zero(F.ctx, n, n).with_loss(F.loss)
    power = PadicMatrix.identity(F.ctx, n)
    for k, c in enumerate(phi):
        if c:
            acc = acc + power.scale(c * qr ** (deg - k))
        if k < deg:
            power = power @ F
    return acc


def tate_basis(i: int, phi: Sequence[int], gamma: int, F: PadicMatrix, qr: int) -> TateFactor:
    """Approximate basis of the ``Phi_i`` part of the eventual Tate classes."""
    K = kernel_mod_pN(_homogenized(phi, F, qr))
    return TateFactor(i, tuple(phi), gamma, K)


def pi_i_matrix(factor: TateFactor, F: PadicMatrix, proj: PadicMatrix, blocks: int | None = None) -> PadicMatrix:
    """Stack of ``pi F^j B`` for ``j < deg Phi_i``, applied to the Tate basis ``B``.

    Each block uses ``F^j`` rather than ``(F / q^r)^j``; the two differ by a
    nonzero scalar per block, which leaves the kernel unchanged.
    """
    blocks = len(factor.phi) - 1 if blocks is None else blocks
    proj = PadicMatrix.from_rows(F.ctx, proj.entries, ncols=proj.ncols)
    rows = []
    image = factor.basis
    for j in range(blocks):
        rows.extend((proj @ image).entries)
        if j + 1 < blocks:
            image = F @ image
    loss = max(F.loss, factor.basis.loss)
    return PadicMatrix.from_rows(F.ctx, rows, loss, ncols=factor.basis.ncols)


def precision_wanted(tate: list, M: PadicMatrix, r: int, requested: int) -> int:
    """Frobenius digits that leave ``requested`` digits in every stacked map.

    Block ``j`` of the stacked map is divisible by ``q^(r j)`` on ``T_i``, so
    a factor of degree ``k`` whose kernel lost ``l`` digits needs
    ``l + r (k - 1) + requested`` digits.
    """
    wanted = M.N
    for _, phi, _, tf in tate:
        deg = len(phi) - 1
        loss = tf.basis.loss if tf is not None else M.N + r * deg
        wanted = max(wanted, loss + r * (deg - 1) + requested)
    return wanted


@dataclass
class ObstructionReport:
    bound: int
    p: int
    precision: int
    factors: list
    dim_ti: list
    dim_li: list
    mode: dict
    provenance: dict = field(default_factory=dict)

    @property
    def rank_t(self) -> int:
        return sum(self.dim_ti)

    def to_json(self) -> dict:
        return {
            "bound": self.bound,
            "precision": self.precision,
            "p": self.p,
            "rank T(X_Fpbar)": self.rank_t,
            "factors": [[s, g] for s, g in self.factors],
            "dim Ti": list(self.dim_ti),
            "dim Li": list(self.dim_li),
            "mode": dict(self.mode),
            "provenance": dict(self.provenance),
        }

    def summary(self) -> tuple:
        """``(bound, dict)`` in the shape of the reference outputs."""
        d = self.to_json()
        return d["bound"], {k: d[k] for k in ("precision", "p", "rank T(X_Fpbar)", "factors", "dim Ti", "dim Li")}


def accumulate_bound(
    split: CyclotomicSplit,
    F: FrobeniusApprox,
    precision: int,
    vanilla: bool = False,
    tensor: bool = False,
) -> ObstructionReport:
    """Run the per factor analysis and add up ``dim L_i``.

    ``split`` is the cyclotomic split of the characteristic polynomial of the
    block analysed: the primitive block in surface mode (the polarization is
    then reported as its own factor) and the whole matrix otherwise.
    """
    M, _ = F.primitive()
    qr = F.p**F.r
    proj = obstruction_matrix(F)
    if F.has_polarization:
        proj = PadicMatrix.from_rows(M.ctx, [row[1:] for row in proj.entries], ncols=M.ncols)
    factors, dim_ti, dim_li = [], [], []
    flags = []
    if F.has_polarization:
        factors.append((factor_string(1), 1))
        dim_ti.append(1)
        dim_li.append(1)
    tate = []
    for i, phi, gamma in split.factors:
        try:
            tf = tate_basis(i, phi, gamma, M, qr)
        except PrecisionExhausted:
            tf = None
        tate.append((i, phi, gamma, tf))
        if tf is not None and tf.observed_dim != tf.dim:
            flags.append({"factor": factor_string(i), "declared": tf.dim, "observed": tf.observed_dim})
    if not vanilla:
        for i, phi, gamma, tf in tate:
            dim = gamma * (len(phi) - 1)
            rank = 0
            # a kernel larger than T_i gives no lower bound on the rank over T_i
            if tf is not None and 0 < tf.basis.ncols <= dim:
                rank = rank_lower_bound(pi_i_matrix(tf, M, proj))
            factors.append((factor_string(i), gamma))
            dim_ti.append(dim)
            dim_li.append(dim - rank)
    else:
        dim = split.rank
        rank = 0
        if split.factors:
            u = split.u
            power = PadicMatrix.identity(M.ctx, M.nrows)
            for _ in range(u):
                power = power @ M
            combined = power - PadicMatrix.identity(M.ctx, M.nrows).scale(qr**u)
            try:
                K = kernel_mod_pN(combined)
                if 0 < K.ncols <= dim:
                    whole = TateFactor(0, (0, 1), K.ncols, K)
                    rank = rank_lower_bound(pi_i_matrix(whole, M, proj, blocks=1))
                if K.ncols != dim:
                    flags.append({"factor": "combined", "declared": dim, "observed": K.ncols})
            except PrecisionExhausted:
                pass
        for i, phi, gamma in split.factors:
            factors.append((factor_string(i), gamma))
        dim_ti.append(dim)
        dim_li.append(dim - rank)
    provenance = dict(F.provenance)
    provenance.update(
        {
            "precision_wanted": precision_wanted(tate, M, F.r, precision),
            "frobenius_precision": M.N,
            "frobenius_loss": M.loss,
            "kernel_losses": {factor_string(i): tf.basis.loss for i, _, _, tf in tate if tf is not None},
            "kernel_dimension_flags": flags,
            "remainder": split.remainder_string(),
        }
    )
    mode = {"galois": not vanilla, "vanilla": vanilla, "tensor": tensor, "cohomology": F.mode}
    return ObstructionReport(sum(dim_li), F.p, precision, factors, dim_ti, dim_li, mode, provenance)
