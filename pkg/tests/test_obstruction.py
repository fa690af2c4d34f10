import sympy

from crysobs.cli import parse_input
from crysobs.frobenius import import_frobenius
from crysobs.griffiths import griffiths_basis
from crysobs.obstruction import accumulate_bound, obstruction_matrix, pi_i_matrix, tate_basis
from crysobs.padic import PadicContext, PadicMatrix, rank_lower_bound
from crysobs.zeta import cyclotomic, cyclotomic_split

from .conftest import GENUS3_PI_T, K3, frobenius_json


def test_projection_keeps_low_weights():
    F = import_frobenius(frobenius_json([[31**2, 0, 0], [0, 31, 0], [0, 0, 1]], "jacobian-h2", [2, 1, 0]))
    assert obstruction_matrix(F).tolist() == [[0, 0, 1]]


def test_projection_skips_polarization():
    entries = [[31, 0, 0, 0], [0, 31**2, 0, 0], [0, 0, 31, 0], [0, 0, 0, 1]]
    F = import_frobenius(frobenius_json(entries, "surface", [1, 2, 1, 0]))
    assert obstruction_matrix(F).tolist() == [[0, 0, 0, 1]]


def test_projection_from_basis():
    basis = griffiths_basis(parse_input(K3, "surface"), 89)
    P = obstruction_matrix(basis)
    assert P.nrows == 1 and P.ncols == 22
    assert P.tolist()[0][-1] == 1


def test_tate_class_inside_filtration_is_unobstructed():
    # e0 spans the Tate part and lies in F^1; the other eigenvalue is 5
    entries = [[31, 31 * 7, 0], [0, 5, 0], [0, 0, 31 * 4]]
    F = import_frobenius(frobenius_json(entries, "jacobian-h2", [1, 0, 1]))
    charpoly = _charpoly(entries)
    split = cyclotomic_split(charpoly, 31)
    report = accumulate_bound(split, F, 3)
    assert report.factors == [("t - 1", 1)]
    assert report.dim_li == [1]


def test_tate_class_outside_filtration_is_obstructed():
    # both basis vectors are Tate classes and e1 lies outside F^1
    entries = [[31, 0], [0, 31]]
    F = import_frobenius(frobenius_json(entries, "jacobian-h2", [1, 0]))
    split = cyclotomic_split(_charpoly(entries), 31)
    report = accumulate_bound(split, F, 3)
    assert report.dim_ti == [2] and report.dim_li == [1] and report.bound == 1
    vanilla = accumulate_bound(split, F, 3, vanilla=True)
    assert vanilla.bound >= report.bound


def test_pi_matrix_stacks_frobenius_orbit():
    # Phi_4: F acts on (e0, e1) by rotation scaled by q; only e1 is outside F^1
    q = 31
    entries = [[0, (-q) % q**3], [q, 0]]
    ctx = PadicContext(31, 3)
    F = PadicMatrix.from_rows(ctx, entries)
    tf = tate_basis(4, cyclotomic(4), 1, F, q)
    assert tf.observed_dim == 2
    proj = PadicMatrix.from_rows(ctx, [[0, 1]], ncols=2)
    stacked = pi_i_matrix(tf, F, proj)
    assert stacked.nrows == 2
    assert rank_lower_bound(stacked) == 2


def test_printed_genus3_obstruction_rank():
    M = PadicMatrix.from_rows(PadicContext(31, 3), GENUS3_PI_T)
    assert rank_lower_bound(M) == 2


def test_report_json_keys():
    entries = [[31, 0], [0, 31]]
    F = import_frobenius(frobenius_json(entries, "jacobian-h2", [1, 0]))
    out = accumulate_bound(cyclotomic_split(_charpoly(entries), 31), F, 3).to_json()
    for key in ("bound", "precision", "p", "rank T(X_Fpbar)", "factors", "dim Ti", "dim Li", "mode", "provenance"):
        assert key in out
    assert out["factors"] == [["t - 1", 2]]


def _charpoly(entries):
    t = sympy.Symbol("t")
    return [int(c) for c in reversed(sympy.Poly(sympy.Matrix(entries).charpoly(t).as_expr(), t).all_coeffs())]


def test_oversized_kernel_is_not_used():
    # the second eigenvalue 31 + 31^3 agrees with q modulo 31^3, so the
    # approximate kernel is two dimensional while T_1 is a line
    q = 31
    F = import_frobenius(frobenius_json([[q, 0], [0, q + q**3]], "jacobian-h2", [1, 0]))
    split = cyclotomic_split(_charpoly([[q, 0], [0, q + q**3]]), q)
    assert split.factors[0][2] == 1
    report = accumulate_bound(split, F, 3)
    assert report.dim_li == [1]
    assert report.provenance["kernel_dimension_flags"]


def test_precision_wanted_counts_stacked_blocks():
    # F^2 = -q^2 exactly, so the Phi_4 kernel loses nothing; one extra block of depth r
    q = 31
    entries = [[0, (-q) % q**3], [q, 0]]
    F = import_frobenius(frobenius_json(entries, "jacobian-h2", [1, 1]))
    split = cyclotomic_split([q * q, 0, 1], q)
    assert [f[0] for f in split.factors] == [4]
    for requested in (1, 3):
        report = accumulate_bound(split, F, requested)
        assert report.provenance["kernel_losses"] == {"t^2 + 1": 0}
        assert report.provenance["precision_wanted"] == max(3, 0 + 1 + requested)
