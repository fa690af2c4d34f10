import json
import subprocess
import sys

import pytest
import sympy

from crysobs import cli
from crysobs.cli import RunConfig, main, next_good_prime, parse_input, run
from crysobs.errors import BadInput, PrecisionExhausted
from crysobs.frobenius import import_frobenius

from .conftest import GENUS2, GENUS2_H1, GENUS3, frobenius_json


def report_core(report):
    return {k: v for k, v in report.items() if k != "timestamp"}


@pytest.fixture
def printed_h1(tmp_path):
    path = tmp_path / "h1.json"
    path.write_text(json.dumps(frobenius_json(GENUS2_H1, "jacobian-h1", [1, 1, 0, 0])))
    return str(path)


def test_parse_hyperelliptic_forms():
    inp = parse_input(GENUS2, "jacobian")
    assert inp.f == (-23, 44, -76, 56, -36, 4)
    # y^2 + h y = k becomes Y^2 = h^2 + 4k with Y = 2y + h
    alt = parse_input("y^2 + x*y = x^5 + 1", "jacobian")
    assert alt.f == (4, 0, 1, 0, 0, 4)


def test_parse_plane_curve_and_surface():
    assert parse_input(GENUS3, "jacobian").mode == "jacobian-plane-curve"
    assert parse_input("x^4 + y^4 + z^4 + w^4", "surface").mode == "hypersurface"
    with pytest.raises(BadInput):
        parse_input("x^3 + y^3 + z^3", "surface")
    with pytest.raises(BadInput):
        parse_input("x^2 + y", "surface")


def test_next_good_prime_avoids_discriminant():
    inp = parse_input(GENUS2, "jacobian")
    x = sympy.Symbol("x")
    f = sum(c * x**i for i, c in enumerate(inp.f))
    bad = 2 * int(sympy.discriminant(f, x)) * inp.f[-1]
    expected = next(p for p in sympy.primerange(9, 1000) if bad % p)
    assert next_good_prime(inp) == expected


def test_printed_matrix_report(printed_h1):
    out = run(RunConfig(frobenius=printed_h1, mode="jacobian", precision=3))
    assert out["provenance"]["weil_polynomial"] == "1 - 3*t + 14*t^2 - 93*t^3 + 961*t^4"
    assert (out["bound"], out["factors"], out["dim Ti"], out["dim Li"]) == (1, [["t - 1", 2]], [2], [1])
    assert out["rank T(X_Fpbar)"] == 2


def test_report_is_deterministic(printed_h1):
    a = run(RunConfig(frobenius=printed_h1, mode="jacobian", precision=3))
    b = run(RunConfig(frobenius=printed_h1, mode="jacobian", precision=3))
    assert report_core(a) == report_core(b)
    assert json.dumps(report_core(a), sort_keys=True) == json.dumps(report_core(b), sort_keys=True)


def test_galois_not_above_vanilla(printed_h1):
    galois = run(RunConfig(frobenius=printed_h1, mode="jacobian", precision=3))
    vanilla = run(RunConfig(frobenius=printed_h1, mode="jacobian", precision=3, vanilla=True))
    assert vanilla["mode"]["vanilla"] and not galois["mode"]["vanilla"]
    assert galois["bound"] <= vanilla["bound"]


def test_emit_frobenius_round_trip(tmp_path):
    path = tmp_path / "out.json"
    first = run(RunConfig(poly="y^2 = x^5 + 2*x^3 - x + 3", mode="jacobian", p=11, emit_frobenius=str(path)))
    again = run(RunConfig(frobenius=str(path), mode="jacobian"))
    assert import_frobenius(str(path)).p == 11
    for key in ("bound", "factors", "dim Ti", "dim Li"):
        assert first[key] == again[key]


def test_run_config_validation():
    with pytest.raises(BadInput):
        RunConfig()
    with pytest.raises(BadInput):
        RunConfig(poly="x", frobenius="y")
    with pytest.raises(BadInput):
        RunConfig(poly="x", mode="curve")
    with pytest.raises(BadInput):
        RunConfig(poly="x", precision=0)


def test_main_writes_json(printed_h1, tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["--frobenius", printed_h1, "--mode", "jacobian", "--precision", "3", "--json-out", str(out)]) == 0
    printed = json.loads(capsys.readouterr().out)
    assert printed["bound"] == 1
    assert json.loads(out.read_text())["bound"] == 1


@pytest.mark.parametrize(
    "args,code",
    [
        (["--poly", "x^2 + y", "--mode", "surface"], 2),
        (["--poly", "y^2 = x^3 + 11", "--mode", "jacobian", "--p", "11"], 3),
        (["--poly", "y^2 = x^5 + x + 1", "--mode", "jacobian", "--p", "12"], 2),
    ],
)
def test_exit_codes(args, code, capsys):
    assert main(args) == code
    err = json.loads(capsys.readouterr().err)
    assert err["error"]


def test_inconsistent_lift_exit_code(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(frobenius_json([[31 * 5, 0], [0, 7]], "jacobian-h1", [1, 0])))
    assert main(["--frobenius", str(path), "--mode", "jacobian"]) == 5


def test_precision_exhausted_exit_code(monkeypatch, printed_h1):
    def boom(config):
        raise PrecisionExhausted("no digits left")

    monkeypatch.setattr(cli, "run", boom)
    assert main(["--frobenius", printed_h1, "--mode", "jacobian"]) == 4


def test_bad_thread_setting(monkeypatch, printed_h1):
    monkeypatch.setenv(cli.THREADS_ENV, "many")
    assert main(["--frobenius", printed_h1, "--mode", "jacobian"]) == 2


def test_batch_mode(printed_h1, tmp_path, capsys, monkeypatch):
    batch = tmp_path / "jobs.jsonl"
    lines = [
        json.dumps({"frobenius": printed_h1, "mode": "jacobian", "precision": 3}),
        json.dumps({"poly": "x^2 + y", "mode": "surface"}),
        "not json",
    ]
    batch.write_text("\n".join(lines) + "\n")
    monkeypatch.setenv(cli.THREADS_ENV, "1")
    assert main(["--batch", str(batch)]) == 0
    results = [json.loads(ln) for ln in capsys.readouterr().out.splitlines()]
    assert [r["ok"] for r in results] == [True, False, False]
    assert results[0]["report"]["bound"] == 1
    assert results[1]["exit_code"] == 2 and results[2]["error"] == "BadInput"


def test_batch_in_worker_processes(printed_h1, tmp_path):
    batch = tmp_path / "jobs.jsonl"
    job = json.dumps({"frobenius": printed_h1, "mode": "jacobian", "precision": 3})
    batch.write_text(job + "\n" + job + "\n")
    results = cli.run_batch(str(batch), workers=2)
    assert [report_core(r["report"]) for r in results][0] == report_core(results[1]["report"])


def test_module_entry_point(printed_h1):
    proc = subprocess.run([sys.executable, "-m", "crysobs", "--frobenius", printed_h1, "--mode", "jacobian"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["p"] == 31


def test_second_pass_when_kernels_lose_digits(monkeypatch):
    calls = []
    compute = cli.compute_frobenius

    def recording(inp, p, N, **kwargs):
        calls.append(N)
        return compute(inp, p, N, **kwargs)

    monkeypatch.setattr(cli, "compute_frobenius", recording)
    monkeypatch.setattr(cli, "_buffered", lambda *args: 3)
    out = run(RunConfig(poly="y^2 = x^5 + 2*x^3 - x + 3", mode="jacobian", p=11, precision=3))
    wanted = out["provenance"]["precision_wanted"]
    assert calls == [3, wanted] and wanted > 3
    assert out["provenance"]["frobenius_precision"] == wanted
