import os

import pytest

from crysobs.cli import parse_input

GENUS2 = "y^2 = 4*x^5 - 36*x^4 + 56*x^3 - 76*x^2 + 44*x - 23"
GENUS3 = "x*y^3 + x^3*z - x*y^2*z + x^2*z^2 + y^2*z^2 - y*z^3"
QUARTIC_CM = "-y^4 + x^3*z + 2*x^2*z^2 - x*z^3"
K3 = "y^4 - x^3*z + y*z^3 + z*w^3 + w^4"

P31 = 31

# printed Frobenius matrices, modulo 31^3
GENUS2_H1 = [
    [P31 * 482, P31 * 284, 16241, 3075],
    [P31 * 386, P31 * 886, 2644, 12126],
    [P31 * 284, P31 * 659, 6336, 9750],
    [P31 * 194, P31 * 876, 27408, 10841],
]
GENUS2_H2 = [
    [P31**2 * 19, P31 * 660, P31 * 776, P31 * 843, P31 * 506, 22499],
    [P31**2 * 18, P31 * 250, P31 * 459, P31 * 270, P31 * 683, 10699],
    [P31**2 * 3, P31 * 154, P31 * 636, P31 * 261, P31**2 * 24, 3010],
    [P31**2 * 22, P31 * 557, P31 * 664, P31 * 392, P31**2 * 23, 10438],
    [P31**2 * 30, P31 * 77, P31 * 516, P31**2 * 26, P31 * 449, 3650],
    [P31**2 * 7, P31 * 668, P31 * 509, P31 * 277, P31 * 513, 17591],
]
GENUS3_H1 = [
    [P31 * 104, P31 * 218, P31 * 7, 27783, 2569, 7195],
    [P31 * 351, P31 * 494, P31 * 690, 19524, 8323, 1421],
    [P31 * 50, P31 * 237, P31 * 829, 13467, 20050, 19610],
    [P31 * 19, P31 * 733, P31 * 377, 20592, 23805, 15085],
    [P31 * 482, P31 * 610, P31 * 793, 12397, 28951, 6604],
    [P31 * 710, P31 * 860, P31 * 689, 19294, 18382, 25376],
]
GENUS3_PI_T = [[P31 * 240, 0, P31], [P31 * 515, P31, 0], [0, 0, 0]]

EXTENDED = os.environ.get("ARTIFACT_EXTENDED") == "1"


def frobenius_json(entries, mode, weights, p=31, N=3, r=None):
    if r is None:
        r = 1 if mode in ("surface", "jacobian-h2") else 0
    mod = p**N
    return {"p": p, "N": N, "r": r, "mode": mode, "weights": list(weights), "entries": [[x % mod for x in row] for row in entries]}


def plane_curve_points(coeffs, p):
    """Projective points of a plane curve over F_p, by enumeration."""

    def ev(x, y, z):
        return sum(c * x**a * y**b * z**e for (a, b, e), c in coeffs.items()) % p

    n = sum(1 for x in range(p) for y in range(p) if ev(x, y, 1) == 0)
    n += sum(1 for x in range(p) if ev(x, 1, 0) == 0)
    return n + (ev(1, 0, 0) == 0)


def hyperelliptic_points(fx, p):
    """Points of the smooth model of ``y^2 = fx`` over F_p, odd degree only."""
    n = 0
    for x in range(p):
        v = sum(c * x**i for i, c in enumerate(fx)) % p
        n += 1 if v == 0 else (2 if pow(v, (p - 1) // 2, p) == 1 else 0)
    return n + 1


@pytest.fixture(scope="session")
def genus2_input():
    return parse_input(GENUS2, "jacobian")


@pytest.fixture(scope="session")
def genus3_input():
    return parse_input(GENUS3, "jacobian")


def pytest_collection_modifyitems(config, items):
    if EXTENDED:
        return
    skip = pytest.mark.skip(reason="extended tier; set ARTIFACT_EXTENDED=1")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)


# acceptance summary ---------------------------------------------------------------

_OUTCOMES: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _OUTCOMES.setdefault(number, {"title": title, "passed": [], "failed": [], "skipped": []})
    if rep.when == "call" or rep.outcome != "passed":
        entry[rep.outcome].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        entry = _OUTCOMES[number]
        if entry["failed"]:
            status = "FAIL"
        elif entry["passed"]:
            status = "PASS"
        else:
            status = "SKIP"
        detail = f" (failed: {', '.join(entry['failed'])})" if entry["failed"] else ""
        terminalreporter.write_line(f"criterion {number} {entry['title']}: {status}{detail}")
