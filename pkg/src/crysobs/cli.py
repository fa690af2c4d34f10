"""Command line pipeline: input, prime, Frobenius, Weil lift, Tate classes, bound."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from threadpoolctl import threadpool_limits

from . import upoly
from .errors import BadInput, CrysobsError, SearchExhausted, SingularReduction
from .frobenius import (
    JACOBIAN_H1,
    SURFACE,
    FrobeniusApprox,
    compute_frobenius,
    export_frobenius,
    frobenius_sign,
    import_frobenius,
    stability_recheck,
)
from .griffiths import HYPERELLIPTIC, HYPERSURFACE, PLANE_CURVE, HypersurfaceInput, PrimeCheck, good_prime_check
from .obstruction import ObstructionReport, accumulate_bound
from .padic import is_prime
from .polyring import GradedPoly, default_variables, parse_polynomial
from .tensor import tensor_square, wedge_square
from .zeta import (
    charpoly_with_precisions,
    cyclotomic_split,
    frobenius_precision_needed,
    min_precision,
    tensor_square_charpoly,
    wedge_square_charpoly,
    weil_lift,
)

log = logging.getLogger(__name__)

THREADS_ENV = "CRYSOBS_THREADS"
MODES = ("surface", "jacobian", "tensor")


@dataclass(frozen=True)
class RunConfig:
    poly: str | None = None
    file: str | None = None
    frobenius: str | None = None
    mode: str = "surface"
    p: int | None = None
    precision: int = 1
    char_bound: int = 3
    vanilla: bool = False
    tensor: bool = False
    emit_frobenius: str | None = None
    recheck: bool = False

    def __post_init__(self):
        sources = [x for x in (self.poly, self.file, self.frobenius) if x is not None]
        if len(sources) != 1:
            raise BadInput("exactly one of poly, file or frobenius is required")
        if self.mode not in MODES:
            raise BadInput(f"mode must be one of {MODES}")
        if self.precision < 1:
            raise BadInput("precision must be positive")

    @property
    def use_tensor(self) -> bool:
        return self.tensor or self.mode == "tensor"


# input -------------------------------------------------------------------------


def parse_input(text: str, mode: str = "surface") -> HypersurfaceInput:
    """Read a hypersurface, plane curve or hyperelliptic curve from text.

    ``lhs = rhs`` is read as ``lhs - rhs``.  In Jacobian modes a homogeneous
    form in three variables is a plane curve; a polynomial in ``x, y`` of
    degree two in ``y`` is a hyperelliptic curve ``c y^2 + h(x) y + k(x)``,
    converted to ``y^2 = h^2 - 4 c k`` (or ``y^2 = -k`` when ``c = 1, h = 0``).
    """
    if "=" in text:
        lhs, rhs = text.split("=", 1)
        text = f"({lhs}) - ({rhs})"
    variables = default_variables(text)
    coeffs = parse_polynomial(text, variables)
    if not coeffs:
        raise BadInput("zero polynomial")
    degrees = {sum(m) for m in coeffs}
    if mode == "surface":
        if len(degrees) != 1:
            raise BadInput("surface input must be homogeneous")
        f = GradedPoly.from_dict(coeffs)
        if f.nvars % 2:
            raise BadInput("surface mode needs an even dimensional hypersurface")
        return HypersurfaceInput(f, HYPERSURFACE, tuple(variables))
    if len(degrees) == 1 and len(variables) == 3:
        return HypersurfaceInput(GradedPoly.from_dict(coeffs), PLANE_CURVE, tuple(variables))
    if len(variables) != 2:
        raise BadInput("Jacobian input is a plane curve in 3 variables or y^2 = f(x) in 2")
    yi = 1 if "y" not in variables else variables.index("y")
    xi = 1 - yi
    parts: dict = {0: {}, 1: {}, 2: {}}
    for mono, c in coeffs.items():
        if mono[yi] > 2:
            raise BadInput("hyperelliptic input must have degree 2 in y")
        parts[mono[yi]][mono[xi]] = c
    dense = {k: [v.get(i, 0) for i in range(max(v, default=-1) + 1)] for k, v in parts.items()}
    c, h, k = dense[2], dense[1], dense[0]
    if len(c) != 1:
        raise BadInput("the y^2 coefficient must be constant")
    if not any(h) and c[0] == 1:
        fx = [-x for x in k]
    else:
        fx = upoly.sub(upoly.mul(h, h), upoly.scale(k, 4 * c[0]))
    return HypersurfaceInput(tuple(fx), HYPERELLIPTIC, tuple(variables))


def next_good_prime(inp: HypersurfaceInput, lower: int = 2, char_bound: int = 3, ceiling: int = 10**6) -> int:
    """Smallest good prime ``p >= max(lower, 2r + 7, n + 2)``."""
    p = max(lower, 2 * inp.twist + 7, inp.n + 2)
    while p <= ceiling:
        if is_prime(p) and good_prime_check(inp, p, char_bound) == PrimeCheck.OK:
            return p
        p += 1
    raise SearchExhausted(f"no good prime below {ceiling}")


def _checked_prime(inp: HypersurfaceInput, config: RunConfig) -> int:
    if config.p is None:
        return next_good_prime(inp, char_bound=config.char_bound)
    status = good_prime_check(inp, config.p, config.char_bound)
    if status == PrimeCheck.SINGULAR_REDUCTION:
        raise SingularReduction(f"reduction modulo {config.p} is singular")
    if status != PrimeCheck.OK:
        raise BadInput(f"p = {config.p} rejected: {status.value}")
    return config.p


def _buffered(requested: int, m: int, p: int, r: int) -> int:
    log_m = 0
    while p**log_m < m:
        log_m += 1
    return requested + log_m + r + 1


# pipeline ----------------------------------------------------------------------


def analyse_surface(F: FrobeniusApprox, precision: int, vanilla: bool = False) -> ObstructionReport:
    m, q, r = F.dimension, F.p, F.r
    sign = frobenius_sign(F)
    cp, prec = charpoly_with_precisions(F.matrix.entries, q, F.N, F.weights)
    lifted = weil_lift(cp, m, q, r, sign, F.N, prec)
    full = lifted.charpoly()
    primitive, rem = upoly.divmod_monic(full, [-(q**r), 1])
    if rem:
        raise BadInput("polarization eigenvalue missing from the characteristic polynomial")
    split = cyclotomic_split(primitive, q**r)
    report = accumulate_bound(split, F, precision, vanilla)
    report.provenance["weil_polynomial"] = str(lifted)
    return report


def analyse_jacobian(F: FrobeniusApprox, precision: int, vanilla: bool = False, tensor: bool = False) -> ObstructionReport:
    m, q = F.dimension, F.p
    cp, prec = charpoly_with_precisions(F.matrix.entries, q, F.N, F.weights)
    lifted = weil_lift(cp, m, q, 0, 1, F.N, prec, curve=True)
    if tensor:
        induced, h2 = tensor_square(F), tensor_square_charpoly(lifted.charpoly())
    else:
        induced, h2 = wedge_square(F), wedge_square_charpoly(lifted.charpoly())
    split = cyclotomic_split(h2, q)
    report = accumulate_bound(split, induced.frobenius, precision, vanilla, tensor)
    report.provenance["weil_polynomial"] = str(lifted)
    return report


def analyse_h2(F: FrobeniusApprox, precision: int, vanilla: bool = False) -> ObstructionReport:
    cp, prec = charpoly_with_precisions(F.matrix.entries, F.p, F.N, F.weights)
    lifted = weil_lift(cp, F.dimension, F.p, F.r, frobenius_sign(F), F.N, prec)
    split = cyclotomic_split(lifted.charpoly(), F.p**F.r)
    report = accumulate_bound(split, F, precision, vanilla)
    report.provenance["weil_polynomial"] = str(lifted)
    return report


def _analyse(F: FrobeniusApprox, config: RunConfig) -> ObstructionReport:
    if F.mode == SURFACE:
        return analyse_surface(F, config.precision, config.vanilla)
    if F.mode == JACOBIAN_H1:
        return analyse_jacobian(F, config.precision, config.vanilla, config.use_tensor)
    return analyse_h2(F, config.precision, config.vanilla)


def frobenius_for(inp: HypersurfaceInput, p: int, config: RunConfig) -> FrobeniusApprox:
    """Compute Frobenius to the precision the lift and the requested digits need.

    Kernel losses are only known after a first analysis; ``run`` recomputes
    once at ``precision_wanted`` when they exceed this estimate.
    """
    if inp.mode == HYPERSURFACE:
        from .griffiths import griffiths_basis

        basis = griffiths_basis(inp, p)
        r = inp.twist
        weights = (r,) + basis.weights
        N = max(frobenius_precision_needed(weights, p, r, config.precision), _buffered(config.precision, len(weights), p, r))
    else:
        g = inp.genus
        m2 = 4 * g * g if config.use_tensor else g * (2 * g - 1)
        N = max(min_precision(2 * g, p, 0, config.precision, curve=True), _buffered(config.precision, m2, p, 1))
    log.info("computing Frobenius at p = %d to %d digits", p, N)
    return compute_frobenius(inp, p, N)


def run(config: RunConfig) -> dict:
    start = time.perf_counter()
    extra: dict = {}
    if config.frobenius is not None:
        F = import_frobenius(config.frobenius)
        p = F.p
        extra["input"] = "frobenius"
    else:
        text = config.poly
        if text is None:
            with open(config.file) as fh:
                text = fh.read().strip()
        jac = config.mode in ("jacobian", "tensor")
        inp = parse_input(text, "jacobian" if jac else "surface")
        p = _checked_prime(inp, config)
        F = frobenius_for(inp, p, config)
        report = _analyse(F, config)
        wanted = report.provenance["precision_wanted"]
        if wanted > F.N:
            log.info("kernel losses call for %d digits; recomputing Frobenius", wanted)
            F = compute_frobenius(inp, p, wanted)
        extra["input"] = inp.mode
        extra["variable_order"] = list(inp.variables)
        if config.recheck:
            extra["stability_recheck"] = stability_recheck(inp, F)
    if config.emit_frobenius:
        export_frobenius(F, config.emit_frobenius)
    report = _analyse(F, config)
    report.provenance.update(extra)
    out = report.to_json()
    out["timestamp"] = {"seconds": round(time.perf_counter() - start, 3)}
    return out


# command line -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="crysobs", description="Upper bounds on geometric Picard numbers via crystalline obstructions.")
    src = ap.add_mutually_exclusive_group()
    src.add_argument("--poly", help="polynomial text, e.g. 'x^4 + y^4 + z^4 + w^4'")
    src.add_argument("--file", help="file holding the polynomial")
    src.add_argument("--frobenius", help="Frobenius matrix JSON to analyse")
    src.add_argument("--batch", help="file of newline-delimited JSON configs")
    ap.add_argument("--mode", choices=MODES, default="surface")
    ap.add_argument("--p", type=int, help="prime (default: first good prime)")
    ap.add_argument("--precision", type=int, default=1, help="requested p-adic digits")
    ap.add_argument("--char-bound", type=int, default=3)
    ap.add_argument("--vanilla", action="store_true", help="use the combined Tate space instead of the per factor split")
    ap.add_argument("--tensor", action="store_true", help="bound the endomorphism algebra via H^1 (x) H^1")
    ap.add_argument("--emit-frobenius", metavar="PATH")
    ap.add_argument("--recheck", action="store_true", help="recompute with more terms and digits and compare")
    ap.add_argument("--json-out", metavar="PATH")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def _config_from(ns: argparse.Namespace | dict) -> RunConfig:
    d = vars(ns) if isinstance(ns, argparse.Namespace) else dict(ns)
    d = {k.replace("-", "_"): v for k, v in d.items()}
    fields = RunConfig.__dataclass_fields__
    unknown = set(d) - set(fields) - {"batch", "json_out", "verbose"}
    if unknown:
        raise BadInput(f"unknown config keys: {sorted(unknown)}")
    return RunConfig(**{k: v for k, v in d.items() if k in fields and v is not None})


def _batch_item(line: str) -> dict:
    try:
        return {"ok": True, "report": run(_config_from(json.loads(line)))}
    except CrysobsError as exc:
        return {"ok": False, "error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}
    except json.JSONDecodeError as exc:
        return {"ok": False, "error": "BadInput", "message": str(exc), "exit_code": BadInput.exit_code}


def _threads() -> int | None:
    value = os.environ.get(THREADS_ENV)
    if not value:
        return None
    try:
        return max(1, int(value))
    except ValueError as exc:
        raise BadInput(f"{THREADS_ENV} must be an integer") from exc


def run_batch(path: str, workers: int | None = None) -> list[dict]:
    with open(path) as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if workers and workers > 1 and len(lines) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_batch_item, lines))
    return [_batch_item(ln) for ln in lines]


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        threads = _threads()
        with threadpool_limits(limits=threads):
            if args.batch:
                results = run_batch(args.batch, threads)
                text = "\n".join(json.dumps(r, sort_keys=True) for r in results)
                code = 0
            else:
                report = run(_config_from(args))
                text = json.dumps(report, sort_keys=True)
                code = 0
    except CrysobsError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return exc.exit_code
    if args.json_out:
        with open(args.json_out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
