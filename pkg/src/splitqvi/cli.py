"""Command-line interface: ``splitqvi {solve,certify,generate,verify}``.

Exit codes: 0 success / certified, 1 usage error, 2 parse error,
3 rejected certificate or failed verification, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import io
from .certify import certify_spec
from .generate import FAMILIES, GenerationError, GeneratorConfig, generate
from .kernels import HAVE_COMPILED
from .operators import NoConvergenceError, SingularOperatorError
from .oracle import OracleFailure, oracle_solve
from .solver import residual, select_variant, solve

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_REJECTED, EXIT_NUMERIC = 0, 1, 2, 3, 4

ORACLE_TOL = 1e-6
KNOWN_RESIDUAL_TOL = 1e-8

log = logging.getLogger("splitqvi")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_params(p):
    p.add_argument("--rho1", type=float)
    p.add_argument("--rho2", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--alpha-schedule", choices=("constant", "harmonic"), dest="schedule")
    p.add_argument("--alpha", type=float, help="constant relaxation value in (0, 1)")
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iters", type=int, dest="max_iters")
    p.add_argument("--mode", choices=("theorem", "direct"), default="theorem",
                   help="certification rule (default: theorem)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="splitqvi", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="run the relaxed projection iteration")
    p.add_argument("spec")
    _add_params(p)
    p.add_argument("--x0", type=float, nargs="+", help="starting point (default: zero)")
    p.add_argument("--trace", help="write the iteration trace as CSV")
    p.add_argument("--coords", action="store_true", help="include iterate coordinates in the CSV")
    p.add_argument("--strict", action="store_true", help="refuse to run unless certified")
    p.add_argument("--backend", choices=("auto", "compiled", "python", "reference"), default="auto")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("certify", help="check step parameters against the contraction conditions")
    p.add_argument("spec")
    _add_params(p)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("generate", help="write a random instance with a known solution")
    p.add_argument("--family", choices=FAMILIES, default="interior_zero")
    p.add_argument("--dims", type=int, nargs=2, default=(3, 2), metavar=("N1", "N2"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("verify", help="certify, solve and cross-check against the oracle")
    p.add_argument("spec")
    _add_params(p)
    p.add_argument("--json", action="store_true")
    return parser


def _params(spec, args):
    keys = ("rho1", "rho2", "gamma", "schedule", "alpha", "tol", "max_iters")
    overrides = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    return spec.params(**overrides)


@dataclass
class RunReport:
    verdict: str
    theta: float
    variant: str
    status: str
    iterations: int
    final_residual: float
    final_error: float
    contraction_violations: int
    oracle_distance: float
    known_solution_residual: float
    wall_time: float
    failures: list

    @property
    def passed(self) -> bool:
        return not self.failures

    def render(self) -> str:
        lines = [f"{k}: {v}" for k, v in asdict(self).items() if k != "failures"]
        lines.append("result: " + ("PASS" if self.passed else "FAIL"))
        lines += [f"failed: {f}" for f in self.failures]
        return "\n".join(lines)


def verify(spec, params, mode="theorem") -> RunReport:
    t0 = time.perf_counter()
    cert = certify_spec(spec, params, mode=mode)
    theta = cert.theta if cert.certified else None
    with ThreadPoolExecutor(max_workers=2) as pool:
        fut_solve = pool.submit(solve, spec, params, None, theta)
        fut_oracle = pool.submit(oracle_solve, spec)
        result = fut_solve.result()
        try:
            ref = fut_oracle.result()
            oracle_err = None
        except OracleFailure as exc:
            ref, oracle_err = None, str(exc)
    tr = result.trace
    failures = []
    if not cert.certified:
        failures += [f"certificate: {v}" for v in cert.violations]
    if result.status != "Converged":
        failures.append(f"solver stopped after {tr.steps} steps without reaching tol {params.tol:g}")
    violations = tr.contraction_violations()
    if violations:
        failures.append(f"{violations} contraction-bound violations")
    known_res = float("nan")
    final_err = float("nan")
    if spec.known_solution is not None:
        known_res = residual(spec, spec.known_solution, params.rho1, params.rho2)
        final_err = float(tr.error[-1])
        if known_res > KNOWN_RESIDUAL_TOL:
            failures.append(f"known solution has residual {known_res:.3g}")
        if final_err > ORACLE_TOL:
            failures.append(f"final error {final_err:.3g} exceeds {ORACLE_TOL:g}")
    if ref is None:
        dist = float("nan")
        failures.append(f"oracle: {oracle_err}")
    else:
        dist = float(np.linalg.norm(result.x - ref))
        if dist > ORACLE_TOL:
            failures.append(f"solver and oracle differ by {dist:.3g}")
    return RunReport(verdict=cert.verdict, theta=cert.theta, variant=select_variant(spec).value,
                     status=result.status.value, iterations=tr.steps,
                     final_residual=float(tr.residual[-1]), final_error=final_err,
                     contraction_violations=violations, oracle_distance=dist,
                     known_solution_residual=known_res,
                     wall_time=time.perf_counter() - t0, failures=failures)


def _cmd_certify(args):
    spec = io.load(args.spec)
    cert = certify_spec(spec, _params(spec, args), mode=args.mode)
    print(json.dumps(cert.to_dict(), indent=2) if args.json else cert.render())
    return EXIT_OK if cert.certified else EXIT_REJECTED


def _cmd_solve(args):
    spec = io.load(args.spec)
    params = _params(spec, args)
    cert = certify_spec(spec, params, mode=args.mode)
    if args.strict and not cert.certified:
        print(cert.render(), file=sys.stderr)
        print("refusing to solve with uncertified parameters (--strict)", file=sys.stderr)
        return EXIT_REJECTED
    x0 = None if args.x0 is None else np.array(args.x0)
    theta = cert.theta if cert.certified else None
    result = solve(spec, params, x0, theta=theta, backend=args.backend)
    tr = result.trace
    if args.trace:
        tr.write_csv(args.trace, coords=args.coords)
    summary = {"status": result.status.value, "iterations": tr.steps,
               "residual": float(tr.residual[-1]), "error": float(tr.error[-1]),
               "verdict": cert.verdict, "theta": cert.theta, "x": result.x.tolist()}
    if args.json:
        print(json.dumps(summary, indent=2))
    else:
        for k, v in summary.items():
            print(f"{k}: {v}")
    return EXIT_OK if result.status == "Converged" else EXIT_NUMERIC


def _cmd_generate(args):
    cfg = GeneratorConfig(n1=args.dims[0], n2=args.dims[1], seed=args.seed, family=args.family)
    spec = generate(cfg)
    io.save(spec, args.output)
    print(f"wrote {args.output}: dims {spec.dims}, theta {spec.meta['theta']:.6g}")
    return EXIT_OK


def _cmd_verify(args):
    spec = io.load(args.spec)
    report = verify(spec, _params(spec, args), mode=args.mode)
    print(json.dumps(asdict(report), indent=2) if args.json else report.render())
    return EXIT_OK if report.passed else EXIT_REJECTED


COMMANDS = {"solve": _cmd_solve, "certify": _cmd_certify,
            "generate": _cmd_generate, "verify": _cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    log.debug("compiled kernel available: %s", HAVE_COMPILED)
    try:
        return COMMANDS[args.command](args)
    except io.SpecParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NoConvergenceError, SingularOperatorError, GenerationError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        # invalid parameter values from flags
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
