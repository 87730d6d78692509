"""Relaxed projection iteration for split general quasi-variational inequalities.

One step from ``x`` computes

    g1(y) = P_{C1(x)}(g1(x) - rho1 f1(x))
    g2(z) = P_{C2(Ay)}(g2(Ay) - rho2 f2(Ay))
    x+    = (1 - a) x + a (y + gamma A^T (z - Ay))

Fixing ``g_i = I`` and/or ``C_i(x) = C_i`` gives the usual special cases; the
update executed is always this one.
"""
from __future__ import annotations

import csv
import enum
import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .hilbert import as_vector
from .kernels import compile_plan, run_plan
from .operators import invert_g
from .problem import ProblemSpec, SolverParams

log = logging.getLogger(__name__)

CSV_COLUMNS = ("iter", "residual", "error", "bound_factor")


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERS = "MaxIters"


class Variant(str, enum.Enum):
    GENERAL = "Alg2.1"        # moving sets, general g
    IDENTITY_G = "Alg2.2"     # g = I, moving sets
    FIXED_SETS = "Alg2.3"     # fixed sets, general g
    SPLIT_VI = "Alg2.4"       # fixed sets and g = I
    MANN_QVIP = "Alg2.5"      # single QVIP


def select_variant(spec: ProblemSpec) -> Variant:
    """Tag an instance with the special case it belongs to (reporting only)."""
    g_ident = spec.g1.is_identity() and spec.g2.is_identity()
    fixed = spec.C1.is_fixed() and spec.C2.is_fixed()
    if g_ident and spec.n1 == spec.n2 and spec.A.is_identity():
        if spec.is_inert_second_stage() or (spec.f2 == spec.f1 and spec.C2 == spec.C1):
            return Variant.MANN_QVIP
    if g_ident and fixed:
        return Variant.SPLIT_VI
    if g_ident:
        return Variant.IDENTITY_G
    if fixed:
        return Variant.FIXED_SETS
    return Variant.GENERAL


def _inner_stage(f, g, moving, rho, x):
    gx = g.evaluate(x)
    w = moving.project(x, gx - rho * f.evaluate(x))
    return gx, w


def step(spec: ProblemSpec, params: SolverParams, x, n: int = 0):
    """One iteration from ``x^n``; returns ``(x^{n+1}, y^n, z^n)``."""
    x = as_vector(x, spec.n1)
    alpha = params.alpha_at(n)
    _, w1 = _inner_stage(spec.f1, spec.g1, spec.C1, params.rho1, x)
    y = invert_g(spec.g1, w1)
    ay = spec.A.apply(y)
    _, w2 = _inner_stage(spec.f2, spec.g2, spec.C2, params.rho2, ay)
    z = invert_g(spec.g2, w2)
    x_next = (1.0 - alpha) * x + alpha * (y + params.gamma * spec.A.adjoint_apply(z - ay))
    return x_next, y, z


def residual(spec: ProblemSpec, x, rho1=None, rho2=None) -> float:
    """Fixed-point residual ``|g1(x) - P_{C1(x)}(...)| + |g2(Ax) - P_{C2(Ax)}(...)|``.

    Zero exactly at solutions.  Step sizes default to the instance's stored
    parameters.
    """
    if rho1 is None or rho2 is None:
        p = spec.params()
        rho1 = p.rho1 if rho1 is None else rho1
        rho2 = p.rho2 if rho2 is None else rho2
    x = as_vector(x, spec.n1)
    gx, w1 = _inner_stage(spec.f1, spec.g1, spec.C1, rho1, x)
    ax = spec.A.apply(x)
    gax, w2 = _inner_stage(spec.f2, spec.g2, spec.C2, rho2, ax)
    return float(np.linalg.norm(gx - w1) + np.linalg.norm(gax - w2))


@dataclass
class IterateTrace:
    """Per-iteration record of a run; row ``n`` describes ``x^n``.

    ``error`` is NaN without a known solution and ``bound_factor`` is NaN
    without a contraction factor.  ``bound_factor[n] = 1 - alpha^n (1 - theta)``
    bounds the error ratio from ``x^n`` to ``x^{n+1}``.
    """

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    residual: np.ndarray
    error: np.ndarray
    bound_factor: np.ndarray
    alphas: np.ndarray
    params: SolverParams
    theta: float = float("nan")
    header: dict = field(default_factory=dict)

    def __len__(self):
        return self.residual.shape[0]

    @property
    def iters(self) -> np.ndarray:
        return np.arange(len(self))

    @property
    def steps(self) -> int:
        return len(self) - 1

    def contraction_violations(self, slack: float = 1e-9) -> int:
        """Count steps with ``|x^{n+1}-x*| > bound_factor[n] |x^n - x*| + slack``."""
        if len(self) < 2 or np.isnan(self.error).any() or np.isnan(self.bound_factor).any():
            return 0
        lhs = self.error[1:]
        rhs = self.bound_factor[:-1] * self.error[:-1] + slack
        return int(np.count_nonzero(lhs > rhs))

    def write_csv(self, path, coords: bool = False) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            head = list(CSV_COLUMNS)
            if coords:
                head += [f"x{i}" for i in range(self.x.shape[1])]
                head += [f"y{i}" for i in range(self.y.shape[1])]
                head += [f"z{i}" for i in range(self.z.shape[1])]
            w.writerow(head)
            for n in range(len(self)):
                row = [n, repr(float(self.residual[n])), repr(float(self.error[n])),
                       repr(float(self.bound_factor[n]))]
                if coords:
                    row += [repr(float(v)) for v in self.x[n]]
                    row += [repr(float(v)) for v in self.y[n]]
                    row += [repr(float(v)) for v in self.z[n]]
                w.writerow(row)


class SolveResult(NamedTuple):
    x: np.ndarray
    trace: IterateTrace
    status: Status


def _finish(spec, params, xs, ys, zs, res, converged, alphas, theta):
    count = res.shape[0]
    if spec.known_solution is not None:
        err = np.linalg.norm(xs - spec.known_solution, axis=1)
    else:
        err = np.full(count, np.nan)
    if theta is not None and np.isfinite(theta):
        bound = 1.0 - alphas[:count] * (1.0 - theta)
    else:
        bound = np.full(count, np.nan)
        theta = float("nan")
    trace = IterateTrace(x=xs, y=ys, z=zs, residual=res, error=err, bound_factor=bound,
                         alphas=alphas[:count].copy(), params=params, theta=float(theta),
                         header={"params": params.to_dict(), "variant": select_variant(spec).value})
    status = Status.CONVERGED if converged else Status.MAX_ITERS
    return SolveResult(xs[-1].copy(), trace, status)


def solve(spec: ProblemSpec, params: SolverParams = None, x0=None, theta=None,
          backend: str = "auto") -> SolveResult:
    """Iterate until the residual drops to ``params.tol`` or ``params.max_iters`` steps.

    ``backend`` selects the compiled kernel (``"compiled"``), its pure-Python
    twin (``"python"``), whichever is available (``"auto"``), or the
    object-level :func:`step` loop (``"reference"``).  Parameters are not
    validated here; run :func:`splitqvi.certify.certify_spec` first.
    """
    params = spec.params() if params is None else params
    x0 = np.zeros(spec.n1) if x0 is None else as_vector(x0, spec.n1)
    alphas = params.alphas(params.max_iters + 1)
    if backend == "reference":
        xs, ys, zs, res, converged = _reference_loop(spec, params, x0)
    else:
        plan = compile_plan(spec)
        xs, ys, zs, res, converged = run_plan(plan, params.rho1, params.rho2, params.gamma,
                                              alphas, x0, params.tol, backend=backend)
    log.debug("solve finished after %d steps, residual %.3e", res.shape[0] - 1, res[-1])
    return _finish(spec, params, xs, ys, zs, res, converged, alphas, theta)


def _reference_loop(spec, params, x0):
    xs, ys, zs, res = [], [], [], []
    x = x0.copy()
    converged = False
    for n in range(params.max_iters + 1):
        x_next, y, z = step(spec, params, x, n)
        r = residual(spec, x, params.rho1, params.rho2)
        xs.append(x)
        ys.append(y)
        zs.append(z)
        res.append(r)
        if r <= params.tol:
            converged = True
            break
        x = x_next
    return np.array(xs), np.array(ys), np.array(zs), np.array(res), converged
