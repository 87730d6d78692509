"""Backend selection for the iteration kernel and compilation of a problem to a flat plan.

The compiled extension ``_kernels`` is used when it imports; otherwise the
pure-Python ``_kernels_py`` runs the same loop.  Set ``SPLITQVI_PURE_PYTHON=1``
to force the fallback.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _kernels_py
from .operators import Translation, Zero
from .problem import ProblemSpec
from .sets import AffineSet, Ball, Box, Halfspace, WholeSpace

try:
    if os.environ.get("SPLITQVI_PURE_PYTHON"):
        raise ImportError("pure-Python backend forced")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

HAVE_COMPILED = _compiled is not None
BACKENDS = ("compiled", "python")


def default_backend() -> str:
    return "compiled" if HAVE_COMPILED else "python"


def get_runner(backend: str = "auto"):
    if backend == "auto":
        backend = default_backend()
    if backend == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled kernel not built; run `pip install -e .` or use backend='python'")
        return _compiled.run
    if backend == "python":
        return _kernels_py.run
    raise ValueError(f"unknown backend {backend!r}")


@dataclass(frozen=True)
class StagePlan:
    mats: np.ndarray   # (5, n, n): f matrix, g matrix, g inverse, translation matrix, affine-set projector
    vecs: np.ndarray   # (5, n): f shift, g shift, translation shift, set params 1 and 2
    flags: np.ndarray  # (3,) int64: set kind, g is identity, translation is zero
    radius: float      # ball radius or halfspace offset


def compile_stage(f, g, moving, n: int) -> StagePlan:
    mats = np.zeros((5, n, n))
    vecs = np.zeros((5, n))
    flags = np.zeros(3, dtype=np.int64)
    radius = 0.0
    mats[0] = f.linear_part(n)
    vecs[0] = f.offset(n)
    g_ident = g.is_identity()
    flags[1] = int(g_ident)
    if not g_ident:
        d = g.linear_part()
        mats[1] = d
        vecs[1] = g.offset()
        if isinstance(g.inner, Translation):
            mats[2] = np.eye(n)
        else:
            mats[2] = np.linalg.inv(d)
    m = moving.translation
    m_zero = isinstance(m, Zero)
    flags[2] = int(m_zero)
    if not m_zero:
        mats[3] = m.linear_part(n)
        vecs[2] = m.offset(n)
    base = moving.base
    if isinstance(base, WholeSpace):
        flags[0] = _kernels_py.WHOLE
    elif isinstance(base, Box):
        flags[0] = _kernels_py.BOX
        vecs[3], vecs[4] = base.lower, base.upper
    elif isinstance(base, Ball):
        flags[0] = _kernels_py.BALL
        vecs[3] = base.center
        radius = base.radius
    elif isinstance(base, Halfspace):
        flags[0] = _kernels_py.HALFSPACE
        vecs[3] = base.normal
        radius = base.offset
    elif isinstance(base, AffineSet):
        flags[0] = _kernels_py.AFFINE
        mats[4] = base.projector()
        vecs[4] = base.point
    else:
        raise TypeError(f"no kernel support for {type(base).__name__}")
    return StagePlan(mats, vecs, flags, float(radius))


@dataclass(frozen=True)
class Plan:
    a: np.ndarray
    stage1: StagePlan
    stage2: StagePlan


def compile_plan(spec: ProblemSpec) -> Plan:
    return Plan(a=np.ascontiguousarray(spec.A.matrix, dtype=float),
                stage1=compile_stage(spec.f1, spec.g1, spec.C1, spec.n1),
                stage2=compile_stage(spec.f2, spec.g2, spec.C2, spec.n2))


def run_plan(plan: Plan, rho1, rho2, gamma, alphas, x0, tol, backend="auto"):
    """Run the kernel; returns ``(xs, ys, zs, residuals, converged)`` trimmed to the records made."""
    runner = get_runner(backend)
    rows = alphas.shape[0]
    n2, n1 = plan.a.shape
    xs = np.empty((rows, n1))
    ys = np.empty((rows, n1))
    zs = np.empty((rows, n2))
    res = np.empty(rows)
    s1, s2 = plan.stage1, plan.stage2
    count, converged = runner(plan.a, s1.mats, s1.vecs, s1.flags, s1.radius,
                              s2.mats, s2.vecs, s2.flags, s2.radius,
                              float(rho1), float(rho2), float(gamma),
                              np.ascontiguousarray(alphas, dtype=float),
                              np.ascontiguousarray(x0, dtype=float), float(tol),
                              xs, ys, zs, res)
    return xs[:count], ys[:count], zs[:count], res[:count], bool(converged)
