"""Independent high-accuracy reference solver.

Shares no iteration code with :mod:`splitqvi.solver`.  It uses the fact
that the first-stage fixed-point map

    T(x) = g1^{-1}( P_{C1(x)}( g1(x) - rho f1(x) ) )

is a contraction whenever its factor ``theta1 < 1``, so the solution is
pinned down by the first stage alone.  Box, whole-space, halfspace and
affine-set stages are solved directly by enumerating active constraints
(small dimension only); otherwise ``T`` is iterated.  The answer is then
checked against both stages.
"""
from __future__ import annotations

import itertools

import numpy as np

from .problem import ProblemSpec
from .sets import AffineSet, Ball, Box, Halfspace, WholeSpace

DIRECT_MAX_DIM = 6
PICARD_TOL = 1e-13
PICARD_MAX_ITERS = 200_000
ACCEPT_RESIDUAL = 1e-9


class OracleFailure(RuntimeError):
    """The oracle could not produce a verified solution."""


def _affine_parts(op, n):
    return np.asarray(op.linear_part(n), dtype=float), np.asarray(op.offset(n), dtype=float)


class _Stage:
    """Affine data of one stage: f = M x + q, g = D x + d, m = L x + c."""

    def __init__(self, f, g, moving, n):
        self.n = n
        self.M, self.q = _affine_parts(f, n)
        self.D, self.d = _affine_parts(g.inner, n)
        self.L, self.c = _affine_parts(moving.translation, n)
        self.base = moving.base

    def g(self, x):
        return self.D @ x + self.d

    def f(self, x):
        return self.M @ x + self.q

    def shift(self, x):
        return self.L @ x + self.c

    def proj_base(self, u):
        b = self.base
        if isinstance(b, WholeSpace):
            return u
        if isinstance(b, Box):
            return np.clip(u, b.lower, b.upper)
        if isinstance(b, Ball):
            v = u - b.center
            r = np.sqrt(v @ v)
            return u if r <= b.radius else b.center + v * (b.radius / r)
        if isinstance(b, Halfspace):
            s = b.normal @ u - b.offset
            return u if s <= 0 else u - s * b.normal / (b.normal @ b.normal)
        if isinstance(b, AffineSet):
            coef, *_ = np.linalg.lstsq(b.basis, u - b.point, rcond=None)
            return b.point + b.basis @ coef
        raise TypeError(type(b).__name__)

    def gap(self, x, rho):
        gx = self.g(x)
        mx = self.shift(x)
        return gx - (mx + self.proj_base(gx - rho * self.f(x) - mx))

    def picard_map(self, x, rho):
        gx = self.g(x)
        mx = self.shift(x)
        w = mx + self.proj_base(gx - rho * self.f(x) - mx)
        return np.linalg.solve(self.D, w - self.d)


def _best_rho(st: _Stage):
    m, d = st.M, st.D
    alpha = np.linalg.eigvalsh(0.5 * (d.T @ m + m.T @ d))[0]
    beta = np.linalg.svd(m, compute_uv=False)[0]
    if alpha <= 0 or beta == 0:
        return 1.0
    return alpha / beta ** 2


def _direct_box(st: _Stage):
    """Enumerate lower/upper/free for each coordinate of ``u = g(x) - m(x)``."""
    n = st.n
    b = st.base
    lo, hi = b.lower, b.upper
    gm = st.D - st.L           # u = gm x + (d - c)
    off = st.d - st.c
    best = None
    for pattern in itertools.product((0, 1, 2), repeat=n):
        rows, rhs = [], []
        for i, p in enumerate(pattern):
            if p == 0:
                if not np.isfinite(lo[i]):
                    break
                rows.append(gm[i]); rhs.append(lo[i] - off[i])
            elif p == 1:
                if not np.isfinite(hi[i]):
                    break
                rows.append(gm[i]); rhs.append(hi[i] - off[i])
            else:
                rows.append(st.M[i]); rhs.append(-st.q[i])
        else:
            try:
                x = np.linalg.solve(np.array(rows), np.array(rhs))
            except np.linalg.LinAlgError:
                continue
            u = gm @ x + off
            fx = st.f(x)
            scale = 1.0 + np.abs(u).max() + np.abs(fx).max()
            tol = 1e-9 * scale
            ok = np.all(u >= lo - tol) and np.all(u <= hi + tol)
            for i, p in enumerate(pattern):
                if p == 0:
                    ok = ok and fx[i] >= -tol
                elif p == 1:
                    ok = ok and fx[i] <= tol
            if ok:
                score = np.linalg.norm(st.gap(x, 1.0))
                if best is None or score < best[0]:
                    best = (score, x)
    return None if best is None else best[1]


def _direct_halfspace(st: _Stage):
    n = st.n
    b = st.base
    gm = st.D - st.L
    off = st.d - st.c
    cands = []
    try:
        cands.append(np.linalg.solve(st.M, -st.q))          # constraint inactive
    except np.linalg.LinAlgError:
        pass
    # active: <normal, u> = offset and f(x) = -lam * normal
    k = np.zeros((n + 1, n + 1))
    k[:n, :n] = st.M
    k[:n, n] = b.normal
    k[n, :n] = b.normal @ gm
    rhs = np.concatenate([-st.q, [b.offset - b.normal @ off]])
    try:
        sol = np.linalg.solve(k, rhs)
        if sol[n] >= -1e-12:
            cands.append(sol[:n])
    except np.linalg.LinAlgError:
        pass
    return _pick(st, cands)


def _direct_affine_set(st: _Stage):
    b = st.base
    n = st.n
    gm = st.D - st.L
    off = st.d - st.c
    proj_perp = np.eye(n) - b.projector()
    # u - point in the direction space and f(x) orthogonal to it
    k = np.vstack([proj_perp @ gm, b.basis.T @ st.M])
    rhs = np.concatenate([proj_perp @ (b.point - off), -b.basis.T @ st.q])
    x, *_ = np.linalg.lstsq(k, rhs, rcond=None)
    return _pick(st, [x])


def _direct_whole(st: _Stage):
    try:
        return _pick(st, [np.linalg.solve(st.M, -st.q)])
    except np.linalg.LinAlgError:
        return None


def _pick(st, cands):
    best = None
    for x in cands:
        r = np.linalg.norm(st.gap(x, 1.0))
        if best is None or r < best[0]:
            best = (r, x)
    return None if best is None else best[1]


def _picard(st: _Stage, x0):
    rho = _best_rho(st)
    x = x0.copy()
    for _ in range(PICARD_MAX_ITERS):
        x_new = st.picard_map(x, rho)
        if np.linalg.norm(x_new - x) <= PICARD_TOL * (1.0 + np.linalg.norm(x)):
            return x_new
        x = x_new
    raise OracleFailure("first-stage fixed-point iteration did not settle")


def _polish(st: _Stage, x, sweeps=3):
    rho = _best_rho(st)
    for _ in range(sweeps):
        x = st.picard_map(x, rho)
    return x


def oracle_solve(spec: ProblemSpec, method: str = "auto") -> np.ndarray:
    """Reference solution of ``spec``; raises :class:`OracleFailure` if unverified.

    ``method`` is ``"direct"``, ``"picard"`` or ``"auto"`` (direct when the
    first-stage set allows it and the dimension is small).
    """
    n1, n2 = spec.n1, spec.n2
    s1 = _Stage(spec.f1, spec.g1, spec.C1, n1)
    s2 = _Stage(spec.f2, spec.g2, spec.C2, n2)
    x = None
    base = s1.base
    if method in ("auto", "direct") and n1 <= DIRECT_MAX_DIM:
        if isinstance(base, Box):
            x = _direct_box(s1)
        elif isinstance(base, WholeSpace):
            x = _direct_whole(s1)
        elif isinstance(base, Halfspace):
            x = _direct_halfspace(s1)
        elif isinstance(base, AffineSet):
            x = _direct_affine_set(s1)
        if x is not None:
            x = _polish(s1, x)
    if x is None:
        if method == "direct":
            raise OracleFailure("no direct method for this instance")
        x = _picard(s1, np.zeros(n1))
    ax = spec.A.matrix @ x
    r1 = np.linalg.norm(s1.gap(x, 1.0))
    r2 = np.linalg.norm(s2.gap(ax, 1.0))
    if not np.isfinite(r1 + r2) or r1 + r2 > ACCEPT_RESIDUAL:
        raise OracleFailure(f"candidate fails verification (stage residuals {r1:.3g}, {r2:.3g})")
    return x
