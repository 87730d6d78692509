"""Pure-Python implementation of the relaxed split iteration over a flat plan.

Mirrors ``_kernels.pyx`` operation for operation; used whenever the compiled
module is unavailable.
"""
import numpy as np

WHOLE, BOX, BALL, HALFSPACE, AFFINE = 0, 1, 2, 3, 4

# slots in a stage's (5, n, n) matrix stack and (5, n) vector stack
MF, DG, DINV, LM, Q = range(5)
QF, DGV, CM, S1, S2 = range(5)


def _project(kind, s1, s2, sr, q, u):
    if kind == BOX:
        return np.minimum(np.maximum(u, s1), s2)
    if kind == BALL:
        d = u - s1
        dist = np.sqrt(d @ d)
        if dist <= sr:
            return u
        return s1 + (sr / dist) * d
    if kind == HALFSPACE:
        excess = s1 @ u - sr
        if excess <= 0.0:
            return u
        return u - (excess / (s1 @ s1)) * s1
    if kind == AFFINE:
        return s2 + q @ (u - s2)
    return u


def _stage(mats, vecs, flags, sr, rho, x):
    """Return ``(g(x), w, y)`` where ``w = P_{C(x)}(g(x) - rho f(x))`` and ``g(y) = w``."""
    kind, g_ident, m_zero = flags[0], flags[1], flags[2]
    fx = mats[MF] @ x + vecs[QF]
    gx = x if g_ident else mats[DG] @ x + vecs[DGV]
    u = gx - rho * fx
    if m_zero:
        w = _project(kind, vecs[S1], vecs[S2], sr, mats[Q], u)
    else:
        mx = mats[LM] @ x + vecs[CM]
        w = mx + _project(kind, vecs[S1], vecs[S2], sr, mats[Q], u - mx)
    y = w if g_ident else mats[DINV] @ (w - vecs[DGV])
    return gx, w, y


def run(a, mats1, vecs1, flags1, sr1, mats2, vecs2, flags2, sr2,
        rho1, rho2, gamma, alphas, x0, tol, xs, ys, zs, res):
    """Iterate from `x0`, filling the history buffers in place.

    Row ``n`` of `xs`, `ys`, `zs`, `res` holds ``x^n``, ``y^n``, ``z^n`` and
    the fixed-point residual at ``x^n``.  Stops after recording the first
    iterate with residual ``<= tol`` or after ``len(alphas) - 1`` steps.
    Returns ``(records, converged)``.
    """
    a = np.asarray(a)
    at = a.T
    max_iters = alphas.shape[0] - 1
    x = np.array(x0, dtype=float)
    for n in range(max_iters + 1):
        gx, w1, y = _stage(mats1, vecs1, flags1, sr1, rho1, x)
        ay = a @ y
        _, _, z = _stage(mats2, vecs2, flags2, sr2, rho2, ay)
        ax = a @ x
        gax, w2x, _ = _stage(mats2, vecs2, flags2, sr2, rho2, ax)
        d1 = gx - w1
        d2 = gax - w2x
        r = np.sqrt(d1 @ d1) + np.sqrt(d2 @ d2)
        xs[n] = x
        ys[n] = y
        zs[n] = z
        res[n] = r
        if r <= tol:
            return n + 1, True
        if n == max_iters:
            break
        al = alphas[n]
        x = (1.0 - al) * x + al * (y + gamma * (at @ (z - ay)))
    return max_iters + 1, False
