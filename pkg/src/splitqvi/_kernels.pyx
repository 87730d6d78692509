# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled relaxed split iteration over a flat plan.

Same contract as ``_kernels_py.run``.
"""
from libc.math cimport sqrt
import numpy as np

cdef enum:
    WHOLE = 0
    BOX = 1
    BALL = 2
    HALFSPACE = 3
    AFFINE = 4

# slots in a stage's matrix stack / vector stack
cdef enum:
    MF = 0
    DG = 1
    DINV = 2
    LM = 3
    Q = 4

cdef enum:
    QF = 0
    DGV = 1
    CM = 2
    S1 = 3
    S2 = 4


cdef inline void matvec(const double[:, :] m, const double[:] x, double[:] out, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double s
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += m[i, j] * x[j]
        out[i] = s


cdef void project(int kind, const double[:] s1, const double[:] s2, double sr,
                  const double[:, :] q, double[:] u, double[:] tmp, Py_ssize_t n) noexcept nogil:
    # projects u in place
    cdef Py_ssize_t i, j
    cdef double d, dist, excess, nn, s
    if kind == BOX:
        for i in range(n):
            d = u[i]
            if d < s1[i]:
                d = s1[i]
            if d > s2[i]:
                d = s2[i]
            u[i] = d
    elif kind == BALL:
        dist = 0.0
        for i in range(n):
            d = u[i] - s1[i]
            dist += d * d
        dist = sqrt(dist)
        if dist > sr:
            for i in range(n):
                u[i] = s1[i] + (sr / dist) * (u[i] - s1[i])
    elif kind == HALFSPACE:
        excess = 0.0
        nn = 0.0
        for i in range(n):
            excess += s1[i] * u[i]
            nn += s1[i] * s1[i]
        excess -= sr
        if excess > 0.0:
            for i in range(n):
                u[i] = u[i] - (excess / nn) * s1[i]
    elif kind == AFFINE:
        for i in range(n):
            tmp[i] = u[i] - s2[i]
        for i in range(n):
            s = 0.0
            for j in range(n):
                s += q[i, j] * tmp[j]
            u[i] = s2[i] + s


cdef void stage(const double[:, :, :] mats, const double[:, :] vecs, const long[:] flags, double sr,
                double rho, const double[:] x, double[:] gx, double[:] w, double[:] y,
                double[:] t1, double[:] t2, Py_ssize_t n) noexcept nogil:
    # gx <- g(x); w <- P_{C(x)}(g(x) - rho f(x)); y <- g^{-1}(w)
    cdef Py_ssize_t i
    cdef int kind = <int>flags[0]
    cdef bint g_ident = flags[1] != 0
    cdef bint m_zero = flags[2] != 0
    matvec(mats[MF], x, t1, n)
    if g_ident:
        for i in range(n):
            gx[i] = x[i]
    else:
        matvec(mats[DG], x, gx, n)
        for i in range(n):
            gx[i] += vecs[DGV, i]
    for i in range(n):
        w[i] = gx[i] - rho * (t1[i] + vecs[QF, i])
    if m_zero:
        project(kind, vecs[S1], vecs[S2], sr, mats[Q], w, t2, n)
    else:
        matvec(mats[LM], x, t1, n)
        for i in range(n):
            t1[i] += vecs[CM, i]
            w[i] -= t1[i]
        project(kind, vecs[S1], vecs[S2], sr, mats[Q], w, t2, n)
        for i in range(n):
            w[i] += t1[i]
    if g_ident:
        for i in range(n):
            y[i] = w[i]
    else:
        for i in range(n):
            t1[i] = w[i] - vecs[DGV, i]
        matvec(mats[DINV], t1, y, n)


def run(const double[:, :] a, const double[:, :, :] mats1, const double[:, :] vecs1,
        const long[:] flags1, double sr1, const double[:, :, :] mats2, const double[:, :] vecs2,
        const long[:] flags2, double sr2, double rho1, double rho2, double gamma,
        const double[:] alphas, const double[:] x0, double tol,
        double[:, :] xs, double[:, :] ys, double[:, :] zs, double[:] res):
    cdef Py_ssize_t n1 = a.shape[1]
    cdef Py_ssize_t n2 = a.shape[0]
    cdef Py_ssize_t max_iters = alphas.shape[0] - 1
    cdef Py_ssize_t it, i, j
    cdef double r1, r2, s, al
    cdef bint converged = False

    cdef double[:] x = np.array(x0, dtype=np.float64)
    cdef double[:] gx = np.empty(n1)
    cdef double[:] w1 = np.empty(n1)
    cdef double[:] y = np.empty(n1)
    cdef double[:] t1 = np.empty(max(n1, n2))
    cdef double[:] t2 = np.empty(max(n1, n2))
    cdef double[:] ay = np.empty(n2)
    cdef double[:] ax = np.empty(n2)
    cdef double[:] g2 = np.empty(n2)
    cdef double[:] w2 = np.empty(n2)
    cdef double[:] z = np.empty(n2)
    cdef double[:] scratch = np.empty(n2)
    cdef double[:] diff = np.empty(n2)

    with nogil:
        for it in range(max_iters + 1):
            stage(mats1, vecs1, flags1, sr1, rho1, x, gx, w1, y, t1, t2, n1)
            for i in range(n2):
                s = 0.0
                for j in range(n1):
                    s += a[i, j] * y[j]
                ay[i] = s
                s = 0.0
                for j in range(n1):
                    s += a[i, j] * x[j]
                ax[i] = s
            stage(mats2, vecs2, flags2, sr2, rho2, ay, g2, w2, z, t1, t2, n2)
            stage(mats2, vecs2, flags2, sr2, rho2, ax, g2, w2, scratch, t1, t2, n2)
            r1 = 0.0
            for i in range(n1):
                s = gx[i] - w1[i]
                r1 += s * s
            r2 = 0.0
            for i in range(n2):
                s = g2[i] - w2[i]
                r2 += s * s
            r1 = sqrt(r1) + sqrt(r2)
            for i in range(n1):
                xs[it, i] = x[i]
                ys[it, i] = y[i]
            for i in range(n2):
                zs[it, i] = z[i]
            res[it] = r1
            if r1 <= tol:
                converged = True
                break
            if it == max_iters:
                break
            al = alphas[it]
            for i in range(n2):
                diff[i] = z[i] - ay[i]
            for j in range(n1):
                s = 0.0
                for i in range(n2):
                    s += a[i, j] * diff[i]
                x[j] = (1.0 - al) * x[j] + al * (y[j] + gamma * s)
    return it + 1, bool(converged)
