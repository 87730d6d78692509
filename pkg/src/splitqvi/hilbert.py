"""Finite-dimensional realizations of the two Hilbert spaces and the coupling map."""
from __future__ import annotations

import numpy as np

POWER_TOL = 1e-12
POWER_MAX_ITERS = 10_000
EIG_MAX_DIM = 64
POWER_SEED = 20130919


class DimensionError(ValueError):
    """Raised when operand dimensions do not agree."""


def as_vector(x, dim=None) -> np.ndarray:
    """Return `x` as a finite 1-D float array, optionally checking its length."""
    v = np.asarray(x, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1:
        raise DimensionError(f"expected a 1-D vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DimensionError(f"expected dimension {dim}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def inner(u, v) -> float:
    u = as_vector(u)
    v = as_vector(v)
    if u.shape != v.shape:
        raise DimensionError(f"inner product of dimensions {u.shape[0]} and {v.shape[0]}")
    return float(u @ v)


def norm(u) -> float:
    return float(np.linalg.norm(as_vector(u)))


def power_iteration_norm(matrix, tol=POWER_TOL, max_iters=POWER_MAX_ITERS, seed=POWER_SEED) -> float:
    """Largest singular value by power iteration on ``M^T M``.

    The start vector is drawn from a fixed seed so repeated calls agree
    bit-for-bit.
    """
    m = np.asarray(matrix, dtype=float)
    if not np.any(m):
        return 0.0
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(m.shape[1])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iters):
        w = m.T @ (m @ v)
        lam_new = float(np.linalg.norm(w))
        if lam_new == 0.0:
            # start vector fell in the null space; restart deterministically
            v = rng.standard_normal(m.shape[1])
            v /= np.linalg.norm(v)
            continue
        v = w / lam_new
        if abs(lam_new - lam) <= tol * lam_new:
            lam = lam_new
            break
        lam = lam_new
    return float(np.sqrt(lam))


def spectral_norm(matrix) -> float:
    """Largest singular value of a dense matrix.

    Small matrices use a symmetric eigensolve of ``M^T M``; larger ones fall
    back to deterministic power iteration.
    """
    m = np.asarray(matrix, dtype=float)
    if m.size == 0 or not np.any(m):
        return 0.0
    if max(m.shape) <= EIG_MAX_DIM:
        # eigvalsh of the Gram matrix loses relative accuracy for tiny
        # singular values, but the largest one is well conditioned.
        gram = m.T @ m if m.shape[0] >= m.shape[1] else m @ m.T
        lam = float(np.linalg.eigvalsh(gram)[-1])
        return float(np.sqrt(max(lam, 0.0)))
    return power_iteration_norm(m)


class LinearMap:
    """Bounded linear operator ``R^n1 -> R^n2`` stored as a dense matrix.

    Instances are immutable; the matrix is copied and flagged read-only.
    """

    __slots__ = ("_matrix", "_norm")

    def __init__(self, matrix):
        m = np.array(matrix, dtype=float, copy=True)
        if m.ndim == 1:
            m = m.reshape(1, -1)
        if m.ndim != 2:
            raise DimensionError(f"linear map needs a 2-D matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("matrix entries must be finite")
        m.setflags(write=False)
        self._matrix = m
        self._norm = None

    @classmethod
    def identity(cls, n: int) -> "LinearMap":
        return cls(np.eye(n))

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def shape(self):
        return self._matrix.shape

    @property
    def source_dim(self) -> int:
        return self._matrix.shape[1]

    @property
    def target_dim(self) -> int:
        return self._matrix.shape[0]

    def apply(self, u) -> np.ndarray:
        u = as_vector(u)
        if u.shape[0] != self.source_dim:
            raise DimensionError(f"map expects dimension {self.source_dim}, got {u.shape[0]}")
        return self._matrix @ u

    __call__ = apply

    def adjoint_apply(self, v) -> np.ndarray:
        v = as_vector(v)
        if v.shape[0] != self.target_dim:
            raise DimensionError(f"adjoint expects dimension {self.target_dim}, got {v.shape[0]}")
        return self._matrix.T @ v

    def adjoint(self) -> "LinearMap":
        return LinearMap(self._matrix.T)

    def norm(self) -> float:
        if self._norm is None:
            self._norm = spectral_norm(self._matrix)
        return self._norm

    def is_identity(self) -> bool:
        m = self._matrix
        return m.shape[0] == m.shape[1] and np.array_equal(m, np.eye(m.shape[0]))

    def __eq__(self, other):
        return isinstance(other, LinearMap) and np.array_equal(self._matrix, other._matrix)

    def __hash__(self):
        return hash((self._matrix.shape, self._matrix.tobytes()))

    def __repr__(self):
        return f"LinearMap(shape={self.shape})"


def apply(a: LinearMap, u) -> np.ndarray:
    return a.apply(u)


def adjoint_apply(a: LinearMap, v) -> np.ndarray:
    return a.adjoint_apply(v)


def operator_norm(a) -> float:
    if isinstance(a, LinearMap):
        return a.norm()
    return spectral_norm(a)
