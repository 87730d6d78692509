"""Structured nonlinear-map models with certified monotonicity/Lipschitz constants.

Every model here is affine, ``x -> M x + q``, so all constants the
convergence analysis consumes can be computed exactly from spectra instead
of being assumed.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hilbert import DimensionError, as_vector, spectral_norm

INVERT_TOL = 1e-12
INVERT_MAX_ITERS = 10_000


class UnsupportedModelError(TypeError):
    """Raised when an operation needs a model family it does not support."""


class SingularOperatorError(ValueError):
    """Raised when a map that must be inverted is singular."""


class NoConvergenceError(RuntimeError):
    """Raised when an inner iteration exhausts its step budget."""


def _sym_min_eig(m: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(0.5 * (m + m.T))[0])


class OperatorModel:
    """Base class for ``H -> H`` maps with an explicit affine form."""

    def evaluate(self, x) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x) -> np.ndarray:
        return self.evaluate(x)

    def linear_part(self, dim: int) -> np.ndarray:
        raise NotImplementedError

    def offset(self, dim: int) -> np.ndarray:
        raise NotImplementedError

    @property
    def dim(self):
        """Fixed dimension of the model, or ``None`` if it acts on any space."""
        return None

    def is_identity(self) -> bool:
        return False

    def is_constant(self) -> bool:
        return False

    def _check(self, x) -> np.ndarray:
        x = as_vector(x)
        if self.dim is not None and x.shape[0] != self.dim:
            raise DimensionError(f"{type(self).__name__} acts on dimension {self.dim}, got {x.shape[0]}")
        return x


@dataclass(frozen=True, eq=False)
class Affine(OperatorModel):
    matrix: np.ndarray
    shift: np.ndarray = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float, copy=True)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"affine map needs a square matrix, got shape {m.shape}")
        q = np.zeros(m.shape[0]) if self.shift is None else as_vector(self.shift, m.shape[0]).copy()
        m.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "shift", q)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def evaluate(self, x):
        return self.matrix @ self._check(x) + self.shift

    def linear_part(self, dim):
        return self.matrix

    def offset(self, dim):
        return self.shift

    def is_identity(self):
        return np.array_equal(self.matrix, np.eye(self.dim)) and not np.any(self.shift)

    def is_constant(self):
        return not np.any(self.matrix)

    def __eq__(self, other):
        return (isinstance(other, Affine) and np.array_equal(self.matrix, other.matrix)
                and np.array_equal(self.shift, other.shift))

    __hash__ = None


@dataclass(frozen=True)
class Scaling(OperatorModel):
    s: float

    def evaluate(self, x):
        x = self._check(x)
        if self.s == 1.0:
            return x.copy()
        return self.s * x

    def linear_part(self, dim):
        return self.s * np.eye(dim)

    def offset(self, dim):
        return np.zeros(dim)

    def is_identity(self):
        return self.s == 1.0

    def is_constant(self):
        return self.s == 0.0


@dataclass(frozen=True, eq=False)
class Translation(OperatorModel):
    c: np.ndarray

    def __post_init__(self):
        c = as_vector(self.c).copy()
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def dim(self):
        return self.c.shape[0]

    def evaluate(self, x):
        return self._check(x) + self.c

    def linear_part(self, dim):
        return np.eye(dim)

    def offset(self, dim):
        return self.c

    def is_identity(self):
        return not np.any(self.c)

    def __eq__(self, other):
        return isinstance(other, Translation) and np.array_equal(self.c, other.c)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Constant(OperatorModel):
    """``x -> c``; the translation map of a fixed (non-moving) set."""

    c: np.ndarray

    def __post_init__(self):
        c = as_vector(self.c).copy()
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def dim(self):
        return self.c.shape[0]

    def evaluate(self, x):
        self._check(x)
        return self.c.copy()

    def linear_part(self, dim):
        return np.zeros((dim, dim))

    def offset(self, dim):
        return self.c

    def is_constant(self):
        return True

    def __eq__(self, other):
        return isinstance(other, Constant) and np.array_equal(self.c, other.c)

    __hash__ = None


@dataclass(frozen=True)
class Zero(OperatorModel):
    def evaluate(self, x):
        return np.zeros_like(self._check(x))

    def linear_part(self, dim):
        return np.zeros((dim, dim))

    def offset(self, dim):
        return np.zeros(dim)

    def is_constant(self):
        return True


def identity() -> OperatorModel:
    return Scaling(1.0)


def evaluate(op: OperatorModel, x) -> np.ndarray:
    return op.evaluate(x)


def _resolve_dim(op: OperatorModel, dim) -> int:
    if op.dim is not None:
        if dim is not None and dim != op.dim:
            raise DimensionError(f"model has dimension {op.dim}, asked for {dim}")
        return op.dim
    if dim is None:
        raise DimensionError(f"{type(op).__name__} needs an explicit dimension")
    return dim


def to_affine(op: OperatorModel, dim=None) -> Affine:
    n = _resolve_dim(op, dim)
    return Affine(op.linear_part(n), op.offset(n))


def lipschitz_constant(op: OperatorModel, dim=None) -> float:
    n = _resolve_dim(op, dim)
    return spectral_norm(op.linear_part(n))


def certify_constants(op: OperatorModel, dim=None):
    """Return ``(alpha, beta)``: strong-monotonicity and Lipschitz constants.

    ``alpha`` is the smallest eigenvalue of the symmetric part of the linear
    part, clamped at zero; ``beta`` its largest singular value.  Both are the
    exact constants for an affine map, so they are valid and tight.
    """
    n = _resolve_dim(op, dim)
    m = np.asarray(op.linear_part(n), dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"need a square linear part, got shape {m.shape}")
    alpha = max(_sym_min_eig(m), 0.0)
    beta = spectral_norm(m)
    return alpha, beta


@dataclass(frozen=True, eq=False)
class GMap:
    """The inner map ``g`` with its certified constants.

    ``sigma`` is the strong-monotonicity constant of ``g - I`` and ``delta``
    the Lipschitz constant of ``g``.  Construction fails unless ``g - I`` is
    monotone, which is what makes ``g`` invertible.
    """

    inner: OperatorModel
    dim: int
    sigma: float = field(init=False)
    delta: float = field(init=False)

    def __post_init__(self):
        n = _resolve_dim(self.inner, self.dim)
        object.__setattr__(self, "dim", n)
        d = np.asarray(self.inner.linear_part(n), dtype=float)
        shifted = _sym_min_eig(d) - 1.0
        if shifted < -1e-12:
            raise SingularOperatorError(
                f"g - I is not monotone (smallest symmetric eigenvalue {shifted:.3g}); "
                "g is not certified invertible")
        object.__setattr__(self, "sigma", max(shifted, 0.0))
        object.__setattr__(self, "delta", spectral_norm(d))

    @classmethod
    def identity(cls, dim: int) -> "GMap":
        return cls(Scaling(1.0), dim)

    def evaluate(self, x) -> np.ndarray:
        return self.inner.evaluate(as_vector(x, self.dim))

    __call__ = evaluate

    def linear_part(self) -> np.ndarray:
        return np.asarray(self.inner.linear_part(self.dim), dtype=float)

    def offset(self) -> np.ndarray:
        return np.asarray(self.inner.offset(self.dim), dtype=float)

    def is_identity(self) -> bool:
        return self.inner.is_identity()

    def __eq__(self, other):
        return isinstance(other, GMap) and self.dim == other.dim and self.inner == other.inner

    __hash__ = None


def certify_relative(f: OperatorModel, g: GMap) -> float:
    """Constant ``a`` with ``<f(x)-f(y), g(x)-g(y)> >= a |x-y|^2``.

    For affine ``f`` and ``g`` this is the smallest eigenvalue of the
    symmetric part of ``D_g^T M_f``, clamped at zero.
    """
    if not isinstance(f, OperatorModel) or not isinstance(g, GMap):
        raise UnsupportedModelError("relative monotonicity needs an operator model and a GMap")
    n = g.dim
    mf = np.asarray(f.linear_part(_resolve_dim(f, n)), dtype=float)
    dg = g.linear_part()
    return max(_sym_min_eig(dg.T @ mf), 0.0)


def invert_g(g: GMap, target, method: str = "direct") -> np.ndarray:
    """Solve ``g(y) = target``.

    ``method="direct"`` solves the affine system; ``"iterative"`` runs the
    damped iteration ``y <- y - tau (g(y) - target)`` with
    ``tau = (1 + sigma) / delta**2``, a contraction because ``g`` is
    ``(1 + sigma)``-strongly monotone.
    """
    t = as_vector(target, g.dim)
    inner = g.inner
    if inner.is_identity():
        return t.copy()
    if isinstance(inner, Translation):
        return t - inner.c
    if method == "iterative":
        return _invert_iterative(g, t)
    if method != "direct":
        raise ValueError(f"unknown inversion method {method!r}")
    d = g.linear_part()
    rhs = t - g.offset()
    try:
        y = np.linalg.solve(d, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularOperatorError("linear part of g is singular") from exc
    if not np.all(np.isfinite(y)):
        raise SingularOperatorError("linear part of g is singular")
    # one step of iterative refinement
    y = y + np.linalg.solve(d, rhs - d @ y)
    return y


def _invert_iterative(g: GMap, t: np.ndarray) -> np.ndarray:
    mu = 1.0 + g.sigma
    tau = mu / g.delta ** 2
    y = t.copy()
    for _ in range(INVERT_MAX_ITERS):
        r = g.evaluate(y) - t
        if np.linalg.norm(r) <= INVERT_TOL:
            return y
        y = y - tau * r
    raise NoConvergenceError(f"g inversion did not reach {INVERT_TOL} in {INVERT_MAX_ITERS} steps")
