"""Projectable convex sets and translated moving sets ``C(x) = m(x) + C``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hilbert import DimensionError, as_vector
from .operators import OperatorModel, Zero, lipschitz_constant


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


class ConvexSet:
    """Nonempty closed convex subset of ``R^dim`` with an exact projection."""

    dim: int

    def project(self, z) -> np.ndarray:
        raise NotImplementedError

    def contains(self, z, tol: float = 1e-12) -> bool:
        z = as_vector(z, self.dim)
        return float(np.linalg.norm(z - self.project(z))) <= tol

    def _arg(self, z) -> np.ndarray:
        z = as_vector(z)
        if z.shape[0] != self.dim:
            raise DimensionError(f"set lives in dimension {self.dim}, point has {z.shape[0]}")
        return z


@dataclass(frozen=True)
class WholeSpace(ConvexSet):
    dim: int

    def project(self, z):
        return self._arg(z).copy()


@dataclass(frozen=True, eq=False)
class Box(ConvexSet):
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float).reshape(-1)
        hi = np.asarray(self.upper, dtype=float).reshape(-1)
        if lo.shape != hi.shape:
            raise DimensionError("box bounds have different lengths")
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
            raise ValueError("box bounds must not be NaN")
        if np.any(lo > hi):
            raise ValueError("box needs lower <= upper componentwise")
        object.__setattr__(self, "lower", _frozen(lo))
        object.__setattr__(self, "upper", _frozen(hi))

    @property
    def dim(self):
        return self.lower.shape[0]

    def project(self, z):
        return np.minimum(np.maximum(self._arg(z), self.lower), self.upper)

    def __eq__(self, other):
        return (isinstance(other, Box) and np.array_equal(self.lower, other.lower)
                and np.array_equal(self.upper, other.upper))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Ball(ConvexSet):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _frozen(as_vector(self.center)))
        if not self.radius > 0 or not np.isfinite(self.radius):
            raise ValueError("ball radius must be positive and finite")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self):
        return self.center.shape[0]

    def project(self, z):
        z = self._arg(z)
        d = z - self.center
        dist = float(np.linalg.norm(d))
        if dist <= self.radius:
            return z.copy()
        return self.center + (self.radius / dist) * d

    def __eq__(self, other):
        return (isinstance(other, Ball) and np.array_equal(self.center, other.center)
                and self.radius == other.radius)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Halfspace(ConvexSet):
    """``{x : <normal, x> <= offset}``."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = as_vector(self.normal)
        if not np.any(n):
            raise ValueError("halfspace normal must be nonzero")
        object.__setattr__(self, "normal", _frozen(n))
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self):
        return self.normal.shape[0]

    def project(self, z):
        z = self._arg(z)
        excess = float(self.normal @ z) - self.offset
        if excess <= 0.0:
            return z.copy()
        return z - (excess / float(self.normal @ self.normal)) * self.normal

    def __eq__(self, other):
        return (isinstance(other, Halfspace) and np.array_equal(self.normal, other.normal)
                and self.offset == other.offset)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class AffineSet(ConvexSet):
    """``{point + basis @ t}``; the columns of `basis` span the direction space.

    The least-squares fit against the basis is done through an orthonormal
    basis of its range (rank-revealing SVD), so rank-deficient or
    ill-conditioned bases still give an idempotent projection.
    """

    basis: np.ndarray
    point: np.ndarray

    def __post_init__(self):
        p = as_vector(self.point)
        b = np.asarray(self.basis, dtype=float)
        if b.ndim == 1:
            b = b.reshape(-1, 1)
        if b.ndim != 2 or b.shape[0] != p.shape[0]:
            raise DimensionError(f"basis shape {b.shape} does not match point dimension {p.shape[0]}")
        if not np.all(np.isfinite(b)):
            raise ValueError("basis entries must be finite")
        object.__setattr__(self, "basis", _frozen(b))
        object.__setattr__(self, "point", _frozen(p))
        object.__setattr__(self, "_frame", _frozen(_range_basis(b)))

    @property
    def dim(self):
        return self.point.shape[0]

    def projector(self) -> np.ndarray:
        """Orthogonal projector onto the direction space."""
        return self._frame @ self._frame.T

    def project(self, z):
        d = self._arg(z) - self.point
        return self.point + self._frame @ (self._frame.T @ d)

    def __eq__(self, other):
        return (isinstance(other, AffineSet) and np.array_equal(self.basis, other.basis)
                and np.array_equal(self.point, other.point))

    __hash__ = None


def _range_basis(b: np.ndarray) -> np.ndarray:
    if b.size == 0 or not np.any(b):
        return np.zeros((b.shape[0], 0))
    u, s, _ = np.linalg.svd(b, full_matrices=False)
    rank = int(np.sum(s > s[0] * max(b.shape) * np.finfo(float).eps))
    return u[:, :rank]


def project(c: ConvexSet, z) -> np.ndarray:
    return c.project(z)


def sample_points(c: ConvexSet, rng: np.random.Generator, k: int, scale: float = 3.0) -> np.ndarray:
    """Draw `k` points of `c` (rows) by projecting scattered Gaussian points.

    Projection alone would put most probes on the boundary, so each probe is
    a random convex combination of a projected point and an anchor in `c`.
    """
    dim = c.dim
    if isinstance(c, Box):
        lo = np.where(np.isfinite(c.lower), c.lower, -scale)
        hi = np.where(np.isfinite(c.upper), c.upper, scale)
        lo = np.minimum(lo, hi)
        return lo + (hi - lo) * rng.random((k, dim))
    anchor = c.project(np.zeros(dim))
    pts = np.empty((k, dim))
    for i in range(k):
        p = c.project(anchor + scale * rng.standard_normal(dim))
        w = rng.random()
        pts[i] = w * p + (1.0 - w) * anchor
    return pts


@dataclass(frozen=True, eq=False)
class MovingSet:
    """Set-valued map ``x -> m(x) + base`` with ``m`` Lipschitz.

    A constant translation (``Zero`` by default) gives a fixed set.
    """

    base: ConvexSet
    translation: OperatorModel = None

    def __post_init__(self):
        if self.translation is None:
            object.__setattr__(self, "translation", Zero())
        if self.translation.dim is not None and self.translation.dim != self.base.dim:
            raise DimensionError("translation and base set live in different dimensions")

    @classmethod
    def fixed(cls, base: ConvexSet) -> "MovingSet":
        return cls(base, Zero())

    @property
    def dim(self) -> int:
        return self.base.dim

    def is_fixed(self) -> bool:
        return self.translation.is_constant()

    def shift(self, x) -> np.ndarray:
        return self.translation.evaluate(as_vector(x, self.dim))

    def translation_lipschitz(self) -> float:
        return lipschitz_constant(self.translation, self.dim)

    def project(self, x, z) -> np.ndarray:
        z = as_vector(z, self.dim)
        if isinstance(self.translation, Zero):
            as_vector(x, self.dim)
            return self.base.project(z)
        mx = self.shift(x)
        return mx + self.base.project(z - mx)

    def at(self, x) -> ConvexSet:
        """The concrete set ``C(x)`` as a descriptor."""
        mx = self.shift(x)
        b = self.base
        if isinstance(b, WholeSpace):
            return b
        if isinstance(b, Box):
            return Box(b.lower + mx, b.upper + mx)
        if isinstance(b, Ball):
            return Ball(b.center + mx, b.radius)
        if isinstance(b, Halfspace):
            return Halfspace(b.normal, b.offset + float(b.normal @ mx))
        if isinstance(b, AffineSet):
            return AffineSet(b.basis, b.point + mx)
        raise TypeError(f"unsupported base set {type(b).__name__}")

    def __eq__(self, other):
        return (isinstance(other, MovingSet) and self.base == other.base
                and self.translation == other.translation)

    __hash__ = None


def project_moving(m: MovingSet, x, z) -> np.ndarray:
    return m.project(x, z)


def certify_nu(m: MovingSet) -> float:
    """Valid constant ``nu`` with ``|P_{C(x)} z - P_{C(y)} z| <= nu |x - y|``.

    Uses ``P_{m(x)+C}(z) = m(x) + P_C(z - m(x))`` and nonexpansiveness of
    ``P_C``, giving ``nu = 2 L_m``.
    """
    return 2.0 * m.translation_lipschitz()
