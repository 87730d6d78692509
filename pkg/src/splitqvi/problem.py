"""Problem instances and solver parameters."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .hilbert import DimensionError, LinearMap, as_vector
from .operators import GMap, OperatorModel, Zero
from .sets import MovingSet, WholeSpace

SCHEDULES = ("constant", "harmonic")


@dataclass(frozen=True)
class SolverParams:
    """Step parameters, relaxation schedule and stopping rule.

    ``schedule="constant"`` uses ``alpha^n = alpha``; ``"harmonic"`` uses
    ``alpha^n = 1/(n+2)`` so that every value stays strictly inside (0, 1)
    while the series still diverges.
    """

    rho1: float = 1.0
    rho2: float = 1.0
    gamma: float = 1.0
    schedule: str = "constant"
    alpha: float = 0.5
    max_iters: int = 10_000
    tol: float = 1e-10

    def __post_init__(self):
        for name in ("rho1", "rho2", "gamma", "tol"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive, got {v}")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"schedule must be one of {SCHEDULES}, got {self.schedule!r}")
        if self.schedule == "constant" and not 0.0 < self.alpha < 1.0:
            raise ValueError(f"relaxation alpha must lie in (0, 1), got {self.alpha}")
        if self.max_iters < 0:
            raise ValueError("max_iters must be nonnegative")

    def alpha_at(self, n: int) -> float:
        if self.schedule == "constant":
            return float(self.alpha)
        return 1.0 / (n + 2.0)

    def alphas(self, count: int) -> np.ndarray:
        if self.schedule == "constant":
            return np.full(count, float(self.alpha))
        return 1.0 / (np.arange(count, dtype=float) + 2.0)

    def alpha_sum(self) -> float:
        """Sum of the schedule over ``max_iters`` steps."""
        return float(np.sum(self.alphas(self.max_iters)))

    def with_(self, **changes) -> "SolverParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {"rho1": self.rho1, "rho2": self.rho2, "gamma": self.gamma,
                "schedule": self.schedule, "alpha": self.alpha,
                "max_iters": self.max_iters, "tol": self.tol}


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """A split general quasi-variational inequality instance.

    Find ``x`` in ``R^n1`` with ``g1(x)`` in ``C1(x)`` solving the first
    inequality and ``Ax`` solving the second one in ``R^n2``.
    """

    A: LinearMap
    C1: MovingSet
    C2: MovingSet
    f1: OperatorModel
    f2: OperatorModel
    g1: GMap
    g2: GMap
    known_solution: np.ndarray = None
    defaults: SolverParams = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.A, LinearMap):
            object.__setattr__(self, "A", LinearMap(self.A))
        n1, n2 = self.n1, self.n2
        checks = [("C1", self.C1.dim, n1), ("C2", self.C2.dim, n2),
                  ("g1", self.g1.dim, n1), ("g2", self.g2.dim, n2)]
        for name, op, n in (("f1", self.f1, n1), ("f2", self.f2, n2)):
            if op.dim is not None:
                checks.append((name, op.dim, n))
        for name, got, want in checks:
            if got != want:
                raise DimensionError(f"{name} has dimension {got}, expected {want}")
        if self.known_solution is not None:
            xs = as_vector(self.known_solution, n1).copy()
            xs.setflags(write=False)
            object.__setattr__(self, "known_solution", xs)

    @property
    def n1(self) -> int:
        return self.A.source_dim

    @property
    def n2(self) -> int:
        return self.A.target_dim

    @property
    def dims(self):
        return self.n1, self.n2

    def params(self, **overrides) -> SolverParams:
        base = self.defaults if self.defaults is not None else SolverParams()
        return replace(base, **overrides) if overrides else base

    def with_(self, **changes) -> "ProblemSpec":
        return replace(self, **changes)

    def __eq__(self, other):
        if not isinstance(other, ProblemSpec):
            return NotImplemented
        xs, ys = self.known_solution, other.known_solution
        same_x = (xs is None and ys is None) or (
            xs is not None and ys is not None and np.array_equal(xs, ys))
        return (self.A == other.A and self.C1 == other.C1 and self.C2 == other.C2
                and self.f1 == other.f1 and self.f2 == other.f2
                and self.g1 == other.g1 and self.g2 == other.g2
                and same_x and self.defaults == other.defaults)

    __hash__ = None

    @classmethod
    def qvip(cls, C: MovingSet, f: OperatorModel, known_solution=None, defaults=None) -> "ProblemSpec":
        """Single quasi-variational inequality embedded as a split instance.

        The second stage is made inert (``A = I``, ``f2 = 0``, ``C2`` the
        whole space, ``g2 = I``), so ``z^n = A y^n`` exactly and the unified
        iteration coincides with the plain Mann iteration.
        """
        n = C.dim
        return cls(A=LinearMap.identity(n), C1=C, C2=MovingSet.fixed(WholeSpace(n)),
                   f1=f, f2=Zero(), g1=GMap.identity(n), g2=GMap.identity(n),
                   known_solution=known_solution, defaults=defaults)

    def is_inert_second_stage(self) -> bool:
        return (isinstance(self.C2.base, WholeSpace) and self.C2.is_fixed()
                and self.f2.is_constant() and not np.any(self.f2.offset(self.n2))
                and self.g2.is_identity())
