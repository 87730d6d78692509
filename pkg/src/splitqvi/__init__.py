"""Projection solvers for split general quasi-variational inequalities."""
from .certify import ConstantsBundle, StepCertificate, bundle_for, certify, certify_spec
from .generate import GeneratorConfig, generate
from .hilbert import LinearMap, inner, operator_norm
from .kernels import HAVE_COMPILED
from .operators import Affine, Constant, GMap, Scaling, Translation, Zero
from .problem import ProblemSpec, SolverParams
from .oracle import oracle_solve
from .sets import AffineSet, Ball, Box, Halfspace, MovingSet, WholeSpace
from .solver import IterateTrace, Status, residual, select_variant, solve, step

__all__ = [
    "Affine", "AffineSet", "Ball", "Box", "ConstantsBundle", "Constant", "GMap", "GeneratorConfig",
    "HAVE_COMPILED",
    "Halfspace", "IterateTrace", "LinearMap", "MovingSet", "ProblemSpec", "Scaling",
    "SolverParams", "Status", "StepCertificate", "Translation", "WholeSpace", "Zero",
    "bundle_for", "certify", "certify_spec", "generate", "inner", "operator_norm", "oracle_solve",
    "residual",
    "select_variant", "solve", "step",
]

__version__ = "0.1.0"
