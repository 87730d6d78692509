"""Random instances with a known solution and certified step parameters."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .certify import bundle_for, certify
from .hilbert import LinearMap
from .operators import Affine, GMap, Zero
from .problem import ProblemSpec, SolverParams
from .sets import AffineSet, Ball, Box, Halfspace, MovingSet, WholeSpace

FAMILIES = ("interior_zero", "boundary")
SET_KINDS = ("box", "ball", "halfspace", "affine_set", "whole")


class GenerationError(RuntimeError):
    """No certified instance could be drawn from the requested ranges."""


@dataclass(frozen=True)
class GeneratorConfig:
    """Knobs for :func:`generate`.

    ``sigma_range`` bounds the strong monotonicity of ``g - I``;
    ``translation_range`` the Lipschitz constant of the set translations
    (``nu = 2 L``); ``skew`` the size of the non-symmetric perturbations
    that keep ``f`` and ``g`` away from scalar multiples of the identity.
    """

    n1: int = 3
    n2: int = 2
    seed: int = 0
    family: str = "interior_zero"
    set_kinds: tuple = SET_KINDS
    sigma_range: tuple = (0.0, 1.0)
    translation_range: tuple = (0.0, 0.05)
    skew: float = 0.2
    f_scale_range: tuple = (0.5, 2.0)
    norm_a_range: tuple = (0.5, 1.5)
    solution_scale: float = 1.0
    g_offset_scale: float = 0.5
    max_attempts: int = 200
    mode: str = "theorem"

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError("dimensions must be at least 1")
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}")
        for k in self.set_kinds:
            if k not in SET_KINDS:
                raise ValueError(f"unknown set kind {k!r}")
        if self.family == "boundary" and "box" not in self.set_kinds:
            raise ValueError("boundary family places the solution on a box face")
        for name in ("sigma_range", "translation_range", "f_scale_range", "norm_a_range"):
            lo, hi = getattr(self, name)
            if lo > hi or lo < 0:
                raise ValueError(f"{name} must be an ordered nonnegative pair")


def _skew(rng, n, scale):
    k = rng.standard_normal((n, n))
    k = k - k.T
    nk = np.linalg.norm(k, 2) if n > 1 else 0.0
    return k * (scale / nk) if nk > 0 else k


def _orthogonal(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def _uniform(rng, pair):
    lo, hi = pair
    return float(lo if lo == hi else rng.uniform(lo, hi))


def _stage(rng, cfg: GeneratorConfig, n: int, x_star: np.ndarray, boundary: bool):
    """Draw ``(f, g, C)`` on ``R^n`` with ``x_star`` solving the stage inequality."""
    sigma = _uniform(rng, cfg.sigma_range)
    d = (1.0 + sigma) * np.eye(n) + _skew(rng, n, cfg.skew * rng.random())
    g_shift = cfg.g_offset_scale * rng.standard_normal(n)
    g = GMap(Affine(d, g_shift), n)

    a = _uniform(rng, cfg.f_scale_range)
    m = a * d + _skew(rng, n, a * cfg.skew * rng.random())

    lip = _uniform(rng, cfg.translation_range)
    if lip > 0:
        trans = Affine(lip * _orthogonal(rng, n), rng.standard_normal(n))
    else:
        trans = Zero()

    gx = g.evaluate(x_star)
    w = gx - trans.evaluate(x_star)      # point the base set must contain

    if boundary:
        j = int(rng.integers(n))
        lower = w - rng.uniform(0.5, 2.0, n)
        upper = w + rng.uniform(0.5, 2.0, n)
        upper[j] = w[j]
        base = Box(lower, upper)
        f_star = np.zeros(n)
        f_star[j] = -rng.uniform(0.5, 2.0)   # -f along the outward normal e_j
    else:
        kind = cfg.set_kinds[int(rng.integers(len(cfg.set_kinds)))]
        base = _base_containing(rng, kind, w)
        f_star = np.zeros(n)
    f = Affine(m, f_star - m @ x_star)
    return f, g, MovingSet(base, trans)


def _base_containing(rng, kind, w):
    n = w.shape[0]
    if kind == "box":
        return Box(w - rng.uniform(0.1, 2.0, n), w + rng.uniform(0.1, 2.0, n))
    if kind == "ball":
        r = rng.uniform(0.5, 2.0)
        u = rng.standard_normal(n)
        u *= rng.uniform(0.0, 0.9) * r / np.linalg.norm(u)
        return Ball(w + u, r)
    if kind == "halfspace":
        normal = rng.standard_normal(n)
        return Halfspace(normal, float(normal @ w) + rng.uniform(0.0, 1.0))
    if kind == "affine_set":
        k = int(rng.integers(0, n + 1))
        basis = rng.standard_normal((n, max(k, 1)))
        if k == 0:
            basis[:] = 0.0
        return AffineSet(basis, w - basis @ rng.standard_normal(basis.shape[1]))
    return WholeSpace(n)


def _coupling(rng, cfg: GeneratorConfig):
    if cfg.n1 == 1 and cfg.n2 == 1:
        a = np.ones((1, 1))
    else:
        a = rng.standard_normal((cfg.n2, cfg.n1))
        a /= np.linalg.norm(a, 2)
    return a * _uniform(rng, cfg.norm_a_range)


def _pick_params(spec: ProblemSpec, mode: str):
    c = bundle_for(spec)
    rho1 = c.alpha1 / c.beta1 ** 2 if c.beta1 > 0 else 1.0
    rho2 = c.alpha2 / c.beta2 ** 2 if c.beta2 > 0 and c.alpha2 > 0 else 1.0
    gamma = 1.0 / c.norm_a ** 2 if c.norm_a > 0 else 1.0
    params = SolverParams(rho1=rho1, rho2=rho2, gamma=gamma)
    return params, certify(c, params, mode=mode)


def generate(cfg: GeneratorConfig) -> ProblemSpec:
    """Draw an instance whose known solution is exact and whose default parameters are certified.

    Candidates whose step parameters fail certification are redrawn, up to
    ``cfg.max_attempts`` times.
    """
    rng = np.random.default_rng(cfg.seed)
    boundary = cfg.family == "boundary"
    last = None
    for _ in range(cfg.max_attempts):
        x_star = cfg.solution_scale * rng.standard_normal(cfg.n1)
        a = _coupling(rng, cfg)
        f1, g1, c1 = _stage(rng, cfg, cfg.n1, x_star, boundary)
        f2, g2, c2 = _stage(rng, cfg, cfg.n2, a @ x_star, boundary)
        spec = ProblemSpec(A=LinearMap(a), C1=c1, C2=c2, f1=f1, f2=f2, g1=g1, g2=g2,
                           known_solution=x_star)
        params, cert = _pick_params(spec, cfg.mode)
        if cert.certified:
            meta = {"family": cfg.family, "seed": cfg.seed, "theta": cert.theta}
            return spec.with_(defaults=params, meta=meta)
        last = cert
    reasons = "; ".join(last.violations) if last is not None else "no attempts"
    raise GenerationError(f"no certified instance in {cfg.max_attempts} draws ({reasons})")


def line_example() -> ProblemSpec:
    """The scalar instance ``f_i(x) = x``, ``g_i = I``, ``A = 1``, unconstrained; solution 0."""
    from .operators import Scaling
    return ProblemSpec(A=LinearMap([[1.0]]), C1=MovingSet(WholeSpace(1)), C2=MovingSet(WholeSpace(1)),
                       f1=Scaling(1.0), f2=Scaling(1.0), g1=GMap.identity(1), g2=GMap.identity(1),
                       known_solution=np.zeros(1), defaults=SolverParams())
