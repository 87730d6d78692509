"""Convergence certificates for the relaxed split projection iteration.

The contraction factor of one step is ``theta = theta1 * (1 + gamma |A|^2 theta2)``
with

    theta_i = (sqrt(delta_i^2 - 2 rho_i alpha_i + rho_i^2 beta_i^2) + nu_i) / sqrt(2 sigma_i + 1)

and the classical sufficient conditions are phrased through
``k1 = sqrt(2 sigma1 + 1) / (1 + 2 theta2) - nu1``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .operators import certify_constants, certify_relative
from .problem import ProblemSpec, SolverParams
from .sets import certify_nu

RADICAND_SLACK = 1e-12


class InfeasibleConstantsError(ValueError):
    """The constants give a negative radicand in a contraction factor."""


@dataclass(frozen=True)
class ConstantsBundle:
    alpha1: float
    alpha2: float
    beta1: float
    beta2: float
    delta1: float
    delta2: float
    sigma1: float
    sigma2: float
    nu1: float
    nu2: float
    norm_a: float

    def __post_init__(self):
        for k, v in asdict(self).items():
            if not (math.isfinite(v) and v >= 0.0):
                raise ValueError(f"constant {k} must be finite and nonnegative, got {v}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def identity_g(cls, alpha1, beta1, nu1, alpha2, beta2, nu2, norm_a) -> "ConstantsBundle":
        """Bundle for ``g_i = I`` (``delta_i = 1``, ``sigma_i = 0``)."""
        return cls(alpha1, alpha2, beta1, beta2, 1.0, 1.0, 0.0, 0.0, nu1, nu2, norm_a)


def bundle_for(spec: ProblemSpec) -> ConstantsBundle:
    """Certified constants of every hypothesis for a problem instance."""
    _, beta1 = certify_constants(spec.f1, spec.n1)
    _, beta2 = certify_constants(spec.f2, spec.n2)
    return ConstantsBundle(
        alpha1=certify_relative(spec.f1, spec.g1),
        alpha2=certify_relative(spec.f2, spec.g2),
        beta1=beta1, beta2=beta2,
        delta1=spec.g1.delta, delta2=spec.g2.delta,
        sigma1=spec.g1.sigma, sigma2=spec.g2.sigma,
        nu1=certify_nu(spec.C1), nu2=certify_nu(spec.C2),
        norm_a=spec.A.norm(),
    )


def _radicand(delta, alpha, beta, rho):
    r = delta * delta - 2.0 * rho * alpha + rho * rho * beta * beta
    if r < 0.0:
        scale = delta * delta + 2.0 * rho * alpha + rho * rho * beta * beta
        if r < -RADICAND_SLACK * max(scale, 1.0):
            raise InfeasibleConstantsError(
                f"negative radicand {r:.3g} (delta={delta}, alpha={alpha}, beta={beta}, rho={rho})")
        r = 0.0
    return r


def compute_theta1(c: ConstantsBundle, rho1: float) -> float:
    if not rho1 > 0:
        raise ValueError("rho1 must be positive")
    root = math.sqrt(_radicand(c.delta1, c.alpha1, c.beta1, rho1))
    return (root + c.nu1) / math.sqrt(2.0 * c.sigma1 + 1.0)


def compute_theta2(c: ConstantsBundle, rho2: float) -> float:
    if not rho2 > 0:
        raise ValueError("rho2 must be positive")
    root = math.sqrt(_radicand(c.delta2, c.alpha2, c.beta2, rho2))
    return (root + c.nu2) / math.sqrt(2.0 * c.sigma2 + 1.0)


def compute_k1(c: ConstantsBundle, theta2: float) -> float:
    return math.sqrt(2.0 * c.sigma1 + 1.0) / (1.0 + 2.0 * theta2) - c.nu1


def contraction_factor(theta1: float, theta2: float, gamma: float, norm_a: float) -> float:
    return theta1 * (1.0 + gamma * norm_a * norm_a * theta2)


@dataclass(frozen=True)
class Rho1Window:
    """Admissible ``rho1`` values, or the hypotheses that rule them out."""

    k1: float
    center: float = float("nan")
    radius: float = float("nan")
    lo: float = float("nan")
    hi: float = float("nan")
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def contains(self, rho1: float) -> bool:
        return self.ok and self.lo < rho1 < self.hi


def rho1_interval(c: ConstantsBundle, theta2: float) -> Rho1Window:
    """Open ``rho1`` interval ``(a/b^2 - r, a/b^2 + r)`` intersected with (0, inf)."""
    k1 = compute_k1(c, theta2)
    bad = []
    if not c.delta1 >= abs(k1):
        bad.append(f"delta1 >= |k1| fails: delta1={c.delta1:.6g}, k1={k1:.6g}")
    if not k1 > 0.0:
        bad.append(f"k1 > 0 fails: k1={k1:.6g}")
    gap = max(c.delta1 ** 2 - k1 ** 2, 0.0)
    if not c.alpha1 > c.beta1 * math.sqrt(gap):
        bad.append(f"alpha1 > beta1*sqrt(delta1^2 - k1^2) fails: "
                   f"{c.alpha1:.6g} <= {c.beta1 * math.sqrt(gap):.6g}")
    if bad:
        return Rho1Window(k1=k1, violations=tuple(bad))
    b2 = c.beta1 ** 2
    center = c.alpha1 / b2
    radius = math.sqrt(c.alpha1 ** 2 - b2 * gap) / b2
    return Rho1Window(k1=k1, center=center, radius=radius,
                      lo=max(center - radius, 0.0), hi=center + radius)


def gamma_interval(norm_a: float):
    if norm_a <= 0.0:
        return (0.0, float("nan"))
    return (0.0, 2.0 / norm_a ** 2)


@dataclass(frozen=True)
class StepCertificate:
    theta1: float
    theta2: float
    k1: float
    theta: float
    rho1_window: tuple
    gamma_window: tuple
    mode: str
    violations: tuple = field(default=())

    @property
    def certified(self) -> bool:
        return not self.violations

    @property
    def verdict(self) -> str:
        return "Certified" if self.certified else "Rejected"

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "mode": self.mode, "theta1": self.theta1,
                "theta2": self.theta2, "k1": self.k1, "theta": self.theta,
                "rho1_interval": list(self.rho1_window), "gamma_interval": list(self.gamma_window),
                "violations": list(self.violations)}

    def render(self) -> str:
        lines = [f"verdict: {self.verdict} ({self.mode} mode)",
                 f"theta1 = {self.theta1:.12g}", f"theta2 = {self.theta2:.12g}",
                 f"k1     = {self.k1:.12g}", f"theta  = {self.theta:.12g}",
                 f"rho1 interval:  ({self.rho1_window[0]:.12g}, {self.rho1_window[1]:.12g})",
                 f"gamma interval: ({self.gamma_window[0]:.12g}, {self.gamma_window[1]:.12g})"]
        lines += [f"violated: {v}" for v in self.violations]
        return "\n".join(lines)


MODES = ("theorem", "direct")


def certify(c: ConstantsBundle, params: SolverParams, mode: str = "theorem",
            qvip: bool = False) -> StepCertificate:
    """Check the step parameters against the contraction conditions.

    ``mode="theorem"`` requires the closed-form ``rho1`` window conditions
    together with ``theta < 1``; ``mode="direct"`` only requires feasible
    radicands, the ``gamma`` window and ``theta < 1`` computed with the
    actual ``gamma``.  With ``qvip=True`` the second stage is inert:
    ``theta2`` is taken as 0, ``gamma`` is unused and ``theta = theta1``.
    Every violated condition is listed, not just the first.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    bad = []
    nan = float("nan")
    rho1, rho2, gamma = params.rho1, params.rho2, params.gamma

    if qvip:
        theta2 = 0.0
    else:
        try:
            theta2 = compute_theta2(c, rho2)
        except InfeasibleConstantsError as exc:
            theta2 = nan
            bad.append(f"theta2 radicand: {exc}")
    try:
        theta1 = compute_theta1(c, rho1)
    except InfeasibleConstantsError as exc:
        theta1 = nan
        bad.append(f"theta1 radicand: {exc}")

    gwin = gamma_interval(c.norm_a)
    if not qvip:
        if c.norm_a <= 0.0:
            bad.append("|A| > 0 fails: A is the zero map")
        elif not gwin[0] < gamma < gwin[1]:
            bad.append(f"γ outside (0, 2/‖A‖²): gamma={gamma:.6g}, 2/‖A‖²={gwin[1]:.6g}")

    k1 = nan
    rwin = (nan, nan)
    if not math.isnan(theta2):
        window = rho1_interval(c, theta2)
        k1 = window.k1
        if window.ok:
            rwin = (window.lo, window.hi)
        if mode == "theorem":
            bad.extend(window.violations)
            if window.ok and not window.contains(rho1):
                bad.append(f"|rho1 - alpha1/beta1^2| < radius fails: rho1={rho1:.6g} "
                           f"outside ({window.lo:.6g}, {window.hi:.6g})")

    theta = nan
    if not (math.isnan(theta1) or math.isnan(theta2)):
        theta = theta1 if qvip else contraction_factor(theta1, theta2, gamma, c.norm_a)
        if not theta < 1.0:
            bad.append(f"theta < 1 fails: theta={theta:.6g}")
    return StepCertificate(theta1=theta1, theta2=theta2, k1=k1, theta=theta,
                           rho1_window=rwin, gamma_window=gwin, mode=mode,
                           violations=tuple(bad))


def certify_spec(spec: ProblemSpec, params: SolverParams, mode: str = "theorem",
                 qvip=None) -> StepCertificate:
    if qvip is None:
        qvip = spec.is_inert_second_stage()
    return certify(bundle_for(spec), params, mode=mode, qvip=qvip)
