import numpy as np
import pytest

from conftest import SET_KINDS
from splitqvi.certify import certify_spec
from splitqvi.generate import GenerationError, GeneratorConfig, generate, line_example
from splitqvi.hilbert import LinearMap
from splitqvi.operators import Affine, GMap
from splitqvi.oracle import OracleFailure, oracle_solve
from splitqvi.problem import ProblemSpec
from splitqvi.sets import Box, Halfspace, MovingSet, WholeSpace, sample_points
from splitqvi.solver import residual, solve


def probe_gap(rng, f, g, moving, x, probes=100):
    """Smallest <f(x), c - g(x)> over points c of C(x); >= 0 at a solution."""
    c = moving.at(x)
    pts = sample_points(c, rng, probes)
    fx, gx = f(x), g(x)
    return float(np.min((pts - gx) @ fx))


@pytest.mark.parametrize("family", ["interior_zero", "boundary"])
def test_known_solution_is_exact(family):
    for seed in range(30):
        dims = np.random.default_rng(seed).integers(1, 11, 2)
        spec = generate(GeneratorConfig(n1=int(dims[0]), n2=int(dims[1]), seed=seed, family=family))
        assert residual(spec, spec.known_solution) <= 1e-8
        assert certify_spec(spec, spec.params()).certified
        assert spec.meta["family"] == family and spec.meta["seed"] == seed


def test_boundary_solution_sits_on_a_face():
    rng = np.random.default_rng(0)
    for seed in range(20):
        spec = generate(GeneratorConfig(n1=2, n2=2, seed=seed, family="boundary"))
        xs = spec.known_solution
        fx = spec.f1(xs)
        assert np.linalg.norm(fx) > 1e-3      # not an interior zero
        box = spec.C1.at(xs)
        assert isinstance(box, Box)
        gx = spec.g1(xs)
        on_face = np.isclose(gx, box.upper, atol=1e-12) | np.isclose(gx, box.lower, atol=1e-12)
        assert on_face.any()
        assert probe_gap(rng, spec.f1, spec.g1, spec.C1, xs) >= -1e-8
        ax = spec.A(xs)
        assert probe_gap(rng, spec.f2, spec.g2, spec.C2, ax) >= -1e-8


def test_generation_is_deterministic():
    a = generate(GeneratorConfig(n1=4, n2=3, seed=11))
    b = generate(GeneratorConfig(n1=4, n2=3, seed=11))
    c = generate(GeneratorConfig(n1=4, n2=3, seed=12))
    assert a == b
    assert a != c


def test_line_example():
    spec = line_example()
    assert spec.dims == (1, 1)
    assert residual(spec, [0.0]) == 0.0
    assert oracle_solve(spec) == pytest.approx([0.0], abs=1e-15)


def test_config_validation():
    for bad in (dict(n1=0), dict(family="spiral"), dict(set_kinds=("cone",)),
                dict(family="boundary", set_kinds=("ball",)), dict(sigma_range=(1.0, 0.5))):
        with pytest.raises(ValueError):
            GeneratorConfig(**bad)


def test_infeasible_ranges_raise():
    # translations this large make nu alone exceed 1
    cfg = GeneratorConfig(seed=0, translation_range=(0.8, 0.9), max_attempts=5)
    with pytest.raises(GenerationError, match="no certified instance"):
        generate(cfg)


@pytest.mark.parametrize("kind", SET_KINDS)
def test_oracle_recovers_known_solution(kind):
    for seed in range(10):
        spec = generate(GeneratorConfig(n1=4, n2=3, seed=seed, set_kinds=(kind,)))
        for method in ("auto", "picard"):
            np.testing.assert_allclose(oracle_solve(spec, method=method), spec.known_solution,
                                       atol=1e-8)


def test_oracle_direct_matches_picard_without_known_solution():
    # fixed box or halfspace, g = I, f pushing outward: the direct active-set solve
    # and the fixed-point run must agree on a boundary solution
    rng = np.random.default_rng(5)
    active = 0
    for trial in range(20):
        n = int(rng.integers(1, 6))
        k = rng.standard_normal((n, n))
        m = 0.5 * (k - k.T) + rng.uniform(1, 2) * np.eye(n)
        f = Affine(m, 4 * rng.standard_normal(n))
        base = Box(-np.ones(n), np.ones(n)) if trial % 2 else Halfspace(rng.standard_normal(n), 0.2)
        spec = ProblemSpec.qvip(MovingSet.fixed(base), f)
        direct = oracle_solve(spec, method="direct")
        np.testing.assert_allclose(direct, oracle_solve(spec, method="picard"), atol=1e-9)
        active += np.linalg.norm(f(direct)) > 1e-6
    assert active >= 10


def test_oracle_flags_unsolvable_split():
    # each stage has its own solution and A does not map one onto the other
    n = 2
    spec = ProblemSpec(A=LinearMap.identity(n), C1=MovingSet.fixed(WholeSpace(n)),
                       C2=MovingSet.fixed(WholeSpace(n)), f1=Affine(np.eye(n), [-1.0, 0.0]),
                       f2=Affine(np.eye(n), [0.0, -1.0]), g1=GMap.identity(n), g2=GMap.identity(n))
    with pytest.raises(OracleFailure, match="verification"):
        oracle_solve(spec)


def test_solver_matches_oracle():
    for seed in range(20):
        family = "boundary" if seed % 2 else "interior_zero"
        spec = generate(GeneratorConfig(n1=1 + seed % 10, n2=1 + (3 * seed) % 10, seed=seed,
                                        family=family))
        res = solve(spec)
        assert np.linalg.norm(res.x - oracle_solve(spec)) <= 1e-6
