import numpy as np
import pytest

from splitqvi.hilbert import DimensionError
from splitqvi.operators import (Affine, GMap, NoConvergenceError, Scaling, SingularOperatorError,
                                Translation, UnsupportedModelError, Zero, certify_constants,
                                certify_relative, evaluate, invert_g)


def random_affine(rng, n, shift=1.0):
    """Monotone affine map: positive semidefinite plus skew plus a multiple of I."""
    k = rng.standard_normal((n, n))
    b = rng.standard_normal((n, n))
    m = 0.3 * b @ b.T + (k - k.T) + rng.uniform(0, 2) * np.eye(n)
    return Affine(m, shift * rng.standard_normal(n))


def random_gmap(rng, n):
    k = rng.standard_normal((n, n))
    d = rng.uniform(1.0, 3.0) * np.eye(n) + 0.4 * (k - k.T) + 0.1 * (k @ k.T)
    return GMap(Affine(d, rng.standard_normal(n)), n)


def test_evaluate_examples():
    assert np.array_equal(evaluate(Zero(), [1.0, 2.0]), [0, 0])
    assert np.array_equal(evaluate(Affine(2 * np.eye(2)), [1, 2]), [2, 4])
    # [[2,1],[0,2]] @ [1,1] + [1,0] = [3,2] + [1,0]
    assert np.array_equal(evaluate(Affine([[2, 1], [0, 2]], [1, 0]), [1, 1]), [4, 2])
    assert np.array_equal(evaluate(Scaling(3.0), [1, -1]), [3, -3])
    assert np.array_equal(evaluate(Translation([1, 2]), [1, 1]), [2, 3])


def test_evaluate_dimension_mismatch():
    with pytest.raises(DimensionError):
        evaluate(Affine(np.eye(2)), [1, 2, 3])
    with pytest.raises(DimensionError):
        Affine(np.ones((2, 3)))


def test_certify_constants_examples():
    a, b = certify_constants(Affine(2 * np.eye(2)))
    assert (a, b) == pytest.approx((2.0, 2.0), abs=1e-10)
    # symmetric part [[2,.5],[.5,2]] has eigenvalues 1.5, 2.5;
    # M^T M = [[4,2],[2,5]] has largest eigenvalue (9+sqrt17)/2
    a, b = certify_constants(Affine([[2, 1], [0, 2]]))
    assert a == pytest.approx(1.5, abs=1e-10)
    assert b == pytest.approx(np.sqrt((9 + np.sqrt(17)) / 2), abs=1e-10)
    assert b == pytest.approx(2.5616, abs=1e-4)
    a, b = certify_constants(Affine([[0, -1], [1, 0]]))
    assert a == pytest.approx(0.0, abs=1e-10)
    assert b == pytest.approx(1.0, abs=1e-10)


def test_certify_constants_needs_dimension_for_scalar_models():
    with pytest.raises(DimensionError):
        certify_constants(Scaling(2.0))
    assert certify_constants(Scaling(2.0), 3) == pytest.approx((2.0, 2.0))
    assert certify_constants(Zero(), 2) == (0.0, 0.0)


def test_certify_relative_examples():
    f = Affine([[2, 1], [0, 2]])
    assert certify_relative(f, GMap.identity(2)) == pytest.approx(certify_constants(f)[0], abs=1e-12)
    assert certify_relative(Affine(2 * np.eye(2)), GMap(Affine(3 * np.eye(2)), 2)) == pytest.approx(6.0)
    assert certify_relative(Zero(), GMap(Affine(3 * np.eye(2)), 2)) == 0.0
    with pytest.raises(UnsupportedModelError):
        certify_relative(lambda x: x, GMap.identity(2))


def test_gmap_constants():
    g = GMap(Affine(2.5 * np.eye(3), [1, 2, 3]), 3)
    assert g.sigma == pytest.approx(1.5)
    assert g.delta == pytest.approx(2.5)
    assert GMap(Translation([1.0, 2.0]), 2).sigma == 0.0
    with pytest.raises(SingularOperatorError):
        GMap(Scaling(0.5), 2)


def test_invert_g_examples():
    t = np.array([0.3, -7.0])
    assert np.array_equal(invert_g(GMap.identity(2), t), t)
    np.testing.assert_allclose(invert_g(GMap(Affine(2 * np.eye(2), [1, 1]), 2), [3, 3]), [1, 1], atol=1e-15)
    assert np.array_equal(invert_g(GMap(Translation([1.0, 2.0]), 2), t), t - [1.0, 2.0])


def test_invert_g_two_sided(rng):
    for _ in range(300):
        n = int(rng.integers(1, 9))
        g = random_gmap(rng, n)
        t, y = 5 * rng.standard_normal((2, n))
        assert np.linalg.norm(g(invert_g(g, t)) - t) <= 1e-10
        assert np.linalg.norm(invert_g(g, g(y)) - y) <= 1e-10


def test_iterative_inversion_agrees(rng):
    for _ in range(50):
        n = int(rng.integers(1, 6))
        g = random_gmap(rng, n)
        t = rng.standard_normal(n)
        y = invert_g(g, t, method="iterative")
        assert np.linalg.norm(g(y) - t) <= 1e-12
        np.testing.assert_allclose(y, invert_g(g, t), atol=1e-10)


def test_iterative_inversion_budget():
    # strongly skew g: the damped iteration contracts too slowly for the budget
    d = np.array([[1.0, 1e4], [-1e4, 1.0]])
    g = GMap(Affine(d), 2)
    with pytest.raises(NoConvergenceError):
        invert_g(g, [1.0, 1.0], method="iterative")


def test_clamped_alpha_never_certifies_a_step(rng):
    # a non-monotone f gets alpha = 0, and then theta1 >= delta / sqrt(2 sigma + 1) >= 1
    from splitqvi.certify import ConstantsBundle, compute_theta1
    f = Affine([[-1.0, 0.0], [0.0, 2.0]])
    assert certify_constants(f)[0] == 0.0
    for _ in range(200):
        g = random_gmap(rng, 2)
        a_rel = certify_relative(f, g)
        beta = certify_constants(f)[1]
        c = ConstantsBundle(alpha1=a_rel, alpha2=1.0, beta1=beta, beta2=1.0, delta1=g.delta,
                            delta2=1.0, sigma1=g.sigma, sigma2=0.0, nu1=0.0, nu2=0.0, norm_a=1.0)
        if a_rel == 0.0:
            for rho in (1e-3, 0.1, 1.0, 10.0):
                assert compute_theta1(c, rho) >= 1.0 - 1e-12


def test_certified_constants_survive_falsification(rng):
    for _ in range(20):
        n = int(rng.integers(1, 6))
        f = random_affine(rng, n)
        g = random_gmap(rng, n)
        alpha, beta = certify_constants(f)
        alpha_rel = certify_relative(f, g)
        x, y = rng.standard_normal((2, 500, n))
        dx = x - y
        df = np.array([f(a) - f(b) for a, b in zip(x, y)])
        dg = np.array([g(a) - g(b) for a, b in zip(x, y)])
        sq = np.sum(dx * dx, axis=1)
        assert np.all(np.sum(df * dx, axis=1) >= alpha * sq - 1e-9)
        assert np.all(np.linalg.norm(df, axis=1) <= beta * np.sqrt(sq) + 1e-9)
        if alpha_rel > 0:
            # a clamped zero is not a valid bound, but it never certifies a step
            assert np.all(np.sum(df * dg, axis=1) >= alpha_rel * sq - 1e-9)
        assert np.all(np.linalg.norm(dg, axis=1) <= g.delta * np.sqrt(sq) + 1e-9)
        assert np.all(np.sum((dg - dx) * dx, axis=1) >= g.sigma * sq - 1e-9)


def test_constants_against_rayleigh_oracle(rng):
    """Sampled Rayleigh quotients over 1e5 directions must never beat a certified constant."""
    for _ in range(5):
        n = int(rng.integers(2, 6))
        f = random_affine(rng, n)
        alpha, beta = certify_constants(f)
        u = rng.standard_normal((100_000, n))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        mu = u @ f.matrix.T
        mono = np.einsum("ij,ij->i", mu, u)
        stretch = np.linalg.norm(mu, axis=1)
        assert mono.min() >= alpha - 1e-9
        assert stretch.max() <= beta + 1e-9
        # and the certified constants are tight: the sample gets close
        assert mono.min() - alpha < 0.2 * (1 + abs(alpha))
        assert beta - stretch.max() < 0.2 * beta
