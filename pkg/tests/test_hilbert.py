import numpy as np
import pytest

from splitqvi.hilbert import (DimensionError, LinearMap, adjoint_apply, apply, as_vector, inner,
                              norm, operator_norm, power_iteration_norm, spectral_norm)


def test_inner_examples():
    assert inner([1, 0], [0, 1]) == 0
    assert inner([3, 4], [3, 4]) == 25
    assert inner([1, 2, 3], [4, 5, 6]) == 32
    assert norm([3, 4]) == 5


def test_inner_dimension_mismatch():
    with pytest.raises(DimensionError):
        inner([1, 2], [1, 2, 3])


def test_vector_rejects_nonfinite():
    with pytest.raises(ValueError):
        as_vector([1.0, np.nan])
    with pytest.raises(DimensionError):
        as_vector([1.0, 2.0], dim=3)


def test_apply_and_adjoint_examples():
    u = np.array([0.3, -1.2, 4.0])
    assert np.array_equal(apply(LinearMap.identity(3), u), u)
    assert np.array_equal(apply(LinearMap(np.diag([2.0, 3.0])), [1, 1]), [2, 3])
    # A^T = [[0, 0], [1, 0]] worked by hand
    a = LinearMap([[0, 1], [0, 0]])
    assert np.array_equal(adjoint_apply(a, [1, 0]), [0, 1])
    assert np.array_equal(adjoint_apply(a, [0, 1]), [0, 0])
    assert np.array_equal(apply(a, [1, 0]), [0, 0])
    assert np.array_equal(apply(a, [0, 1]), [1, 0])


def test_apply_dimension_mismatch():
    a = LinearMap(np.ones((2, 3)))
    with pytest.raises(DimensionError):
        a.apply([1, 2])
    with pytest.raises(DimensionError):
        a.adjoint_apply([1, 2, 3])


def test_linear_map_is_immutable():
    m = np.eye(2)
    a = LinearMap(m)
    m[0, 0] = 5.0
    assert a.matrix[0, 0] == 1.0
    with pytest.raises(ValueError):
        a.matrix[0, 0] = 3.0


def test_operator_norm_examples():
    assert operator_norm(LinearMap.identity(3)) == pytest.approx(1.0, rel=1e-10)
    assert operator_norm(LinearMap(np.diag([3.0, 1.0]))) == pytest.approx(3.0, rel=1e-10)
    # A^T A = [[1,1],[1,2]] has largest eigenvalue (3+sqrt5)/2
    golden = np.sqrt((3 + np.sqrt(5)) / 2)
    assert golden == pytest.approx((1 + np.sqrt(5)) / 2, rel=1e-15)
    assert operator_norm(LinearMap([[1, 1], [0, 1]])) == pytest.approx(golden, rel=1e-10)


def test_operator_norm_zero_map():
    assert operator_norm(LinearMap(np.zeros((2, 3)))) == 0.0


def test_adjoint_identity_random(rng):
    for _ in range(1000):
        n1, n2 = rng.integers(1, 8, size=2)
        a = LinearMap(rng.standard_normal((n2, n1)) * rng.uniform(0.1, 10))
        u, v = rng.standard_normal(n1), rng.standard_normal(n2)
        lhs = inner(a.apply(u), v)
        rhs = inner(u, a.adjoint_apply(v))
        assert abs(lhs - rhs) <= 1e-10 * (1 + norm(u) * norm(v) * a.norm())


def test_adjoint_has_same_norm(rng):
    for _ in range(50):
        a = LinearMap(rng.standard_normal(tuple(rng.integers(1, 10, size=2))))
        assert a.adjoint().norm() == pytest.approx(a.norm(), rel=1e-10)
        assert np.array_equal(a.adjoint().matrix, a.matrix.T)


def test_norm_bounds_action(rng):
    for _ in range(200):
        a = LinearMap(rng.standard_normal((4, 6)))
        u = rng.standard_normal(6)
        assert norm(a.apply(u)) <= a.norm() * norm(u) * (1 + 1e-12)


@pytest.mark.parametrize("shape", [(1, 1), (3, 5), (20, 20), (20, 7), (12, 19)])
def test_eigensolve_matches_power_iteration(rng, shape):
    for _ in range(10):
        m = rng.standard_normal(shape)
        assert spectral_norm(m) == pytest.approx(power_iteration_norm(m), rel=1e-8)
        assert spectral_norm(m) == pytest.approx(np.linalg.svd(m, compute_uv=False)[0], rel=1e-10)


def test_large_matrix_uses_power_iteration_deterministically(rng):
    m = rng.standard_normal((80, 70))
    assert spectral_norm(m) == spectral_norm(m)
    assert spectral_norm(m) == pytest.approx(np.linalg.svd(m, compute_uv=False)[0], rel=1e-8)
