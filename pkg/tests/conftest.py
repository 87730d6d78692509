import numpy as np
import pytest

from splitqvi.sets import AffineSet, Ball, Box, Halfspace, WholeSpace

SET_KINDS = ("whole", "box", "ball", "halfspace", "affine_set")


def random_set(rng, kind, n):
    if kind == "whole":
        return WholeSpace(n)
    if kind == "box":
        a, b = rng.standard_normal(n), rng.standard_normal(n)
        return Box(np.minimum(a, b), np.maximum(a, b))
    if kind == "ball":
        return Ball(rng.standard_normal(n), rng.uniform(0.1, 2.0))
    if kind == "halfspace":
        return Halfspace(rng.standard_normal(n), rng.standard_normal())
    if kind == "affine_set":
        k = int(rng.integers(1, n + 1))
        return AffineSet(rng.standard_normal((n, k)), rng.standard_normal(n))
    raise ValueError(kind)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
