import os
import subprocess
import sys

import numpy as np
import pytest

from conftest import SET_KINDS
from splitqvi.generate import GeneratorConfig, generate
from splitqvi.kernels import HAVE_COMPILED, compile_plan, get_runner, run_plan
from splitqvi.solver import solve

needs_compiled = pytest.mark.skipif(not HAVE_COMPILED, reason="compiled kernel not built")


def test_compiled_kernel_is_built():
    # the editable install builds the extension; a silent fallback would hide a broken build
    assert HAVE_COMPILED


@needs_compiled
@pytest.mark.parametrize("family", ["interior_zero", "boundary"])
def test_backends_agree(family):
    for seed in range(25):
        dims = np.random.default_rng(seed).integers(1, 9, 2)
        cfg = GeneratorConfig(n1=int(dims[0]), n2=int(dims[1]), seed=seed, family=family,
                              sigma_range=(0.0, 2.0), translation_range=(0.0, 0.1))
        spec = generate(cfg)
        x0 = np.linspace(-2, 2, spec.n1)
        runs = [solve(spec, None, x0, backend=b) for b in ("compiled", "python", "reference")]
        c, p, r = (run.trace for run in runs)
        assert len(c) == len(p) == len(r)
        assert runs[0].status == runs[1].status == runs[2].status
        for a, b in ((c, p), (c, r)):
            np.testing.assert_allclose(a.x, b.x, atol=1e-13)
            np.testing.assert_allclose(a.y, b.y, atol=1e-13)
            np.testing.assert_allclose(a.z, b.z, atol=1e-13)
            np.testing.assert_allclose(a.residual, b.residual, atol=1e-12)


@needs_compiled
def test_every_set_kind_in_the_kernel():
    for kind in SET_KINDS:
        for seed in range(5):
            spec = generate(GeneratorConfig(n1=4, n2=3, seed=seed, set_kinds=(kind,)))
            assert type(spec.C1.base).__name__.lower().startswith(kind.split("_")[0][:4])
            a = solve(spec, None, backend="compiled").trace.x
            b = solve(spec, None, backend="python").trace.x
            np.testing.assert_allclose(a, b, atol=1e-13)


def test_deterministic_rerun():
    spec = generate(GeneratorConfig(n1=6, n2=4, seed=21))
    a = solve(spec).trace
    b = solve(spec).trace
    assert np.array_equal(a.x, b.x) and np.array_equal(a.residual, b.residual)


def test_max_iters_trims_rows():
    spec = generate(GeneratorConfig(seed=2))
    p = spec.params(max_iters=3)
    for backend in ("python", "reference") + (("compiled",) if HAVE_COMPILED else ()):
        res = solve(spec, p, np.full(spec.n1, 5.0), backend=backend)
        assert res.trace.steps == 3
        assert res.status == "MaxIters"


def test_unknown_backend():
    with pytest.raises(ValueError):
        get_runner("fortran")


def test_plan_shapes():
    spec = generate(GeneratorConfig(n1=3, n2=2, seed=0))
    plan = compile_plan(spec)
    assert plan.a.shape == (2, 3)
    assert plan.stage1.mats.shape == (5, 3, 3) and plan.stage2.vecs.shape == (5, 2)
    alphas = np.full(11, 0.5)
    xs, ys, zs, res, _ = run_plan(plan, 1.0, 1.0, 0.5, alphas, np.zeros(3), 1e-300, backend="python")
    assert xs.shape == (11, 3) and zs.shape == (11, 2) and res.shape == (11,)


def test_env_var_forces_fallback():
    code = "import splitqvi.kernels as k; print(k.HAVE_COMPILED, k.default_backend())"
    env = dict(os.environ, SPLITQVI_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True).stdout.split()
    assert out == ["False", "python"]
