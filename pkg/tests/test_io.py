import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splitqvi import io
from splitqvi.generate import FAMILIES, GeneratorConfig, generate
from splitqvi.operators import Constant, Translation
from splitqvi.problem import ProblemSpec
from splitqvi.sets import AffineSet, Box, MovingSet


def _assert_identical(a, b):
    assert a == b
    assert a.meta == b.meta
    assert np.array_equal(a.A.matrix, b.A.matrix)
    assert a.dims == b.dims


@pytest.mark.parametrize("family", FAMILIES)
def test_round_trip_generated(family):
    for seed in range(20):
        spec = generate(GeneratorConfig(n1=1 + seed % 5, n2=1 + seed % 3, seed=seed, family=family))
        back = io.loads(io.dumps(spec))
        _assert_identical(spec, back)
        # a second pass is byte-identical
        assert io.dumps(back) == io.dumps(spec)


def test_round_trip_file(tmp_path):
    spec = generate(GeneratorConfig(seed=3))
    path = tmp_path / "p.json"
    io.save(spec, path)
    _assert_identical(spec, io.load(path))


def test_round_trip_other_models():
    base = generate(GeneratorConfig(n1=2, n2=2, seed=0))
    spec = base.with_(
        C1=MovingSet(Box([-np.inf, 0.0], [1.0, np.inf]), Constant([0.5, -0.5])),
        C2=MovingSet(AffineSet(np.array([[1.0], [2.0]]), [0.0, 1.0]), Translation([1.0, 1.0])),
        known_solution=None)
    back = io.loads(io.dumps(spec))
    assert back == spec
    assert np.array_equal(back.C1.base.lower, [-np.inf, 0.0])


def test_qvip_round_trip():
    base = generate(GeneratorConfig(n1=3, n2=3, seed=1))
    spec = ProblemSpec.qvip(base.C1, base.f1, defaults=base.params())
    assert io.loads(io.dumps(spec)) == spec


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 6), st.integers(1, 6))
def test_round_trip_hypothesis(seed, n1, n2):
    spec = generate(GeneratorConfig(n1=n1, n2=n2, seed=seed))
    assert io.loads(io.dumps(spec)) == spec


def _doc():
    return json.loads(io.dumps(generate(GeneratorConfig(n1=3, n2=2, seed=0))))


@pytest.mark.parametrize("mutate, needle", [
    (lambda d: d.pop("A"), "field 'A': missing"),
    (lambda d: d["A"].pop(), "field 'A': expected 2 rows"),
    (lambda d: d["A"][1].__setitem__(0, "x"), "field 'A[1]': entry 0 is not a number"),
    (lambda d: d.__setitem__("dims", [3, 0]), "field 'dims'"),
    (lambda d: d["C1"]["base"].__setitem__("type", "cone"), "field 'C1.base.type': unknown set type"),
    (lambda d: d["f2"].__setitem__("matrix", [[1.0], [2.0]]), "field 'f2.matrix[0]': expected length 2"),
    (lambda d: d["params"].__setitem__("rho1", -1), "field 'params'"),
    (lambda d: d["params"].__setitem__("speed", 3), "field 'params.speed': unknown parameter"),
    (lambda d: d.__setitem__("g1", {"type": "scaling", "s": 0.5}), "field 'g1'"),
    (lambda d: d.__setitem__("known_solution", [1.0]), "field 'known_solution': expected length 3"),
])
def test_schema_errors_name_the_field(mutate, needle):
    d = _doc()
    mutate(d)
    with pytest.raises(io.SpecParseError) as err:
        io.spec_from_dict(d)
    assert needle in str(err.value)


def test_syntax_error_reports_line_and_column():
    text = io.dumps(generate(GeneratorConfig(seed=0)))
    lines = text.splitlines()
    lines[4] = lines[4] + ","   # trailing comma inside the A matrix
    with pytest.raises(io.SpecParseError) as err:
        io.loads("\n".join(lines))
    assert "line 6" in str(err.value) or "line 5" in str(err.value)
    assert "column" in str(err.value)
