"""JSON problem files.

Layout::

    {
      "dims": [n1, n2],
      "A": [[...], ...],                      # row-major, n2 rows
      "C1": {"base": {"type": "box", "lower": [...], "upper": [...]},
             "translation": {"type": "affine", "matrix": [[...]], "offset": [...]}},
      "C2": {...},
      "f1": {"type": "affine", "matrix": [[...]], "offset": [...]},
      "f2": {...}, "g1": {...}, "g2": {...},
      "known_solution": [...],                # optional
      "params": {"rho1": 1.0, ...}            # optional defaults
    }

Set types: ``whole``, ``box``, ``ball``, ``halfspace``, ``affine_set``.
Operator types: ``affine``, ``scaling``, ``translation``, ``constant``,
``zero``, ``identity``.  Infinite box bounds are written as ``null``.
"""
from __future__ import annotations

import json
import math

import numpy as np

from .hilbert import LinearMap
from .operators import Affine, Constant, GMap, OperatorModel, Scaling, Translation, Zero
from .problem import ProblemSpec, SolverParams
from .sets import AffineSet, Ball, Box, ConvexSet, Halfspace, MovingSet, WholeSpace


class SpecParseError(ValueError):
    """Malformed problem file; the message names the offending line or field."""


def _floats(seq):
    return [float(v) for v in seq]


def _bound(v):
    return None if math.isinf(v) else float(v)


def set_to_dict(c: ConvexSet) -> dict:
    if isinstance(c, WholeSpace):
        return {"type": "whole", "dim": c.dim}
    if isinstance(c, Box):
        return {"type": "box", "lower": [_bound(v) for v in c.lower],
                "upper": [_bound(v) for v in c.upper]}
    if isinstance(c, Ball):
        return {"type": "ball", "center": _floats(c.center), "radius": c.radius}
    if isinstance(c, Halfspace):
        return {"type": "halfspace", "normal": _floats(c.normal), "offset": c.offset}
    if isinstance(c, AffineSet):
        return {"type": "affine_set", "basis": c.basis.tolist(), "point": _floats(c.point)}
    raise TypeError(f"cannot serialize {type(c).__name__}")


def operator_to_dict(op: OperatorModel) -> dict:
    if isinstance(op, Affine):
        return {"type": "affine", "matrix": op.matrix.tolist(), "offset": _floats(op.shift)}
    if isinstance(op, Scaling):
        return {"type": "scaling", "s": float(op.s)}
    if isinstance(op, Translation):
        return {"type": "translation", "c": _floats(op.c)}
    if isinstance(op, Constant):
        return {"type": "constant", "c": _floats(op.c)}
    if isinstance(op, Zero):
        return {"type": "zero"}
    raise TypeError(f"cannot serialize {type(op).__name__}")


def spec_to_dict(spec: ProblemSpec) -> dict:
    d = {
        "dims": [spec.n1, spec.n2],
        "A": spec.A.matrix.tolist(),
        "C1": {"base": set_to_dict(spec.C1.base), "translation": operator_to_dict(spec.C1.translation)},
        "C2": {"base": set_to_dict(spec.C2.base), "translation": operator_to_dict(spec.C2.translation)},
        "f1": operator_to_dict(spec.f1),
        "f2": operator_to_dict(spec.f2),
        "g1": operator_to_dict(spec.g1.inner),
        "g2": operator_to_dict(spec.g2.inner),
    }
    if spec.known_solution is not None:
        d["known_solution"] = _floats(spec.known_solution)
    if spec.defaults is not None:
        d["params"] = spec.defaults.to_dict()
    if spec.meta:
        d["meta"] = spec.meta
    return d


def dumps(spec: ProblemSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2)


def save(spec: ProblemSpec, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(spec))
        fh.write("\n")


class _Reader:
    """Field access that reports the dotted path of whatever goes wrong."""

    def __init__(self, data, path=""):
        self.data = data
        self.path = path

    def fail(self, msg, key=None):
        where = self.path if key is None else (f"{self.path}.{key}" if self.path else key)
        raise SpecParseError(f"field '{where or '<root>'}': {msg}")

    def sub(self, key):
        if not isinstance(self.data, dict):
            self.fail("expected an object")
        if key not in self.data:
            self.fail("missing", key)
        return _Reader(self.data[key], f"{self.path}.{key}" if self.path else key)

    def get(self, key, default=None):
        if not isinstance(self.data, dict):
            self.fail("expected an object")
        if key not in self.data:
            return default
        return _Reader(self.data[key], f"{self.path}.{key}" if self.path else key)

    def number(self):
        v = self.data
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.fail(f"expected a number, got {type(v).__name__}")
        return float(v)

    def vector(self, n=None, allow_null=False):
        v = self.data
        if not isinstance(v, list):
            self.fail("expected a list of numbers")
        out = []
        for i, e in enumerate(v):
            if e is None and allow_null:
                out.append(math.nan)
            elif isinstance(e, bool) or not isinstance(e, (int, float)):
                self.fail(f"entry {i} is not a number")
            else:
                out.append(float(e))
        if n is not None and len(out) != n:
            self.fail(f"expected length {n}, got {len(out)}")
        return np.array(out, dtype=float)

    def matrix(self, rows=None, cols=None):
        v = self.data
        if not isinstance(v, list) or not all(isinstance(r, list) for r in v):
            self.fail("expected a list of rows")
        if rows is not None and len(v) != rows:
            self.fail(f"expected {rows} rows, got {len(v)}")
        out = [_Reader(r, f"{self.path}[{i}]").vector(cols) for i, r in enumerate(v)]
        if not out:
            self.fail("empty matrix")
        width = {len(r) for r in out}
        if len(width) != 1:
            self.fail("rows have different lengths")
        return np.array(out, dtype=float)

    def string(self):
        if not isinstance(self.data, str):
            self.fail("expected a string")
        return self.data


def _parse_set(r: _Reader, n: int) -> ConvexSet:
    kind = r.sub("type").string()
    try:
        if kind == "whole":
            return WholeSpace(n)
        if kind == "box":
            lo = r.sub("lower").vector(n, allow_null=True)
            hi = r.sub("upper").vector(n, allow_null=True)
            lo = np.where(np.isnan(lo), -np.inf, lo)
            hi = np.where(np.isnan(hi), np.inf, hi)
            return Box(lo, hi)
        if kind == "ball":
            return Ball(r.sub("center").vector(n), r.sub("radius").number())
        if kind == "halfspace":
            return Halfspace(r.sub("normal").vector(n), r.sub("offset").number())
        if kind == "affine_set":
            return AffineSet(r.sub("basis").matrix(rows=n), r.sub("point").vector(n))
    except SpecParseError:
        raise
    except ValueError as exc:
        r.fail(str(exc))
    r.fail(f"unknown set type {kind!r}", "type")


def _parse_operator(r: _Reader, n: int) -> OperatorModel:
    kind = r.sub("type").string()
    if kind == "affine":
        m = r.sub("matrix").matrix(rows=n, cols=n)
        q = r.get("offset")
        return Affine(m, None if q is None else q.vector(n))
    if kind == "scaling":
        return Scaling(r.sub("s").number())
    if kind == "identity":
        return Scaling(1.0)
    if kind == "translation":
        return Translation(r.sub("c").vector(n))
    if kind == "constant":
        return Constant(r.sub("c").vector(n))
    if kind == "zero":
        return Zero()
    r.fail(f"unknown operator type {kind!r}", "type")


def _parse_moving(r: _Reader, n: int) -> MovingSet:
    base = _parse_set(r.sub("base"), n)
    t = r.get("translation")
    trans = Zero() if t is None else _parse_operator(t, n)
    return MovingSet(base, trans)


def _parse_g(r: _Reader, n: int) -> GMap:
    op = _parse_operator(r, n)
    try:
        return GMap(op, n)
    except ValueError as exc:
        r.fail(str(exc))


def _parse_params(r: _Reader) -> SolverParams:
    if not isinstance(r.data, dict):
        r.fail("expected an object")
    known = {"rho1", "rho2", "gamma", "alpha", "tol"}
    kw = {}
    for k, v in r.data.items():
        sub = r.sub(k)
        if k in known:
            kw[k] = sub.number()
        elif k == "max_iters":
            kw[k] = int(sub.number())
        elif k == "schedule":
            kw[k] = sub.string()
        else:
            sub.fail("unknown parameter")
    try:
        return SolverParams(**kw)
    except ValueError as exc:
        r.fail(str(exc))


def spec_from_dict(data) -> ProblemSpec:
    r = _Reader(data)
    dims = r.sub("dims").vector(2)
    n1, n2 = int(dims[0]), int(dims[1])
    if n1 < 1 or n2 < 1 or n1 != dims[0] or n2 != dims[1]:
        r.fail("dimensions must be positive integers", "dims")
    a = r.sub("A").matrix(rows=n2, cols=n1)
    ks = r.get("known_solution")
    pr = r.get("params")
    meta = r.get("meta")
    return ProblemSpec(
        A=LinearMap(a),
        C1=_parse_moving(r.sub("C1"), n1),
        C2=_parse_moving(r.sub("C2"), n2),
        f1=_parse_operator(r.sub("f1"), n1),
        f2=_parse_operator(r.sub("f2"), n2),
        g1=_parse_g(r.sub("g1"), n1),
        g2=_parse_g(r.sub("g2"), n2),
        known_solution=None if ks is None else ks.vector(n1),
        defaults=None if pr is None else _parse_params(pr),
        meta={} if meta is None else dict(meta.data),
    )


def loads(text: str) -> ProblemSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return spec_from_dict(data)


def load(path) -> ProblemSpec:
    with open(path) as fh:
        return loads(fh.read())
