"""Symmetric coupling kernels W(x, y) with values in [0, 1].

Variants: constant, block (piecewise constant on a partition of the unit
interval, which covers embedded finite graphs), geodesic (indicator of
geodesic distance <= delta on the circle, torus, or sphere), explicit
matrix on an abstract space, and user-supplied evaluators. Kernels are
immutable; ``evaluate`` is the pointwise contract and ``eval_row`` the
vectorized one used by discretization.
"""

from __future__ import annotations

import json

import numpy as np

from .space import IndexSpace


class Kernel:
    """Base class; subclasses fix geometry compatibility and evaluation."""

    geometry: str | None = None  # None means any geometry
    dim: int | None = None

    def evaluate(self, x, y) -> float:
        raise NotImplementedError

    def eval_row(self, space: IndexSpace, i: int) -> np.ndarray:
        """Row W(x_i, x_j) for all j; subclasses override with vector code."""
        self.check_space(space)
        xi = space.coords[i]
        return np.array([self.evaluate(xi, space.coords[j]) for j in range(space.n)])

    def matrix(self, space: IndexSpace) -> np.ndarray:
        self.check_space(space)
        return np.stack([self.eval_row(space, i) for i in range(space.n)])

    def check_space(self, space: IndexSpace):
        if self.geometry is not None and space.geometry != self.geometry:
            raise ValueError(
                f"kernel expects geometry {self.geometry!r}, space has {space.geometry!r}"
            )
        if self.dim is not None and space.dim != self.dim:
            raise ValueError(f"kernel expects dimension {self.dim}, space has {space.dim}")

    def to_json(self) -> str:
        raise ValueError(f"{type(self).__name__} does not serialize")


class ConstantKernel(Kernel):
    """W(x, y) = c on any index space."""

    def __init__(self, value: float):
        value = float(value)
        if not 0.0 <= value <= 1.0:
            raise ValueError("constant kernel value must lie in [0, 1]")
        self.value = value

    def evaluate(self, x, y) -> float:
        return self.value

    def eval_row(self, space, i):
        return np.full(space.n, self.value)

    def to_json(self):
        return json.dumps({"variant": "constant", "value": self.value})


class MatrixKernel(Kernel):
    """Explicit symmetric values W[i, j] on an abstract n-point space."""

    geometry = "abstract"

    def __init__(self, values):
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError("matrix kernel needs a square matrix")
        if not np.array_equal(values, values.T):
            raise ValueError("matrix kernel must be symmetric")
        if np.min(values) < 0.0 or np.max(values) > 1.0:
            raise ValueError("matrix kernel entries must lie in [0, 1]")
        self.values = values

    def check_space(self, space):
        super().check_space(space)
        if space.n != self.values.shape[0]:
            raise ValueError("matrix kernel size does not match the space")

    def evaluate(self, x, y) -> float:
        return float(self.values[int(np.asarray(x).reshape(-1)[0]),
                                 int(np.asarray(y).reshape(-1)[0])])

    def eval_row(self, space, i):
        self.check_space(space)
        return self.values[i].copy()

    def to_json(self):
        return json.dumps({"variant": "matrix", "values": self.values.tolist()})


class BlockKernel(Kernel):
    """Piecewise-constant kernel on a partition of the unit interval.

    ``boundaries`` is an increasing array from 0 to 1 delimiting the cells,
    ``values`` the symmetric cell-by-cell coupling matrix.
    """

    geometry = "interval"

    def __init__(self, boundaries, values):
        boundaries = np.asarray(boundaries, dtype=np.float64).reshape(-1)
        values = np.asarray(values, dtype=np.float64)
        k = boundaries.size - 1
        if k < 1 or boundaries[0] != 0.0 or boundaries[-1] != 1.0:
            raise ValueError("boundaries must start at 0 and end at 1")
        if np.any(np.diff(boundaries) <= 0):
            raise ValueError("boundaries must be strictly increasing")
        if values.shape != (k, k):
            raise ValueError("block matrix shape must match the cell count")
        if not np.array_equal(values, values.T):
            raise ValueError("block matrix must be symmetric")
        if np.min(values) < 0.0 or np.max(values) > 1.0:
            raise ValueError("block values must lie in [0, 1]")
        self.boundaries = boundaries
        self.values = values

    def _cell(self, x) -> np.ndarray:
        idx = np.searchsorted(self.boundaries, x, side="right") - 1
        return np.clip(idx, 0, self.values.shape[0] - 1)

    def evaluate(self, x, y) -> float:
        cx = self._cell(float(np.asarray(x).reshape(-1)[0]))
        cy = self._cell(float(np.asarray(y).reshape(-1)[0]))
        return float(self.values[cx, cy])

    def eval_row(self, space, i):
        self.check_space(space)
        cells = self._cell(space.coords[:, 0])
        return self.values[self._cell(space.coords[i, 0])][cells]

    def to_json(self):
        return json.dumps({
            "variant": "block",
            "boundaries": self.boundaries.tolist(),
            "values": self.values.tolist(),
        })


def circle_distance(a, b):
    """Distance on the circle of unit circumference, values in [0, 1/2]."""
    d = np.abs(np.asarray(a) - np.asarray(b))
    return np.minimum(d, 1.0 - d)


class GeodesicKernel(Kernel):
    """Indicator of geodesic distance <= delta (closed ball).

    The circle and the torus use coordinates in [0, 1) with the product
    max-metric (arc distance for one dimension); the sphere uses arc length
    between unit vectors. Pairs sitting exactly on the ball boundary count
    as connected; the comparison carries a 1e-12 slack so that grid pairs
    whose true distance equals delta are included consistently despite
    coordinate rounding.
    """

    _TIE_TOL = 1e-12

    def __init__(self, geometry: str, delta: float, dim: int | None = None):
        if delta <= 0:
            raise ValueError("delta must be positive")
        if geometry in ("interval", "torus"):
            self.dim = 1 if geometry == "interval" else (dim if dim is not None else 2)
        elif geometry == "sphere2":
            self.dim = 3
        else:
            raise ValueError(f"geodesic kernel does not support geometry {geometry!r}")
        self.geometry = geometry
        self.delta = float(delta)

    def _distance(self, x, y):
        if self.geometry == "sphere2":
            dot = np.clip(np.sum(np.asarray(x) * np.asarray(y), axis=-1), -1.0, 1.0)
            return np.arccos(dot)
        return np.max(circle_distance(x, y), axis=-1)

    def evaluate(self, x, y) -> float:
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if x.shape != (self.dim,) or y.shape != (self.dim,):
            raise ValueError(f"points must have dimension {self.dim}")
        d = self._distance(x, y)
        return 1.0 if d <= self.delta + self._TIE_TOL else 0.0

    def eval_row(self, space, i):
        self.check_space(space)
        d = self._distance(space.coords[i][None, :], space.coords)
        return (d <= self.delta + self._TIE_TOL).astype(np.float64)

    def to_json(self):
        return json.dumps({
            "variant": "geodesic",
            "geometry": self.geometry,
            "dim": self.dim,
            "delta": self.delta,
        })


class CustomKernel(Kernel):
    """Wraps a user evaluator f(x, y) -> [0, 1].

    The evaluator must be symmetric; construction samples 100 random point
    pairs of the declared geometry and rejects evaluators that break
    symmetry or range. Evaluators must be pure.
    """

    _SYMMETRY_SAMPLES = 100

    def __init__(self, fn, geometry: str, dim: int | None = None):
        if geometry not in ("interval", "torus", "sphere2"):
            raise ValueError("custom kernels support interval, torus, or sphere2 geometry")
        self.fn = fn
        self.geometry = geometry
        if geometry == "interval":
            self.dim = 1
        elif geometry == "sphere2":
            self.dim = 3
        else:
            self.dim = dim if dim is not None else 2
        self._verify()

    def _sample_points(self, rng, k):
        if self.geometry == "sphere2":
            v = rng.normal(size=(k, 3))
            return v / np.linalg.norm(v, axis=1, keepdims=True)
        return rng.random((k, self.dim))

    def _verify(self):
        rng = np.random.Generator(np.random.Philox(0))
        xs = self._sample_points(rng, self._SYMMETRY_SAMPLES)
        ys = self._sample_points(rng, self._SYMMETRY_SAMPLES)
        for x, y in zip(xs, ys):
            a = float(self.fn(x, y))
            b = float(self.fn(y, x))
            if abs(a - b) > 1e-12:
                raise ValueError("custom kernel evaluator is not symmetric")
            if not -1e-12 <= a <= 1.0 + 1e-12:
                raise ValueError("custom kernel value outside [0, 1]")

    def evaluate(self, x, y) -> float:
        return float(self.fn(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)))


def canonical_embedding(adjacency) -> BlockKernel:
    """Block kernel on the unit interval with n equal cells valued A[k, j].

    Accepts 0/1 adjacency matrices and, more generally, symmetric weight
    matrices with entries in [0, 1].
    """
    a = np.asarray(adjacency, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("adjacency must be a square matrix")
    if not np.array_equal(a, a.T):
        raise ValueError("adjacency must be symmetric")
    n = a.shape[0]
    boundaries = np.arange(n + 1, dtype=np.float64) / n
    boundaries[-1] = 1.0
    return BlockKernel(boundaries, a)


def geodesic_kernel(geometry: str, delta: float, dim: int | None = None) -> GeodesicKernel:
    """Indicator kernel of geodesic distance <= delta; see GeodesicKernel."""
    return GeodesicKernel(geometry, delta, dim=dim)


def kernel_from_json(text: str) -> Kernel:
    doc = json.loads(text)
    variant = doc.get("variant")
    if variant == "constant":
        return ConstantKernel(doc["value"])
    if variant == "matrix":
        return MatrixKernel(np.array(doc["values"], dtype=np.float64))
    if variant == "block":
        return BlockKernel(np.array(doc["boundaries"]), np.array(doc["values"]))
    if variant == "geodesic":
        return GeodesicKernel(doc["geometry"], doc["delta"], dim=doc.get("dim"))
    raise ValueError(f"unknown kernel variant {variant!r}")
