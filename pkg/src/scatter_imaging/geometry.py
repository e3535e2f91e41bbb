"""Obstacle boundaries, direction sets and sampling grids in the plane.

Curves are 2*pi-periodic parametrizations ``t -> (x(t), y(t))`` traversed
counterclockwise, so that ``(y'(t), -x'(t))`` points outward.  Callables
take an array of parameters of shape ``(n,)`` and return shape ``(n, 2)``.

Self-intersection is never checked for user-supplied shapes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

CurveMap = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class BoundaryCurve:
    """Closed parametric curve with analytic first and second derivatives."""

    param: CurveMap
    derivative: CurveMap
    second_derivative: CurveMap
    label: str
    spec: dict = field(default_factory=dict)

    def __call__(self, t) -> np.ndarray:
        return self.param(np.atleast_1d(np.asarray(t, dtype=float)))

    def speed(self, t) -> np.ndarray:
        d = self.derivative(np.atleast_1d(np.asarray(t, dtype=float)))
        return np.hypot(d[:, 0], d[:, 1])

    def normal(self, t) -> np.ndarray:
        """Unit outward normal."""
        d = self.derivative(np.atleast_1d(np.asarray(t, dtype=float)))
        nrm = np.stack([d[:, 1], -d[:, 0]], axis=1)
        return nrm / np.hypot(d[:, 0], d[:, 1])[:, None]

    def curvature(self, t) -> np.ndarray:
        """Signed curvature, positive on convex parts."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        d = self.derivative(t)
        dd = self.second_derivative(t)
        cross = d[:, 0] * dd[:, 1] - d[:, 1] * dd[:, 0]
        return cross / np.hypot(d[:, 0], d[:, 1]) ** 3

    def bounding_box(self, samples: int = 1024) -> tuple[tuple[float, float], tuple[float, float]]:
        p = self(np.linspace(0, 2 * np.pi, samples, endpoint=False))
        return (float(p[:, 0].min()), float(p[:, 0].max())), (float(p[:, 1].min()), float(p[:, 1].max()))


def _stack(x, y) -> np.ndarray:
    return np.stack([x, y], axis=1)


def disk(R: float = 1.0) -> BoundaryCurve:
    if not R > 0:
        raise ValueError(f"disk radius must be positive, got {R}")
    return BoundaryCurve(
        param=lambda t: _stack(R * np.cos(t), R * np.sin(t)),
        derivative=lambda t: _stack(-R * np.sin(t), R * np.cos(t)),
        second_derivative=lambda t: _stack(-R * np.cos(t), -R * np.sin(t)),
        label=f"disk(R={R:g})",
        spec={"name": "disk", "R": float(R)},
    )


def pear() -> BoundaryCurve:
    """The pear ``(2 + 0.3 cos 3t)(cos t, sin t)`` with three concave dents."""

    def r(t):
        return 2.0 + 0.3 * np.cos(3 * t)

    def dr(t):
        return -0.9 * np.sin(3 * t)

    def ddr(t):
        return -2.7 * np.cos(3 * t)

    def param(t):
        return _stack(r(t) * np.cos(t), r(t) * np.sin(t))

    def derivative(t):
        c, s = np.cos(t), np.sin(t)
        return _stack(dr(t) * c - r(t) * s, dr(t) * s + r(t) * c)

    def second_derivative(t):
        c, s = np.cos(t), np.sin(t)
        return _stack(
            ddr(t) * c - 2 * dr(t) * s - r(t) * c,
            ddr(t) * s + 2 * dr(t) * c - r(t) * s,
        )

    return BoundaryCurve(param, derivative, second_derivative, "pear", {"name": "pear"})


def kite2d() -> BoundaryCurve:
    """Standard planar kite ``(cos t + 0.65 cos 2t - 0.65, 1.5 sin t)``."""
    return BoundaryCurve(
        param=lambda t: _stack(np.cos(t) + 0.65 * np.cos(2 * t) - 0.65, 1.5 * np.sin(t)),
        derivative=lambda t: _stack(-np.sin(t) - 1.3 * np.sin(2 * t), 1.5 * np.cos(t)),
        second_derivative=lambda t: _stack(-np.cos(t) - 2.6 * np.cos(2 * t), -1.5 * np.sin(t)),
        label="kite2d",
        spec={"name": "kite2d"},
    )


def fourier_curve(fourier_x, fourier_y, label: str = "custom") -> BoundaryCurve:
    """Curve from real Fourier coefficients.

    Each coefficient list is ``[a0, a1, b1, a2, b2, ...]`` meaning
    ``a0 + sum_m a_m cos(m t) + b_m sin(m t)``.
    """
    cx = _unpack_fourier(fourier_x)
    cy = _unpack_fourier(fourier_y)

    def evaluate(coeffs, t, order):
        a0, a, b = coeffs
        m = np.arange(1, len(a) + 1)
        mt = np.outer(t, m)
        if order == 0:
            return a0 + np.cos(mt) @ a + np.sin(mt) @ b
        if order == 1:
            return np.sin(mt) @ (-m * a) + np.cos(mt) @ (m * b)
        return np.cos(mt) @ (-(m**2) * a) + np.sin(mt) @ (-(m**2) * b)

    return BoundaryCurve(
        param=lambda t: _stack(evaluate(cx, t, 0), evaluate(cy, t, 0)),
        derivative=lambda t: _stack(evaluate(cx, t, 1), evaluate(cy, t, 1)),
        second_derivative=lambda t: _stack(evaluate(cx, t, 2), evaluate(cy, t, 2)),
        label=label,
        spec={"name": "custom", "label": label, "fourier_x": list(map(float, fourier_x)),
              "fourier_y": list(map(float, fourier_y))},
    )


def _unpack_fourier(coeffs):
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 1 or c.size < 1:
        raise ValueError("Fourier coefficient list must be a nonempty 1-D list")
    rest = c[1:]
    if rest.size % 2:
        rest = np.append(rest, 0.0)
    return c[0], rest[0::2], rest[1::2]


def load_shape(path) -> BoundaryCurve:
    """Read a JSON descriptor ``{"label", "fourier_x", "fourier_y"}``."""
    desc = json.loads(Path(path).read_text())
    return fourier_curve(desc["fourier_x"], desc["fourier_y"], desc.get("label", "custom"))


def make_shape(spec) -> BoundaryCurve:
    """Build a shipped or custom shape from a name or a dict spec.

    Accepted: ``"pear"``, ``"kite2d"``, ``"disk"``, ``{"name": "disk", "R": 2}``,
    ``{"name": "custom", "fourier_x": [...], "fourier_y": [...]}`` or
    ``{"name": "custom", "path": "shape.json"}``.
    """
    if isinstance(spec, str):
        spec = {"name": spec}
    name = spec.get("name")
    if name == "disk":
        return disk(float(spec.get("R", 1.0)))
    if name == "pear":
        return pear()
    if name == "kite2d":
        return kite2d()
    if name == "custom":
        if "path" in spec:
            return load_shape(spec["path"])
        if "fourier_x" not in spec or "fourier_y" not in spec:
            raise ValueError("custom shape needs fourier_x and fourier_y (or a path)")
        return fourier_curve(spec["fourier_x"], spec["fourier_y"], spec.get("label", "custom"))
    raise ValueError(f"unknown shape {name!r}")


@dataclass(frozen=True)
class BoundaryNodes:
    """Trapezoidal nodes ``t_i = 2 pi i / n`` on a curve."""

    t: np.ndarray
    points: np.ndarray
    derivative: np.ndarray
    second_derivative: np.ndarray
    speed: np.ndarray

    @property
    def weight(self) -> float:
        return 2 * np.pi / len(self.t)


def boundary_nodes(curve: BoundaryCurve, n: int) -> BoundaryNodes:
    if n % 2 or n < 4:
        raise ValueError(f"number of boundary nodes must be even and >= 4, got {n}")
    t = 2 * np.pi * np.arange(n) / n
    d = curve.derivative(t)
    return BoundaryNodes(t, curve.param(t), d, curve.second_derivative(t), np.hypot(d[:, 0], d[:, 1]))


@dataclass(frozen=True)
class DirectionSet:
    """``count`` equispaced unit directions at angles ``2 pi j / count``."""

    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("DirectionSet needs at least one direction")

    @property
    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.count) / self.count

    @property
    def weight(self) -> float:
        return 2 * np.pi / self.count

    @property
    def vectors(self) -> np.ndarray:
        a = self.angles
        return np.stack([np.cos(a), np.sin(a)], axis=1)

    def antipode_index(self) -> np.ndarray:
        if self.count % 2:
            raise ValueError("odd direction sets are not closed under antipodes")
        return (np.arange(self.count) + self.count // 2) % self.count


@dataclass(frozen=True)
class SamplingGrid:
    x_range: tuple[float, float]
    y_range: tuple[float, float]
    nx: int
    ny: int

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_range[0], self.x_range[1], self.nx)

    @property
    def y(self) -> np.ndarray:
        return np.linspace(self.y_range[0], self.y_range[1], self.ny)

    @property
    def nodes(self) -> np.ndarray:
        """Points ``(x_i, y_j)`` in row-major order, index ``i * ny + j``."""
        X, Y = np.meshgrid(self.x, self.y, indexing="ij")
        return np.stack([X.ravel(), Y.ravel()], axis=1)

    @property
    def radius(self) -> float:
        return 0.5 * max(self.x_range[1] - self.x_range[0], self.y_range[1] - self.y_range[0])


def default_grid(curve: BoundaryCurve, nx: int = 201, ny: int = 201, inflate: float = 0.3) -> SamplingGrid:
    """Bounding box of ``curve`` scaled by ``1 + inflate`` about its center."""
    (x0, x1), (y0, y1) = curve.bounding_box()
    cx, cy = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
    hx, hy = 0.5 * (x1 - x0) * (1 + inflate), 0.5 * (y1 - y0) * (1 + inflate)
    return SamplingGrid((cx - hx, cx + hx), (cy - hy, cy + hy), nx, ny)
