"""Resonant-mode indicator functions on sampling grids.

Single mode: ``I(z) = -ln |v_g(z)|``.  Several modes: ``I(z) = -ln sum |v_g(z)|``.
Both are large on the obstacle boundary, where every Dirichlet
eigenfunction vanishes.  Values are capped at ``-ln(1e-14 max|v|)`` so
that nodal points stay finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .geometry import BoundaryCurve, SamplingGrid
from .modes import HerglotzKernel, herglotz_eval

CLIP_FLOOR = 1e-14
PGM_MAX = 65535


@dataclass
class IndicatorGrid:
    grid: SamplingGrid
    values: np.ndarray  # (nx, ny), values[i, j] at (x_i, y_j)
    kind: str
    ks: list[float] = field(default_factory=list)
    ceiling: float = math.inf

    def interpolate(self, points) -> np.ndarray:
        f = RegularGridInterpolator((self.grid.x, self.grid.y), self.values, method="linear",
                                    bounds_error=True)
        return f(np.atleast_2d(points))


def _indicator(amplitude: np.ndarray, grid: SamplingGrid) -> tuple[np.ndarray, float]:
    peak = float(amplitude.max())
    if not peak > 0:
        raise ValueError("Herglotz field vanishes on the whole grid")
    ceiling = -math.log(CLIP_FLOOR * peak)
    with np.errstate(divide="ignore"):
        vals = -np.log(amplitude)
    return np.minimum(vals, ceiling).reshape(grid.nx, grid.ny), ceiling


def indicator_single(kernel: HerglotzKernel, grid: SamplingGrid) -> IndicatorGrid:
    amp = np.abs(herglotz_eval(kernel, grid.nodes))
    vals, ceiling = _indicator(amp, grid)
    return IndicatorGrid(grid, vals, f"single({kernel.k:.6g})", [kernel.k], ceiling)


def indicator_multi(kernels: list[HerglotzKernel], grid: SamplingGrid,
                    sup_normalize: bool = False) -> IndicatorGrid:
    """Sum of field moduli over distinct wavenumbers.

    Kernels enter as given (unit L^2(S^1) norm).  ``sup_normalize`` divides
    each field by its grid maximum first.
    """
    if not kernels:
        raise ValueError("indicator_multi needs at least one kernel")
    ks = [kern.k for kern in kernels]
    if len(set(ks)) != len(ks):
        raise ValueError("kernels must have pairwise distinct wavenumbers")
    nodes = grid.nodes
    total = np.zeros(len(nodes))
    for kern in kernels:
        amp = np.abs(herglotz_eval(kern, nodes))
        if sup_normalize:
            amp = amp / amp.max()
        total += amp
    vals, ceiling = _indicator(total, grid)
    return IndicatorGrid(grid, vals, "multi", ks, ceiling)


def offset_curves(curve: BoundaryCurve, offset: float, samples: int = 512):
    """Boundary samples and their inward/outward normal offsets.

    Raises if an offset curve folds over, detected by a sign change of
    its speed ``|x'| (1 -/+ offset * curvature)``.
    """
    if not offset > 0:
        raise ValueError("offset must be positive")
    t = 2 * np.pi * np.arange(samples) / samples
    x = curve(t)
    nu = curve.normal(t)
    kappa = curve.curvature(t)
    if np.any(1 - offset * kappa <= 0):
        raise ValueError(f"inward offset {offset} collapses the curve (exceeds the local radius of curvature)")
    if np.any(1 + offset * kappa <= 0):
        raise ValueError(f"outward offset {offset} folds the curve at a concave part")
    return t, x, x - offset * nu, x + offset * nu


def boundary_contrast(indicator: IndicatorGrid, curve: BoundaryCurve, offset: float,
                      samples: int = 512, mask: np.ndarray | None = None) -> float:
    """Ridge height of the indicator along the true boundary.

    ``median(I on boundary) - max(median(I inside), median(I outside))``
    with inside/outside sampled at distance ``offset`` along the normal.
    ``mask`` restricts to a subset of the ``samples`` boundary parameters.
    """
    _, on, inner, outer = offset_curves(curve, offset, samples)
    if mask is not None:
        on, inner, outer = on[mask], inner[mask], outer[mask]
    if len(on) == 0:
        raise ValueError("empty boundary selection")
    g = indicator.grid
    pts = np.concatenate([on, inner, outer])
    if (pts[:, 0].min() < g.x_range[0] or pts[:, 0].max() > g.x_range[1]
            or pts[:, 1].min() < g.y_range[0] or pts[:, 1].max() > g.y_range[1]):
        raise ValueError(f"offset curves at distance {offset} leave the imaging grid")
    med_on = np.median(indicator.interpolate(on))
    med_in = np.median(indicator.interpolate(inner))
    med_out = np.median(indicator.interpolate(outer))
    return float(med_on - max(med_in, med_out))


def concave_arcs(curve: BoundaryCurve, samples: int = 512) -> list[np.ndarray]:
    """Boolean masks over the ``samples`` parameters, one per concave arc."""
    t = 2 * np.pi * np.arange(samples) / samples
    neg = curve.curvature(t) < 0
    if not neg.any():
        return []
    if neg.all():
        return [neg]
    # rotate so index 0 starts outside an arc, then split runs
    start = int(np.argmin(neg))
    order = np.roll(np.arange(samples), -start)
    arcs, current = [], []
    for i in order:
        if neg[i]:
            current.append(i)
        elif current:
            arcs.append(current)
            current = []
    if current:
        arcs.append(current)
    masks = []
    for arc in arcs:
        m = np.zeros(samples, dtype=bool)
        m[arc] = True
        masks.append(m)
    return masks


# --------------------------------------------------------------------------
# persistence
# --------------------------------------------------------------------------


def _header(grid: SamplingGrid) -> str:
    return (f"# x_min={grid.x_range[0]!r} x_max={grid.x_range[1]!r} nx={grid.nx} "
            f"y_min={grid.y_range[0]!r} y_max={grid.y_range[1]!r} ny={grid.ny}")


def pgm_levels(values: np.ndarray, ceiling: float = math.inf) -> np.ndarray:
    """Affine map ``[min, max] -> [0, 65535]`` with truncation toward zero.

    A constant image maps to the mid level 32768.
    """
    v = np.minimum(values, ceiling)
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        return np.full(v.shape, (PGM_MAX + 1) // 2, dtype=np.int64)
    return np.clip(np.floor((v - lo) / (hi - lo) * PGM_MAX), 0, PGM_MAX).astype(np.int64)


def emit(indicator: IndicatorGrid, basepath) -> tuple[Path, Path]:
    """Write ``basepath.csv`` (raw values) and ``basepath.pgm`` (plain P2, 16 bit).

    CSV: one header line with the grid geometry, then ``nx`` rows of ``ny``
    values; row i holds ``x_i``.  PGM: image rows run from ``y_max`` down
    to ``y_min``, columns from ``x_min`` to ``x_max``.
    """
    base = Path(basepath)
    base.parent.mkdir(parents=True, exist_ok=True)
    csv_path = base.with_name(base.name + ".csv")
    pgm_path = base.with_name(base.name + ".pgm")
    lines = [_header(indicator.grid)]
    lines += [",".join(format(x, ".17g") for x in row) for row in indicator.values]
    csv_path.write_text("\n".join(lines) + "\n")

    levels = pgm_levels(indicator.values, indicator.ceiling)
    image = levels[:, ::-1].T  # rows: y descending; cols: x ascending
    out = [f"P2\n{indicator.grid.nx} {indicator.grid.ny}\n{PGM_MAX}"]
    out += [" ".join(map(str, row)) for row in image]
    pgm_path.write_text("\n".join(out) + "\n")
    return csv_path, pgm_path


def read_indicator_csv(path) -> IndicatorGrid:
    text = Path(path).read_text().splitlines()
    fields = dict(item.split("=") for item in text[0].lstrip("# ").split())
    grid = SamplingGrid((float(fields["x_min"]), float(fields["x_max"])),
                        (float(fields["y_min"]), float(fields["y_max"])),
                        int(fields["nx"]), int(fields["ny"]))
    values = np.array([[float(x) for x in line.split(",")] for line in text[1:] if line])
    return IndicatorGrid(grid, values, "loaded")


def read_pgm(path) -> np.ndarray:
    tokens = Path(path).read_text().split()
    if tokens[0] != "P2":
        raise ValueError("not a plain PGM file")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    data = np.array(tokens[4:], dtype=np.int64)
    if data.size != w * h or maxval != PGM_MAX:
        raise ValueError("malformed PGM")
    return data.reshape(h, w)
