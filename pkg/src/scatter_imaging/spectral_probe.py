"""Interior Dirichlet eigenvalues from far-field data.

For a test point z inside the obstacle the factorization equation
``(F* F)^{1/4} g = phi_z`` has a bounded solution except when k^2 is an
interior Dirichlet eigenvalue.  The norm of its truncated Picard solution,
swept over k, therefore spikes at the eigenvalues.

Discrete conventions: the far-field matrix is used in orthonormal L^2(S^1)
coordinates (:attr:`FarFieldMatrix.weighted`) and ``phi_z`` is scaled by
``sqrt(2 pi / M)``, so every vector norm below approximates an L^2 norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import specfun
from .forward import FarFieldDataset, FarFieldMatrix, kress_weights, single_layer_parts
from .geometry import BoundaryCurve, DirectionSet, boundary_nodes


@dataclass(frozen=True)
class SingularSystem:
    U: np.ndarray
    s: np.ndarray
    V: np.ndarray
    obs_weight: float
    inc_weight: float


def singular_system(F: FarFieldMatrix) -> SingularSystem:
    U, s, Vh = np.linalg.svd(F.weighted)
    return SingularSystem(U, s, Vh.conj().T, F.obs.weight, F.inc.weight)


@dataclass(frozen=True)
class Truncation:
    """Spectral cut for the Picard series of ``(F* F)^{1/4} g = phi``.

    ``tau`` is relative to the singular values of the operator being
    inverted, ``sqrt(s_j)``: terms with ``sqrt(s_j) >= tau * sqrt(s_1)``
    are kept.  ``rank`` keeps the leading terms instead.  With neither set,
    the cut is placed at the knee of ``log s``.
    """

    tau: float | None = None
    rank: int | None = None

    def __post_init__(self):
        if self.tau is not None and self.rank is not None:
            raise ValueError("give either tau or rank, not both")

    def keep(self, s: np.ndarray) -> int:
        if self.rank is not None:
            return min(int(self.rank), len(s))
        if self.tau is not None:
            return int(np.count_nonzero(np.sqrt(s) >= self.tau * np.sqrt(s[0])))
        return knee_rank(s)

    def as_dict(self) -> dict:
        if self.rank is not None:
            return {"rank": int(self.rank)}
        if self.tau is not None:
            return {"tau": float(self.tau)}
        return {"knee": True}

    @classmethod
    def from_dict(cls, d) -> "Truncation":
        if d is None or d == "auto":
            return None
        if d.get("knee"):
            return cls()
        return cls(tau=d.get("tau"), rank=d.get("rank"))

    @classmethod
    def from_noise(cls, delta: float | None) -> "Truncation":
        if delta is None:
            return cls()
        return cls(tau=float(delta) if delta > 0 else 1e-8)


def knee_rank(s: np.ndarray) -> int:
    """Index after the point of ``log s`` farthest below the end-to-end chord."""
    y = np.log10(np.maximum(s, s[0] * 1e-300))
    n = len(y)
    if n < 3:
        return n
    x = np.arange(n)
    chord = y[0] + (y[-1] - y[0]) * x / (n - 1)
    return int(np.argmax(chord - y)) + 1


def rhs_phi(z, k: float, obs: DirectionSet) -> np.ndarray:
    """``phi_z(x_hat_i) = exp(-i k z . x_hat_i)``."""
    z = np.asarray(z, dtype=float)
    return np.exp(-1j * k * (obs.vectors @ z))


def picard_norm(sys: SingularSystem, phi: np.ndarray, trunc: Truncation) -> float:
    """Norm of the truncated Picard solution of ``(F* F)^{1/4} g = phi``.

    ``|g|^2 = sum_j |u_j* phi~|^2 / s_j`` over the kept singular values.
    """
    r = trunc.keep(sys.s)
    if r < 1 or not sys.s[0] > 0:
        raise ValueError("empty Picard sum")
    coeff = sys.U[:, :r].conj().T @ (math.sqrt(sys.obs_weight) * phi)
    return float(math.sqrt(np.sum(np.abs(coeff) ** 2 / sys.s[:r])))


def tikhonov_solve(sys: SingularSystem, phi: np.ndarray, eps: float) -> np.ndarray:
    """Tikhonov solution of ``F g = phi`` as nodal values on the incident set."""
    if not eps > 0:
        raise ValueError("Tikhonov parameter must be positive")
    coeff = sys.U.conj().T @ (math.sqrt(sys.obs_weight) * phi)
    a = sys.V[:, : len(sys.s)] @ (sys.s / (sys.s**2 + eps) * coeff)
    return a / math.sqrt(sys.inc_weight)


@dataclass
class SweepResult:
    k_grid: np.ndarray
    values: np.ndarray
    z: tuple[float, float]
    truncation: dict = field(default_factory=dict)


def sweep(dataset: FarFieldDataset, z, trunc: Truncation | None = None) -> SweepResult:
    """Picard norm for every wavenumber of ``dataset`` at test point ``z``.

    Without ``trunc`` the cut follows the dataset noise level: ``tau = delta``
    for noisy data, ``1e-8`` for clean data.
    """
    if trunc is None:
        trunc = Truncation.from_noise(dataset.meta.get("delta"))
    values = np.empty(len(dataset))
    for i in range(len(dataset)):
        F = dataset[i]
        values[i] = picard_norm(singular_system(F), rhs_phi(z, F.k, F.obs), trunc)
    return SweepResult(dataset.k_grid.copy(), values, (float(z[0]), float(z[1])), trunc.as_dict())


@dataclass(frozen=True)
class EigenvalueEstimate:
    k: float
    prominence: float
    index: int


def pick_peaks(result: SweepResult, prominence_min: float = 1.5, window: int = 21,
               merge: int | None = None) -> list[EigenvalueEstimate]:
    """Local maxima standing ``prominence_min`` times above the local median.

    The baseline is the median over ``window`` samples centred on the
    candidate (clipped at the ends).  Peaks closer than ``merge`` samples
    (default ``window // 4``) are merged, keeping the taller one.
    """
    if window < 3 or window % 2 == 0:
        raise ValueError("window must be an odd integer >= 3")
    merge = window // 4 if merge is None else merge
    v = np.asarray(result.values, dtype=float)
    half = window // 2
    found: list[EigenvalueEstimate] = []
    for i in range(1, len(v) - 1):
        if not (v[i] > v[i - 1] and v[i] >= v[i + 1]):
            continue
        lo, hi = max(0, i - half), min(len(v), i + half + 1)
        base = float(np.median(v[lo:hi]))
        prom = v[i] / base if base > 0 else math.inf
        if prom <= prominence_min:
            continue
        est = EigenvalueEstimate(float(result.k_grid[i]), float(prom), i)
        if found and i - found[-1].index < merge:
            if v[i] > v[found[-1].index]:
                found[-1] = est
            continue
        found.append(est)
    return found


def union_peaks(peak_lists, merge: int = 1) -> list[EigenvalueEstimate]:
    """Combine peaks found from several test points.

    Estimates whose grid indices differ by at most ``merge`` are treated
    as one; the most prominent survives.
    """
    pool = sorted((p for lst in peak_lists for p in lst), key=lambda p: (p.index, -p.prominence))
    out: list[EigenvalueEstimate] = []
    for p in pool:
        if out and p.index - out[-1].index <= merge:
            if p.prominence > out[-1].prominence:
                out[-1] = p
            continue
        out.append(p)
    return out


# --------------------------------------------------------------------------
# independent oracle: injectivity loss of the interior single layer
# --------------------------------------------------------------------------


def single_layer_matrix(curve: BoundaryCurve, k: float, n_quad: int) -> np.ndarray:
    nodes = boundary_nodes(curve, n_quad)
    M1, M2 = single_layer_parts(nodes, k)
    Rw = kress_weights(n_quad)
    idx = np.arange(n_quad)
    return Rw[(idx[:, None] - idx[None, :]) % n_quad] * M1 + (2 * np.pi / n_quad) * M2


def smallest_singular_value(curve: BoundaryCurve, k: float, n_quad: int) -> float:
    return float(np.linalg.svd(single_layer_matrix(curve, k, n_quad), compute_uv=False)[-1])


def interior_eigenvalue_oracle(curve: BoundaryCurve, k_min: float, k_max: float, n_k: int,
                               n_quad: int = 64, sharpness: float = 1e-2,
                               xtol: float = 1e-5) -> list[float]:
    """Interior Dirichlet eigenvalues in ``[k_min, k_max]`` from the boundary alone.

    The single-layer operator S_k fails to be injective exactly at interior
    Dirichlet eigenvalues.  Local minima of its smallest singular value on
    an ``n_k`` scan are refined by golden-section search; a minimum
    counts when the refined value is below ``sharpness`` times the scan
    median over its neighbourhood.
    """
    if n_k < 3 or not k_max > k_min:
        return []
    ks = np.linspace(k_min, k_max, n_k)
    sig = np.array([smallest_singular_value(curve, k, n_quad) for k in ks])
    out: list[float] = []
    half = max(5, n_k // 50)
    for i in range(1, n_k - 1):
        if not (sig[i] < sig[i - 1] and sig[i] <= sig[i + 1]):
            continue
        res = minimize_scalar(lambda k: smallest_singular_value(curve, k, n_quad),
                              bracket=(ks[i - 1], ks[i], ks[i + 1]), method="golden",
                              options={"xtol": xtol})
        base = float(np.median(sig[max(0, i - half): i + half + 1]))
        if res.fun < sharpness * base:
            out.append(float(res.x))
    return out


def disk_eigenvalues(R: float, k_min: float, k_max: float, max_order: int = 40) -> list[float]:
    """Distinct values ``j_{n,m} / R`` inside ``(k_min, k_max)``."""
    vals = []
    for n in range(max_order + 1):
        zs = [z / R for z in specfun.bessel_j_zeros(n, int(k_max * R / math.pi) + 2)]
        vals.extend(z for z in zs if k_min < z < k_max)
    return sorted(vals)
