"""Far-field data for sound-soft obstacles.

Normalization: the scattered field behaves like

    u^s(x) = e^{i pi/4} / sqrt(8 pi k) * e^{ikr} / sqrt(r) * (u_inf(x_hat) + O(1/r)),

so the far field of the potential ``int Phi(x, y) psi(y) ds(y)`` with
``Phi = (i/4) H_0^(1)(k|x-y|)`` is ``int e^{-ik x_hat.y} psi(y) ds(y)``.
This is recorded as the normalization tag ``"CK-2D"``.

The Nystrom solver uses the combined-field ansatz

    u^s = int (dPhi/dnu(y) - i eta Phi) psi ds,     eta = k,

which is uniquely solvable for every k > 0, including interior
Dirichlet eigenvalues.  The logarithmic kernel singularities are split off
and integrated with the periodic product rule of Kress.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg as sla

from . import specfun
from .geometry import BoundaryCurve, BoundaryNodes, DirectionSet, boundary_nodes

NORMALIZATION_TAG = "CK-2D"
EULER_GAMMA = 0.57721566490153286061
COND_LIMIT = 1e12


class DiscretizationError(RuntimeError):
    """The discrete boundary system is numerically singular."""


@dataclass(frozen=True)
class FarFieldMatrix:
    k: float
    entries: np.ndarray  # (M, N): entries[i, j] = u_inf(obs_i, inc_j)
    obs: DirectionSet
    inc: DirectionSet

    @property
    def weighted(self) -> np.ndarray:
        """Operator matrix in orthonormal L^2(S^1) coordinates.

        Equals ``(2 pi / N) * entries`` when M == N.
        """
        return math.sqrt(self.obs.weight * self.inc.weight) * self.entries


@dataclass
class FarFieldDataset:
    k_grid: np.ndarray
    matrices: np.ndarray  # (n_k, M, N)
    obs: DirectionSet
    inc: DirectionSet
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.k_grid = np.asarray(self.k_grid, dtype=float)
        self.matrices = np.asarray(self.matrices, dtype=complex)
        if np.any(np.diff(self.k_grid) <= 0):
            raise ValueError("k_grid must be strictly increasing")
        if self.matrices.shape != (len(self.k_grid), self.obs.count, self.inc.count):
            raise ValueError(f"matrices shape {self.matrices.shape} inconsistent with grid and directions")

    def __len__(self) -> int:
        return len(self.k_grid)

    def __getitem__(self, idx: int) -> FarFieldMatrix:
        return FarFieldMatrix(float(self.k_grid[idx]), self.matrices[idx], self.obs, self.inc)

    def nearest(self, k: float) -> int:
        return int(np.argmin(np.abs(self.k_grid - k)))


# --------------------------------------------------------------------------
# analytic disk
# --------------------------------------------------------------------------


def disk_truncation(R: float, k: float, tol: float = 1e-14) -> int:
    """Smallest order n >= kR with |J_n(kR) / H_n(kR)| < tol.

    Below kR the ratio oscillates (it vanishes at zeros of J_n), so the
    search starts where it decays monotonically.
    """
    x = k * R
    n = max(1, math.ceil(x))
    while n < specfun.MAX_ORDER:
        if abs(specfun.bessel_j(n, x) / specfun.hankel1(n, x)) < tol:
            return n
        n += 1
    raise ValueError(f"kR = {x:g} needs more than {specfun.MAX_ORDER} terms")


def disk_farfield(R: float, k: float, obs: DirectionSet, inc: DirectionSet,
                  truncation: int | None = None) -> FarFieldMatrix:
    """Series far field of the sound-soft disk of radius ``R``.

    ``u_inf(theta, phi) = 4i sum_n J_n(kR)/H_n(kR) e^{in(theta - phi)}``.
    H_n^(1) has no real positive zeros, so there is no exceptional k.
    """
    if truncation is None:
        truncation = disk_truncation(R, k)
    else:
        nt = abs(specfun.bessel_j(truncation, k * R) / specfun.hankel1(truncation, k * R))
        if truncation < k * R or not nt < 1e-14:
            raise ValueError(f"truncation {truncation} too small for kR = {k * R:g} (tail {nt:.1e})")
    n = np.arange(0, truncation + 1)
    coef = 4j * specfun.bessel_j(n, k * R) / specfun.hankel1(n, k * R)
    diff = obs.angles[:, None] - inc.angles[None, :]
    # J_{-n}/H_{-n} = J_n/H_n, so the series is a cosine series
    entries = coef[0] + 2 * np.tensordot(np.cos(diff[..., None] * n[1:]), coef[1:], axes=([2], [0]))
    return FarFieldMatrix(float(k), entries, obs, inc)


# --------------------------------------------------------------------------
# Nystrom
# --------------------------------------------------------------------------


def kress_weights(n_quad: int) -> np.ndarray:
    """Weights R_j for ``int_0^{2pi} ln(4 sin^2((t_i - s)/2)) f(s) ds``.

    Returned as the circulant first row: the weight for node j seen from
    node i is ``R[(i - j) % n_quad]``.
    """
    n = n_quad // 2
    t = np.pi * np.arange(n_quad) / n
    m = np.arange(1, n)
    return -2 * np.pi / n * (np.cos(np.outer(t, m)) @ (1.0 / m)) - np.pi / n**2 * np.cos(n * t)


def _log_split(nodes: BoundaryNodes, k: float):
    """Pairwise geometry and Bessel values shared by S and K kernels."""
    x = nodes.points
    diff = x[:, None, :] - x[None, :, :]
    r = np.hypot(diff[..., 0], diff[..., 1])
    n = len(nodes.t)
    np.fill_diagonal(r, 1.0)  # placeholder, diagonals are set explicitly
    tdiff = nodes.t[:, None] - nodes.t[None, :]
    logsin = np.log(4 * np.sin(tdiff / 2) ** 2 + np.eye(n))
    return diff, r, logsin


def single_layer_parts(nodes: BoundaryNodes, k: float):
    """Split ``M(t, s) = (i/2) H_0(k r) |x'(s)| = M1 ln(4 sin^2) + M2``."""
    _, r, logsin = _log_split(nodes, k)
    kr = k * r
    spd = nodes.speed[None, :]
    J0 = specfun.bessel_j(0, kr)
    M = 0.5j * specfun.hankel1(0, kr) * spd
    M1 = -J0 * spd / (2 * np.pi)
    M2 = M - M1 * logsin
    diag = (0.5j - EULER_GAMMA / np.pi - np.log(0.5 * k * nodes.speed) / np.pi) * nodes.speed
    M1[np.diag_indices_from(M1)] = -nodes.speed / (2 * np.pi)
    M2[np.diag_indices_from(M2)] = diag
    return M1, M2


def double_layer_parts(nodes: BoundaryNodes, k: float):
    """Split ``L(t, s) = 2 dPhi/dnu(y) |x'(s)| = L1 ln(4 sin^2) + L2``."""
    diff, r, logsin = _log_split(nodes, k)
    kr = k * r
    d = nodes.derivative
    # (x(t) - x(s)) . (y'(s), -x'(s))
    cross = diff[..., 0] * d[None, :, 1] - diff[..., 1] * d[None, :, 0]
    L = 0.5j * k * cross * specfun.hankel1(1, kr) / r
    L1 = -k / (2 * np.pi) * cross * specfun.bessel_j(1, kr) / r
    L2 = L - L1 * logsin
    dd = nodes.second_derivative
    curv = (d[:, 0] * dd[:, 1] - d[:, 1] * dd[:, 0]) / nodes.speed**2
    L1[np.diag_indices_from(L1)] = 0.0
    L2[np.diag_indices_from(L2)] = -curv / (2 * np.pi)
    return L1, L2


def combined_field_matrix(nodes: BoundaryNodes, k: float, eta: float | None = None) -> np.ndarray:
    """Discretization of ``I + K - i eta S`` (doubled operators)."""
    eta = k if eta is None else eta
    n_quad = len(nodes.t)
    Rw = kress_weights(n_quad)
    idx = np.arange(n_quad)
    Rmat = Rw[(idx[:, None] - idx[None, :]) % n_quad]
    L1, L2 = double_layer_parts(nodes, k)
    M1, M2 = single_layer_parts(nodes, k)
    h = np.pi / (n_quad // 2)
    A = Rmat * (L1 - 1j * eta * M1) + h * (L2 - 1j * eta * M2)
    A[np.diag_indices_from(A)] += 1.0
    return A


def nystrom_farfield(curve: BoundaryCurve, k: float, obs: DirectionSet, inc: DirectionSet,
                     n_quad: int = 128, eta: float | None = None) -> FarFieldMatrix:
    """Far field of the sound-soft obstacle bounded by ``curve``.

    Solves ``(I + K - i eta S) psi = -2 u^i`` for all incident directions
    with one LU factorization, then integrates
    ``u_inf(x_hat) = -i int (k nu(y).x_hat + eta) e^{-ik x_hat.y} psi(y) ds(y)``.
    """
    if n_quad % 2 or n_quad < 8:
        raise ValueError(f"n_quad must be even and >= 8, got {n_quad}")
    if not k > 0:
        raise ValueError(f"wavenumber must be positive, got {k}")
    eta = k if eta is None else eta
    nodes = boundary_nodes(curve, n_quad)
    A = combined_field_matrix(nodes, k, eta)
    lu, piv = sla.lu_factor(A, check_finite=False)
    anorm = np.linalg.norm(A, 1)
    rcond, _ = sla.lapack.zgecon(lu, anorm, norm="1")
    if rcond * COND_LIMIT < 1:
        raise DiscretizationError(
            f"boundary system ill-conditioned at k={k:g} (cond ~ {1 / max(rcond, 1e-300):.1e}); "
            "increase n_quad")
    x = nodes.points
    d_inc = inc.vectors
    rhs = -2 * np.exp(1j * k * x @ d_inc.T)  # (n_quad, N)
    psi = sla.lu_solve((lu, piv), rhs, check_finite=False)

    d = nodes.derivative
    nu_s = np.stack([d[:, 1], -d[:, 0]], axis=1)  # nu * |x'|
    xh = obs.vectors
    kernel = (k * (xh @ nu_s.T) + eta * nodes.speed[None, :]) * np.exp(-1j * k * xh @ x.T)
    h = np.pi / (n_quad // 2)
    entries = -1j * h * kernel @ psi
    return FarFieldMatrix(float(k), entries, obs, inc)


def is_disk(curve: BoundaryCurve) -> bool:
    return curve.spec.get("name") == "disk"


def synthesize_dataset(curve: BoundaryCurve, k_min: float, k_max: float, n_k: int,
                       M: int = 64, N: int = 64, n_quad: int = 128,
                       exact_disk: bool = False) -> FarFieldDataset:
    """Noise-free far-field matrices on ``n_k`` equispaced wavenumbers.

    With ``exact_disk`` and a disk curve the analytic series replaces the
    Nystrom solver.
    """
    if not k_min > 0:
        raise ValueError("k_min must be positive")
    if n_k < 2:
        raise ValueError("n_k must be at least 2")
    if not k_max > k_min:
        raise ValueError("k_max must exceed k_min")
    obs, inc = DirectionSet(M), DirectionSet(N)
    k_grid = np.linspace(k_min, k_max, n_k)
    exact = exact_disk and is_disk(curve)
    mats = np.empty((n_k, M, N), dtype=complex)
    for i, k in enumerate(k_grid):
        if exact:
            mats[i] = disk_farfield(curve.spec["R"], k, obs, inc).entries
        else:
            mats[i] = nystrom_farfield(curve, k, obs, inc, n_quad).entries
    meta = {
        "shape": curve.spec,
        "label": curve.label,
        "M": M,
        "N": N,
        "delta": 0.0,
        "seed": None,
        "normalization": NORMALIZATION_TAG,
        "solver": {"method": "series" if exact else "nystrom-cfie", "n_quad": None if exact else n_quad,
                   "eta": "k"},
    }
    return FarFieldDataset(k_grid, mats, obs, inc, meta)


def add_noise(dataset: FarFieldDataset, delta: float, seed: int) -> FarFieldDataset:
    """Relative Gaussian noise ``F + delta |F| (R1 + i R2) / |R1 + i R2|``.

    Frobenius norms throughout.  Each wavenumber draws from its own
    generator seeded by ``(seed, k_index)``.
    """
    if delta < 0:
        raise ValueError("noise level must be nonnegative")
    mats = dataset.matrices.copy()
    if delta > 0:
        shape = mats.shape[1:]
        for i in range(len(mats)):
            rng = np.random.default_rng(np.random.SeedSequence([int(seed), i]))
            E = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
            mats[i] = mats[i] + delta * np.linalg.norm(mats[i]) * E / np.linalg.norm(E)
    meta = dict(dataset.meta, delta=float(delta), seed=int(seed))
    return replace(dataset, matrices=mats, meta=meta)


def reciprocity_residual(F: FarFieldMatrix) -> float:
    """``max |u_inf(x, d) - u_inf(-d, -x)|`` over all direction pairs.

    Requires identical, antipode-closed observation and incident sets.
    """
    if F.obs.count != F.inc.count:
        raise ValueError("reciprocity check needs M == N")
    a = F.obs.antipode_index()
    swapped = F.entries[np.ix_(a, a)].T
    return float(np.max(np.abs(F.entries - swapped)))


def normality_defect(F: FarFieldMatrix) -> float:
    W = F.weighted
    return float(np.linalg.norm(W @ W.conj().T - W.conj().T @ W) / np.linalg.norm(W) ** 2)
