"""Herglotz kernels approximating interior Dirichlet eigenfunctions.

At an interior eigenvalue there are unit kernels g with ``|F g|`` nearly
zero, and their Herglotz waves

    v_g(x) = int_{S^1} e^{ik x.d} g(d) ds(d)

nearly vanish on the boundary.  Two discretizations of
``min |F g| s.t. |g| = 1`` are provided:

* FTLS: band-limited Fourier kernels ``g = sum_{|n|<=N} c_n e^{in phi}``,
  solved by the smallest right singular vector of ``F T_N``.
* GTLS: nodal kernels with a first-difference penalty, solved by the
  smallest eigenvector of ``F* F + alpha D* D``.

Norms are discrete L^2(S^1) norms; every returned kernel has norm one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import specfun
from .forward import FarFieldMatrix


@dataclass(frozen=True)
class HerglotzKernel:
    """Kernel g on the unit circle at wavenumber ``k``.

    ``representation == "fourier"``: ``values[n + N]`` is the coefficient of
    ``e^{in phi}`` for ``|n| <= N``.  ``"nodal"``: ``values[j] = g(2 pi j / J)``.
    """

    k: float
    representation: str
    values: np.ndarray
    method: str
    residual: float

    @property
    def size(self) -> int:
        """Cutoff N for Fourier kernels, node count J for nodal ones."""
        if self.representation == "fourier":
            return (len(self.values) - 1) // 2
        return len(self.values)

    def l2_norm(self) -> float:
        if self.representation == "fourier":
            return math.sqrt(2 * np.pi * np.sum(np.abs(self.values) ** 2))
        return math.sqrt(2 * np.pi / len(self.values) * np.sum(np.abs(self.values) ** 2))

    def scaled(self, c: complex) -> "HerglotzKernel":
        return HerglotzKernel(self.k, self.representation, c * self.values, self.method, abs(c) * self.residual)

    def to_fourier(self) -> "HerglotzKernel":
        if self.representation == "fourier":
            return self
        J = len(self.values)
        c = np.fft.fft(self.values) / J
        N = (J - 1) // 2
        coeffs = np.concatenate([c[-N:], c[: N + 1]]) if N > 0 else c[:1]
        return HerglotzKernel(self.k, "fourier", coeffs, self.method, self.residual)


def fix_phase(x: np.ndarray, rel: float = 1e-6) -> np.ndarray:
    """Rotate ``x`` so its first non-negligible component is real positive."""
    mag = np.abs(x)
    i = int(np.argmax(mag > rel * mag.max()))
    y = x * (np.conj(x[i]) / mag[i])
    y[i] = mag[i]
    return y


def fourier_matrix(angles: np.ndarray, N: int) -> np.ndarray:
    """``T_N[j, n + N] = e^{in phi_j}``."""
    return np.exp(1j * np.outer(angles, np.arange(-N, N + 1)))


def ftls_recover(F: FarFieldMatrix, N: int) -> HerglotzKernel:
    """Fourier total least squares with cutoff ``N``.

    ``A`` maps unit-normalized coefficient vectors ``c`` (so that
    ``|g|_{L^2} = |c|_2`` via ``g_hat = c / sqrt(2 pi)``) to the L^2
    coordinates of ``F g``; its smallest singular value is the residual.
    """
    J = F.inc.count
    if 2 * N + 1 > J:
        raise ValueError(f"cutoff exceeds incident sampling: 2N+1 = {2 * N + 1} > {J}")
    if N < 0:
        raise ValueError("cutoff must be nonnegative")
    A = math.sqrt(F.obs.weight) * F.inc.weight * F.entries @ fourier_matrix(F.inc.angles, N) / math.sqrt(2 * np.pi)
    _, s, Vh = np.linalg.svd(A)
    c = fix_phase(Vh[-1].conj())
    residual = float(s[-1]) if len(s) == 2 * N + 1 else 0.0
    return HerglotzKernel(F.k, "fourier", c / math.sqrt(2 * np.pi), "FTLS", residual)


def difference_matrix(J: int) -> np.ndarray:
    """Periodic forward difference ``(g_{j+1} - g_j) / h``, ``h = 2 pi / J``."""
    h = 2 * np.pi / J
    D = -np.eye(J) + np.eye(J, k=1)
    D[-1, 0] = 1.0
    return D / h


def gtls_matrix(F: FarFieldMatrix, alpha: float) -> np.ndarray:
    """``B_alpha`` acting on unit vectors ``y = sqrt(2 pi / J) g``."""
    W = F.weighted
    D = difference_matrix(F.inc.count)
    return W.conj().T @ W + alpha * D.T @ D


def gtls_recover(F: FarFieldMatrix, alpha: float) -> HerglotzKernel:
    """Gradient total least squares: smallest eigenvector of ``B_alpha``."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    B = gtls_matrix(F, alpha)
    _, vecs = np.linalg.eigh(0.5 * (B + B.conj().T))
    y = fix_phase(vecs[:, 0])
    residual = float(np.linalg.norm(F.weighted @ y))
    g = y / math.sqrt(F.inc.weight)
    return HerglotzKernel(F.k, "nodal", g, "GTLS", residual)


def default_cutoff(k: float, radius: float, J: int | None = None) -> int:
    """``max(4, ceil(k R) + 4)``, capped by the incident sampling."""
    N = max(4, math.ceil(k * radius) + 4)
    if J is not None:
        N = min(N, (J - 1) // 2)
    return N


def herglotz_eval(kernel: HerglotzKernel, points) -> np.ndarray:
    """Herglotz wave of ``kernel`` at ``points`` (shape ``(P, 2)``)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    k = kernel.k
    if kernel.representation == "fourier":
        N = kernel.size
        n = np.arange(-N, N + 1)
        r = np.hypot(pts[:, 0], pts[:, 1])
        theta = np.arctan2(pts[:, 1], pts[:, 0])
        coef = 2 * np.pi * (1j ** (n % 4)) * kernel.values
        out = np.zeros(len(pts), dtype=complex)
        # chunk to keep the (P, 2N+1) work arrays small
        for lo in range(0, len(pts), 20000):
            sl = slice(lo, lo + 20000)
            Jn = specfun.bessel_j(n[None, :], k * r[sl, None])
            out[sl] = (Jn * np.exp(1j * np.outer(theta[sl], n))) @ coef
        return out
    J = len(kernel.values)
    ang = 2 * np.pi * np.arange(J) / J
    d = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    out = np.empty(len(pts), dtype=complex)
    for lo in range(0, len(pts), 20000):
        sl = slice(lo, lo + 20000)
        out[sl] = np.exp(1j * k * pts[sl] @ d.T) @ kernel.values * (2 * np.pi / J)
    return out


def ball_energy(k: float, n: int, R: float) -> float:
    """``int_0^R r J_n(kr)^2 dr``."""
    val, _ = quad(lambda r: r * specfun.bessel_j(n, k * r) ** 2, 0.0, R, epsabs=1e-14, epsrel=1e-12, limit=200)
    return val


def ball_ratio(k: float, coeffs: np.ndarray, R: float, energies: np.ndarray | None = None) -> float:
    """``|v_g|_{L^2(B_R)} / |g|_{L^2(S^1)}`` for Fourier coefficients ``coeffs`` (|n| <= N).

    By orthogonality of ``e^{in theta}`` on the ball,
    ``|v_g|^2 = 8 pi^3 sum |g_n|^2 int_0^R r J_n(kr)^2 dr`` while
    ``|g|^2 = 2 pi sum |g_n|^2``.
    """
    c = np.asarray(coeffs)
    N = (len(c) - 1) // 2
    if energies is None:
        energies = np.array([ball_energy(k, abs(n), R) for n in range(-N, N + 1)])
    w = np.abs(c) ** 2
    return math.sqrt(8 * np.pi**3 * float(w @ energies) / (2 * np.pi * float(w.sum())))


def constraint_equivalence_check(k: float, N: int, R: float, samples: int = 200,
                                 seed: int = 0) -> tuple[float, float]:
    """Extremes of :func:`ball_ratio` over random band-limited kernels of cutoff ``N``."""
    if not R > 0 or N < 1:
        raise ValueError("need R > 0 and N >= 1")
    energies = np.array([ball_energy(k, abs(n), R) for n in range(-N, N + 1)])
    rng = np.random.default_rng(seed)
    c = rng.standard_normal((samples, 2 * N + 1)) + 1j * rng.standard_normal((samples, 2 * N + 1))
    ratio = np.array([ball_ratio(k, row, R, energies) for row in c])
    return float(ratio.min()), float(ratio.max())
