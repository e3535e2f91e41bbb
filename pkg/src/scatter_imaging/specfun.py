"""Cylindrical Bessel functions of integer order and the zeros of J_n.

Values are delegated to :mod:`scipy.special` (AMOS / Cephes), which meets
the accuracy budget of the downstream solvers.  The zero finder is local:
it brackets sign changes on a coarse scan and polishes with Newton steps.

All functions accept scalars or numpy arrays and broadcast like ufuncs.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

MAX_ORDER = 80


def _check_order(n) -> np.ndarray:
    n = np.asarray(n)
    if not np.issubdtype(n.dtype, np.integer):
        if not np.all(np.equal(np.mod(n, 1), 0)):
            raise ValueError("Bessel order must be an integer")
        n = n.astype(int)
    if np.any(np.abs(n) > MAX_ORDER):
        raise ValueError(f"|order| must not exceed {MAX_ORDER}")
    return n


def bessel_j(n, x):
    """Bessel function of the first kind J_n(x) for integer n.

    ``x = 0`` is allowed and yields ``1`` for ``n = 0`` and ``0`` otherwise.
    Negative orders use ``J_{-n} = (-1)^n J_n``.
    """
    n = _check_order(n)
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("bessel_j: argument must be finite")
    out = special.jv(n, x)
    return out[()] if np.ndim(out) == 0 else out


def bessel_y(n, x):
    """Bessel function of the second kind Y_n(x) for integer n and x > 0."""
    n = _check_order(n)
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("bessel_y: argument must be finite")
    if np.any(x <= 0):
        raise ValueError("bessel_y: argument must be strictly positive")
    out = special.yv(n, x)
    return out[()] if np.ndim(out) == 0 else out


def hankel1(n, x):
    """Hankel function H_n^{(1)}(x) = J_n(x) + i Y_n(x), x > 0."""
    return bessel_j(n, x) + 1j * bessel_y(n, x)


def bessel_j_derivative(n, x):
    """J_n'(x) = (J_{n-1}(x) - J_{n+1}(x)) / 2."""
    n = _check_order(n)
    x = np.asarray(x, dtype=float)
    return 0.5 * (special.jv(n - 1, x) - special.jv(n + 1, x))


def _newton(n: int, x: float, tol: float = 1e-15, maxiter: int = 50) -> float:
    for _ in range(maxiter):
        step = float(special.jv(n, x)) / float(bessel_j_derivative(n, x))
        x -= step
        if abs(step) <= tol * max(1.0, abs(x)):
            break
    return x


def bessel_j_zeros(n: int, count: int) -> list[float]:
    """First ``count`` positive zeros of J_n, strictly increasing.

    Sign changes are bracketed on a scan of step pi/4 starting below
    the McMahon-type lower bound ``n + 1.8 n^(1/3)``; each bracket is
    shrunk by bisection and then polished by Newton's method.
    """
    n = int(_check_order(n))
    if n < 0:
        raise ValueError("bessel_j_zeros: order must be nonnegative")
    if count < 1:
        raise ValueError("bessel_j_zeros: count must be >= 1")

    start = n + 1.8 * n ** (1.0 / 3.0) if n > 0 else 0.0
    # the bound is asymptotic; back off so the first zero is never skipped
    x_lo = max(0.5 * start, 1e-3)
    step = math.pi / 4
    zeros: list[float] = []
    f_lo = float(special.jv(n, x_lo))
    while len(zeros) < count:
        x_hi = x_lo + step
        f_hi = float(special.jv(n, x_hi))
        if f_lo == 0.0:
            zeros.append(x_lo)
        elif f_lo * f_hi < 0:
            a, b, fa = x_lo, x_hi, f_lo
            for _ in range(30):
                m = 0.5 * (a + b)
                fm = float(special.jv(n, m))
                if fa * fm <= 0:
                    b = m
                else:
                    a, fa = m, fm
            root = _newton(n, 0.5 * (a + b))
            if not a - 1e-12 <= root <= b + 1e-12:
                root = 0.5 * (a + b)
            zeros.append(root)
        x_lo, f_lo = x_hi, f_hi
    return zeros
