"""Chebyshev polynomials of both kinds and the Grace polynomial.

All functions accept scalars or numpy arrays for the abscissa.  Arguments
that overshoot [-1, 1] by no more than ``CLAMP_TOL`` are clamped; anything
further out raises ``ValueError``.
"""

from __future__ import annotations

import math

import numpy as np

CLAMP_TOL = 1e-15


def _check_domain(x):
    x = np.asarray(x, dtype=float)
    over = np.abs(x) - 1.0
    if np.any(over > CLAMP_TOL):
        raise ValueError("abscissa outside [-1, 1]")
    return np.clip(x, -1.0, 1.0)


def _unwrap(x, out):
    return float(out) if np.ndim(x) == 0 else out


def cheb_t(j: int, x):
    """T_j(x) by the three-term recurrence."""
    if j < 0:
        raise ValueError("order must be nonnegative")
    xa = _check_domain(x)
    t0 = np.ones_like(xa)
    if j == 0:
        return _unwrap(x, t0)
    t1 = xa.copy()
    for _ in range(j - 1):
        t0, t1 = t1, 2.0 * xa * t1 - t0
    return _unwrap(x, t1)


def cheb_u_even(x, K: int) -> np.ndarray:
    """Return [U_0(x), U_2(x), ..., U_2K(x)].

    The full U recurrence is run; only the even orders are kept.  For array
    input the result has shape ``(K + 1,) + x.shape``.
    """
    if K < 0:
        raise ValueError("K must be nonnegative")
    xa = _check_domain(x)
    out = np.empty((K + 1,) + xa.shape)
    u_prev = np.ones_like(xa)      # U_0
    u_cur = 2.0 * xa               # U_1
    out[0] = u_prev
    for k in range(1, K + 1):
        u_prev = 2.0 * xa * u_cur - u_prev     # U_{2k}
        out[k] = u_prev
        u_cur = 2.0 * xa * u_prev - u_cur      # U_{2k+1}
    return out


def grace_poly(x, n: int):
    """Grace polynomial Gp(x, n), an even polynomial of degree 2n.

    Evaluated with the division-free recurrence in x**2.  The two updates are
    sequential (``v`` uses the freshly updated ``u``); with that ordering the
    recurrence reproduces the closed form exactly, including its sign.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    xa = _check_domain(x)
    x2 = xa * xa
    return _unwrap(x, _grace_poly_x2(x2, n))


def _grace_poly_x2(x2, n: int):
    # callers that already hold x**2 (filter taps, quadrature) use this
    u = 1.0 - x2
    v = np.zeros_like(x2)
    for _ in range(n):
        u = 2.0 * v * x2 - u
        v = 2.0 * u - v
    sign = -1.0 if n % 2 else 1.0
    return sign * v / (2 * n)


def grace_poly_closed(x, n: int):
    """Closed form (-1)^n [T_{2n+1}(x) - T_{2n-1}(x)] / (4 n x), limit 1 at 0."""
    xa = np.atleast_1d(_check_domain(x))
    out = np.ones_like(xa)
    nz = xa != 0.0
    sign = -1.0 if n % 2 else 1.0
    t_hi = np.asarray(cheb_t(2 * n + 1, xa[nz]))
    t_lo = np.asarray(cheb_t(2 * n - 1, xa[nz]))
    out[nz] = sign * (t_hi - t_lo) / (4 * n * xa[nz])
    return _unwrap(x, out if np.ndim(x) else out[0])


def grace_poly_trig(x, n: int):
    """Trigonometric form cos(psi) sin(2 n psi) / (2 n sin(psi)), x = sin(psi)."""
    xa = np.atleast_1d(_check_domain(x))
    psi = np.arcsin(xa)
    out = np.ones_like(xa)
    nz = psi != 0.0
    out[nz] = np.cos(psi[nz]) * np.sin(2 * n * psi[nz]) / (2 * n * np.sin(psi[nz]))
    return _unwrap(x, out if np.ndim(x) else out[0])


def grace_poly_roots(n: int) -> list[float]:
    """All 2n roots +-sin(pi j / 2n), j = 1..n, ascending."""
    if n < 1:
        raise ValueError("n must be >= 1")
    pos = [math.sin(math.pi * j / (2 * n)) for j in range(1, n + 1)]
    return sorted([-r for r in pos] + pos)


def scaled_sinc(x, n: int):
    """sin(u)/u with u = sqrt(4n^2 + 2) x.

    Matches the second derivative of ``grace_poly`` at the origin and puts
    the roots at +-pi j / sqrt(4n^2 + 2).
    """
    u = math.sqrt(4 * n * n + 2) * np.asarray(x, dtype=float)
    # np.sinc is sin(pi t)/(pi t)
    return _unwrap(x, np.sinc(u / math.pi))
