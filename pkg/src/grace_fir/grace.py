"""The Grace function G(x, n, p), its normalized Fourier transform and the
limiting (continuous) frequency-domain metrics.

Quadrature strategy: G = [Gp (1 - x^2)^p] (1 - x^2)^(-1/2), and the bracket is
a polynomial of degree 2(n + p).  Gauss-Chebyshev nodes of the first kind
therefore integrate G and its even moments exactly, and converge
spectrally once a cosine factor is included.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numpy.polynomial.chebyshev import chebgauss
from scipy.optimize import brentq, minimize_scalar
from scipy.special import roots_legendre

from .chebyshev import _check_domain, _grace_poly_x2, _unwrap

DB_PER_OCTAVE = 20.0 * math.log10(2.0)   # dB per octave for unit log-log slope
TRANSFORM_TOL = 1e-13
EPS = np.finfo(float).eps


@dataclass(frozen=True)
class GraceParams:
    n: int
    p: int = 0

    def __post_init__(self):
        if int(self.n) != self.n or int(self.p) != self.p:
            raise ValueError("n and p must be integers")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 0 <= self.p <= self.n - 1:
            raise ValueError(f"p must lie in [0, n-1] = [0, {self.n - 1}], got {self.p}")

    @property
    def z(self) -> int:
        """Number of vanishing even derivatives of the transform at zero."""
        return self.n - self.p - 1


@dataclass(frozen=True)
class TransformMetrics:
    rolloff_db_per_octave: float
    first_sidelobe_db: float
    first_stopband_zero_phi: float
    # False when the sidelobe sits below what double precision can resolve
    reliable: bool = True


def _grace_fn_x2(x2, params: GraceParams):
    # G from x**2; exact zero at |x| = 1 where (1 - x^2)^(p + 1/2) vanishes
    x2 = np.asarray(x2, dtype=float)
    w = 1.0 - x2
    out = np.zeros_like(x2)
    inside = w > 0.0
    gp = _grace_poly_x2(x2[inside], params.n)
    out[inside] = gp * w[inside] ** params.p / np.sqrt(w[inside])
    return out


def grace_fn(x, params: GraceParams):
    """G(x, n, p) = Gp(x, n) (1 - x^2)^(p - 1/2); zero at x = +-1."""
    xa = _check_domain(x)
    return _unwrap(x, _grace_fn_x2(xa * xa, params))


def _poly_part(x, params: GraceParams):
    # Gp (1 - x^2)^p: G times the Chebyshev weight's reciprocal
    x2 = x * x
    return _grace_poly_x2(x2, params.n) * (1.0 - x2) ** params.p


def integrate_g(params: GraceParams, nodes: int | None = None) -> float:
    """Gauss-Chebyshev quadrature of G over [-1, 1]; exact for nodes >= n+p+1."""
    N = nodes or params.n + params.p + 1
    x, w = chebgauss(N)
    return float(np.dot(w, _poly_part(x, params)))


def norm_a(params: GraceParams) -> float:
    """Integral of G over [-1, 1], which is pi/(2n) for every admissible p."""
    return math.pi / (2 * params.n)


@lru_cache(maxsize=4096)
def norm_b(params: GraceParams) -> float:
    """b(n, p) = (1/a^2) * integral of G^2.

    G^2 = Gp^2 (1 - x^2)^(2p - 1) is a polynomial of degree 4(n + p) - 2
    because Gp carries a factor (1 - x^2), so Gauss-Legendre with 2(n+p)+1
    nodes is exact.
    """
    n, p = params.n, params.p
    x, w = roots_legendre(2 * (n + p) + 1)
    x2 = x * x
    gp = _grace_poly_x2(x2, n)
    integral = np.dot(w, gp * gp * (1.0 - x2) ** (2 * p - 1))
    if not integral > 0.0:
        raise ArithmeticError("non-positive integral of G^2")
    return float(integral / norm_a(params) ** 2)


def transform_moment(k: int, params: GraceParams) -> float:
    """Integral of G(x) x^(2k) over [-1, 1] (exact Gauss-Chebyshev)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    x, w = chebgauss(params.n + params.p + k + 1)
    return float(np.dot(w, _poly_part(x, params) * x ** (2 * k)))


def _grace_poly_coeffs(n: int) -> list[Fraction]:
    # exact power-series coefficients of Gp(x, n) from the T-polynomial difference
    t_prev, t_cur = [Fraction(1)], [Fraction(0), Fraction(1)]
    ts = {0: t_prev, 1: t_cur}
    for k in range(2, 2 * n + 2):
        nxt = [Fraction(0)] + [2 * v for v in t_cur]
        for i, v in enumerate(t_prev):
            nxt[i] -= v
        t_prev, t_cur = t_cur, nxt
        ts[k] = t_cur
    hi, lo = ts[2 * n + 1], ts[2 * n - 1] + [Fraction(0)] * 2
    sign = -1 if n % 2 else 1
    return [sign * (a - b) / (4 * n) for a, b in zip(hi[1:], lo[1:])]


def transform_moment_exact(k: int, params: GraceParams) -> Fraction:
    """Integral of G(x) x^(2k) divided by pi, in exact rational arithmetic.

    The moments beyond the vanishing ones are of order 4^-n, far below what
    the float quadrature can resolve for large n; this settles their sign.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    poly = _grace_poly_coeffs(params.n)
    for _ in range(params.p):
        # multiply by (1 - x^2)
        poly = [a - (poly[i - 2] if i >= 2 else 0) for i, a in enumerate(poly + [0, 0])]
    total = Fraction(0)
    for j, coef in enumerate(poly):
        if j % 2 or coef == 0:
            continue
        # integral of x^(2k+j) / sqrt(1 - x^2) over [-1, 1] is pi (e-1)!!/e!!, e = 2k+j
        ratio = Fraction(1)
        for t in range(1, 2 * k + j, 2):
            ratio *= Fraction(t, t + 1)
        total += coef * ratio
    return total


class _TransformEvaluator:
    """g(phi) and g'(phi) on 0 <= phi <= phi_max with a fixed node set."""

    def __init__(self, params: GraceParams, phi_max: float, nodes: int | None = None):
        self.params = params
        self.b = norm_b(params)
        self.phi_max = phi_max
        if nodes is None:
            nodes = _default_nodes(params, self.b, phi_max)
        self.nodes = nodes
        x, w = chebgauss(nodes)
        self.x = x
        self.fw = w * _poly_part(x, params) / norm_a(params)

    def __call__(self, phi):
        phi = np.asarray(phi, dtype=float)
        arg = np.multiply.outer(phi, math.pi * self.b * self.x)
        return np.cos(arg) @ self.fw

    def deriv(self, phi):
        phi = np.asarray(phi, dtype=float)
        kx = math.pi * self.b * self.x
        return -np.sin(np.multiply.outer(phi, kx)) @ (self.fw * kx)


def _default_nodes(params: GraceParams, b: float, phi_max: float) -> int:
    # cos(w cos t) needs about w/2 + O(w^(1/3)) extra nodes to converge
    w = math.pi * b * phi_max
    return params.n + params.p + 1 + int(math.ceil(0.5 * w + 4.0 * w ** (1 / 3))) + 24


def transform(phi, params: GraceParams):
    """Normalized Fourier transform g(phi, n, p), with g(0) = 1.

    The node count is doubled until two successive results agree to 1e-13.
    """
    phi_arr = np.abs(np.atleast_1d(np.asarray(phi, dtype=float)))
    phi_max = float(phi_arr.max()) if phi_arr.size else 0.0
    ev = _TransformEvaluator(params, max(phi_max, 1.0))
    prev = ev(phi_arr)
    for _ in range(12):
        ev = _TransformEvaluator(params, ev.phi_max, 2 * ev.nodes)
        cur = ev(phi_arr)
        if np.max(np.abs(cur - prev)) <= TRANSFORM_TOL:
            break
        prev = cur
    else:
        raise ArithmeticError("transform quadrature did not converge")
    return _unwrap(phi, cur if np.ndim(phi) else cur[0])


def rolloff_slope(value: float, slope: float, at: float) -> float:
    """Magnitude of d(20 log10 |y|)/d(log2 f) given y, dy/df at f."""
    return abs(DB_PER_OCTAVE * at * slope / value)


def _crossing(func, a, b, fa, fb):
    if fa == 0.0:
        return a
    scalar = lambda t: float(func(np.array([t]))[0])   # noqa: E731
    if np.signbit(scalar(a)) == np.signbit(scalar(b)):
        # noise-level values: the scalar and vectorized sums disagree in sign
        return a + (b - a) * fa / (fa - fb)
    return brentq(scalar, a, b, xtol=1e-14, rtol=4 * np.finfo(float).eps)


def find_first_sidelobe(func, start: float, step: float, stop: float):
    """Locate the first zero of ``func`` beyond ``start`` and the peak |func|
    of the following lobe.

    ``func`` must be vectorized.  Returns ``(zero, peak_location, peak_abs)``;
    the lobe is closed by the next zero or by ``stop``.
    """
    chunk = 512
    zeros = []
    lo = start
    while len(zeros) < 2 and lo < stop:
        grid = np.minimum(lo + step * np.arange(chunk + 1), stop)
        vals = func(grid)
        s = np.signbit(vals)
        for i in np.nonzero(s[1:] != s[:-1])[0]:
            a, b = grid[i], grid[i + 1]
            zeros.append(_crossing(func, a, b, vals[i], vals[i + 1]))
            if len(zeros) == 2:
                break
        lo = grid[-1]
        if grid[-1] >= stop:
            break
    if not zeros:
        raise ArithmeticError("no zero crossing found")
    first = zeros[0]
    end = zeros[1] if len(zeros) > 1 else stop
    # seed the bounded search on a coarse sample so it starts near the peak
    sample = np.linspace(first, end, 65)
    mags = np.abs(func(sample))
    j = int(np.argmax(mags))
    a, b = sample[max(j - 1, 0)], sample[min(j + 1, len(sample) - 1)]
    res = minimize_scalar(lambda t: -abs(float(func(np.array([t]))[0])),
                          bounds=(a, b), method="bounded",
                          options={"xatol": 1e-12 * max(1.0, b)})
    peak_at = float(res.x) if -res.fun >= mags[j] else float(sample[j])
    return first, peak_at, max(-float(res.fun), float(mags[j]))


def transform_metrics(params: GraceParams) -> TransformMetrics:
    """Limiting (m -> infinity) rolloff and first sidelobe of the filter.

    Rolloff is the slope of the dB response per octave at phi = 1, the image
    of the reference frequency; this choice matches the tabulated limiting
    rolloff values.  The sidelobe is the peak |g| between the first and second
    stop-band zeros.
    """
    b = norm_b(params)
    phi_max = 4.0
    ev = _TransformEvaluator(params, phi_max)
    g1 = float(ev(np.array([1.0]))[0])
    d1 = float(ev.deriv(np.array([1.0]))[0])
    rolloff = rolloff_slope(g1, d1, 1.0)

    # g is positive and decreasing up to its first zero, beyond the -6 dB point
    half = brentq(lambda t: float(ev(np.array([t]))[0]) - 0.5, 1.0, phi_max, xtol=1e-12)
    # stop-band zeros are about 1.6/b apart, so a 0.25/b step cannot skip a lobe
    try:
        zero, _, peak = find_first_sidelobe(ev, half, 0.25 / b, phi_max)
    except ArithmeticError:
        zero = None
    if zero is not None:
        # cosine arguments reach pi*b*phi; their rounding sets the noise floor
        noise = EPS * math.pi * b * zero * float(np.abs(ev.fw).sum())
        reliable = bool(peak > 100.0 * noise)
    else:
        # the stop band is lost in rounding noise: report the noise level
        tail = np.linspace(half, phi_max, 4097)
        vals = np.abs(ev(tail))
        noise = EPS * math.pi * b * phi_max * float(np.abs(ev.fw).sum())
        below = np.nonzero(vals < 100.0 * noise)[0]
        zero = float(tail[below[0]]) if below.size else phi_max
        peak = float(vals[below[0]:].max()) if below.size else float(vals[-1])
        reliable = False
    return TransformMetrics(
        rolloff_db_per_octave=rolloff,
        first_sidelobe_db=20.0 * math.log10(peak),
        first_stopband_zero_phi=zero,
        reliable=reliable,
    )
