"""Discrete Grace filter: taps, frequency response and response metrics.

Frequency is scaled so that 1 is the Nyquist frequency.  A coefficient
vector is a 1-D float array of odd length 2m+1 holding c_{-m} .. c_m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .grace import GraceParams, _grace_fn_x2, find_first_sidelobe, rolloff_slope

PASSBAND_RIPPLE_TOL = 1e-14
STOPBAND_SLACK = 1.05
# stop-band extrema smaller than this are rounding noise, not ripple
STOPBAND_FLOOR = 1e-13


# cutoff is the half-power point, where h^2 = 1/2
HALF_POWER = 1.0 / math.sqrt(2.0)


class DegenerateResponse(ValueError):
    """The response never falls to the half-power level on (0, 1)."""


@dataclass(frozen=True)
class FilterSpec:
    m: int
    params: GraceParams

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2:
            raise ValueError(f"m must be an integer >= 2, got {self.m}")

    @property
    def taps(self) -> int:
        return 2 * self.m + 1

    @classmethod
    def of(cls, m: int, n: int, p: int = 0) -> "FilterSpec":
        return cls(m, GraceParams(n, p))


@dataclass
class RippleReport:
    passband_ripple: float
    stopband_regular: bool
    extrema: list[tuple[float, float]]
    passband_edge: float
    stopband_zero: float | None = None


@dataclass
class FilterMetrics:
    f_r: float
    f_c: float
    rolloff_db_per_octave: float
    first_sidelobe_db: float
    derivative_magnitudes: list[float] = field(default_factory=list)


def half_length(c) -> int:
    c = np.asarray(c)
    if c.ndim != 1 or c.size % 2 == 0:
        raise ValueError("coefficient vector must be 1-D with odd length")
    return c.size // 2


def mirror(half) -> np.ndarray:
    """Build the full symmetric vector from c_0 .. c_m."""
    half = np.asarray(half, dtype=float)
    return np.concatenate([half[:0:-1], half])


def coefficients(spec: FilterSpec) -> np.ndarray:
    """Normalized Grace taps c_i = G(i/m) / sum_j G(j/m).

    Only i >= 0 is evaluated and then mirrored, so c_i and c_{-i} are the
    same float.  The end taps are exactly zero.
    """
    m = spec.m
    x2 = (np.arange(m + 1) / m) ** 2
    g = _grace_fn_x2(x2, spec.params)
    g[m] = 0.0
    total = math.fsum([g[0]] + [2.0 * v for v in g[1:]])
    if not total > 0.0:
        raise ArithmeticError("Grace taps do not sum to a positive value")
    return mirror(g / total)


def windowed_sinc(m: int, cutoff: float) -> np.ndarray:
    """Truncated (rectangular-window) ideal low-pass taps, normalized to sum 1."""
    i = np.arange(m + 1)
    half = cutoff * np.sinc(cutoff * i)
    c = mirror(half)
    return c / math.fsum(c)


def _fold(c):
    # center tap and the one-sided taps with their integer offsets
    m = half_length(c)
    c = np.asarray(c, dtype=float)
    return c[m], c[m + 1:], np.arange(1, m + 1)


def response(c, f):
    """h(f) = sum_i c_i cos(i pi f)."""
    c0, side, i = _fold(c)
    fa = np.asarray(f, dtype=float)
    val = c0 + 2.0 * (np.cos(np.multiply.outer(fa, np.pi * i)) @ side)
    return float(val) if np.ndim(f) == 0 else val


def response_derivative(c, f):
    """dh/df = -sum_i c_i i pi sin(i pi f)."""
    _, side, i = _fold(c)
    fa = np.asarray(f, dtype=float)
    val = -2.0 * (np.sin(np.multiply.outer(fa, np.pi * i)) @ (side * np.pi * i))
    # sin(i pi f) vanishes exactly at both band edges; float pi does not
    val = np.where((fa == 0.0) | (fa == 1.0), 0.0, val)
    return float(val) if np.ndim(f) == 0 else val


def reference_frequency(c) -> float:
    """f_r = integral of h^2 over [0, 1] = sum of squared taps."""
    c = np.asarray(c, dtype=float)
    return math.fsum(c * c)


def even_derivatives(c, z: int) -> list[float]:
    """Scaled even derivatives of h at f = 0: (-1)^k sum_i c_i x_i^(2k), k = 1..z."""
    if z < 1:
        raise ValueError("z must be >= 1")
    m = half_length(c)
    _, side, i = _fold(c)
    x2 = (i / m) ** 2
    out = []
    powk = np.ones_like(x2)
    for k in range(1, z + 1):
        powk = powk * x2
        out.append((-1) ** k * 2.0 * math.fsum(side * powk))
    return out


def cutoff_frequency(c, grid: int = 2000) -> float:
    """Smallest f with h(f)^2 = 1/2."""
    f = np.linspace(0.0, 1.0, grid + 1)
    h = response(c, f)
    below = np.nonzero(h < HALF_POWER)[0]
    if h[0] < HALF_POWER or below.size == 0:
        raise DegenerateResponse("degenerate response: no half-power crossing in (0, 1)")
    j = below[0]
    return brentq(lambda t: response(c, t) - HALF_POWER, f[j - 1], f[j], xtol=1e-15)


def _refine_extrema(c, f, dh):
    s = np.signbit(dh)
    out = []
    # the endpoints are critical points of every even response; skip them
    for j in np.nonzero(s[1:-2] != s[2:-1])[0] + 1:
        a, b = f[j], f[j + 1]
        da, db = response_derivative(c, a), response_derivative(c, b)
        if da == 0.0 or db == 0.0 or (da > 0.0) == (db > 0.0):
            # noise-level slope: summation order decides the sign
            loc = a if abs(dh[j]) <= abs(dh[j + 1]) else b
        else:
            loc = brentq(lambda t: response_derivative(c, t), a, b, xtol=1e-12)
        kind = 1 if not s[j] else -1   # rising then falling -> maximum
        out.append((loc, response(c, loc), kind))
    return out


def ripple_scan(c, points: int = 2000, slack: float = STOPBAND_SLACK,
                floor: float = STOPBAND_FLOOR) -> RippleReport:
    """Scan dh/df on a uniform grid for sign changes and classify extrema.

    Pass-band ripple is the highest maximum minus the lowest minimum below
    the cutoff, counting f = 0 as an extremum.  The stop band is regular
    when the extremum magnitudes beyond the first stop-band zero never grow
    by more than ``slack`` from one extremum to the next.
    """
    if points < 100:
        raise ValueError("points must be >= 100")
    c = np.asarray(c, dtype=float)
    f = np.linspace(0.0, 1.0, points)
    dh = response_derivative(c, f)
    found = _refine_extrema(c, f, dh)
    try:
        edge = cutoff_frequency(c)
    except DegenerateResponse:
        edge = 1.0

    h0 = response(c, 0.0)
    first_kind = -1 if dh[1] > 0.0 else 1
    maxima, minima = [], []
    if found:
        (maxima if first_kind > 0 else minima).append(h0)
    for loc, val, kind in found:
        if loc < edge:
            (maxima if kind > 0 else minima).append(val)
    ripple = max(maxima) - min(minima) if maxima and minima else 0.0

    zero = None
    regular = True
    if edge < 1.0:
        h = response(c, f)
        past = np.nonzero((f > edge) & (h <= 0.0))[0]
        if past.size:
            j = past[0]
            zero = brentq(lambda t: response(c, t), f[j - 1], f[j], xtol=1e-15) \
                if h[j] != 0.0 else f[j]
            mags = [abs(v) for loc, v, _ in found if loc > zero and abs(v) > floor]
            regular = all(b <= slack * a for a, b in zip(mags, mags[1:]))
    extrema = [(loc, val) for loc, val, _ in found]
    return RippleReport(ripple, regular, extrema, edge, zero)


def measure_metrics(c, z: int = 0) -> FilterMetrics:
    """Cutoff, reference frequency, rolloff at f_r and first sidelobe of taps."""
    c = np.asarray(c, dtype=float)
    m = half_length(c)
    f_c = cutoff_frequency(c)
    f_r = reference_frequency(c)
    rolloff = rolloff_slope(response(c, f_r), response_derivative(c, f_r), f_r)
    try:
        _, _, peak = find_first_sidelobe(lambda t: response(c, t), f_c, 0.25 / m, 1.0)
        sidelobe = 20.0 * math.log10(peak) if peak > 0.0 else -math.inf
    except ArithmeticError:
        sidelobe = math.nan
    derivs = [abs(v) for v in even_derivatives(c, z)] if z >= 1 else []
    return FilterMetrics(f_r, f_c, rolloff, sidelobe, derivs)
