"""Closed-form design predictions for Grace filters.

Covers the limiting m*f_r and m*f_c products, the asymptotic series for the
residual even derivatives of the discrete response (whose coefficients are
Dirichlet series), and a direct search that turns rolloff/sidelobe/cutoff
targets into (m, n, p).
"""

from __future__ import annotations

import enum
import logging
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

from .filter import FilterSpec, coefficients, cutoff_frequency
from .grace import GraceParams, TransformMetrics, transform_metrics

log = logging.getLogger(__name__)

ROLLOFF_RANGE = (40.0, 120.0)
SIDELOBE_RANGE = (-200.0, -40.0)
N_MAX = 1000

# B_2k / (2k)! for k = 1..10
_BERNOULLI_FACT = [
    1 / 12, -1 / 720, 1 / 30240, -1 / 1209600, 1 / 47900160,
    -691 / 1307674368000, 1 / 74724249600, -3617 / 10670622842880000,
    43867 / 5109094217170944000, -174611 / 802857662698291200000,
]


class SeriesKind(enum.Enum):
    ZETA = "zeta"
    J1_INVERSE = "j1_inverse"
    J2_INVERSE = "j2_inverse"

    @property
    def order(self) -> int:
        return {"zeta": 0, "j1_inverse": 1, "j2_inverse": 2}[self.value]


class InfeasibleDesign(ValueError):
    pass


@dataclass(frozen=True)
class DesignTargets:
    f_c: float
    rolloff: float
    sidelobe: float

    def __post_init__(self):
        if not 0.0 < self.f_c < 1.0:
            raise ValueError(f"cutoff must lie in (0, 1), got {self.f_c}")
        if not self.rolloff > 0.0:
            raise ValueError(f"rolloff must be positive, got {self.rolloff}")
        if not self.sidelobe < 0.0:
            raise ValueError(f"sidelobe must be negative, got {self.sidelobe}")
        lo, hi = ROLLOFF_RANGE
        if not lo <= self.rolloff <= hi:
            warnings.warn(f"rolloff {self.rolloff} dB/octave outside the usual [{lo}, {hi}]",
                          stacklevel=3)
        lo, hi = SIDELOBE_RANGE
        if not lo <= self.sidelobe <= hi:
            warnings.warn(f"sidelobe {self.sidelobe} dB outside the usual [{lo}, {hi}]",
                          stacklevel=3)


@dataclass(frozen=True)
class DesignResult:
    spec: FilterSpec
    predicted: TransformMetrics
    achieved_mfc: float


def d_of_p(p: int) -> float:
    """d(p) = prod_{j=1}^{2p} 2j/(2j-1), with d(0) = 1."""
    if p < 0:
        raise ValueError("p must be >= 0")
    val = 1.0
    for j in range(1, 2 * p + 1):
        val *= 2 * j / (2 * j - 1)
    return val


def limiting_mfr(params: GraceParams) -> float:
    """Approximate m*f_r as m -> infinity: (2n - d(p)/pi) / pi."""
    return (2 * params.n - d_of_p(params.p) / math.pi) / math.pi


def cutoff_product(params: GraceParams) -> float:
    """Approximate m*f_c: (2n - sqrt((8p + 1) / (4 pi))) / pi."""
    return (2 * params.n - math.sqrt((8 * params.p + 1) / (4 * math.pi))) / math.pi


def _prime_factors(i: int):
    d = 2
    while d * d <= i:
        if i % d == 0:
            yield d
            while i % d == 0:
                i //= d
        d += 1 if d == 2 else 2
    if i > 1:
        yield i


def dirichlet_coefficient(kind: SeriesKind, i: int) -> int:
    """i-th coefficient of the Dirichlet series of the given kind.

    The Jordan-totient inverses are multiplicative with value 1 - p^k at
    every prime power p^e (k = 1 or 2).
    """
    if i < 1:
        raise ValueError("index must be >= 1")
    kind = SeriesKind(kind)
    if kind is SeriesKind.ZETA:
        return 1
    val = 1
    for prime in _prime_factors(i):
        val *= 1 - prime ** kind.order
    return val


def zeta(s: float, terms: int = 20) -> float:
    """Riemann zeta for real s > 1: direct sum plus Euler-Maclaurin tail."""
    if not s > 1.0:
        raise ValueError("zeta needs s > 1")
    N = terms
    head = math.fsum(i ** -s for i in range(1, N))
    tail = [N ** (1.0 - s) / (s - 1.0), 0.5 * N ** -s]
    rising = s                     # s (s+1) ... (s+2k-2)
    for k, coef in enumerate(_BERNOULLI_FACT, start=1):
        term = coef * rising * N ** (-s - 2 * k + 1)
        tail.append(term)
        if abs(term) < 1e-18:
            break
        rising *= (s + 2 * k - 1) * (s + 2 * k)
    return head + math.fsum(tail)


def dirichlet_sum(kind: SeriesKind, s: float) -> float:
    """sum_i coef(kind, i) / i^s.

    The Jordan totient J_k has Dirichlet series zeta(s - k)/zeta(s), so its
    inverse sums to zeta(s)/zeta(s - k); that needs s > k + 1.
    """
    kind = SeriesKind(kind)
    k = kind.order
    if not s > k + 1:
        raise ValueError(f"{kind.value} series needs s > {k + 1}")
    if k == 0:
        return zeta(s)
    return zeta(s) / zeta(s - k)


def _alpha(params: GraceParams) -> float:
    n, p = params.n, params.p
    sign = -1.0 if (n + (p - p % 2) // 2) % 2 else 1.0
    prod = 1.0
    for j in range(p + 1):
        prod *= (j + 0.5) / math.pi
    return sign * math.sqrt(8.0) / math.pi * n * zeta(p + 1.5) * prod


def _beta(params: GraceParams, k: int) -> float:
    n, p = params.n, params.p
    sign = -1.0 if p % 2 else 1.0
    bracket = 8 * n * n + 3 * p + 12 * (k - 1) + 6 - 0.5
    return sign * (p + 1.5) / (12 * math.pi) * dirichlet_sum(SeriesKind.J1_INVERSE, p + 2.5) * bracket


def _gamma(params: GraceParams, k: int) -> float:
    n, p = params.n, params.p
    bracket = (8 * n * n * (8 * n * n + 10 * p + 40 * k - 25)
               + 5 * p * (3 * p + 24 * k - 16)
               + 20 * (k - 1) * (12 * k - 7) - 8 + 0.25)
    return ((p + 1.5) * (p + 2.5) / (480 * math.pi ** 2)
            * dirichlet_sum(SeriesKind.J2_INVERSE, p + 3.5) * bracket)


def derivative_prediction(m: int, params: GraceParams, k: int) -> float:
    """Asymptotic value of the k-th scaled even derivative of raw Grace taps.

    The series alpha / m^(p + 3/2) * [1 - beta/m - gamma/m^2] tracks the
    moment sum_i c_i x_i^(2k); it is multiplied by (-1)^k here so the result
    is directly comparable with ``filter.even_derivatives``.  Valid for
    1 <= k <= n - p - 1.
    """
    if not 1 <= k <= params.z:
        raise ValueError(f"k must lie in [1, {params.z}]")
    if m < 2:
        raise ValueError("m must be >= 2")
    series = (_alpha(params) / m ** (params.p + 1.5)
              * (1.0 - _beta(params, k) / m - _gamma(params, k) / m ** 2))
    return -series if k % 2 else series


@lru_cache(maxsize=65536)
def _metrics(n: int, p: int) -> TransformMetrics:
    return transform_metrics(GraceParams(n, p))


def _smallest_p(n: int, targets: DesignTargets) -> int | None:
    # sidelobe falls monotonically with p, rolloff falls with p too:
    # the smallest p meeting the sidelobe is the only candidate worth checking
    if _metrics(n, 0).rolloff_db_per_octave < targets.rolloff:
        return None
    if _metrics(n, n - 1).first_sidelobe_db > targets.sidelobe:
        return None
    lo, hi = 0, n - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _metrics(n, mid).first_sidelobe_db <= targets.sidelobe:
            hi = mid
        else:
            lo = mid + 1
    if _metrics(n, lo).rolloff_db_per_octave >= targets.rolloff:
        return lo
    return None


def _coarse_grid(n_max: int):
    n = 2
    while n < n_max:
        yield n
        n = max(n + 1, int(n * 1.25))
    yield n_max


def design_search(targets: DesignTargets, n_max: int = N_MAX) -> DesignResult:
    """Smallest (n, then p) whose limiting metrics meet the targets, plus m.

    Coarse geometric scan over n, bisection between the last infeasible and
    first feasible grid points, then a short downward check.
    """
    prev = 1
    found = None
    for n in _coarse_grid(n_max):
        if _smallest_p(n, targets) is not None:
            found = n
            break
        prev = n
    if found is None:
        top = _metrics(n_max, 0).rolloff_db_per_octave
        deep = _metrics(n_max, n_max - 1).first_sidelobe_db
        raise InfeasibleDesign(
            f"no (n, p) with n <= {n_max} meets rolloff >= {targets.rolloff} and "
            f"sidelobe <= {targets.sidelobe}; at n = {n_max} the best are "
            f"rolloff {top:.1f} dB/octave (p = 0) and sidelobe {deep:.1f} dB (p = n-1)")
    lo, hi = prev, found
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _smallest_p(mid, targets) is not None:
            hi = mid
        else:
            lo = mid
    n = hi
    for cand in range(max(2, n - 3), n):
        if _smallest_p(cand, targets) is not None:
            n = cand
            break
    p = _smallest_p(n, targets)
    params = GraceParams(n, p)
    m = max(math.floor(cutoff_product(params) / targets.f_c + 0.5), 2 * n)
    spec = FilterSpec(m, params)
    achieved = m * cutoff_frequency(coefficients(spec))
    log.debug("design_search: n=%d p=%d m=%d", n, p, m)
    return DesignResult(spec, _metrics(n, p), achieved)
