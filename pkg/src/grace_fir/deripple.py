"""Discretization compensation ("deripple").

Finds the minimum-norm weighted adjustment to a symmetric tap vector that
zeroes the first z scaled even derivatives of its response at f = 0 while
keeping the taps' sum.  The Gram matrix of that problem is badly
conditioned; it is preconditioned by evaluating even-order Chebyshev U
polynomials at the tap abscissae and solved through an SVD whose largest
inverse singular values may be discarded.
"""

from __future__ import annotations

import collections
import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .chebyshev import cheb_u_even
from .filter import (
    PASSBAND_RIPPLE_TOL,
    STOPBAND_SLACK,
    FilterSpec,
    coefficients,
    even_derivatives,
    half_length,
    mirror,
    ripple_scan,
)

SV_FLOOR = 1e-290
TIE_TOL = 1e-15
MAX_SWEEPS = 60
MAX_EXACT_ROWS = 12


class SVDNotConverged(ArithmeticError):
    pass


@dataclass
class SVDFactorization:
    U: np.ndarray
    S: np.ndarray
    V: np.ndarray
    sweeps: int = 0


@dataclass
class CompensationReport:
    singular_values: list[float]
    zeroed_count: int = 0
    delta_norm: float = 0.0
    residual_derivatives: list[float] = field(default_factory=list)
    step_reached: int = 1
    accepted: bool = False
    applied: bool = False
    passband_ripple: float | None = None
    stopband_regular: bool | None = None
    history: list[tuple[int, int, float, bool]] = field(default_factory=list)


def weight(i: int, m: int) -> float:
    """Diagonal weight (2 / (m pi)) sqrt(1 - (i/m)^2); zero at i = +-m."""
    if abs(i) > m:
        raise ValueError("index outside [-m, m]")
    if abs(i) == m:
        return 0.0
    x = abs(i) / m
    return 2.0 / (m * math.pi) * math.sqrt(1.0 - x * x)


def _half_weights(m: int) -> np.ndarray:
    return np.array([weight(i, m) for i in range(m + 1)])


def build_design_matrix(m: int, z: int) -> np.ndarray:
    """(2m+1) x (z+1) matrix with entries U_2j(x_i) sqrt(W_ii).

    The transpose of the preconditioned, weighted constraint matrix.  Rows i
    and -i are copies of each other.
    """
    if z < 0 or z + 1 > 2 * m + 1:
        raise ValueError("need 0 <= z and z + 1 <= 2m + 1")
    x = np.arange(m + 1) / m
    u = cheb_u_even(x, z)                        # (z+1, m+1)
    half = (u * np.sqrt(_half_weights(m))).T      # (m+1, z+1)
    return np.concatenate([half[:0:-1], half])


def build_rhs(c, z: int) -> np.ndarray:
    """Preconditioned right-hand side -sum_i [U_2j(x_i) + (-1)^(j+1)] c_i, j = 0..z."""
    c = np.asarray(c, dtype=float)
    m = half_length(c)
    x = np.abs(np.arange(-m, m + 1)) / m
    u = cheb_u_even(x, z)
    out = np.empty(z + 1)
    for j in range(z + 1):
        shift = 1.0 if j % 2 else -1.0
        # U_0 - 1 is identically zero, so the first entry is exactly 0
        out[j] = -math.fsum((u[j] + shift) * c)
    return out


def svd_tall(M) -> SVDFactorization:
    """Thin SVD of a tall matrix by one-sided (Hestenes) Jacobi rotations.

    Returns U (rows x cols, orthonormal columns), S (unsorted, >= 0) and V
    with M = U diag(S) V^T.  Identical rows of M stay identical in U.
    """
    A = np.array(M, dtype=float, copy=True)
    rows, cols = A.shape
    if rows < cols:
        raise ValueError("svd_tall needs rows >= cols")
    V = np.eye(cols)
    eps = np.finfo(float).eps
    for sweep in range(1, MAX_SWEEPS + 1):
        rotated = False
        for p in range(cols - 1):
            for q in range(p + 1, cols):
                ap, aq = A[:, p], A[:, q]
                alpha = ap @ ap
                beta = aq @ aq
                gamma = ap @ aq
                if gamma == 0.0 or abs(gamma) <= eps * math.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                cs = 1.0 / math.sqrt(1.0 + t * t)
                sn = cs * t
                A[:, [p, q]] = np.column_stack((cs * ap - sn * aq, sn * ap + cs * aq))
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = cs * vp - sn * vq
                V[:, q] = sn * vp + cs * vq
        if not rotated:
            break
    else:
        raise SVDNotConverged(f"one-sided Jacobi did not converge in {MAX_SWEEPS} sweeps "
                              f"for a {rows}x{cols} matrix")
    S = np.sqrt(np.einsum("ij,ij->j", A, A))
    U = np.zeros_like(A)
    nz = S > 0.0
    U[:, nz] = A[:, nz] / S[nz]
    if not nz.all():
        U = _complete_basis(U, nz)
    return SVDFactorization(U, S, V, sweep)


def _complete_basis(U, filled):
    # fill columns belonging to zero singular values with an orthonormal complement
    rows, cols = U.shape
    basis = U[:, filled]
    q, _ = np.linalg.qr(np.column_stack([basis, np.eye(rows)]))
    extra = iter(range(basis.shape[1], rows))
    for j in np.nonzero(~filled)[0]:
        U[:, j] = q[:, next(extra)]
    return U


def _zero_order(sinv: np.ndarray) -> list[int]:
    # largest inverse first; near-ties go to the larger column index
    def cmp(a, b):
        va, vb = sinv[a], sinv[b]
        if abs(va - vb) <= TIE_TOL * max(abs(va), abs(vb)):
            return b - a
        return -1 if va > vb else 1
    return sorted(range(len(sinv)), key=functools.cmp_to_key(cmp))


def _apply(c, rhs, svd: SVDFactorization, q: int) -> np.ndarray:
    S = svd.S
    sinv = np.zeros_like(S)
    ok = S > SV_FLOOR
    sinv[ok] = 1.0 / S[ok]
    for j in _zero_order(sinv)[:q]:
        sinv[j] = 0.0
    m = half_length(c)
    # right to left: V^T b, scale, U, then sqrt(W)
    t = svd.U @ ((svd.V.T @ rhs) * sinv)
    return np.sqrt(mirror(_half_weights(m))) * t


def compensate(c, z: int, q: int = 0, svd: SVDFactorization | None = None):
    """Adjust taps so the first z scaled even derivatives vanish.

    ``q`` inverse singular values are discarded, largest first.  With q < 0
    nothing is changed and the report only carries the singular values.
    Returns ``(taps, report)``.
    """
    if z < 1:
        raise ValueError("z must be >= 1")
    if q >= z + 1:
        raise ValueError("all directions removed: q must be <= z")
    c = np.asarray(c, dtype=float)
    m = half_length(c)
    if svd is None:
        svd = svd_tall(build_design_matrix(m, z))
    report = CompensationReport(singular_values=[float(s) for s in svd.S])
    if q < 0:
        return c.copy(), report
    delta = _apply(c, build_rhs(c, z), svd, q)
    out = c + delta
    out = 0.5 * (out + out[::-1])
    report.zeroed_count = q
    report.delta_norm = float(np.linalg.norm(delta))
    report.residual_derivatives = even_derivatives(out, z)
    report.applied = True
    return out, report


def auto_compensate(spec: FilterSpec, threshold: float = PASSBAND_RIPPLE_TOL,
                    slack: float = STOPBAND_SLACK, points: int = 2000):
    """Run the five-step heuristic and return ``(taps, report)``.

    Step 1 checks the raw taps, step 2 compensates with every inverse
    singular value kept, and steps 3-5 discard one more of the largest
    inverses each time (step 5 repeats until q = z).  The first candidate
    with pass-band ripple below ``threshold`` and a regular stop band wins;
    otherwise the candidate with the least pass-band ripple is returned with
    ``accepted = False``.
    """
    c = coefficients(spec)
    z = spec.params.z

    def check(taps):
        scan = ripple_scan(taps, points=points, slack=slack)
        return scan, scan.passband_ripple <= threshold and scan.stopband_regular

    scan, ok = check(c)
    history = [(1, -1, scan.passband_ripple, scan.stopband_regular)]
    best = (scan.passband_ripple, c, None, 1, scan)
    if ok or z < 1:
        report = CompensationReport(singular_values=[], step_reached=1, accepted=ok,
                                    passband_ripple=scan.passband_ripple,
                                    stopband_regular=scan.stopband_regular,
                                    history=history)
        if z >= 1:
            report.residual_derivatives = even_derivatives(c, z)
        return c, report

    svd = svd_tall(build_design_matrix(spec.m, z))
    for q in range(0, z + 1):
        step = min(2 + q, 5)
        taps, report = compensate(c, z, q, svd=svd)
        scan, ok = check(taps)
        history.append((step, q, scan.passband_ripple, scan.stopband_regular))
        if ok:
            report.step_reached = step
            report.accepted = True
            report.passband_ripple = scan.passband_ripple
            report.stopband_regular = scan.stopband_regular
            report.history = history
            return taps, report
        if scan.passband_ripple < best[0]:
            best = (scan.passband_ripple, taps, report, step, scan)

    _, taps, report, step, scan = best
    if report is None:
        report = CompensationReport(singular_values=[float(s) for s in svd.S],
                                    residual_derivatives=even_derivatives(taps, z))
    report.step_reached = step
    report.accepted = False
    report.passband_ripple = scan.passband_ripple
    report.stopband_regular = scan.stopband_regular
    report.history = history
    return taps, report


@dataclass
class SweepSummary:
    """Outcome of ``auto_compensate`` over a cube of (m, n, p)."""
    total: int = 0
    steps: collections.Counter = field(default_factory=collections.Counter)
    rejected: list[tuple[int, int, int]] = field(default_factory=list)
    max_accepted_ripple: float = 0.0
    # compensated without truncation (step 2): the derivatives should be gone
    max_step2_derivative: float = 0.0

    def fraction(self, step: int) -> float:
        return self.steps[step] / self.total if self.total else 0.0


def compensation_sweep(m_values, progress=None) -> SweepSummary:
    """Run ``auto_compensate`` for every m given, n in [2, m-1], p in [0, n-2]."""
    out = SweepSummary()
    for m in m_values:
        for n in range(2, m):
            for p in range(n - 1):
                taps, rep = auto_compensate(FilterSpec.of(m, n, p))
                out.total += 1
                if not rep.accepted:
                    out.rejected.append((m, n, p))
                    continue
                out.steps[rep.step_reached] += 1
                out.max_accepted_ripple = max(out.max_accepted_ripple, rep.passband_ripple)
                if rep.step_reached == 2:
                    worst = max(abs(v) for v in rep.residual_derivatives)
                    out.max_step2_derivative = max(out.max_step2_derivative, worst)
        if progress is not None:
            progress(m, out)
    return out


# exact preconditioner rows, used for verification only

def limit_gram(size: int) -> list[list[Fraction]]:
    """C[u][v] = lim (A W A^T)[u][v] for the sign-free constraint rows x^(2j).

    Equals (2/pi) * integral of x^(2s) sqrt(1 - x^2), s = u + v (0-based),
    i.e. 2 (2s-1)!! / (2s+2)!!.
    """
    def entry(s):
        val = Fraction(2)
        for k in range(1, s + 2):
            val *= Fraction(2 * k - 3, 2 * k)
        return -val
    return [[entry(u + v) for v in range(size)] for u in range(size)]


def _invert(mat):
    n = len(mat)
    aug = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [v / pv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def _exact_sqrt(q: Fraction) -> Fraction:
    if q < 0:
        raise ArithmeticError("negative pivot in exact Cholesky")
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn != q.numerator or rd * rd != q.denominator:
        raise ArithmeticError(f"pivot {q} is not a rational square")
    return Fraction(rn, rd)


def _check_count(count):
    if not 1 <= count <= MAX_EXACT_ROWS:
        raise OverflowError(f"exact preconditioner rows limited to 1..{MAX_EXACT_ROWS}")


def preconditioner_cholesky(count: int) -> list[list[int]]:
    """Rows of the lower-triangular P with C^-1 = P^T P, by exact Cholesky.

    P^T P is an upper-lower factorization; reversing row and column order
    turns it into an ordinary Cholesky factorization.
    """
    _check_count(count)
    cinv = _invert(limit_gram(count))
    n = count
    rev = [[cinv[n - 1 - i][n - 1 - j] for j in range(n)] for i in range(n)]
    L = [[Fraction(0)] * n for _ in range(n)]
    for j in range(n):
        d = rev[j][j] - sum(L[j][k] ** 2 for k in range(j))
        L[j][j] = _exact_sqrt(d)
        for i in range(j + 1, n):
            L[i][j] = (rev[i][j] - sum(L[i][k] * L[j][k] for k in range(j))) / L[j][j]
    # P = J L^T J
    P = [[L[n - 1 - j][n - 1 - i] for j in range(n)] for i in range(n)]
    out = []
    for row in P:
        if any(v.denominator != 1 for v in row):
            raise ArithmeticError("non-integer preconditioner entry")
        out.append([int(v) for v in row])
    return out


def preconditioner_chebyshev(count: int) -> list[list[int]]:
    """Rows of P as coefficients of U_0, U_2, ... in powers of x^2."""
    _check_count(count)
    u_prev, u_cur = [1], [0, 2]
    rows = [[1] + [0] * (count - 1)]
    for j in range(2, 2 * count - 1):
        nxt = [0] + [2 * v for v in u_cur]
        for k, v in enumerate(u_prev):
            nxt[k] -= v
        u_prev, u_cur = u_cur, nxt
        if j % 2 == 0:
            even = u_cur[::2]
            rows.append(even + [0] * (count - len(even)))
    return rows


def preconditioner_rows(count: int) -> list[list[int]]:
    """Integer preconditioner rows, cross-checked between both constructions."""
    a = preconditioner_cholesky(count)
    b = preconditioner_chebyshev(count)
    if a != b:
        raise ArithmeticError("Cholesky and Chebyshev preconditioner rows disagree")
    return a
