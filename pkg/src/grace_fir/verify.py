"""Quick invariant checks behind ``grace-fir verify`` (a few seconds)."""

from __future__ import annotations

import math

import numpy as np

from .asymptotics import d_of_p, dirichlet_sum, SeriesKind
from .chebyshev import grace_poly, grace_poly_closed, grace_poly_roots
from .deripple import compensate, preconditioner_rows
from .filter import FilterSpec, coefficients, even_derivatives, reference_frequency, response
from .grace import GraceParams, integrate_g, norm_a, transform_metrics, transform_moment


def _checks():
    x = np.linspace(-1.0, 1.0, 1001)
    yield "grace polynomial recurrence equals closed form", \
        all(np.max(np.abs(grace_poly(x, n) - grace_poly_closed(x, n))) < 1e-12 for n in (1, 7, 40))
    yield "grace polynomial vanishes at its roots", \
        all(abs(grace_poly(r, 9)) < 1e-12 for r in grace_poly_roots(9))
    yield "integral of G equals pi/(2n)", \
        all(abs(integrate_g(GraceParams(n, p)) - norm_a(GraceParams(n, p))) < 1e-12
            for n, p in ((3, 0), (20, 7), (60, 59)))
    par = GraceParams(12, 3)
    yield "first n-p-1 moments vanish", \
        all(abs(transform_moment(k, par)) < 1e-11 for k in range(1, par.z + 1)) \
        and abs(transform_moment(par.z + 1, par)) > 1e-10
    yield "first sidelobe (10, 0) near -12.7 dB", \
        abs(transform_metrics(GraceParams(10, 0)).first_sidelobe_db + 12.7) < 0.3
    c = coefficients(FilterSpec.of(30, 8, 2))
    yield "taps symmetric and normalized", \
        bool(np.array_equal(c, c[::-1])) and abs(math.fsum(c) - 1.0) < 1e-15
    f = np.linspace(0.0, 1.0, 4097)
    yield "reference frequency is the integral of h^2", \
        abs(np.trapezoid(response(c, f) ** 2, f) - reference_frequency(c)) < 1e-10
    c2, _ = compensate(c, 5, 0)
    yield "compensation annihilates even derivatives", \
        max(abs(v) for v in even_derivatives(c2, 5)) < 1e-13 and abs(math.fsum(c2) - 1) < 1e-15
    yield "preconditioner rows agree (Cholesky vs Chebyshev U)", len(preconditioner_rows(10)) == 10
    yield "d(2) = 128/35", abs(d_of_p(2) - 128 / 35) < 1e-15
    yield "zeta(2) = pi^2/6", abs(dirichlet_sum(SeriesKind.ZETA, 2.0) - math.pi ** 2 / 6) < 1e-12


def run_quick_suite(out=print) -> bool:
    ok = True
    for name, passed in _checks():
        ok &= bool(passed)
        out(f"{'PASS' if passed else 'FAIL'}  {name}")
    return ok
