import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad

from grace_fir.asymptotics import limiting_mfr
from grace_fir.grace import (
    GraceParams,
    _TransformEvaluator,
    grace_fn,
    integrate_g,
    transform_moment_exact,
    norm_a,
    norm_b,
    transform,
    transform_metrics,
    transform_moment,
)


def test_params_validation():
    with pytest.raises(ValueError):
        GraceParams(0, 0)
    with pytest.raises(ValueError):
        GraceParams(5, 5)
    with pytest.raises(ValueError):
        GraceParams(5, -1)
    assert GraceParams(10, 3).z == 6


def test_grace_fn_values():
    for par in (GraceParams(1, 0), GraceParams(7, 3), GraceParams(20, 19)):
        assert grace_fn(1.0, par) == 0.0
        assert grace_fn(-1.0, par) == 0.0
        assert grace_fn(0.0, par) == 1.0
    assert grace_fn(0.6, GraceParams(2, 1)) == pytest.approx(
        (1 - 0.36) * (1 - 2 * 0.36) * math.sqrt(0.64), abs=1e-15)


def test_grace_fn_n1_p1():
    # G(x, 1, 1) = (1 - x^2)^(3/2); the hand value at 0.6 is 0.64^1.5
    # (n = 1 only admits p = 0, so evaluate the product directly)
    from grace_fir.chebyshev import grace_poly
    assert grace_poly(0.6, 1) * (1 - 0.36) ** 0.5 == pytest.approx(0.512, abs=1e-15)


@pytest.mark.parametrize("n, p", [(1, 0), (10, 3), (2, 1), (37, 36)])
def test_norm_a(n, p):
    par = GraceParams(n, p)
    assert norm_a(par) == math.pi / (2 * n)
    assert integrate_g(par) == pytest.approx(math.pi / (2 * n), abs=1e-12)


def test_norm_a_against_adaptive_quadrature():
    # independent oracle: substitute x = sin t to remove the endpoint singularity
    par = GraceParams(2, 1)
    val, _ = quad(lambda t: grace_fn(math.sin(t), par) * math.cos(t), -math.pi / 2, math.pi / 2,
                  epsabs=1e-14, epsrel=1e-14)
    assert val == pytest.approx(math.pi / 4, abs=1e-12)


def test_norm_b_against_adaptive_quadrature():
    for n, p in [(1, 0), (3, 0), (4, 2)]:
        par = GraceParams(n, p)
        val, _ = quad(lambda t: grace_fn(math.sin(t), par) ** 2 * math.cos(t),
                      -math.pi / 2, math.pi / 2, epsabs=1e-14, epsrel=1e-13, limit=200)
        assert norm_b(par) == pytest.approx(val / norm_a(par) ** 2, rel=1e-11)
    assert norm_b(GraceParams(1, 0)) > 0


def test_norm_b_close_to_approximation():
    err_small = abs(norm_b(GraceParams(10, 0)) / limiting_mfr(GraceParams(10, 0)) - 1)
    err_big = abs(norm_b(GraceParams(100, 10)) / limiting_mfr(GraceParams(100, 10)) - 1)
    assert err_small < 0.005
    assert err_big < err_small


def test_transform_at_zero_is_one():
    for par in (GraceParams(3, 0), GraceParams(12, 0), GraceParams(40, 17)):
        assert transform(0.0, par) == pytest.approx(1.0, abs=1e-14)


def test_transform_monotone_in_passband():
    par = GraceParams(12, 0)
    zero = transform_metrics(par).first_stopband_zero_phi
    phi = np.linspace(0, zero, 3000)
    # the first 11 even derivatives vanish, so g is flat to rounding near 0
    assert np.all(np.diff(transform(phi, par)) < 1e-14)
    assert transform(phi[-2], par) < transform(phi[1], par)


def test_transform_is_even_and_converged():
    par = GraceParams(15, 4)
    phi = np.linspace(0, 3, 31)
    assert np.array_equal(transform(-phi, par), transform(phi, par))
    ev = _TransformEvaluator(par, 3.0)
    ev2 = _TransformEvaluator(par, 3.0, nodes=2 * ev.nodes)
    assert np.max(np.abs(ev(phi) - ev2(phi))) < 1e-12


@pytest.mark.parametrize("p, tol", [(0, 1e-5), (2, 1e-8)])
def test_transform_energy_normalization(p, tol):
    # integral of g^2 over [0, inf) is 1; integrate to phi = 8 and estimate the
    # tail from the last octave assuming the phi^-3 decay of g^2
    par = GraceParams(12, p)
    phi = np.linspace(0, 8, 32001)
    g2 = transform(phi, par) ** 2
    total = np.trapezoid(g2, phi)
    last = np.trapezoid(g2[phi >= 4], phi[phi >= 4])
    assert abs(total + last / 3 - 1.0) < tol


def test_transform_matches_direct_quadrature():
    par = GraceParams(6, 2)
    b = norm_b(par)
    for phi in (0.3, 1.0, 2.2):
        val, _ = quad(lambda t: grace_fn(math.sin(t), par) * math.cos(t)
                      * math.cos(math.pi * b * phi * math.sin(t)),
                      -math.pi / 2, math.pi / 2, epsabs=1e-14, limit=200)
        assert transform(phi, par) == pytest.approx(val / norm_a(par), abs=1e-12)


def test_moments():
    assert abs(transform_moment(1, GraceParams(10, 0))) < 1e-12
    assert abs(transform_moment(10, GraceParams(10, 0))) > 1e-8
    assert abs(transform_moment(1, GraceParams(2, 1))) > 1e-8


@pytest.mark.parametrize("n", [2, 5, 13, 30, 50])
def test_moment_structure(n):
    for p in range(0, n, max(1, n // 7)):
        par = GraceParams(n, p)
        for k in range(1, par.z + 1):
            assert abs(transform_moment(k, par)) < 1e-11
        assert transform_moment_exact(par.z + 1, par) != 0


@pytest.mark.parametrize("n", [2, 6, 11, 14])
def test_first_nonvanishing_moment_resolved_in_floats(n):
    # resolvable only while the moment (order 4^-n) stays above 1e-10
    for p in range(n):
        par = GraceParams(n, p)
        assert abs(transform_moment(par.z + 1, par)) > 1e-10


def test_exact_moments():
    par = GraceParams(9, 2)
    for k in range(1, par.z + 1):
        assert transform_moment_exact(k, par) == 0
    assert transform_moment_exact(0, par) == Fraction(1, 18)     # a = pi/(2n)
    for k in range(par.z + 1, par.z + 4):
        exact = float(transform_moment_exact(k, par)) * math.pi
        assert transform_moment(k, par) == pytest.approx(exact, rel=1e-9, abs=1e-15)


@pytest.mark.parametrize("n, p, sidelobe", [(10, 0, -12.7), (10, 5, -35.3), (10, 1, -17.4),
                                            (20, 10, -43.4), (50, 20, -49.6)])
def test_metrics_sidelobe_table(n, p, sidelobe):
    assert transform_metrics(GraceParams(n, p)).first_sidelobe_db == pytest.approx(sidelobe, abs=0.3)


@pytest.mark.parametrize("n, p, rolloff", [(10, 0, 25.4), (20, 0, 41.5), (50, 20, 39.1),
                                           (100, 50, 52.5), (200, 0, 205.5)])
def test_metrics_rolloff_table(n, p, rolloff):
    assert transform_metrics(GraceParams(n, p)).rolloff_db_per_octave == pytest.approx(rolloff, abs=0.1)


def test_sidelobe_deepens_with_n_at_fixed_ratio():
    for ratio in (0.2, 0.5):
        vals = [transform_metrics(GraceParams(n, round(ratio * n))).first_sidelobe_db
                for n in (10, 20, 30, 50)]
        assert all(b < a for a, b in zip(vals, vals[1:]))


def test_metrics_sign_conventions():
    met = transform_metrics(GraceParams(30, 9))
    assert met.first_sidelobe_db < 0
    assert met.rolloff_db_per_octave > 0
    assert met.first_stopband_zero_phi > 1.0
    assert met.reliable


def test_sidelobe_below_rounding_is_flagged():
    # stop band of (293, 292) never rises above double-precision noise
    met = transform_metrics(GraceParams(293, 292))
    assert not met.reliable
    assert met.first_sidelobe_db < -180.0
