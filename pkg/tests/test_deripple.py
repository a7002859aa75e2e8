import math

import numpy as np
import pytest

from grace_fir.chebyshev import cheb_u_even
from grace_fir.deripple import (
    SVDNotConverged,
    auto_compensate,
    build_design_matrix,
    build_rhs,
    compensate,
    limit_gram,
    preconditioner_chebyshev,
    preconditioner_cholesky,
    preconditioner_rows,
    svd_tall,
    weight,
)
from grace_fir.filter import FilterSpec, coefficients, even_derivatives, ripple_scan


def dense_delta(c, z):
    # minimum W^-1-norm solution of A dc = -A c (k >= 1) with sum dc = 0, via normal equations
    m = len(c) // 2
    x = np.arange(-m, m + 1) / m
    A = np.array([x ** (2 * k) for k in range(z + 1)])
    W = np.diag([weight(i, m) for i in range(-m, m + 1)])
    rhs = -A @ c
    rhs[0] = 0.0
    return W @ A.T @ np.linalg.solve(A @ W @ A.T, rhs)


@pytest.mark.parametrize("m, z", [(m, z) for m in range(2, 9) for z in range(1, 4) if m >= z + 1])
def test_matches_dense_oracle(m, z):
    rng = np.random.default_rng(m * 10 + z)
    half = rng.uniform(0.1, 1.0, m + 1)
    c = np.concatenate([half[:0:-1], half])
    c /= c.sum()
    got, _ = compensate(c, z)
    assert np.allclose(got - c, dense_delta(c, z), atol=1e-10, rtol=0)


def test_derivatives_vanish_and_sum_kept():
    c = coefficients(FilterSpec.of(30, 8, 2))
    z = 5
    out, rep = compensate(c, z)
    assert max(abs(v) for v in even_derivatives(out, z)) < 1e-13
    assert math.fsum(out - c) == pytest.approx(0.0, abs=1e-15)
    assert np.array_equal(out, out[::-1])
    assert rep.applied and rep.delta_norm > 0


def test_negative_q_reports_only():
    c = coefficients(FilterSpec.of(20, 5, 1))
    out, rep = compensate(c, 3, q=-1)
    assert np.array_equal(out, c)
    assert len(rep.singular_values) == 4 and not rep.applied


def test_q_guard():
    c = coefficients(FilterSpec.of(20, 5, 1))
    with pytest.raises(ValueError, match="all directions removed"):
        compensate(c, 3, q=4)
    with pytest.raises(ValueError):
        compensate(c, 0)


def test_truncation_drops_smallest_singular_direction():
    c = coefficients(FilterSpec.of(40, 10, 2))
    z = 7
    full, _ = compensate(c, z, q=0)
    trunc, rep = compensate(c, z, q=1)
    assert rep.zeroed_count == 1
    assert np.linalg.norm(trunc - c) <= np.linalg.norm(full - c) + 1e-15


def test_design_matrix_shape_and_mirror_rows():
    M = build_design_matrix(6, 3)
    assert M.shape == (13, 4)
    assert np.array_equal(M, M[::-1])
    assert np.all(M[0] == 0.0) and np.all(M[-1] == 0.0)   # zero weight at |x| = 1


def test_rhs_first_entry_exact_zero():
    c = coefficients(FilterSpec.of(15, 6, 1))
    assert build_rhs(c, 4)[0] == 0.0


def test_weight():
    assert weight(0, 10) == pytest.approx(2 / (10 * math.pi))
    assert weight(10, 10) == 0.0
    with pytest.raises(ValueError):
        weight(11, 10)


@pytest.mark.parametrize("shape", [(9, 4), (30, 7), (101, 12)])
def test_svd_against_numpy(shape):
    rng = np.random.default_rng(sum(shape))
    M = rng.standard_normal(shape) * np.logspace(0, -8, shape[1])
    f = svd_tall(M)
    assert np.allclose(f.U @ np.diag(f.S) @ f.V.T, M, atol=1e-13)
    assert np.allclose(f.U.T @ f.U, np.eye(shape[1]), atol=1e-12)
    assert np.allclose(f.V.T @ f.V, np.eye(shape[1]), atol=1e-14)
    ref = np.linalg.svd(M, compute_uv=False)
    assert np.allclose(np.sort(f.S)[::-1], ref, rtol=1e-10, atol=0)


def test_svd_keeps_identical_rows_identical():
    f = svd_tall(build_design_matrix(25, 6))
    assert np.array_equal(f.U, f.U[::-1])


def test_svd_rank_deficient_completes_basis():
    M = np.zeros((5, 3))
    M[:, 0] = 1.0
    f = svd_tall(M)
    assert np.allclose(f.U.T @ f.U, np.eye(3), atol=1e-14)
    assert sorted(f.S)[0] == 0.0
    with pytest.raises(ValueError):
        svd_tall(np.ones((2, 3)))


def test_svd_not_converged_is_an_arithmetic_error():
    assert issubclass(SVDNotConverged, ArithmeticError)


def test_limit_gram_matches_quadrature():
    # C_uv = (2/pi) * integral over [-1, 1] of x^(2s) sqrt(1 - x^2), s = u + v; x = cos t
    C = limit_gram(4)
    t = np.linspace(0, np.pi, 20001)
    for s in range(7):
        val = 2 / np.pi * np.trapezoid(np.cos(t) ** (2 * s) * np.sin(t) ** 2, t)
        u, v = min(s, 3), s - min(s, 3)
        assert float(C[u][v]) == pytest.approx(val, rel=1e-9)


def test_gram_converges_to_limit():
    # A W A^T for the preconditioned rows tends to P C P^T = I
    m, z = 2000, 4
    M = build_design_matrix(m, z)
    G = M.T @ M
    assert np.allclose(G, np.eye(z + 1), atol=1e-3)


def test_preconditioner_constructions_agree():
    assert preconditioner_cholesky(8) == preconditioner_chebyshev(8)
    rows = preconditioner_rows(10)
    assert rows[0] == [1] + [0] * 9
    assert rows[1][:2] == [-1, 4]
    assert rows[8][6] == 372736


def test_preconditioner_matches_cheb_u_evaluation():
    rows = preconditioner_rows(6)
    x = np.linspace(-1, 1, 11)
    u = cheb_u_even(x, 5)
    for j, row in enumerate(rows):
        assert np.allclose(np.polyval(row[::-1], x * x), u[j], atol=1e-12)


def test_preconditioner_limits():
    with pytest.raises(OverflowError):
        preconditioner_rows(13)


def test_auto_compensate_accepts_and_reports_history():
    spec = FilterSpec.of(30, 12, 3)
    taps, rep = auto_compensate(spec)
    assert rep.accepted
    assert rep.history[0][0] == 1
    assert rep.step_reached == rep.history[-1][0]
    assert ripple_scan(taps).passband_ripple <= 1e-14


def test_auto_compensate_step_one_when_raw_is_clean():
    taps, rep = auto_compensate(FilterSpec.of(200, 10, 5))
    if rep.step_reached == 1:
        assert np.array_equal(taps, coefficients(FilterSpec.of(200, 10, 5)))
    assert rep.accepted
