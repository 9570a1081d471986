import numpy as np
import pytest
from scipy.integrate import quad

from nlgdo.kernels import PhysParams, SeparableRank1
from nlgdo.localization import solve_jost
from nlgdo.numerics import HalfLine, make_grid
from nlgdo.partner import build_partners
from nlgdo.profiles import Gaussian
from nlgdo.separable import (
    build_moment_system,
    dense_regular_solution,
    det_coefficients,
    reconstruct,
    spurious_scan,
)

U = Gaussian(1.0)


@pytest.fixture(scope="module")
def grid():
    return make_grid(HalfLine(12.0), 120)


def test_c_u_matches_quadrature(grid):
    ms = build_moment_system(0.3, U, 1, 1.0, grid)
    ref = quad(lambda x: U(np.array([x]))[0].real ** 2, 0, np.inf, epsabs=1e-14)[0]
    assert abs(ms.c_u - ref) < 1e-10


def test_zero_coupling_gives_free_projections(grid):
    ms = build_moment_system(0.0, U, 1, 1.3, grid)
    assert np.allclose(ms.M, np.eye(2))
    x = grid.nodes
    assert abs(ms.S0 - grid.integrate(U(x) * np.sin(1.3 * x))) < 1e-14
    assert abs(ms.S1 - grid.integrate(U.derivative(x) * np.sin(1.3 * x))) < 1e-14
    assert np.allclose(reconstruct(ms, grid), np.sin(1.3 * x))


@pytest.mark.parametrize("bc", ["dirichlet", "neumann"])
@pytest.mark.parametrize("j", [1, 2])
def test_moment_system_is_solved(grid, bc, j):
    ms = build_moment_system(0.7, U, j, 0.9, grid, bc=bc)
    assert np.allclose(ms.M @ np.array([ms.S0, ms.S1]), ms.b, atol=1e-13)


@pytest.mark.parametrize("bc", ["dirichlet", "neumann"])
@pytest.mark.parametrize("j", [1, 2])
def test_reconstruction_matches_dense_solve(grid, bc, j):
    lam, k = 0.5, 1.0
    ms = build_moment_system(lam, U, j, k, grid, bc=bc)
    V = build_partners(SeparableRank1(lam, U), PhysParams(), grid).component(j)
    ref = dense_regular_solution(solve_jost(V, k, grid), bc)
    assert np.max(np.abs(reconstruct(ms, grid) - ref)) < 1e-6


def test_components_differ_only_in_sign(grid):
    a = det_coefficients(U, 1, 1.1, grid)
    b = det_coefficients(U, 2, 1.1, grid)
    assert np.allclose(a[[0, 2]], b[[0, 2]], atol=1e-15)
    assert np.allclose(a[1], -b[1], atol=1e-15)


def test_det_is_quadratic_in_lambda(grid):
    lams = np.linspace(-2.0, 2.0, 9)
    dets = np.array([build_moment_system(l, U, 2, 0.8, grid).det for l in lams])
    fit = np.polynomial.polynomial.polyfit(lams, dets, 4)
    assert np.max(np.abs(fit[3:])) < 1e-12
    c = det_coefficients(U, 2, 0.8, grid)
    assert np.allclose(fit[:3], c, atol=1e-12)


def test_incoming_green_conjugates_the_determinant(grid):
    for bc in ("dirichlet", "neumann"):
        out = build_moment_system(0.6, U, 1, 1.4, grid, bc=bc).det
        inc = build_moment_system(0.6, U, 1, 1.4, grid, bc=bc, green="incoming").det
        assert abs(inc - np.conj(out)) < 1e-13


def test_coefficients_converged_in_grid(grid):
    c = det_coefficients(U, 1, 1.0, grid)
    fine = det_coefficients(U, 1, 1.0, make_grid(HalfLine(12.0), 240))
    assert np.allclose(c, fine, atol=1e-13)


def test_scan_without_coupling_has_no_roots(grid):
    res = spurious_scan(0.0, U, 1, (0.2, 3.0), 32, grid)
    assert res.roots == []
    assert np.allclose(np.abs(res.det), 1.0)


def test_scan_requires_enough_points(grid):
    with pytest.raises(ValueError):
        spurious_scan(1.0, U, 1, (0.2, 3.0), 15, grid)
    with pytest.raises(ValueError):
        spurious_scan(1.0, U, 1, (3.0, 0.2), 32, grid)


def test_scan_minima_are_refined(grid):
    res = spurious_scan(2.25, U, 1, (0.2, 3.0), 64, grid)
    assert res.minima
    assert res.min_abs_det <= np.min(np.abs(res.det)) + 1e-15


def test_bad_arguments(grid):
    with pytest.raises(ValueError):
        build_moment_system(1.0, U, 3, 1.0, grid)
    with pytest.raises(ValueError):
        build_moment_system(1.0, U, 1, 1.0, grid, bc="robin")
    with pytest.raises(ValueError):
        build_moment_system(1.0, U, 1, 1.0, grid, green="standing")


@pytest.mark.parametrize("j", [1, 2])
def test_no_real_coupling_zeroes_det(grid, j):
    # the lam-roots of the quadratic stay off the real axis over the scan window
    gap = min(np.min(np.abs(np.roots(det_coefficients(U, j, k, grid)[::-1]).imag))
              for k in np.linspace(0.2, 3.0, 57))
    assert gap > 0.4
