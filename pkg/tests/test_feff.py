import numpy as np
import pytest

from nlgdo.feff import compatibility, reconstruct_partner_check
from nlgdo.kernels import LocalDiagonal, PhysParams, SeparableRank1
from nlgdo.localization import equivalent_potential, solve_jost
from nlgdo.numerics import FullLine, HalfLine, make_grid
from nlgdo.partner import build_partners, local_partner_profiles
from nlgdo.profiles import Gaussian, Linear

P = PhysParams()


@pytest.fixture(scope="module")
def grid():
    return make_grid(HalfLine(6.0), 120)


def _oscillator(grid, hbar=1.0):
    V1, V2 = local_partner_profiles(LocalDiagonal(Linear(1.0)), PhysParams(hbar=hbar))
    return V1(grid.nodes), V2(grid.nodes)


def test_oscillator_is_exactly_compatible(grid):
    V1, V2 = _oscillator(grid)
    rep = compatibility(V1, V2, 1.0, grid, window=(0.5, 5.0))
    assert rep.compatible and not rep.complex_sigma
    assert rep.max_residual < 1e-10
    inside = (grid.nodes >= 0.5) & (grid.nodes <= 5.0)
    assert np.allclose(rep.feff[inside], grid.nodes[inside], atol=1e-12)
    assert np.allclose(rep.Sigma, 2 * grid.nodes ** 2) and np.allclose(rep.Delta, 2.0)


def test_oscillator_with_other_hbar(grid):
    V1, V2 = _oscillator(grid, hbar=0.5)
    rep = compatibility(V1, V2, 0.5, grid, window=(0.5, 5.0))
    assert rep.max_residual < 1e-10


def test_negative_axis_picks_the_other_branch():
    g = make_grid(FullLine(4.0), 81, "uniform_trapezoid")
    V1, V2 = _oscillator(g)
    rep = compatibility(V1, V2, 1.0, g, window=(-3.5, -0.5))
    sel = (g.nodes >= -3.5) & (g.nodes <= -0.5)
    assert np.all(rep.signs[sel] == -1)
    assert np.allclose(rep.feff[sel], g.nodes[sel], atol=1e-12)
    assert rep.max_residual < 1e-10


def test_branch_flip_leaves_residual_invariant(grid):
    V1, V2 = _oscillator(grid)
    a = compatibility(V1, V2, 1.0, grid, window=(0.5, 5.0))
    # swapping the components flips Delta; the other branch must then win
    b = compatibility(V2, V1, -1.0, grid, window=(0.5, 5.0))
    assert np.nanmax(np.abs(a.residual - b.residual)) < 1e-12


def test_equal_potentials_need_constant_sigma(grid):
    x = grid.nodes
    flat = compatibility(np.full(x.size, 3.0), np.full(x.size, 3.0), 1.0, grid)
    assert np.allclose(flat.Delta, 0) and flat.compatible
    bumpy = compatibility(x ** 2, x ** 2, 1.0, grid, window=(0.5, 5.0))
    assert np.allclose(bumpy.Delta, 0) and not bumpy.compatible


def test_empty_window_raises(grid):
    z = np.zeros(grid.n)
    with pytest.raises(ValueError):
        compatibility(z, z, 1.0, grid)


def test_reconstruct_exact_and_zero(grid):
    V1, V2 = _oscillator(grid)
    assert reconstruct_partner_check(grid.nodes, 1.0, grid, V1, V2) < 1e-10
    z = np.zeros(grid.n)
    assert reconstruct_partner_check(z, 1.0, grid, z, z) == 0.0


def test_reconstruct_scales_linearly_with_noise(grid, rng):
    V1, V2 = _oscillator(grid)
    noise = rng.normal(size=grid.n)
    d1 = reconstruct_partner_check(grid.nodes + 1e-3 * noise, 1.0, grid, V1, V2)
    d2 = reconstruct_partner_check(grid.nodes + 2e-3 * noise, 1.0, grid, V1, V2)
    assert 1.9 < d2 / d1 < 2.1


def test_rank_one_pipeline_residual_profile():
    g = make_grid(HalfLine(10.0), 120)
    pair = build_partners(SeparableRank1(0.5, Gaussian(1.0)), P, g)
    U = {}
    for j in (1, 2):
        V = pair.component(j)
        U[j] = equivalent_potential(solve_jost(V, 1.5, g), V).Ueq
    rep = compatibility(U[1], U[2], 1.0, g, sigma_tol=1e-6)
    defined = np.isfinite(rep.residual)
    assert defined.sum() > g.n // 2
    dev = reconstruct_partner_check(rep.feff, 1.0, g, U[1], U[2])
    # V_eff - Veq = -/+ residual / 2 in exact arithmetic
    assert dev <= 2 * rep.max_residual + 1e-6
