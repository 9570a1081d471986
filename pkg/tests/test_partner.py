import numpy as np
import pytest

from nlgdo import benchmarks
from nlgdo.kernels import Convolution, GridSampled, LocalDiagonal, PhysParams, SeparableRank1, compose, shift_residual
from nlgdo.numerics import FullLine, HalfLine, active_nodes, make_grid
from nlgdo.partner import (
    build_partners,
    component_hamiltonian,
    local_partner_profiles,
    mollified_local,
    relativistic_energies,
    spectrum,
)
from nlgdo.profiles import Gaussian, Linear, LinearShifted, Zero

C_U_GAUSS1 = 0.886226925452758


def test_local_oscillator_partners(params):
    V1, V2 = local_partner_profiles(LocalDiagonal(Linear(1.0)), params)
    x = np.linspace(-3, 3, 13)
    assert np.allclose(V1(x), x ** 2 - 1)
    assert np.allclose(V2(x), x ** 2 + 1)


def test_convolution_partners_coincide(params):
    g = make_grid(FullLine(4.0), 40)
    f = Convolution(Gaussian(1.0))
    pair = build_partners(f, params, g)
    assert np.max(np.abs(pair.V1.matrix - pair.V2.matrix)) <= 1e-12
    assert np.allclose(pair.V1.matrix, compose(f, g).matrix, atol=1e-14)


def test_separable_partners_closed_form(params):
    g = make_grid(HalfLine(10.0), 60)
    lam, u = 0.5, Gaussian(1.0)
    pair = build_partners(SeparableRank1(lam, u), params, g)
    x = g.nodes
    uu = np.multiply.outer(u(x), u(x))
    cross = np.multiply.outer(u.derivative(x), u(x)) + np.multiply.outer(u(x), u.derivative(x))
    assert np.allclose(pair.V1.matrix, lam ** 2 * C_U_GAUSS1 * uu - lam * cross, atol=1e-14)
    assert np.allclose(pair.V2.matrix, lam ** 2 * C_U_GAUSS1 * uu + lam * cross, atol=1e-14)


def test_component_index_checked(params):
    pair = build_partners(LocalDiagonal(Zero()), params, make_grid(HalfLine(1.0), 10))
    with pytest.raises(ValueError):
        pair.component(3)


def test_free_box_levels(params):
    L = 3.0
    g = make_grid(HalfLine(L), 120)
    pair = build_partners(LocalDiagonal(Zero()), params, g)
    eps = spectrum(pair, 1, n_levels=4).epsilons
    assert np.allclose(eps.real, (np.pi * np.arange(1, 5) / L) ** 2, rtol=1e-8)


def test_oscillator_levels_component_2(params, osc_grid):
    pair = build_partners(LocalDiagonal(Linear(1.0)), params, osc_grid)
    res = spectrum(pair, 2, n_levels=6)
    assert np.allclose(res.epsilons.real, [2, 4, 6, 8, 10, 12], rtol=1e-7)
    assert np.allclose(res.energies_plus.real, np.sqrt([3, 5, 7, 9, 11, 13]), rtol=1e-7)
    assert res.all_real


def test_susy_pairing(params, osc_grid):
    pair = build_partners(LocalDiagonal(Linear(1.0)), params, osc_grid)
    s1 = spectrum(pair, 1, n_levels=7).epsilons
    s2 = spectrum(pair, 2, n_levels=6).epsilons
    assert abs(s1[0]) < 1e-8
    assert np.allclose(s1[1:], s2, rtol=1e-7)


def test_energy_identity_and_rest_energy():
    P = PhysParams(m=2.0, c=1.5)
    Ep, Em = relativistic_energies([0.0], P)
    assert Ep[0] == pytest.approx(P.m * P.c ** 2) and Em[0] == pytest.approx(-P.m * P.c ** 2)
    eps = np.array([0.3, 2.0 + 0.5j, -1.0])
    Ep, _ = relativistic_energies(eps, P)
    assert np.allclose(Ep ** 2, (P.m * P.c ** 2) ** 2 + P.c ** 2 * eps, rtol=1e-12)


def test_weighted_hermitian_discretization(rng, params):
    g = make_grid(HalfLine(2.0), 30, "uniform_trapezoid")
    idx = active_nodes(g, "dirichlet")
    A = rng.normal(size=(30, 30)) + 1j * rng.normal(size=(30, 30))
    A = A + A.conj().T
    pair = build_partners(LocalDiagonal(Zero()), params, g)
    pair = type(pair)(V1=GridSampled(A, g), V2=pair.V2, grid=g, params=params)
    H = component_hamiltonian(pair, 1, order=2)
    Wt = np.diag(g.weights[idx])
    assert np.max(np.abs(Wt @ H - (Wt @ H).conj().T)) < 1e-12


def test_shifted_oscillator_isospectral(params, osc_grid):
    ref = benchmarks.complex_shift_reference(params, 1.0)
    f = LocalDiagonal(LinearShifted(1.0, ref.a))
    sa = spectrum(build_partners(f, params, osc_grid), 2, n_levels=6)
    s0 = spectrum(build_partners(LocalDiagonal(Linear(1.0)), params, osc_grid), 2, n_levels=6)
    assert np.max(np.abs(sa.epsilons - s0.epsilons)) < 1e-6
    # a residual-free theta exists, and the discrete spectrum is real at 1e-6
    assert shift_residual(f, params.replace(theta=ref.theta), osc_grid) < 1e-10
    assert np.all(np.abs(sa.epsilons.imag) < 1e-6)
    assert np.allclose(sa.epsilons.real, [r.eps_plus for r in ref.expected_spectrum], rtol=1e-6)


def test_mollified_kernel_approaches_local_limit(params):
    g = make_grid(FullLine(8.0), 241, "uniform_trapezoid")
    errs = []
    for width in (0.4, 0.2, 0.1):
        pair = build_partners(mollified_local(Linear(1.0), width, g), params, g)
        errs.append(abs(spectrum(pair, 2, n_levels=1).epsilons[0] - 2.0))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-2


def test_too_many_levels(params):
    pair = build_partners(LocalDiagonal(Zero()), params, make_grid(HalfLine(1.0), 10))
    with pytest.raises(ValueError):
        spectrum(pair, 1, n_levels=50)
