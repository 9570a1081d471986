import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlgdo.kernels import (
    Convolution,
    GridMismatchError,
    GridSampled,
    LocalDiagonal,
    PhysParams,
    SeparableRank1,
    UnsupportedRepresentationError,
    adjoint,
    apply_kernel,
    combine,
    compose,
    operator_matrix,
    shift_residual,
    sym_derivative,
)
from nlgdo.numerics import FullLine, HalfLine, make_grid
from nlgdo.profiles import Gaussian, Linear, LinearShifted, SquareWell, Zero

# int_0^inf exp(-y**2) dy from scipy.integrate.quad, frozen
C_U_GAUSS1 = 0.886226925452758


def _random_sampled(rng, g, hermitian=False):
    M = rng.normal(size=(g.n, g.n)) + 1j * rng.normal(size=(g.n, g.n))
    if hermitian:
        M = M + M.conj().T
    return GridSampled(M, g)


def test_phys_params_validation():
    with pytest.raises(ValueError):
        PhysParams(hbar=0.0)
    with pytest.raises(ValueError):
        PhysParams(m=-1.0)
    assert PhysParams().replace(theta=2.0).theta == 2.0


def test_apply_local_identity():
    g = make_grid(FullLine(2.0), 16)
    out = apply_kernel(LocalDiagonal(Linear(1.0)), g, np.ones(16))
    assert np.allclose(out, g.nodes)


def test_apply_separable_gaussian_gives_cu_times_u():
    g = make_grid(HalfLine(10.0), 60)
    u = Gaussian(1.0)
    f = SeparableRank1(1.0, u)
    out = apply_kernel(f, g, u(g.nodes))
    assert np.allclose(out, C_U_GAUSS1 * u(g.nodes), atol=1e-13)
    assert f.form_norm(g) == pytest.approx(C_U_GAUSS1, abs=1e-14)


def test_apply_zero_convolution():
    g = make_grid(FullLine(2.0), 16)
    assert np.allclose(apply_kernel(Convolution(Zero()), g, np.arange(16.0)), 0)


def test_apply_rejects_wrong_length_and_grid():
    g = make_grid(FullLine(2.0), 16)
    with pytest.raises(GridMismatchError):
        apply_kernel(LocalDiagonal(Linear(1.0)), g, np.ones(15))
    K = GridSampled(np.eye(16, dtype=complex), g)
    with pytest.raises(GridMismatchError):
        apply_kernel(K, make_grid(FullLine(2.0), 17), np.ones(17))
    with pytest.raises(GridMismatchError):
        GridSampled(np.eye(3), g)


def test_compose_separable_closed_form():
    g = make_grid(HalfLine(10.0), 80)
    lam = 0.7
    u = Gaussian(1.0)
    ff = compose(SeparableRank1(lam, u), g)
    uu = np.multiply.outer(u(g.nodes), u(g.nodes))
    assert np.allclose(ff.matrix, lam ** 2 * C_U_GAUSS1 * uu, atol=1e-14)
    # and it agrees with the generic quadrature product
    F = lam * uu
    assert np.allclose(ff.matrix, (F * g.weights) @ F, atol=1e-13)


def test_compose_local_squares_profile():
    g = make_grid(FullLine(2.0), 16)
    ff = compose(LocalDiagonal(Linear(2.0)), g)
    assert isinstance(ff, LocalDiagonal)
    assert np.allclose(ff.profile(g.nodes), 4 * g.nodes ** 2)


def test_compose_random_matches_triple_loop(rng):
    g = make_grid(FullLine(1.0), 8)
    K = _random_sampled(rng, g)
    M, w = K.matrix, g.weights
    brute = np.zeros((8, 8), dtype=complex)
    for i in range(8):
        for j in range(8):
            for k in range(8):
                brute[i, j] += w[k] * M[i, k] * M[k, j]
    assert np.max(np.abs(compose(K, g).matrix - brute)) < 1e-13


def test_compose_with_local_part_matches_operator_product(rng):
    g = make_grid(FullLine(1.0), 10)
    K = GridSampled(_random_sampled(rng, g).matrix, g, rng.normal(size=10) + 0j)
    W = operator_matrix(K, g)
    assert np.allclose(operator_matrix(compose(K, g), g), W @ W, atol=1e-12)


def test_sym_derivative_examples():
    g = make_grid(HalfLine(8.0), 40)
    assert np.all(sym_derivative(Convolution(Gaussian(1.0)), g).matrix == 0)
    lam = 0.3
    u = Gaussian(1.0)
    x = g.nodes
    d = sym_derivative(SeparableRank1(lam, u), g).matrix
    exact = lam * (np.multiply.outer(u.derivative(x), u(x)) + np.multiply.outer(u(x), u.derivative(x)))
    assert np.allclose(d, exact, atol=1e-15)
    loc = sym_derivative(LocalDiagonal(Linear(1.0)), g)
    assert np.allclose(loc.profile(x), 1.0)


def test_sym_derivative_sampled_uses_finite_differences():
    g = make_grid(HalfLine(8.0), 60)
    x = g.nodes
    u = Gaussian(1.0)
    M = np.multiply.outer(u(x), u(x)) + 0j
    d = sym_derivative(GridSampled(M, g), g).matrix
    exact = np.multiply.outer(u.derivative(x), u(x)) + np.multiply.outer(u(x), u.derivative(x))
    assert np.max(np.abs(d - exact)) < 1e-5


def test_adjoint_examples(rng):
    conv = Convolution(Gaussian(1.0))
    assert adjoint(conv) is conv
    s = adjoint(SeparableRank1(1j, Gaussian(1.0)))
    assert s.lam == -1j and s.form == Gaussian(1.0)
    g = make_grid(FullLine(1.0), 8)
    K = _random_sampled(rng, g)
    assert np.array_equal(adjoint(adjoint(K)).matrix, K.matrix)


def test_adjoint_of_compose_for_hermitian_kernels(rng):
    g = make_grid(FullLine(1.0), 12)
    K = _random_sampled(rng, g, hermitian=True)
    assert np.max(np.abs(adjoint(compose(K, g)).matrix - compose(adjoint(K), g).matrix)) < 1e-12


def test_adjoint_nonsymmetric_convolution():
    g = make_grid(FullLine(3.0), 30)
    f = Convolution(LinearShifted(1.0, 0.5))
    fa = adjoint(f)
    assert np.allclose(fa.values(g), f.values(g).conj().T)


def test_shift_residual_examples():
    g = make_grid(FullLine(5.0), 41, "uniform_trapezoid")
    P = PhysParams()
    assert shift_residual(Convolution(Gaussian(1.0)), P, g) == 0.0
    f = LocalDiagonal(LinearShifted(1.0, 1.0))
    # theta = 0: |f - f*| = 2 m omega a at every node
    assert shift_residual(f, P, g) == pytest.approx(2.0, abs=1e-15)
    # the condition f(x + i hbar theta) = conj(f(x)) holds at theta = 2a/hbar
    assert shift_residual(f, P.replace(theta=2.0), g) < 1e-14
    assert shift_residual(f, P.replace(theta=1.0), g) == pytest.approx(1.0, abs=1e-15)


def test_shift_residual_rejects_sampled_and_non_analytic(rng):
    g = make_grid(FullLine(1.0), 8)
    with pytest.raises(UnsupportedRepresentationError):
        shift_residual(_random_sampled(rng, g), PhysParams(), g)
    with pytest.raises(UnsupportedRepresentationError):
        shift_residual(LocalDiagonal(SquareWell()), PhysParams(), g)


@settings(max_examples=30, deadline=None)
@given(a=st.floats(-2, 2), theta=st.floats(-3, 3), width=st.floats(0.3, 2.0))
def test_shift_residual_sign_symmetry_under_adjoint(a, theta, width):
    g = make_grid(FullLine(3.0), 12)
    P = PhysParams()
    for f in (LocalDiagonal(LinearShifted(1.0, a)), Convolution(LinearShifted(1.0, a)),
              SeparableRank1(0.5, LinearShifted(1.0, a)), Convolution(Gaussian(width))):
        r1 = shift_residual(f, P.replace(theta=theta), g)
        r2 = shift_residual(adjoint(f), P.replace(theta=-theta), g)
        assert r1 == pytest.approx(r2, rel=1e-12, abs=1e-12)


def test_convolution_plane_waves_converge_under_refinement():
    gp = Gaussian(1.0)
    q = 1.0
    errs = []
    for n in (12, 24, 48):
        g = make_grid(FullLine(10.0), n, "uniform_trapezoid")
        v = np.exp(1j * q * g.nodes)
        mid = np.abs(g.nodes) < 3
        lam = apply_kernel(Convolution(gp), g, v)[mid] / v[mid]
        errs.append(np.max(np.abs(lam - gp.fourier(q))))
    assert errs[0] > errs[1] > errs[2] and errs[2] < 1e-6


def test_periodic_convolution_wraps_separation():
    g = make_grid(FullLine(4.0), 32, "uniform_periodic")
    M = Convolution(Gaussian(1.0)).values(g)
    assert np.allclose(M[0, -1], M[0, 1])


def test_combine_stays_local():
    g = make_grid(FullLine(1.0), 10)
    c = combine(LocalDiagonal(Linear(1.0)), 2.0, LocalDiagonal(Linear(3.0)), -1.0, g)
    assert isinstance(c, LocalDiagonal)
    assert np.allclose(c.profile(g.nodes), -g.nodes)
