import numpy as np
import pytest
from scipy.integrate import quad

from nlgdo.numerics import FullLine, HalfLine
from nlgdo.profiles import (
    Combination,
    Conjugate,
    Constant,
    Derivative,
    Gaussian,
    Linear,
    LinearShifted,
    Product,
    Reflected,
    SquareWell,
    Zero,
    profile_from_config,
)


def test_linear_families():
    z = np.array([-1.0, 0.5, 2.0])
    assert np.allclose(Linear(2.0)(z), 2 * z)
    assert np.allclose(Linear(2.0).derivative(z), 2.0)
    f = LinearShifted(1.0, 0.5)
    assert np.allclose(f(z), z - 0.5j)
    assert not f.is_real and LinearShifted(1.0, 0.0).is_real


def test_gaussian_derivatives_match_finite_differences():
    g = Gaussian(0.7, 1.3)
    z = np.linspace(-2, 2, 9)
    h = 1e-5
    assert np.allclose(g.derivative(z), (g(z + h) - g(z - h)) / (2 * h), atol=1e-8)
    assert np.allclose(g.derivative(z, 2), (g(z + h) - 2 * g(z) + g(z - h)) / h ** 2, atol=1e-4)


def test_gaussian_complex_argument():
    g = Gaussian(1.0)
    z = 0.3 + 0.4j
    assert g(np.array(z)) == pytest.approx(np.exp(-z * z / 2))


def test_gaussian_fourier_matches_quadrature():
    g = Gaussian(1.0)
    for q in (0.0, 1.0, 2.5):
        re = quad(lambda s: g(np.array(s)) * np.cos(q * s), -np.inf, np.inf)[0]
        assert g.fourier(q) == pytest.approx(re, abs=1e-10)


def test_gaussian_square_integral():
    g = Gaussian(1.0)
    half = quad(lambda y: np.exp(-y * y), 0, np.inf)[0]
    assert g.square_integral(HalfLine(5.0)) == pytest.approx(half, rel=1e-12)
    assert g.square_integral(FullLine(5.0)) == pytest.approx(2 * half, rel=1e-12)
    with pytest.raises(ValueError):
        Gaussian(0.0)


def test_square_well_is_not_analytic():
    w = SquareWell(2.0, 1.0)
    assert not w.analytic and w.breakpoints == (0.0, 1.0)
    assert np.allclose(w(np.array([-0.1, 0.5, 1.5])), [0.0, -2.0, 0.0])
    with pytest.raises(ValueError):
        w(np.array([0.5 + 0.1j]))


def test_wrappers():
    z = np.array([0.2 + 0.1j, -1.0])
    f = LinearShifted(2.0, 1.0)
    assert np.allclose(Conjugate(f)(z), np.conj(f(np.conj(z))))
    assert np.allclose(Reflected(f)(z), f(-z))
    assert np.allclose(Reflected(f).derivative(z), -f.derivative(-z))
    assert np.allclose(Derivative(Gaussian(1.0))(z), Gaussian(1.0).derivative(z))
    p = Product(Linear(1.0), Linear(1.0))
    assert np.allclose(p(z), z * z) and np.allclose(p.derivative(z), 2 * z)
    c = Combination(((2.0, Linear(1.0)), (-1.0, Constant(3.0))))
    assert np.allclose(c(z), 2 * z - 3)
    assert np.allclose(Zero()(z), 0)


@pytest.mark.parametrize("prof", [Linear(1.5), LinearShifted(1.0, 0.25), Gaussian(0.8, 2.0),
                                  SquareWell(1.0, 2.0, 0.5), Constant(1 + 2j), Zero()])
def test_config_round_trip(prof):
    assert profile_from_config(prof.to_config()) == prof


def test_unknown_family():
    with pytest.raises(ValueError, match="unknown profile family"):
        profile_from_config({"family": "lorentzian"})
