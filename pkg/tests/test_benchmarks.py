import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlgdo.benchmarks import (
    complex_shift_reference,
    convolution_dispersion,
    fourier_transform,
    oscillator_levels,
)
from nlgdo.kernels import PhysParams
from nlgdo.profiles import Gaussian

P = PhysParams()


def test_oscillator_ground_and_second_level():
    levels = oscillator_levels(P, 2)
    assert levels[0].eps_minus == 0.0 and levels[0].eps_plus == 2.0
    assert np.isclose(levels[0].E_plus, np.sqrt(3.0))
    assert np.isclose(levels[0].E_minus, -np.sqrt(3.0))
    assert levels[2].eps_minus == 4.0
    assert np.isclose(levels[2].E_plus, np.sqrt(7.0))


def test_oscillator_scaling_and_zero_frequency():
    p = P.replace(hbar=0.5, m=2.0, omega=3.0)
    assert [r.eps_plus for r in oscillator_levels(p, 2)] == [6.0, 12.0, 18.0]
    flat = oscillator_levels(P.replace(omega=0.0), 3)
    assert all(r.eps_minus == 0 and r.eps_plus == 0 for r in flat)
    with pytest.raises(ValueError):
        oscillator_levels(P, -1)


def test_gaussian_dispersion_values():
    g = Gaussian(1.0)
    d0 = convolution_dispersion(g, 0.0)
    assert abs(d0.gt - np.sqrt(2 * np.pi)) < 1e-12
    assert abs(d0.eps - 2 * np.pi) < 1e-12
    assert abs(convolution_dispersion(g, 1.0).eps - (1 + 2 * np.pi * np.exp(-1))) < 1e-12


@settings(max_examples=25, deadline=None)
@given(q=st.floats(-5.0, 5.0), a=st.floats(0.3, 2.0))
def test_quadrature_matches_closed_form(q, a):
    g = Gaussian(a)
    assert abs(fourier_transform(g, q) - complex(g.fourier(q))) < 1e-10


def test_quadrature_sees_odd_part():
    # shifted gaussian exp(-(s-1)^2/2) has transform sqrt(2 pi) exp(-q^2/2 - i q)
    g = lambda s: np.exp(-0.5 * (s - 1.0) ** 2)
    ref = np.sqrt(2 * np.pi) * np.exp(-0.5 - 1j)
    assert abs(fourier_transform(g, 1.0) - ref) < 1e-10
    assert np.isclose(convolution_dispersion(g, 1.0).eps, 1 + 2 * np.pi * np.exp(-1))


@pytest.mark.parametrize("a", [0.0, 1.0, -1.0])
def test_shift_reference(a):
    ref = complex_shift_reference(P, a, n_max=3)
    assert ref.shift == a
    assert ref.theta == 2 * a
    assert ref.expected_residual == 0.0
    assert [r.eps_plus for r in ref.expected_spectrum] == [2.0, 4.0, 6.0, 8.0]


def test_shift_reference_scales_with_hbar():
    ref = complex_shift_reference(P.replace(hbar=0.5), 1.0)
    assert ref.shift == 2.0 and ref.theta == 4.0
