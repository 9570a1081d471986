"""
Closed-form reference results used by the tests and the ``bench`` command.

* the Dirac oscillator ``f = m omega x``: ``eps_n^- = 2 hbar m omega n``,
  ``eps_n^+ = 2 hbar m omega (n + 1)``;
* translation-invariant kernels ``g(x - x')``: plane waves with
  ``eps(q) = hbar**2 q**2 + |g~(q)|**2``, ``g~(q) = int g(s) exp(-i q s) ds``;
* the complex-shifted oscillator ``f = m omega (x - i a)``, a similarity
  transform of the real one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .kernels import PhysParams

__all__ = [
    "OscillatorRef",
    "DispersionRef",
    "ShiftReference",
    "oscillator_levels",
    "fourier_transform",
    "convolution_dispersion",
    "complex_shift_reference",
]


@dataclass(frozen=True)
class OscillatorRef:
    n: int
    params: PhysParams
    eps_minus: float
    eps_plus: float

    @property
    def E_plus(self):
        p = self.params
        return float(np.sqrt((p.m * p.c ** 2) ** 2 + p.c ** 2 * self.eps_plus))

    @property
    def E_minus(self):
        return -self.E_plus


def oscillator_levels(params, n_max):
    """Levels ``n = 0..n_max`` of both components of the Dirac oscillator."""
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    unit = 2.0 * params.hbar * params.m * params.omega
    return [OscillatorRef(n, params, unit * n, unit * (n + 1)) for n in range(int(n_max) + 1)]


@dataclass(frozen=True)
class DispersionRef:
    q: float
    gt: complex
    eps: float


def fourier_transform(g, q, limit=200):
    """``int g(s) exp(-i q s) ds`` over the real line by adaptive quadrature."""
    re = quad(lambda s: np.real(g(np.array(s)) * np.exp(-1j * q * s)), -np.inf, np.inf, limit=limit,
              epsabs=1e-13, epsrel=1e-13)[0]
    im = quad(lambda s: np.imag(g(np.array(s)) * np.exp(-1j * q * s)), -np.inf, np.inf, limit=limit,
              epsabs=1e-13, epsrel=1e-13)[0]
    return complex(re, im)


def convolution_dispersion(g, q, hbar=1.0):
    """Plane-wave energy ``hbar**2 q**2 + |g~(q)|**2`` of a convolution kernel.

    Uses the closed-form transform when the profile provides one.
    """
    q = float(q)
    gt = complex(g.fourier(q)) if hasattr(g, "fourier") else fourier_transform(g, q)
    return DispersionRef(q=q, gt=gt, eps=hbar ** 2 * q * q + abs(gt) ** 2)


@dataclass(frozen=True)
class ShiftReference:
    """Reference data for ``f = m omega (x - i a)``.

    ``shift`` is the imaginary translation ``a / hbar`` (in units of ``hbar``)
    carrying the real oscillator into the shifted one.  ``theta`` is the metric
    parameter at which the kernel condition
    ``f(x + i hbar theta) = conj(f(x))`` holds, which is twice that shift.
    """

    a: float
    shift: float
    theta: float
    expected_residual: float
    expected_spectrum: list


def complex_shift_reference(params, a, n_max=5):
    return ShiftReference(
        a=float(a),
        shift=a / params.hbar,
        theta=2.0 * a / params.hbar,
        expected_residual=0.0,
        expected_spectrum=oscillator_levels(params, n_max),
    )
