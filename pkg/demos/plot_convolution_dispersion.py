"""
Plane waves of a translation-invariant kernel
=============================================

For ``f(x, x') = g(x - x')`` on a periodic box every plane wave is an
eigenfunction, with ``eps(q) = hbar**2 q**2 + |g~(q)|**2``.  Here ``g`` is a
unit Gaussian and the grid estimate is compared to the closed form.
"""

import numpy as np

from nlgdo import Convolution, FullLine, PhysParams, build_partners, make_grid
from nlgdo.benchmarks import convolution_dispersion
from nlgdo.partner import component_hamiltonian
from nlgdo.profiles import Gaussian

P = PhysParams()
g = Gaussian(1.0)
L = 16.0

for n in (80, 160, 320):
    grid = make_grid(FullLine(L), n, "uniform_periodic")
    H = component_hamiltonian(build_partners(Convolution(g), P, grid), 2)
    err = 0.0
    for m in (1, 3, 5, 8):
        q = m * np.pi / L
        v = np.exp(1j * q * grid.nodes)
        # Rayleigh quotient of the plane wave
        eps_grid = np.vdot(v, H @ v) / np.vdot(v, v)
        err = max(err, abs(eps_grid - convolution_dispersion(g, q).eps))
    print(f"n = {n:3d}: max |eps_grid - eps(q)| = {err:.2e}")
