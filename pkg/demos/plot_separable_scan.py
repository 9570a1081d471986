"""
Scanning the moment determinant of a rank-one kernel
====================================================

For ``f = lam u(x) u(x')`` the scattering problem reduces to a 2x2 linear
system in two moments of the wavefunction.  Zeros of its determinant would
mark energies where that reduction breaks down.  The minimum of ``|det M|``
over a k-window is tracked as the coupling grows.
"""

import numpy as np

from nlgdo import HalfLine, make_grid
from nlgdo.profiles import Gaussian
from nlgdo.separable import det_coefficients, spurious_scan

grid = make_grid(HalfLine(12.0), 120)
u = Gaussian(1.0)

for j in (1, 2):
    print(f"component {j}")
    for lam in (0.25, 1.0, 2.0, 4.0, 8.0):
        scan = spurious_scan(lam, u, j, (0.2, 3.0), 64, grid)
        kmin, dmin = min(scan.minima, key=lambda m: m[1])
        print(f"  lam = {lam:4.2f}: min |det| = {dmin:.3f} at k = {kmin:.3f}, roots: {len(scan.roots)}")

# det M is a quadratic polynomial in lam at each k
c = det_coefficients(u, 1, 1.0, grid)
print("det M(k=1) = 1 + ({:.4f}) lam + ({:.4f}) lam^2".format(c[1], c[2]))
print("its zeros in lam:", np.roots(c[::-1]))
