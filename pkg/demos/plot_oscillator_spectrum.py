"""
Dirac oscillator levels from the discretized partner Hamiltonians
=================================================================

The linear profile ``f = m omega x`` is the Dirac oscillator.  Its two
component Hamiltonians share every level except the ground state of
component 1, which sits at zero.
"""

import numpy as np

from nlgdo import FullLine, LocalDiagonal, PhysParams, build_partners, make_grid, spectrum
from nlgdo.benchmarks import oscillator_levels
from nlgdo.profiles import Linear

P = PhysParams()
grid = make_grid(FullLine(12.0), 400)
pair = build_partners(LocalDiagonal(Linear(P.m * P.omega)), P, grid)

# lowest six eigenvalues of each component
s1 = spectrum(pair, 1, n_levels=6)
s2 = spectrum(pair, 2, n_levels=6)
ref = oscillator_levels(P, 5)

print(" n   eps_1        eps_2        exact_2   E+")
for n in range(6):
    print(f"{n:2d}  {s1.epsilons[n].real:11.8f}  {s2.epsilons[n].real:11.8f}  {ref[n].eps_plus:8.3f}"
          f"  {s2.energies_plus[n].real:.8f}")

# the pairing: level n of component 2 equals level n + 1 of component 1
print("max pairing mismatch:", np.max(np.abs(s2.epsilons[:5] - s1.epsilons[1:6])))
