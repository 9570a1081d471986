"""
Partner kernels and discretized component Hamiltonians.

Squaring the Dirac equation with a nonlocal coupling ``F`` decouples the two
spinor components into

    -hbar**2 psi_j'' + int V_j(x, x') psi_j(x') dx' = eps psi_j,

with ``V_{1,2} = (f * f) -/+ hbar (d/dx + d/dx') f`` and
``eps = (E**2 - m**2 c**4) / c**2``.  Component 1 carries the minus sign, so
for a local profile it sees ``f**2 - hbar f'``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import (
    GridSampled,
    Kernel,
    LocalDiagonal,
    PhysParams,
    combine,
    compose,
    operator_matrix,
    sym_derivative,
)
from .numerics import Grid, active_nodes, eig_dense, second_derivative_matrix

__all__ = [
    "PartnerPair",
    "SpectrumResult",
    "build_partners",
    "component_hamiltonian",
    "spectrum",
    "relativistic_energies",
    "default_bc",
    "local_partner_profiles",
    "mollified_local",
    "FD_ORDER",
]

# stencil order used for the kinetic term; three-point stencils leave ~1e-3
# relative errors on the oscillator levels at desk-scale grids
FD_ORDER = 8


@dataclass(frozen=True)
class PartnerPair:
    V1: Kernel
    V2: Kernel
    grid: Grid
    params: PhysParams

    def component(self, j):
        if j == 1:
            return self.V1
        if j == 2:
            return self.V2
        raise ValueError(f"component must be 1 or 2, got {j!r}")


@dataclass(frozen=True)
class SpectrumResult:
    epsilons: np.ndarray
    energies_plus: np.ndarray
    energies_minus: np.ndarray
    reality_flags: np.ndarray
    component: int

    @property
    def all_real(self):
        return bool(np.all(self.reality_flags))


def build_partners(f, params, grid):
    """Partner kernels ``V1 = f*f - hbar Df`` and ``V2 = f*f + hbar Df``."""
    ff = compose(f, grid)
    df = sym_derivative(f, grid, order=FD_ORDER)
    hbar = params.hbar
    V1 = combine(ff, 1.0, df, -hbar, grid)
    V2 = combine(ff, 1.0, df, hbar, grid)
    return PartnerPair(V1=V1, V2=V2, grid=grid, params=params)


def default_bc(grid):
    return "periodic" if grid.periodic else "dirichlet"


def component_hamiltonian(pair, j, bc=None, order=FD_ORDER):
    """Dense ``H_j = -hbar**2 D2 + W_j`` restricted to the active nodes.

    Nodes sitting on a Dirichlet wall carry no unknown and are dropped, so the
    returned matrix is square in the number of interior nodes.  Use
    :func:`~nlgdo.numerics.active_nodes` to map rows back to positions.
    """
    grid = pair.grid
    bc = default_bc(grid) if bc is None else bc
    hbar = pair.params.hbar
    D2 = second_derivative_matrix(grid, bc=bc, order=order)
    H = -hbar ** 2 * D2 + operator_matrix(pair.component(j), grid)
    idx = active_nodes(grid, bc)
    return H[np.ix_(idx, idx)]


def relativistic_energies(eps, params):
    """``E = +/- sqrt(m**2 c**4 + c**2 eps)`` on the principal branch."""
    eps = np.asarray(eps, dtype=complex)
    mc2 = params.m * params.c ** 2
    root = np.sqrt(mc2 ** 2 + params.c ** 2 * eps)
    return root, -root


def spectrum(pair, j, params=None, n_levels=6, bc=None, tol_abs=1e-8, tol_rel=1e-6, order=FD_ORDER):
    """Lowest ``n_levels`` eigenvalues of ``H_j`` (by real part) and their energies.

    An eigenvalue is flagged real when ``|Im eps| < tol_abs + tol_rel |Re eps|``.
    """
    params = pair.params if params is None else params
    H = component_hamiltonian(pair, j, bc=bc, order=order)
    if n_levels > H.shape[0]:
        raise ValueError("more levels requested than grid unknowns")
    vals, _ = eig_dense(H)
    eps = vals[:n_levels]
    Ep, Em = relativistic_energies(eps, params)
    flags = np.abs(eps.imag) < tol_abs + tol_rel * np.abs(eps.real)
    return SpectrumResult(eps, Ep, Em, flags, j)


def local_partner_profiles(f, params):
    """``(V1, V2)`` local profiles for a local kernel, handy for plotting."""
    if not isinstance(f, LocalDiagonal):
        raise TypeError("only local kernels have partner profiles")
    pair = build_partners(f, params, None)
    return pair.V1.profile, pair.V2.profile


def mollified_local(profile, width, grid):
    """Sampled kernel ``f((x + x')/2) delta_w(x - x')`` with a normalized Gaussian ``delta_w``."""
    x = grid.nodes
    s = np.subtract.outer(x, x)
    mid = 0.5 * np.add.outer(x, x)
    delta = np.exp(-0.5 * (s / width) ** 2) / (width * np.sqrt(2.0 * np.pi))
    return GridSampled(profile(mid) * delta + 0j, grid)
