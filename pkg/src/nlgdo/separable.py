"""
Rank-one separable kernels on the half line.

For ``f(x, x') = lam u(x) u(x')`` the component kernels are

    V_j = lam**2 c_u u(x) u(x') + s hbar lam (u'(x) u(x') + u(x) u'(x')),

with ``s = -1`` for component 1, ``s = +1`` for component 2 and
``c_u = int_0^inf u**2``.  Acting on ``psi`` this only needs the two moments
``S0 = int u psi`` and ``S1 = int u' psi``, so

    psi'' + k**2 psi = alpha u + beta u',
    alpha = (lam**2 c_u / hbar**2) S0 + s (lam / hbar) S1,   beta = s (lam / hbar) S0.

Writing ``psi = reg + alpha phi_u + beta phi_u'`` with ``phi_h`` the free
half-line Green function applied to ``h`` and projecting back onto ``u`` and
``u'`` gives the 2x2 system ``M (S0, S1) = b``.  ``det M`` is a quadratic in
``lam``; its zeros flag energies where the moment reduction loses uniqueness.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .numerics import cumulative_integral_matrix

__all__ = [
    "MomentSystem",
    "ScanResult",
    "build_moment_system",
    "reconstruct",
    "det_coefficients",
    "spurious_scan",
    "dense_regular_solution",
    "green_apply",
]

BCS = ("dirichlet", "neumann")
GREENS = ("outgoing", "incoming")


@dataclass(frozen=True, eq=False)
class MomentSystem:
    k: float
    j: int
    M: np.ndarray
    b: np.ndarray
    S0: complex
    S1: complex
    lam: float
    c_u: float
    bc: str
    green: str
    hbar: float = 1.0
    integrals: dict = field(default_factory=dict, repr=False)

    @property
    def det(self):
        return complex(np.linalg.det(self.M))

    @property
    def sign(self):
        return -1.0 if self.j == 1 else 1.0

    @property
    def alpha(self):
        return (self.lam ** 2 * self.c_u / self.hbar ** 2) * self.S0 + self.sign * (self.lam / self.hbar) * self.S1

    @property
    def beta(self):
        return self.sign * (self.lam / self.hbar) * self.S0


def _check(j, bc, green):
    if j not in (1, 2):
        raise ValueError(f"component must be 1 or 2, got {j!r}")
    if bc not in BCS:
        raise ValueError(f"unknown boundary condition {bc!r}; expected one of {BCS}")
    if green not in GREENS:
        raise ValueError(f"unknown Green function {green!r}; expected one of {GREENS}")


def _regular(k, x, bc):
    return np.sin(k * x) if bc == "dirichlet" else np.cos(k * x)


def green_apply(h, k, grid, bc="dirichlet", green="outgoing", C=None):
    """``phi(x) = int_0^L G(x, y) h(y) dy`` for the free half-line Green function.

    ``G = -sin(k x<) e(k x>) / k`` (Dirichlet) or ``cos(k x<) e(k x>) / (i k)``
    (Neumann), with ``e = exp(+i .)`` for outgoing and ``exp(-i .)`` for
    incoming waves.
    """
    x = grid.nodes
    C = cumulative_integral_matrix(grid) if C is None else C
    s = 1.0 if green == "outgoing" else -1.0
    e = np.exp(s * 1j * k * x)
    reg = _regular(k, x, bc)
    total = grid.weights @ (reg * h)
    right_e = C @ (e * h)
    left_reg = total - C @ (reg * h)
    if bc == "dirichlet":
        # Wronskian of (sin, exp(+/-ikx)) is -k for either sign
        return -(e * left_reg + reg * right_e) / k
    # Wronskian of (cos, exp(+/-ikx)) is +/- i k
    return (e * left_reg + reg * right_e) / (s * 1j * k)


def _projections(u, k, grid, bc, green, C=None):
    x = grid.nodes
    uu = u(x)
    du = u.derivative(x)
    C = cumulative_integral_matrix(grid) if C is None else C
    phi_u = green_apply(uu, k, grid, bc, green, C)
    phi_du = green_apply(du, k, grid, bc, green, C)
    w = grid.weights
    I = {
        "uu": w @ (uu * phi_u),
        "u_du": w @ (uu * phi_du),
        "du_u": w @ (du * phi_u),
        "du_du": w @ (du * phi_du),
    }
    reg = _regular(k, x, bc)
    b = np.array([w @ (uu * reg), w @ (du * reg)], dtype=complex)
    return I, b, phi_u, phi_du


def _c_u(u, grid):
    if hasattr(u, "square_integral") and u.is_real:
        return float(u.square_integral(grid.domain))
    v = u(grid.nodes)
    return grid.integrate(v * v)


def build_moment_system(lam, u, j, k, grid, bc="dirichlet", hbar=1.0, green="outgoing"):
    """Assemble and solve ``M (S0, S1) = b`` at wavenumber ``k``.

    The regular free solution is ``sin(k x)`` for Dirichlet and ``cos(k x)``
    for Neumann conditions at the origin.
    """
    _check(j, bc, green)
    sgn = -1.0 if j == 1 else 1.0
    c_u = _c_u(u, grid)
    I, b, phi_u, phi_du = _projections(u, k, grid, bc, green)
    p = lam * lam * c_u / hbar ** 2
    q = sgn * lam / hbar
    M = np.array([
        [1.0 - p * I["uu"] - q * I["u_du"], -q * I["uu"]],
        [-p * I["du_u"] - q * I["du_du"], 1.0 - q * I["du_u"]],
    ], dtype=complex)
    S = np.linalg.solve(M, b)
    I = dict(I, phi_u=phi_u, phi_du=phi_du)
    return MomentSystem(k=float(k), j=j, M=M, b=b, S0=S[0], S1=S[1], lam=lam, c_u=c_u,
                        bc=bc, green=green, hbar=hbar, integrals=I)


def reconstruct(ms, grid):
    """``psi = reg + alpha phi_u + beta phi_u'`` on the grid nodes."""
    reg = _regular(ms.k, grid.nodes, ms.bc)
    return reg + ms.alpha * ms.integrals["phi_u"] + ms.beta * ms.integrals["phi_du"]


def det_coefficients(u, j, k, grid, bc="dirichlet", hbar=1.0, green="outgoing"):
    """``(c0, c1, c2)`` with ``det M = c0 + c1 lam + c2 lam**2``.

    The cubic and quartic terms of the expanded determinant cancel identically.
    """
    _check(j, bc, green)
    sgn = -1.0 if j == 1 else 1.0
    c_u = _c_u(u, grid)
    I, _, _, _ = _projections(u, k, grid, bc, green)
    c1 = -sgn * (I["u_du"] + I["du_u"]) / hbar
    c2 = (-c_u * I["uu"] + I["u_du"] * I["du_u"] - I["uu"] * I["du_du"]) / hbar ** 2
    return np.array([1.0 + 0j, c1, c2])


@dataclass(frozen=True, eq=False)
class ScanResult:
    k: np.ndarray = field(repr=False)
    det: np.ndarray = field(repr=False)
    minima: list
    roots: list
    lam: float
    j: int

    @property
    def min_abs_det(self):
        if self.minima:
            return min(m[1] for m in self.minima)
        return float(np.min(np.abs(self.det)))


def spurious_scan(lam, u, j, k_range, nk, grid, bc="dirichlet", hbar=1.0, root_tol=1e-6, xtol=1e-8):
    """Scan ``det M_j(k)`` over a uniform k-mesh and refine its near-zeros.

    Every interior local minimum of ``|det M|`` on the mesh (plus the mesh
    end points when ``|det|`` is decreasing towards them) is refined by bounded
    scalar minimization to ``xtol`` in ``k``.  ``minima`` lists all refined
    ``(k*, |det|)``; ``roots`` keeps those with ``|det| < root_tol``.
    """
    if nk < 16:
        raise ValueError("k-mesh needs at least 16 points")
    k0, k1 = map(float, k_range)
    if not 0 < k0 < k1:
        raise ValueError(f"invalid k range {k_range!r}")
    ks = np.linspace(k0, k1, int(nk))
    coeffs = np.array([det_coefficients(u, j, k, grid, bc, hbar) for k in ks])
    det = coeffs @ np.array([1.0, lam, lam * lam])
    mag = np.abs(det)

    def absdet(k):
        return abs(det_coefficients(u, j, k, grid, bc, hbar) @ np.array([1.0, lam, lam * lam]))

    minima = []
    for i in range(mag.size):
        lo = mag[i - 1] if i > 0 else np.inf
        hi = mag[i + 1] if i + 1 < mag.size else np.inf
        if mag[i] <= lo and mag[i] <= hi:
            a, b = ks[max(i - 1, 0)], ks[min(i + 1, mag.size - 1)]
            opt = minimize_scalar(absdet, bounds=(a, b), method="bounded", options={"xatol": xtol})
            kk, val = (float(opt.x), float(opt.fun)) if opt.fun < mag[i] else (float(ks[i]), float(mag[i]))
            minima.append((kk, val))
    roots = [m for m in minima if m[1] < root_tol]
    return ScanResult(k=ks, det=det, minima=minima, roots=roots, lam=lam, j=j)


def dense_regular_solution(jp, bc="dirichlet"):
    """Regular solution built from a Jost pair, normalized like ``reg + outgoing waves``.

    The incoming-wave content is fixed to that of ``sin(k x)`` (Dirichlet) or
    ``cos(k x)`` (Neumann), which is the normalization used by :func:`reconstruct`.
    """
    pp0, pm0, dpp0, dpm0 = jp.origin
    if bc == "dirichlet":
        return 0.5j / pp0 * (pp0 * jp.psi_minus - pm0 * jp.psi_plus)
    if bc == "neumann":
        return 0.5 / dpp0 * (dpp0 * jp.psi_minus - dpm0 * jp.psi_plus)
    raise ValueError(f"unknown boundary condition {bc!r}")
