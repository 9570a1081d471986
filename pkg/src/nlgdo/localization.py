"""
Mapping a nonlocal component equation onto an equivalent local one.

In wavenumber form the component equation reads ``psi'' + k**2 psi = U psi``
with ``U = V / hbar**2`` and ``k**2 = eps / hbar**2``.  From the Jost pair
``psi_+/-`` (asymptotically ``exp(+/- i k x)``) we form the normalized current

    J = -(psi_+ psi_-' - psi_- psi_+') / (2 i k),

the damping factor ``A = sqrt(J)`` (``A -> 1`` at large ``x``) and the local
potential ``Ueq`` for which ``psi_+/- / A`` solve ``phi'' + k**2 phi = Ueq phi``.
Zeros of ``J`` mark energies where no such local potential exists.

Jost solutions of nonlocal kernels come from the Volterra-type integral form

    psi(x) = exp(+/- i k x) + int_x^L sin(k (y - x)) / k (U psi)(y) dy

discretized by Nystrom quadrature on a Gauss-Legendre grid.  Purely local
kernels are integrated as ODEs inward from ``L``, piecewise between the
profile breakpoints.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .kernels import LocalDiagonal, apply_kernel, operator_matrix
from .numerics import Grid, cumulative_integral_matrix, derivative_matrix, differentiate

__all__ = [
    "JostPair",
    "LocalizationResult",
    "JostSolveError",
    "KernelNotDecayedError",
    "solve_jost",
    "plane_wave_pair",
    "current",
    "current_derivative",
    "damping",
    "current_zeros",
    "equivalent_potential",
    "verify_local_equivalence",
    "match_radius",
]

ODE_RTOL = 1e-13
ODE_ATOL = 1e-15


class JostSolveError(RuntimeError):
    """The Jost system is singular or ill-conditioned at this wavenumber."""


class KernelNotDecayedError(ValueError):
    """The kernel is still significant at the end of the grid."""


@dataclass(frozen=True, eq=False)
class JostPair:
    """Outgoing/incoming solutions on the grid.

    ``origin`` holds ``(psi_+(0), psi_-(0), psi_+'(0), psi_-'(0))`` at the left
    end of the domain, which is generally not a grid node.
    """

    k: float
    grid: Grid
    psi_plus: np.ndarray = field(repr=False)
    psi_minus: np.ndarray = field(repr=False)
    dpsi_plus: np.ndarray = field(repr=False)
    dpsi_minus: np.ndarray = field(repr=False)
    match_radius: float
    origin: tuple = ()
    residual: float = 0.0
    method: str = "nystrom"
    breakpoints: tuple = ()


@dataclass(frozen=True, eq=False)
class LocalizationResult:
    x: np.ndarray = field(repr=False)
    J: np.ndarray = field(repr=False)
    dJ: np.ndarray = field(repr=False)
    A: np.ndarray = field(repr=False)
    Ueq: np.ndarray = field(repr=False)
    current_zeros: list
    valid: bool
    zero_tol: float
    breakpoints: tuple = ()

    @property
    def min_abs_current(self):
        return float(np.min(np.abs(self.J)))


def match_radius(kernel, grid, hbar=1.0, decay_tol=1e-10):
    """Smallest node beyond which every kernel row norm ``int |U(x, x')| dx'`` is below ``decay_tol``.

    Raises
    ------
    KernelNotDecayedError
        If the last node still carries a row norm above ``decay_tol``.
    """
    W = operator_matrix(kernel, grid) / hbar ** 2
    rows = np.abs(W).sum(axis=1)
    big = np.flatnonzero(rows >= decay_tol)
    if big.size and big[-1] == grid.n - 1:
        raise KernelNotDecayedError(
            f"kernel row norm {rows[-1]:.3e} at x={grid.nodes[-1]:g} exceeds {decay_tol:g}; enlarge the domain"
        )
    if big.size == 0:
        return float(grid.domain.bounds[0])
    return float(grid.nodes[big[-1] + 1])


def plane_wave_pair(k, q, grid):
    """Pair ``sqrt(k/q) exp(+/- i q x)``, normalized so that the current is one."""
    x = grid.nodes
    c = np.sqrt(k / q)
    ep, em = c * np.exp(1j * q * x), c * np.exp(-1j * q * x)
    a, b = grid.domain.bounds
    origin = (c * np.exp(1j * q * a), c * np.exp(-1j * q * a),
              1j * q * c * np.exp(1j * q * a), -1j * q * c * np.exp(-1j * q * a))
    return JostPair(k=float(k), grid=grid, psi_plus=ep, psi_minus=em, dpsi_plus=1j * q * ep,
                    dpsi_minus=-1j * q * em, match_radius=a, origin=origin, method="plane_wave")


def _segments(a, b, breakpoints):
    pts = [a] + [p for p in sorted(set(breakpoints)) if a < p < b] + [b]
    return list(zip(pts[:-1], pts[1:]))


def _local_ode(profile, k, grid, hbar, bp):
    """Integrate ``psi'' = (U - k**2) psi`` inward from the right end for both asymptotics."""
    x = grid.nodes
    a, b = grid.domain.bounds
    k2 = k * k
    scale = 1.0 / hbar ** 2

    def rhs(t, y):
        u = scale * profile(np.array([t]))[0]
        return [y[1], (u - k2) * y[0]]

    out = []
    for sgn in (1, -1):
        y0 = np.array([np.exp(sgn * 1j * k * b), sgn * 1j * k * np.exp(sgn * 1j * k * b)], dtype=complex)
        psi = np.zeros(grid.n, dtype=complex)
        dpsi = np.zeros(grid.n, dtype=complex)
        done = np.zeros(grid.n, dtype=bool)
        for lo, hi in reversed(_segments(a, b, bp)):
            sel = np.flatnonzero((x >= lo) & (x <= hi) & ~done)
            sol = solve_ivp(rhs, (hi, lo), y0, method="DOP853", dense_output=True,
                            rtol=ODE_RTOL, atol=ODE_ATOL)
            if not sol.success:
                raise JostSolveError(f"ODE integration failed: {sol.message}")
            if sel.size:
                y = sol.sol(x[sel])
                psi[sel], dpsi[sel] = y[0], y[1]
                done[sel] = True
            y0 = sol.y[:, -1]
        out.append((psi, dpsi, y0))
    return out


def solve_jost(kernel, k, grid, hbar=1.0, decay_tol=1e-10, cond_max=1e12):
    """Jost pair of ``psi'' + k**2 psi = (V / hbar**2) psi``.

    Parameters
    ----------
    kernel : Kernel
        Component kernel ``V_j`` (energy units).
    k : float
        Wavenumber, ``k > 0``.
    grid : Grid
        Local kernels accept any half-line grid; nonlocal ones need Gauss-Legendre nodes.

    Raises
    ------
    JostSolveError
        If the Nystrom matrix is singular to working precision (reported, not regularized).
    KernelNotDecayedError
        If the kernel has not died out by the end of the grid.
    """
    if not k > 0:
        raise ValueError(f"wavenumber must be positive, got {k}")
    k = float(k)
    R = match_radius(kernel, grid, hbar=hbar, decay_tol=decay_tol)
    x = grid.nodes
    a, _ = grid.domain.bounds

    if isinstance(kernel, LocalDiagonal):
        prof = kernel.profile
        bp = tuple(prof.breakpoints)
        (pp, dpp, op), (pm, dpm, om) = _local_ode(prof, k, grid, hbar, bp)
        jp = JostPair(k=k, grid=grid, psi_plus=pp, psi_minus=pm, dpsi_plus=dpp, dpsi_minus=dpm,
                      match_radius=R, origin=(op[0], om[0], op[1], om[1]), method="ode", breakpoints=bp)
        w = current(jp)
        return JostPair(**{**jp.__dict__, "residual": float(np.max(np.abs(w - 1.0)))})

    C = cumulative_integral_matrix(grid)
    W = operator_matrix(kernel, grid) / hbar ** 2
    c, s = np.cos(k * x), np.sin(k * x)
    K = (c[:, None] * C * s[None, :] - s[:, None] * C * c[None, :]) / k
    Kd = -(c[:, None] * C * c[None, :] + s[:, None] * C * s[None, :])
    Msys = np.eye(grid.n) - K @ W
    cond = np.linalg.cond(Msys)
    if not np.isfinite(cond) or cond > cond_max:
        raise JostSolveError(f"Jost system singular at k={k:g} (condition number {cond:.3e})")
    rhs = np.stack([np.exp(1j * k * x), np.exp(-1j * k * x)], axis=1)
    psi = np.linalg.solve(Msys, rhs)
    res = float(np.max(np.abs(Msys @ psi - rhs)))
    Upsi = W @ psi
    dpsi = np.stack([1j * k * rhs[:, 0], -1j * k * rhs[:, 1]], axis=1) + Kd @ Upsi
    # values at the left end from the same integral representation
    wt = grid.weights
    ca, sa = np.cos(k * a), np.sin(k * a)
    g_sin = wt * (np.sin(k * x) * ca - np.cos(k * x) * sa) / k
    g_cos = wt * (np.cos(k * x) * ca + np.sin(k * x) * sa)
    e0 = np.array([np.exp(1j * k * a), np.exp(-1j * k * a)])
    psi0 = e0 + g_sin @ Upsi
    dpsi0 = np.array([1j * k, -1j * k]) * e0 - g_cos @ Upsi
    return JostPair(k=k, grid=grid, psi_plus=psi[:, 0], psi_minus=psi[:, 1], dpsi_plus=dpsi[:, 0],
                    dpsi_minus=dpsi[:, 1], match_radius=R,
                    origin=(psi0[0], psi0[1], dpsi0[0], dpsi0[1]), residual=res, method="nystrom")


def current(jp):
    """Normalized Wronskian ``J = -(psi_+ psi_-' - psi_- psi_+') / (2 i k)``."""
    return -(jp.psi_plus * jp.dpsi_minus - jp.psi_minus * jp.dpsi_plus) / (2j * jp.k)


def current_derivative(jp, kernel, hbar=1.0):
    """``J'`` from the equation of motion: ``-(psi_+ (U psi_-) - psi_- (U psi_+)) / (2 i k)``.

    Local kernels give exactly zero, which is the discrete statement that the
    Wronskian of a local equation is constant.
    """
    if isinstance(kernel, LocalDiagonal):
        return np.zeros(jp.grid.n, dtype=complex)
    grid = jp.grid
    Up = apply_kernel(kernel, grid, jp.psi_plus) / hbar ** 2
    Um = apply_kernel(kernel, grid, jp.psi_minus) / hbar ** 2
    return -(jp.psi_plus * Um - jp.psi_minus * Up) / (2j * jp.k)


def current_zeros(x, J, zero_tol=1e-6):
    """Intervals ``(x_lo, x_hi)`` where the piecewise-linear interpolant of ``|J|`` dips below ``zero_tol``.

    Interpolating between nodes catches sign changes that fall between samples.
    """
    J = np.asarray(J)
    a, b = J[:-1], J[1:]
    d = b - a
    dd = np.real(d * np.conj(d))
    t = np.where(dd > 0, -np.real(np.conj(a) * d) / np.where(dd > 0, dd, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    seg_min = np.abs(a + t * d)
    bad = seg_min < zero_tol
    out = []
    i = 0
    while i < bad.size:
        if bad[i]:
            j = i
            while j + 1 < bad.size and bad[j + 1]:
                j += 1
            out.append((float(x[i]), float(x[j + 1])))
            i = j + 1
        else:
            i += 1
    return out


def damping(J, zero_tol=1e-6):
    """``A = sqrt(J)`` with the branch followed continuously inward from ``A(x_max) ~ +1``.

    Points with ``|J| < zero_tol`` are returned as NaN.  Tracking restarts on
    the far side of such a region from the branch closest to the last defined
    value, so a genuine sign flip of ``J`` shows up as a jump of ``A``.
    """
    J = np.asarray(J, dtype=complex)
    A = np.full(J.shape, np.nan + 0j)
    prev = None
    for i in range(J.size - 1, -1, -1):
        if abs(J[i]) < zero_tol:
            continue
        r = np.sqrt(J[i])
        if prev is None:
            r = r if r.real >= 0 else -r
        elif abs(r - prev) > abs(-r - prev):
            r = -r
        A[i] = r
        prev = r
    return A


def equivalent_potential(jp, kernel, grid=None, hbar=1.0, zero_tol=1e-6, order=8):
    """Local potential reproducing the Jost pair up to the damping factor.

    ``Ueq = -J''/(2J) + 3/4 (J'/J)**2 + (psi_+' (U psi_-) - psi_-' (U psi_+)) / (2 i k J)``

    ``J'`` comes from the equation of motion and ``J''`` from differentiating
    it on the grid.  Points with ``|J| < zero_tol`` are masked with NaN and
    make the result invalid.
    """
    grid = jp.grid if grid is None else grid
    x = grid.nodes
    k = jp.k
    J = current(jp)
    if isinstance(kernel, LocalDiagonal):
        Uloc = kernel.profile(x) / hbar ** 2
        dJ = np.zeros_like(J)
        d2J = np.zeros_like(J)
        third = Uloc + 0j
    else:
        Up = apply_kernel(kernel, grid, jp.psi_plus) / hbar ** 2
        Um = apply_kernel(kernel, grid, jp.psi_minus) / hbar ** 2
        dJ = -(jp.psi_plus * Um - jp.psi_minus * Up) / (2j * k)
        if grid.periodic:
            d2J = derivative_matrix(grid, 1, order=order, bc="periodic") @ dJ
        else:
            d2J = differentiate(x, dJ, order=order)
        with np.errstate(divide="ignore", invalid="ignore"):
            third = (jp.dpsi_plus * Um - jp.dpsi_minus * Up) / (2j * k * J)
    mask = np.abs(J) < zero_tol
    with np.errstate(divide="ignore", invalid="ignore"):
        U = -0.5 * d2J / J + 0.75 * (dJ / J) ** 2 + third
    U = np.where(mask, np.nan + 0j, U)
    zeros = current_zeros(x, J, zero_tol)
    return LocalizationResult(x=x, J=J, dJ=dJ, A=damping(J, zero_tol), Ueq=U, current_zeros=zeros,
                              valid=not zeros, zero_tol=zero_tol, breakpoints=tuple(jp.breakpoints))


def _spline_pieces(x, y, breakpoints):
    """Cubic splines of ``y(x)`` that do not straddle any breakpoint."""
    cuts = [-np.inf] + sorted(breakpoints) + [np.inf]
    pieces = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        sel = (x >= lo) & (x < hi)
        if sel.sum() >= 2:
            pieces.append((lo, hi, CubicSpline(x[sel], y[sel])))
    return pieces


def _eval_pieces(pieces, t):
    for lo, hi, sp in pieces:
        if lo <= t < hi:
            return sp(t)
    return pieces[-1][2](t)


def verify_local_equivalence(res, jp, k=None, grid=None, window=None):
    """Largest ``|psi_N - A psi_L|`` over the window, for both members of the pair.

    ``psi_L`` solves ``psi_L'' + k**2 psi_L = Ueq psi_L`` with ``Ueq`` taken
    from a cubic-spline interpolant of ``res.Ueq`` (split at kernel
    breakpoints), matched to ``psi_N / A`` at the right end of the grid.  The
    residual therefore converges at the fourth-order rate of the interpolant.
    """
    if not res.valid:
        raise ValueError("local equivalence needs a valid localization (no current zeros)")
    grid = jp.grid if grid is None else grid
    k = jp.k if k is None else k
    x = grid.nodes
    lo, hi = (x[0], x[-1]) if window is None else window
    bp = tuple(res.breakpoints)
    Upieces = _spline_pieces(x, res.Ueq.real, bp)
    Uipieces = _spline_pieces(x, res.Ueq.imag, bp)
    k2 = k * k

    def rhs(t, y):
        u = _eval_pieces(Upieces, t) + 1j * _eval_pieces(Uipieces, t)
        return [y[1], (u - k2) * y[0]]

    A = res.A
    dA = res.dJ / (2.0 * A)
    sel = np.flatnonzero((x >= lo) & (x <= hi))
    worst = 0.0
    for psi, dpsi in ((jp.psi_plus, jp.dpsi_plus), (jp.psi_minus, jp.dpsi_minus)):
        i0 = sel[-1]
        phi0 = psi[i0] / A[i0]
        dphi0 = (dpsi[i0] - dA[i0] * phi0) / A[i0]
        t_eval = x[sel][::-1]
        segs = _segments(x[sel[0]], x[i0], bp)
        y0 = np.array([phi0, dphi0], dtype=complex)
        phi = {}
        for a_, b_ in reversed(segs):
            te = t_eval[(t_eval >= a_) & (t_eval <= b_)]
            sol = solve_ivp(rhs, (b_, a_), y0, method="DOP853", t_eval=te, rtol=ODE_RTOL, atol=ODE_ATOL,
                            dense_output=True)
            if not sol.success:
                raise JostSolveError(f"local integration failed: {sol.message}")
            for t, v in zip(sol.t, sol.y[0]):
                phi[t] = v
            y0 = sol.sol(a_)
        vals = np.array([phi[t] for t in x[sel]])
        worst = max(worst, float(np.max(np.abs(psi[sel] - A[sel] * vals))))
    return worst
