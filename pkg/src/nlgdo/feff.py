"""
Effective local profile from the two component-wise equivalent potentials.

If both components were driven by one local profile ``f_eff`` then

    Veq_{1,2} = f_eff**2 -/+ hbar f_eff',

so with ``Sigma = Veq2 + Veq1`` and ``Delta = Veq2 - Veq1`` we need
``f_eff**2 = Sigma / 2`` and ``Delta = 2 hbar f_eff'``.  Eliminating ``f_eff``
gives the pointwise test ``Delta = +/- hbar Sigma' / sqrt(2 Sigma)``.  Its
residual measures how far the nonlocal pair is from a single local profile.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numerics import differentiate

__all__ = ["CompatReport", "compatibility", "reconstruct_partner_check"]


@dataclass(frozen=True, eq=False)
class CompatReport:
    x: np.ndarray = field(repr=False)
    Sigma: np.ndarray = field(repr=False)
    Delta: np.ndarray = field(repr=False)
    feff: np.ndarray = field(repr=False)
    residual: np.ndarray = field(repr=False)
    signs: np.ndarray = field(repr=False)
    compatible: bool
    complex_sigma: bool
    max_residual: float


def _runs(mask):
    edges = np.flatnonzero(np.diff(np.concatenate(([0], mask.astype(int), [0]))))
    return list(zip(edges[::2], edges[1::2]))


def compatibility(Veq1, Veq2, hbar, grid, compat_tol=1e-4, sigma_tol=1e-8, window=None, order=8):
    """Check whether ``(Veq1, Veq2)`` derive from a single local profile.

    Points with ``|Sigma| < sigma_tol`` (or outside ``window``) are masked.  On
    each remaining contiguous run one sign of the square root is kept for the
    whole run, namely the one with the smaller worst-case residual; that sign
    is also the sign of ``f_eff`` on the run.  Complex ``Sigma`` is handled with
    the principal square root and flagged.

    Raises
    ------
    ValueError
        If nothing is left after masking.
    """
    x = grid.nodes
    V1 = np.asarray(Veq1, dtype=complex)
    V2 = np.asarray(Veq2, dtype=complex)
    Sigma = V2 + V1
    Delta = V2 - V1
    keep = np.isfinite(Sigma) & (np.abs(Sigma) >= sigma_tol)
    if window is not None:
        keep &= (x >= window[0]) & (x <= window[1])
    if not keep.any():
        raise ValueError("compatibility window is empty after masking")
    dSigma = differentiate(x, np.where(np.isfinite(Sigma), Sigma, np.nan), order=order)
    root = np.sqrt(2.0 * Sigma + 0j)
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = hbar * dSigma / root
    residual = np.full(x.shape, np.nan)
    signs = np.zeros(x.shape)
    for lo, hi in _runs(keep):
        sl = slice(lo, hi)
        rp = np.abs(Delta[sl] - slope[sl])
        rm = np.abs(Delta[sl] + slope[sl])
        s = 1.0 if np.nanmax(rp) <= np.nanmax(rm) else -1.0
        residual[sl] = rp if s > 0 else rm
        signs[sl] = s
    feff = np.where(keep, signs * np.sqrt(Sigma / 2.0 + 0j), np.nan + 0j)
    complex_sigma = bool(np.any(np.abs(Sigma[keep].imag) > sigma_tol))
    max_res = float(np.nanmax(residual[keep]))
    nonneg = complex_sigma or bool(np.all(Sigma[keep].real >= -sigma_tol))
    return CompatReport(x=x, Sigma=Sigma, Delta=Delta, feff=feff, residual=residual, signs=signs,
                        compatible=bool(max_res < compat_tol and nonneg), complex_sigma=complex_sigma,
                        max_residual=max_res)


def reconstruct_partner_check(feff, hbar, grid, Veq1, Veq2, order=8):
    """Largest deviation of ``f_eff**2 -/+ hbar f_eff'`` from ``(Veq1, Veq2)``.

    Only points where ``f_eff`` is defined count; its derivative is taken run
    by run so masked gaps do not leak into the stencils.
    """
    x = grid.nodes
    f = np.asarray(feff, dtype=complex)
    df = differentiate(x, f, order=order)
    Vm = f * f - hbar * df
    Vp = f * f + hbar * df
    dev = np.maximum(np.abs(Vm - np.asarray(Veq1)), np.abs(Vp - np.asarray(Veq2)))
    if not np.any(np.isfinite(dev)):
        raise ValueError("f_eff is undefined everywhere")
    return float(np.nanmax(dev))
