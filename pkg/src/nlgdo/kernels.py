"""
Nonlocal interaction kernels ``f(x, x')`` and their algebra.

Four representations are supported:

* :class:`LocalDiagonal` -- ``f(x) delta(x - x')``, kept as a profile and
  never discretized as a delta;
* :class:`SeparableRank1` -- ``f0(x) delta(x - x') + lam u(x) u(x')``;
* :class:`Convolution` -- ``g(x - x')``;
* :class:`GridSampled` -- a matrix of samples on a :class:`~nlgdo.numerics.Grid`,
  optionally carrying a local (diagonal) part.

Integral operators are discretized with the grid quadrature,
``(F phi)_i = sum_j w_j f(x_i, x_j) phi_j``.  Kernels carry momentum units so
that ``p - i F`` is dimensionally consistent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numerics import Grid, derivative_matrix
from .profiles import Combination, Conjugate, Derivative, Product, Profile, Reflected, Zero

__all__ = [
    "PhysParams",
    "Kernel",
    "LocalDiagonal",
    "SeparableRank1",
    "Convolution",
    "GridSampled",
    "GridMismatchError",
    "UnsupportedRepresentationError",
    "apply_kernel",
    "compose",
    "sym_derivative",
    "adjoint",
    "shift_residual",
    "combine",
    "scale",
    "operator_matrix",
]


class GridMismatchError(ValueError):
    pass


class UnsupportedRepresentationError(TypeError):
    """Operation needs an analytic kernel family (sampled kernels cannot be continued)."""


@dataclass(frozen=True)
class PhysParams:
    """Model constants in natural units."""

    hbar: float = 1.0
    m: float = 1.0
    c: float = 1.0
    omega: float = 1.0
    theta: float = 0.0

    def __post_init__(self):
        for name in ("hbar", "m", "c"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.omega >= 0:
            raise ValueError("omega must be non-negative")

    def replace(self, **changes):
        d = {k: getattr(self, k) for k in ("hbar", "m", "c", "omega", "theta")}
        d.update(changes)
        return PhysParams(**d)


class Kernel:
    local = False

    def local_values(self, grid):
        """Local (delta) part sampled on the nodes, or ``None``."""
        return None

    def values(self, grid):
        """Nonlocal part ``f(x_i, x_j)`` on the grid, or ``None``."""
        return None


@dataclass(frozen=True)
class LocalDiagonal(Kernel):
    profile: Profile
    local = True

    def local_values(self, grid):
        return self.profile(grid.nodes)


@dataclass(frozen=True)
class SeparableRank1(Kernel):
    """``background(x) delta(x - x') + lam * form(x) * form(x')``."""

    lam: complex
    form: Profile
    background: Profile | None = None

    def local_values(self, grid):
        if self.background is None:
            return None
        return self.background(grid.nodes)

    def values(self, grid):
        u = self.form(grid.nodes)
        return self.lam * np.multiply.outer(u, u)

    def evaluate(self, x, xp):
        return self.lam * self.form(x) * self.form(xp)

    def form_norm(self, grid):
        """``c_u = int u(y)**2 dy`` over the grid's domain."""
        if hasattr(self.form, "square_integral") and self.form.is_real:
            return float(self.form.square_integral(grid.domain))
        u = self.form(grid.nodes)
        return grid.integrate(u * u)


def _separation(grid, x, xp):
    s = np.subtract.outer(x, xp)
    if grid is not None and grid.periodic:
        period = grid.measure
        s = (s + 0.5 * period) % period - 0.5 * period
    return s


@dataclass(frozen=True)
class Convolution(Kernel):
    """``g(x - x')``; on a periodic grid the separation is wrapped to ``[-L, L)``."""

    profile: Profile

    def values(self, grid):
        return self.profile(_separation(grid, grid.nodes, grid.nodes))

    def evaluate(self, x, xp):
        return self.profile(np.asarray(x) - np.asarray(xp))


@dataclass(frozen=True, eq=False)
class GridSampled(Kernel):
    """Kernel samples ``matrix[i, j] = f(x_i, x_j)`` plus an optional local part."""

    matrix: np.ndarray
    grid: Grid
    diagonal: np.ndarray | None = field(default=None)

    def __post_init__(self):
        n = self.grid.n
        if self.matrix.shape != (n, n):
            raise GridMismatchError(f"matrix shape {self.matrix.shape} does not match grid size {n}")
        if self.diagonal is not None and self.diagonal.shape != (n,):
            raise GridMismatchError("diagonal part does not match grid size")

    def _check(self, grid):
        if not self.grid.same_as(grid):
            raise GridMismatchError("kernel was sampled on a different grid")

    def local_values(self, grid):
        self._check(grid)
        return self.diagonal

    def values(self, grid):
        self._check(grid)
        return self.matrix


def operator_matrix(f, grid):
    """Matrix ``W`` with ``W @ phi`` the discretized action of ``f``."""
    n = grid.n
    W = np.zeros((n, n), dtype=complex)
    vals = f.values(grid)
    if vals is not None:
        W += vals * grid.weights[None, :]
    loc = f.local_values(grid)
    if loc is not None:
        W[np.diag_indices(n)] += loc
    return W


def apply_kernel(f, grid, phi):
    """``(F phi)(x_i)``: quadrature sum for integral parts, pointwise for local ones."""
    phi = np.asarray(phi)
    if phi.shape[0] != grid.n:
        raise GridMismatchError(f"vector of length {phi.shape[0]} on a grid of {grid.n} nodes")
    out = np.zeros(phi.shape, dtype=np.result_type(phi, complex))
    vals = f.values(grid)
    if vals is not None:
        out += vals @ (grid.weights * phi.T).T
    loc = f.local_values(grid)
    if loc is not None:
        out += (loc * phi.T).T
    return out


def _sampled(matrix, grid, diagonal=None):
    return GridSampled(np.asarray(matrix, dtype=complex), grid,
                       None if diagonal is None else np.asarray(diagonal, dtype=complex))


def compose(f, grid):
    """``(f * f)(x, x') = int dy f(x, y) f(y, x')``.

    Local kernels square their profile; the rank-one form uses the closed form
    ``lam**2 c_u u(x) u(x')``; everything else is a weighted matrix product.
    """
    if isinstance(f, LocalDiagonal):
        return LocalDiagonal(Product(f.profile, f.profile))
    if isinstance(f, SeparableRank1):
        u = f.form(grid.nodes)
        uu = np.multiply.outer(u, u)
        mat = f.lam ** 2 * f.form_norm(grid) * uu
        diag = None
        if f.background is not None:
            f0 = f.background(grid.nodes)
            mat = mat + f.lam * (f0[:, None] + f0[None, :]) * uu
            diag = f0 * f0
        return _sampled(mat, grid, diag)
    F = f.values(grid)
    d = f.local_values(grid)
    mat = (F * grid.weights[None, :]) @ F
    diag = None
    if d is not None:
        mat = mat + d[:, None] * F + F * d[None, :]
        diag = d * d
    return _sampled(mat, grid, diag)


def sym_derivative(f, grid, order=8):
    """``(d/dx + d/dx') f(x, x')``.

    Exact for analytic families (a convolution gives zero; a local profile
    ``f`` gives the local profile ``f'``).  Sampled kernels are differentiated
    with ``order``-accurate finite differences along both indices.
    """
    if isinstance(f, LocalDiagonal):
        return LocalDiagonal(Derivative(f.profile))
    if isinstance(f, Convolution):
        return _sampled(np.zeros((grid.n, grid.n)), grid)
    if isinstance(f, SeparableRank1):
        u = f.form(grid.nodes)
        du = f.form.derivative(grid.nodes)
        mat = f.lam * (np.multiply.outer(du, u) + np.multiply.outer(u, du))
        diag = None if f.background is None else f.background.derivative(grid.nodes)
        return _sampled(mat, grid, diag)
    bc = "periodic" if grid.periodic else "none"
    D = derivative_matrix(grid, 1, order=order, bc=bc)
    F = f.values(grid)
    mat = D @ F + F @ D.T
    d = f.local_values(grid)
    return _sampled(mat, grid, None if d is None else D @ d)


def adjoint(f):
    """``f^dagger(x, x') = f*(x', x)``, kept in the same representation."""
    if isinstance(f, LocalDiagonal):
        p = f.profile
        return LocalDiagonal(p if p.is_real else Conjugate(p))
    if isinstance(f, SeparableRank1):
        u, b = f.form, f.background
        return SeparableRank1(
            np.conj(f.lam) if isinstance(f.lam, complex) else f.lam,
            u if u.is_real else Conjugate(u),
            None if b is None else (b if b.is_real else Conjugate(b)),
        )
    if isinstance(f, Convolution):
        g = f.profile
        if g.is_real and g.is_even:
            return f
        return Convolution(Conjugate(Reflected(g)))
    if isinstance(f, GridSampled):
        d = None if f.diagonal is None else np.conj(f.diagonal)
        return GridSampled(np.conj(f.matrix.T), f.grid, d)
    raise TypeError(f"unsupported kernel {type(f).__name__}")


def _require_analytic(p):
    if p is not None and not p.analytic:
        raise UnsupportedRepresentationError(f"profile family {p.family!r} is not analytic")


def shift_residual(f, params, grid):
    """Largest violation of ``f(x + i hbar theta, x' + i hbar theta) = f*(x', x)`` on the grid.

    A zero residual is a sufficient check only; kernels that fail it may still
    be pseudo-Hermitian under some other metric.
    """
    if isinstance(f, GridSampled):
        raise UnsupportedRepresentationError("grid-sampled kernels have no continuation rule")
    shift = 1j * params.hbar * params.theta
    x = grid.nodes
    if isinstance(f, LocalDiagonal):
        _require_analytic(f.profile)
        return float(np.max(np.abs(f.profile(x + shift) - np.conj(f.profile(x)))))
    if isinstance(f, SeparableRank1):
        _require_analytic(f.form)
        _require_analytic(f.background)
        us = f.form(x + shift)
        u = f.form(x)
        lhs = f.lam * np.multiply.outer(us, us)
        rhs = np.conj(f.lam * np.multiply.outer(u, u)).T
        res = float(np.max(np.abs(lhs - rhs)))
        if f.background is not None:
            b = f.background
            res = max(res, float(np.max(np.abs(b(x + shift) - np.conj(b(x))))))
        return res
    if isinstance(f, Convolution):
        _require_analytic(f.profile)
        s = _separation(grid, x, x)
        return float(np.max(np.abs(f.profile(s) - np.conj(f.profile(-s)))))
    raise UnsupportedRepresentationError(f"unsupported kernel {type(f).__name__}")


def scale(f, c, grid=None):
    """``c * f``."""
    if isinstance(f, LocalDiagonal):
        return LocalDiagonal(Combination(((c, f.profile),)))
    if grid is None:
        raise ValueError("a grid is needed to scale a non-local kernel")
    vals = f.values(grid)
    loc = f.local_values(grid)
    return _sampled(c * vals, grid, None if loc is None else c * loc)


def combine(f, a, g, b, grid):
    """``a * f + b * g``; stays local when both inputs are local."""
    if isinstance(f, LocalDiagonal) and isinstance(g, LocalDiagonal):
        return LocalDiagonal(Combination(((a, f.profile), (b, g.profile))))
    n = grid.n
    mat = np.zeros((n, n), dtype=complex)
    diag = None
    for k, c in ((f, a), (g, b)):
        vals = k.values(grid)
        if vals is not None:
            mat = mat + c * vals
        loc = k.local_values(grid)
        if loc is not None:
            diag = c * loc if diag is None else diag + c * loc
    return _sampled(mat, grid, diag)


def zero_kernel():
    return LocalDiagonal(Zero())
