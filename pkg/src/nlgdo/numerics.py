"""
Grids, quadrature, finite-difference differentiation and a dense eigensolver.

Every physics module in the package discretizes on a :class:`Grid`: a
truncated half line ``[0, L]`` or full line ``[-L, L]`` with quadrature
weights.  Differentiation matrices are built from Fornberg stencils on the
(possibly nonuniform) nodes, so the same code serves Gauss-Legendre and
uniform grids.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

__all__ = [
    "HalfLine",
    "FullLine",
    "Grid",
    "EigenSolverError",
    "make_grid",
    "fornberg_weights",
    "derivative_matrix",
    "second_derivative_matrix",
    "active_nodes",
    "eig_dense",
    "differentiate",
    "cumulative_integral_matrix",
]

RULES = ("gauss_legendre", "uniform_trapezoid", "uniform_periodic")
BOUNDARY_CONDITIONS = ("none", "dirichlet", "periodic")


class EigenSolverError(RuntimeError):
    """Dense eigendecomposition did not converge or failed its residual check."""


@dataclass(frozen=True)
class HalfLine:
    L: float

    kind = "half"

    @property
    def bounds(self):
        return 0.0, float(self.L)


@dataclass(frozen=True)
class FullLine:
    L: float

    kind = "full"

    @property
    def bounds(self):
        return -float(self.L), float(self.L)


@dataclass(frozen=True, eq=False)
class Grid:
    """Nodes and weights on a truncated domain.

    Parameters
    ----------
    domain : HalfLine or FullLine
    rule : str
        Quadrature rule that produced the nodes.
    nodes, weights : ndarray
        Strictly increasing positions and positive weights (length units).
    """

    domain: HalfLine | FullLine
    rule: str
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.nodes.size

    @property
    def periodic(self) -> bool:
        return self.rule == "uniform_periodic"

    @property
    def measure(self) -> float:
        a, b = self.domain.bounds
        return b - a

    def integrate(self, values):
        return np.tensordot(self.weights, values, axes=([0], [0]))

    def digest(self) -> str:
        """Short content hash used to tag output bundles."""
        h = hashlib.sha256()
        h.update(self.rule.encode())
        h.update(np.ascontiguousarray(self.nodes).tobytes())
        h.update(np.ascontiguousarray(self.weights).tobytes())
        return h.hexdigest()[:16]

    def same_as(self, other: "Grid") -> bool:
        return other is self or (
            self.rule == other.rule
            and self.n == other.n
            and np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.weights, other.weights)
        )


def make_grid(domain, n, rule="gauss_legendre"):
    """Build a quadrature grid on ``domain``.

    ``uniform_trapezoid`` includes both endpoints; ``uniform_periodic`` drops
    the right endpoint and gives every node the weight ``2L/n`` (exact
    trapezoid rule for periodic integrands).
    """
    n = int(n)
    if n < 8:
        raise ValueError(f"grid needs at least 8 nodes, got {n}")
    if not np.isfinite(domain.L) or domain.L <= 0:
        raise ValueError(f"domain length must be positive, got L={domain.L}")
    a, b = domain.bounds
    if rule == "gauss_legendre":
        t, w = np.polynomial.legendre.leggauss(n)
        nodes = 0.5 * (b - a) * t + 0.5 * (b + a)
        weights = 0.5 * (b - a) * w
    elif rule == "uniform_trapezoid":
        nodes = np.linspace(a, b, n)
        h = (b - a) / (n - 1)
        weights = np.full(n, h)
        weights[0] = weights[-1] = 0.5 * h
    elif rule == "uniform_periodic":
        h = (b - a) / n
        nodes = a + h * np.arange(n)
        weights = np.full(n, h)
    else:
        raise ValueError(f"unknown quadrature rule {rule!r}; expected one of {RULES}")
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return Grid(domain=domain, rule=rule, nodes=nodes, weights=weights)


def fornberg_weights(z, x, m):
    """Finite-difference weights for derivatives ``0..m`` at ``z``.

    Fornberg's recursion; ``x`` may be arbitrarily spaced.  Returns an array of
    shape ``(m + 1, len(x))``.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    c = np.zeros((m + 1, n))
    c1, c4 = 1.0, x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2, c5, c4 = 1.0, c4, x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[k, i] = c1 * (k * c[k - 1, i - 1] - c5 * c[k, i - 1]) / c2
                c[0, i] = -c1 * c5 * c[0, i - 1] / c2
            for k in range(mn, 0, -1):
                c[k, j] = (c4 * c[k, j] - k * c[k - 1, j]) / c3
            c[0, j] = c4 * c[0, j] / c3
        c1 = c2
    return c


def _walls(grid, bc):
    if bc == "dirichlet":
        return grid.domain.bounds
    return ()


def active_nodes(grid, bc="none"):
    """Indices of nodes that carry unknowns (Dirichlet wall nodes excluded)."""
    walls = _walls(grid, bc)
    scale = max(grid.measure, 1.0)
    keep = np.ones(grid.n, dtype=bool)
    for xw in walls:
        keep &= np.abs(grid.nodes - xw) > 1e-13 * scale
    return np.flatnonzero(keep)


def derivative_matrix(grid, deriv, order=2, bc="none"):
    """Dense matrix of the ``deriv``-th derivative from ``order + 1``-point stencils.

    Interior stencils are centred.  ``bc="none"`` switches to one-sided stencils
    at the ends; ``"dirichlet"`` extends the function oddly across each wall
    (rows and columns of nodes sitting on a wall are zero); ``"periodic"`` wraps
    the stencil around a ``uniform_periodic`` grid.
    """
    if bc not in BOUNDARY_CONDITIONS:
        raise ValueError(f"unknown boundary condition {bc!r}")
    width = int(order) + 1
    if deriv == 2 and width % 2 == 0:
        width += 1
    x = grid.nodes
    n = grid.n
    if width > n:
        raise ValueError("stencil wider than the grid")
    D = np.zeros((n, n))

    if bc == "periodic":
        if not grid.periodic:
            raise ValueError("periodic differentiation needs a uniform_periodic grid")
        h = x[1] - x[0]
        half = width // 2
        offsets = np.arange(-half, width - half)
        w = fornberg_weights(0.0, offsets * h, deriv)[deriv]
        for i in range(n):
            D[i, (i + offsets) % n] += w
        return D

    # candidate points: real nodes plus odd images across Dirichlet walls
    pos = [x]
    col = [np.arange(n)]
    sgn = [np.ones(n)]
    walls = _walls(grid, bc)
    scale = max(grid.measure, 1.0)
    on_wall = np.zeros(n, dtype=bool)
    for xw in walls:
        hit = np.abs(x - xw) <= 1e-13 * scale
        on_wall |= hit
        img = 2.0 * xw - x[~hit]
        pos.append(img)
        col.append(np.flatnonzero(~hit))
        sgn.append(-np.ones(img.size))
        if not hit.any():
            # wall point itself, value pinned to zero
            pos.append(np.array([xw]))
            col.append(np.array([-1]))
            sgn.append(np.zeros(1))
    pos = np.concatenate(pos)
    col = np.concatenate(col)
    sgn = np.concatenate(sgn)
    srt = np.argsort(pos, kind="stable")
    pos, col, sgn = pos[srt], col[srt], sgn[srt]
    where = np.empty(n, dtype=int)
    real = col >= 0
    real_idx = np.flatnonzero(real & (sgn > 0))
    where[col[real_idx]] = real_idx
    m = pos.size

    for i in range(n):
        if on_wall[i]:
            continue
        # contiguous window in the extended, position-sorted point list
        c = where[i]
        lo = min(max(c - width // 2, 0), m - width)
        idx = np.arange(lo, lo + width)
        w = fornberg_weights(x[i], pos[idx], deriv)[deriv]
        for wk, k in zip(w * sgn[idx], col[idx]):
            if k >= 0 and not on_wall[k]:
                D[i, k] += wk
    return D


def second_derivative_matrix(grid, bc="none", order=2):
    """Matrix ``D`` with ``(D @ psi)[i] ~ psi''(x_i)``.

    ``order=2`` gives the three-point (Fornberg) stencil; larger even orders
    widen the stencil for higher accuracy.
    """
    return derivative_matrix(grid, 2, order=order, bc=bc)


def eig_dense(M, check=True, tol=1e-10):
    """Eigenpairs of a dense (possibly non-Hermitian) matrix.

    Eigenvalues are sorted by real part, ties broken by imaginary part.  Each
    pair is checked against ``||Mv - lam v|| / (||M|| ||v||) < tol``.

    Raises
    ------
    EigenSolverError
        On non-finite input, LAPACK non-convergence or a failed residual check.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise EigenSolverError("matrix has non-finite entries")
    try:
        vals, vecs = scipy.linalg.eig(M)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigenSolverError(f"eigensolver failed: {exc}") from exc
    order = np.lexsort((vals.imag, vals.real))
    vals = vals[order]
    vecs = vecs[:, order]
    if check:
        norm = np.linalg.norm(M, 2) if M.shape[0] <= 64 else np.linalg.norm(M, "fro")
        res = np.linalg.norm(M @ vecs - vecs * vals, axis=0)
        res /= max(norm, np.finfo(float).tiny) * np.linalg.norm(vecs, axis=0)
        if np.any(res > tol):
            raise EigenSolverError(f"eigenpair residual {res.max():.3e} exceeds {tol:g}")
    return vals, vecs


def differentiate(x, y, order=8):
    """First derivative of samples ``y(x)`` with one-sided stencils at the ends.

    NaN entries split the data into independent runs; each run is
    differentiated on its own and runs shorter than two points give NaN.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y)
    out = np.full(y.shape, np.nan, dtype=np.result_type(y, float))
    ok = np.isfinite(y)
    edges = np.flatnonzero(np.diff(np.concatenate(([0], ok.astype(int), [0]))))
    for lo, hi in zip(edges[::2], edges[1::2]):
        m = hi - lo
        if m < 2:
            continue
        width = min(order + 1, m)
        for i in range(lo, hi):
            s = min(max(i - width // 2, lo), hi - width)
            w = fornberg_weights(x[i], x[s:s + width], 1)[1]
            out[i] = w @ y[s:s + width]
    return out


def cumulative_integral_matrix(grid):
    """Matrix ``C`` with ``(C @ g)[i] ~ int_{x_i}^{b} g(y) dy`` on a Gauss-Legendre grid.

    The samples are expanded in Legendre polynomials and integrated exactly, so
    the result is spectrally accurate for smooth ``g``.
    """
    if grid.rule != "gauss_legendre":
        raise ValueError("cumulative integration needs a gauss_legendre grid")
    n = grid.n
    a, b = grid.domain.bounds
    t = (2.0 * grid.nodes - (a + b)) / (b - a)
    P = np.zeros((n + 1, n))
    P[0] = 1.0
    P[1] = t
    for m in range(1, n):
        P[m + 1] = ((2 * m + 1) * t * P[m] - m * P[m - 1]) / (m + 1)
    tw = 2.0 * grid.weights / (b - a)
    # Legendre coefficients of the interpolant: c = T @ g
    T = ((2 * np.arange(n) + 1) / 2.0)[:, None] * P[:n] * tw[None, :]
    # F[i, m] = int_{-1}^{t_i} P_m
    F = np.zeros((n, n))
    F[:, 0] = t + 1.0
    for m in range(1, n):
        F[:, m] = (P[m + 1] - P[m - 1]) / (2 * m + 1)
    left = F @ T
    total = 2.0 * T[0]
    return 0.5 * (b - a) * (total[None, :] - left)
