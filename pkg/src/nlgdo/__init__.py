"""Nonlocal generalized Dirac oscillator: partner kernels, spectra and local-equivalent mapping."""

__version__ = "0.1.0"

from .kernels import (  # noqa: E402
    Convolution,
    GridSampled,
    LocalDiagonal,
    PhysParams,
    SeparableRank1,
)
from .numerics import FullLine, HalfLine, make_grid  # noqa: E402
from .partner import build_partners, spectrum  # noqa: E402

__all__ = [
    "Convolution",
    "GridSampled",
    "LocalDiagonal",
    "PhysParams",
    "SeparableRank1",
    "FullLine",
    "HalfLine",
    "make_grid",
    "build_partners",
    "spectrum",
    "__version__",
]
