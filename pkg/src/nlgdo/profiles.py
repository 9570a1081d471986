"""
Named scalar profile families.

A profile is a function of one (possibly complex) argument.  Local kernels
``f(x) delta(x - x')``, separable form factors ``u(x)`` and convolution
shapes ``g(x - x')`` are all built from these.  Analytic families evaluate at
complex points directly, which is what the complex-shift residual needs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Profile",
    "Zero",
    "Constant",
    "Linear",
    "LinearShifted",
    "Gaussian",
    "SquareWell",
    "Derivative",
    "Conjugate",
    "Reflected",
    "Product",
    "Combination",
    "profile_from_config",
    "FAMILIES",
]


def _cplx(v):
    """Accept a real number, a complex number or a ``[re, im]`` pair."""
    if isinstance(v, (list, tuple)):
        re, im = v
        v = complex(re, im)
    if isinstance(v, complex) and v.imag == 0.0:
        return float(v.real)
    return v


def _to_json(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


class Profile:
    """Base class.  Subclasses implement ``_eval(z, n)`` for derivative order n."""

    family = "profile"
    analytic = True
    breakpoints: tuple = ()

    def __call__(self, z):
        return self._eval(np.asarray(z), 0)

    def derivative(self, z, n=1):
        return self._eval(np.asarray(z), n)

    @property
    def is_real(self):
        return False

    @property
    def is_even(self):
        return False

    def to_config(self):
        raise TypeError(f"{type(self).__name__} has no config representation")


@dataclass(frozen=True)
class Zero(Profile):
    family = "zero"

    def _eval(self, z, n):
        return np.zeros_like(z, dtype=float if not np.iscomplexobj(z) else complex)

    is_real = True
    is_even = True

    def fourier(self, q):
        return np.zeros_like(np.asarray(q, dtype=float), dtype=complex)

    def square_integral(self, domain):
        return 0.0

    def to_config(self):
        return {"family": "zero"}


@dataclass(frozen=True)
class Constant(Profile):
    value: complex = 1.0
    family = "constant"

    def _eval(self, z, n):
        if n == 0:
            return np.full(z.shape, self.value, dtype=np.result_type(z, self.value))
        return np.zeros(z.shape, dtype=np.result_type(z, self.value))

    @property
    def is_real(self):
        return not isinstance(self.value, complex)

    is_even = True

    def to_config(self):
        return {"family": "constant", "value": _to_json(self.value)}


@dataclass(frozen=True)
class Linear(Profile):
    """``slope * z``; the Dirac oscillator uses ``slope = m * omega``."""

    slope: float = 1.0
    family = "linear"

    def _eval(self, z, n):
        if n == 0:
            return self.slope * z
        if n == 1:
            return np.full(z.shape, self.slope, dtype=np.result_type(z, self.slope))
        return np.zeros(z.shape, dtype=np.result_type(z, self.slope))

    @property
    def is_real(self):
        return not isinstance(self.slope, complex)

    def to_config(self):
        return {"family": "linear", "slope": _to_json(self.slope)}


@dataclass(frozen=True)
class LinearShifted(Profile):
    """``slope * (z - i a)``, the complex-shifted oscillator profile."""

    slope: float = 1.0
    a: float = 0.0
    family = "linear_shifted"

    def _eval(self, z, n):
        if n == 0:
            return self.slope * (z - 1j * self.a)
        if n == 1:
            return np.full(z.shape, self.slope, dtype=complex)
        return np.zeros(z.shape, dtype=complex)

    @property
    def is_real(self):
        return self.a == 0 and not isinstance(self.slope, complex)

    def to_config(self):
        return {"family": "linear_shifted", "slope": _to_json(self.slope), "a": self.a}


@dataclass(frozen=True)
class Gaussian(Profile):
    """``amplitude * exp(-z**2 / (2 a**2))``."""

    a: float = 1.0
    amplitude: float = 1.0
    family = "gaussian"

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("gaussian width must be positive")

    def _eval(self, z, n):
        a2 = self.a * self.a
        g = self.amplitude * np.exp(-z * z / (2.0 * a2))
        if n == 0:
            return g
        if n == 1:
            return -z / a2 * g
        if n == 2:
            return (z * z / a2 - 1.0) / a2 * g
        raise NotImplementedError("gaussian derivatives above second order")

    @property
    def is_real(self):
        return not isinstance(self.amplitude, complex)

    is_even = True

    def fourier(self, q):
        """``int g(s) exp(-i q s) ds`` over the real line."""
        q = np.asarray(q, dtype=float)
        a = self.a
        return self.amplitude * a * np.sqrt(2.0 * np.pi) * np.exp(-0.5 * a * a * q * q) + 0j

    def square_integral(self, domain):
        full = abs(self.amplitude) ** 2 * self.a * np.sqrt(np.pi)
        return 0.5 * full if domain.kind == "half" else full

    def to_config(self):
        return {"family": "gaussian", "a": self.a, "amplitude": _to_json(self.amplitude)}


@dataclass(frozen=True)
class SquareWell(Profile):
    """``-depth`` on ``[start, start + width]``, zero elsewhere.  Not analytic."""

    depth: float = 1.0
    width: float = 1.0
    start: float = 0.0
    family = "square_well"
    analytic = False

    @property
    def breakpoints(self):
        return (self.start, self.start + self.width)

    def _eval(self, z, n):
        if np.iscomplexobj(z) and np.any(np.imag(z) != 0):
            raise ValueError("square_well has no analytic continuation")
        z = np.real(z)
        if n > 0:
            return np.zeros(z.shape)
        inside = (z >= self.start) & (z <= self.start + self.width)
        return np.where(inside, -float(self.depth), 0.0)

    is_real = True

    def to_config(self):
        return {"family": "square_well", "depth": self.depth, "width": self.width, "start": self.start}


# derived profiles -------------------------------------------------------------


@dataclass(frozen=True)
class Derivative(Profile):
    base: Profile
    family = "derivative"

    @property
    def analytic(self):
        return self.base.analytic

    @property
    def breakpoints(self):
        return self.base.breakpoints

    def _eval(self, z, n):
        return self.base._eval(z, n + 1)

    @property
    def is_real(self):
        return self.base.is_real


@dataclass(frozen=True)
class Conjugate(Profile):
    """``z -> conj(base(conj(z)))``: the analytic continuation of ``base*``."""

    base: Profile
    family = "conjugate"

    @property
    def analytic(self):
        return self.base.analytic

    @property
    def breakpoints(self):
        return self.base.breakpoints

    def _eval(self, z, n):
        return np.conj(self.base._eval(np.conj(z), n))

    @property
    def is_real(self):
        return self.base.is_real

    @property
    def is_even(self):
        return self.base.is_even


@dataclass(frozen=True)
class Reflected(Profile):
    """``z -> base(-z)``."""

    base: Profile
    family = "reflected"

    @property
    def analytic(self):
        return self.base.analytic

    @property
    def breakpoints(self):
        return tuple(sorted(-b for b in self.base.breakpoints))

    def _eval(self, z, n):
        return (-1) ** n * self.base._eval(-z, n)

    @property
    def is_real(self):
        return self.base.is_real

    @property
    def is_even(self):
        return self.base.is_even


@dataclass(frozen=True)
class Product(Profile):
    left: Profile
    right: Profile
    family = "product"

    @property
    def analytic(self):
        return self.left.analytic and self.right.analytic

    @property
    def breakpoints(self):
        return tuple(sorted(set(self.left.breakpoints) | set(self.right.breakpoints)))

    def _eval(self, z, n):
        p, q = self.left, self.right
        if n == 0:
            return p._eval(z, 0) * q._eval(z, 0)
        if n == 1:
            return p._eval(z, 1) * q._eval(z, 0) + p._eval(z, 0) * q._eval(z, 1)
        raise NotImplementedError("product profiles support first derivatives only")

    @property
    def is_real(self):
        return self.left.is_real and self.right.is_real


@dataclass(frozen=True)
class Combination(Profile):
    """``sum(c_k * p_k)``."""

    terms: tuple
    family = "combination"

    @property
    def analytic(self):
        return all(p.analytic for _, p in self.terms)

    @property
    def breakpoints(self):
        pts = set()
        for _, p in self.terms:
            pts |= set(p.breakpoints)
        return tuple(sorted(pts))

    def _eval(self, z, n):
        out = 0.0
        for c, p in self.terms:
            out = out + c * p._eval(z, n)
        return out + np.zeros(z.shape)

    @property
    def is_real(self):
        return all(not isinstance(c, complex) and p.is_real for c, p in self.terms)


FAMILIES = {
    "zero": Zero,
    "constant": Constant,
    "linear": Linear,
    "linear_shifted": LinearShifted,
    "gaussian": Gaussian,
    "square_well": SquareWell,
}

_COMPLEX_FIELDS = {"value", "slope", "amplitude"}


def profile_from_config(cfg):
    """Build a profile from ``{"family": name, **params}``."""
    cfg = dict(cfg)
    try:
        cls = FAMILIES[cfg.pop("family")]
    except KeyError as exc:
        raise ValueError(f"unknown profile family {exc.args[0]!r}; known: {sorted(FAMILIES)}") from None
    kwargs = {k: (_cplx(v) if k in _COMPLEX_FIELDS else float(v)) for k, v in cfg.items()}
    return cls(**kwargs)
