"""Self-adjoint operators and their eigenfunction kernels.

Every continuous-spectrum operator here has eigenfunctions whose complex
conjugate factors as

    conj(u(r, x)) = amplitude(x) * exp(-i r phase(x)),

so the r-transform of a seed is a generalized Fourier integral in the
variable ``phase(x)``. The transform engine relies only on this split.
``apply`` acts on the Chebyshev representation and keeps the support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Chebyshev

from .errors import DomainError, ValidationError
from .seedfn import SeedFunction, differentiate

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _times_poly(f: SeedFunction, poly_coeffs) -> SeedFunction:
    """Multiply ``f`` by the power-series polynomial ``sum poly_coeffs[j] x**j``."""
    p = Chebyshev.cast(np.polynomial.Polynomial(poly_coeffs), domain=list(f.support))
    return SeedFunction(f.support, (f.series() * p).coef)


def _add(*terms: SeedFunction) -> SeedFunction:
    total = terms[0].series()
    for t in terms[1:]:
        total = total + t.series()
    return SeedFunction(terms[0].support, total.coef)


class Operator:
    """Base class. Subclasses define ``name``, ``apply`` and, for continuous spectra, the kernel."""

    name = "operator"
    continuous = True
    # derivative order of a single application
    order = 1

    def apply(self, f: SeedFunction) -> SeedFunction:
        raise NotImplementedError

    def apply_power(self, f: SeedFunction, n: int) -> SeedFunction:
        out = f
        for _ in range(n):
            out = self.apply(out)
        return out

    def amplitude(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def phase(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def phase_rate(self, x: np.ndarray) -> np.ndarray:
        """``|d phase/dx|``."""
        raise NotImplementedError

    def amplitude_rate(self, x: np.ndarray) -> np.ndarray:
        """Oscillation rate of the amplitude factor itself (0 if it has constant phase)."""
        return np.zeros_like(np.asarray(x, dtype=float))

    def kernel_conj(self, r: float, x: np.ndarray) -> np.ndarray:
        return self.amplitude(x) * np.exp(-1j * r * self.phase(x))

    def check_support(self, support: tuple[float, float]) -> None:
        """Raise ``DomainError`` if a seed on ``support`` is outside the operator's domain."""

    def to_dict(self) -> dict:
        return {"name": self.name}

    def __repr__(self) -> str:
        params = ", ".join(f"{k}={v!r}" for k, v in self.to_dict().items() if k != "name")
        return f"{type(self).__name__}({params})"

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.to_dict() == other.to_dict()

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.to_dict().items())))


class Momentum(Operator):
    """``A = -i d/dx`` with plane-wave eigenfunctions."""

    name = "momentum"

    def apply(self, f):
        return differentiate(f, 1).scaled(-1j)

    def amplitude(self, x):
        return np.full(np.shape(x), _INV_SQRT_2PI, dtype=complex)

    def phase(self, x):
        return np.asarray(x, dtype=float)

    def phase_rate(self, x):
        return np.ones_like(np.asarray(x, dtype=float))


@dataclass(frozen=True, eq=False, repr=False)
class PositionPlusMomentum(Operator):
    """``A = c x - i d/dx``; eigenfunctions are chirped plane waves. ``c = 0`` gives ``Momentum``."""

    c: float = 1.0
    name = "position_plus_momentum"

    def __post_init__(self):
        if not math.isfinite(self.c):
            raise ValidationError(f"c must be finite, got {self.c}")
        object.__setattr__(self, "c", float(self.c))

    def apply(self, f):
        return _add(_times_poly(f, [0.0, self.c]), differentiate(f, 1).scaled(-1j))

    def amplitude(self, x):
        x = np.asarray(x, dtype=float)
        return _INV_SQRT_2PI * np.exp(0.5j * self.c * x * x)

    def phase(self, x):
        return np.asarray(x, dtype=float)

    def phase_rate(self, x):
        return np.ones_like(np.asarray(x, dtype=float))

    def amplitude_rate(self, x):
        return np.abs(self.c * np.asarray(x, dtype=float))

    def to_dict(self):
        return {"name": self.name, "c": self.c}


class Scale(Operator):
    """``A = -i (x d/dx + 1/2)``, the dilation generator on the half line."""

    name = "scale"

    def apply(self, f):
        return _add(_times_poly(differentiate(f, 1), [0.0, 1.0]), f.scaled(0.5)).scaled(-1j)

    def amplitude(self, x):
        x = np.asarray(x, dtype=float)
        return (_INV_SQRT_2PI / np.sqrt(x)).astype(complex)

    def phase(self, x):
        return np.log(np.asarray(x, dtype=float))

    def phase_rate(self, x):
        return 1.0 / np.asarray(x, dtype=float)

    def check_support(self, support):
        lo, hi = support
        if lo < 0.0:
            raise DomainError(
                f"scale operator needs seeds supported in x >= 0; support [{lo:g}, {hi:g}] reaches x < 0"
            )


@dataclass(frozen=True, eq=False, repr=False)
class ConstantForce(Operator):
    """Constant-force Hamiltonian in momentum form, ``A = p**2 - (i/c) d/dp``.

    Seeds are momentum-space functions. Eigenfunctions are
    ``sqrt(c/2 pi) exp(i c (r p - p**3/3))``.
    """

    c: float = 1.0
    name = "constant_force"

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c > 0):
            raise ValidationError(f"constant force parameter c must be positive, got {self.c}")
        object.__setattr__(self, "c", float(self.c))

    def apply(self, f):
        return _add(_times_poly(f, [0.0, 0.0, 1.0]), differentiate(f, 1).scaled(-1j / self.c))

    def amplitude(self, p):
        p = np.asarray(p, dtype=float)
        return math.sqrt(self.c / (2 * math.pi)) * np.exp(1j * self.c * p ** 3 / 3.0)

    def phase(self, p):
        return self.c * np.asarray(p, dtype=float)

    def phase_rate(self, p):
        return np.full(np.shape(p), self.c)

    def amplitude_rate(self, p):
        return self.c * np.asarray(p, dtype=float) ** 2

    def to_dict(self):
        return {"name": self.name, "c": self.c}


@dataclass(frozen=True, eq=False, repr=False)
class HarmonicOscillator(Operator):
    """``A = -sigma**2 d2/dx2 + ((x - x0)/sigma)**2`` with eigenvalues ``2n + 1``.

    ``sigma = 1, x0 = 0`` is the textbook oscillator. Pure point spectrum, so
    there is no continuous kernel.
    """

    sigma: float = 1.0
    x0: float = 0.0
    name = "harmonic_oscillator"
    continuous = False
    order = 2

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValidationError(f"sigma must be positive, got {self.sigma}")
        object.__setattr__(self, "sigma", float(self.sigma))
        object.__setattr__(self, "x0", float(self.x0))

    def apply(self, f):
        s, x0 = self.sigma, self.x0
        quad = [x0 * x0 / s ** 2, -2 * x0 / s ** 2, 1.0 / s ** 2]
        return _add(differentiate(f, 2).scaled(-s * s), _times_poly(f, quad))

    def to_dict(self):
        return {"name": self.name, "sigma": self.sigma, "x0": self.x0}


CONTINUOUS_OPERATORS = ("momentum", "position_plus_momentum", "scale", "constant_force")

_ALIASES = {
    "momentum": "momentum",
    "ppm": "position_plus_momentum",
    "position_plus_momentum": "position_plus_momentum",
    "scale": "scale",
    "constant_force": "constant_force",
    "cf": "constant_force",
    "harmonic_oscillator": "harmonic_oscillator",
    "oscillator": "harmonic_oscillator",
}


def operator_from_name(name: str, **params) -> Operator:
    """Build an operator from its name (or a short alias) and keyword constants."""
    key = _ALIASES.get(str(name).strip().lower().replace("-", "_"))
    if key is None:
        raise ValidationError(f"unknown operator {name!r}; choose from {sorted(_ALIASES)}")
    if key == "momentum":
        return Momentum()
    if key == "position_plus_momentum":
        return PositionPlusMomentum(params.get("c", 1.0))
    if key == "scale":
        return Scale()
    if key == "constant_force":
        return ConstantForce(params.get("c", 1.0))
    return HarmonicOscillator(params.get("sigma", 1.0), params.get("x0", 0.0))


def operator_from_dict(obj: dict) -> Operator:
    params = {k: v for k, v in obj.items() if k != "name"}
    return operator_from_name(obj["name"], **params)
