"""Finite Blaschke products on the unit disc.

A pole configuration is an ordered list of points of the open unit disc;
a repeated entry is a pole of higher multiplicity.  The product

    B(z) = prod_i (lam_i - z) / (1 - conj(lam_i) z)

is unimodular on the unit circle and vanishes exactly at the listed points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .config import TOL
from .errors import InvalidArgumentError, PoleEvaluationError

# evaluation is allowed on the closed disc, plus this much roundoff
CLOSED_DISC_SLACK = 1e-9

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class DiscPoint:
    value: complex

    def __post_init__(self):
        v = complex(self.value)
        if not (abs(v) < 1.0):
            raise InvalidArgumentError(f"point {v} is not in the open unit disc")
        object.__setattr__(self, "value", v)

    def __complex__(self):
        return self.value

    def __abs__(self):
        return abs(self.value)


PoleLike = Union[complex, float, int, DiscPoint]


@dataclass(frozen=True, init=False)
class PoleConfiguration:
    """Ordered poles in the open disc; ``n`` and ``r`` are derived, never passed in."""

    poles: tuple

    def __init__(self, poles: Iterable[PoleLike]):
        pts = tuple(DiscPoint(complex(p)) for p in poles)
        if not pts:
            raise InvalidArgumentError("a pole configuration needs at least one pole")
        object.__setattr__(self, "poles", tuple(p.value for p in pts))

    @classmethod
    def confluent(cls, n: int, r: float) -> "PoleConfiguration":
        """n copies of the real point r, i.e. B = b_r**n."""
        if n < 1:
            raise InvalidArgumentError("n must be >= 1")
        return cls([r] * n)

    @classmethod
    def zeros(cls, n: int) -> "PoleConfiguration":
        return cls.confluent(n, 0.0)

    @property
    def n(self) -> int:
        return len(self.poles)

    @property
    def r(self) -> float:
        return max(abs(p) for p in self.poles)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.poles, dtype=complex)

    def common_pole(self):
        """The shared pole if all poles coincide, else None."""
        first = self.poles[0]
        return first if all(p == first for p in self.poles) else None


def _check_domain(z):
    if np.any(np.abs(z) > 1.0 + CLOSED_DISC_SLACK):
        raise InvalidArgumentError("Blaschke products are only evaluated on the closed disc")


def factor_and_derivative(lam: complex, z):
    """Value and derivative of the single factor b_lam at z.

    b_lam'(z) = (|lam|^2 - 1) / (1 - conj(lam) z)^2
    """
    denom = 1.0 - np.conj(lam) * z
    if np.any(np.abs(denom) < TOL.pole_guard):
        raise PoleEvaluationError(f"evaluation at the pole of b_{lam}")
    return (lam - z) / denom, (abs(lam) ** 2 - 1.0) / denom**2


def blaschke_eval(config: PoleConfiguration, z):
    """B(z) for scalar or array ``z`` with |z| <= 1."""
    z = np.asarray(z, dtype=complex)
    _check_domain(z)
    out = np.ones_like(z)
    for lam in config.poles:
        b, _ = factor_and_derivative(lam, z)
        out = out * b
    return out[()] if out.ndim == 0 else out


def blaschke_value_and_derivative(config: PoleConfiguration, z):
    """(B(z), B'(z)) by forward product-rule accumulation.

    No division by B, so the derivative is exact at the zeros of B.
    """
    z = np.asarray(z, dtype=complex)
    _check_domain(z)
    val = np.ones_like(z)
    der = np.zeros_like(z)
    for lam in config.poles:
        b, db = factor_and_derivative(lam, z)
        der = der * b + val * db
        val = val * b
    if val.ndim == 0:
        return val[()], der[()]
    return val, der


def blaschke_derivative(config: PoleConfiguration, z):
    return blaschke_value_and_derivative(config, z)[1]


def _abs_derivative_at_angle(config, theta):
    return abs(blaschke_derivative(config, complex(math.cos(theta), math.sin(theta))))


def golden_section_max(func, lo: float, hi: float, tol: float = TOL.golden_section):
    """Maximise a unimodal ``func`` on [lo, hi]; returns (argmax, max)."""
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = func(c), func(d)
    while b - a > tol * max(1.0, abs(a) + abs(b)):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = func(d)
    x = 0.5 * (a + b)
    return x, func(x)


def sup_norm_derivative_on_circle(config: PoleConfiguration, grid_size: int) -> float:
    """Lower estimate of sup_{|z|=1} |B'(z)|.

    Grid policy: evaluate |B'| at ``grid_size`` equispaced angles, then run one
    golden-section pass on the two cells adjacent to the best grid angle.  The
    result is the larger of the grid maximum and the refined value, so it never
    exceeds the true supremum (up to roundoff) and never decreases when the
    grid is refined by doubling.
    """
    if grid_size < 64:
        raise InvalidArgumentError("grid_size must be at least 64")
    theta = 2.0 * np.pi * np.arange(grid_size) / grid_size
    values = np.abs(blaschke_derivative(config, np.exp(1j * theta)))
    j = int(np.argmax(values))
    grid_max = float(values[j])
    h = 2.0 * np.pi / grid_size
    _, refined = golden_section_max(
        lambda t: _abs_derivative_at_angle(config, t), theta[j] - h, theta[j] + h
    )
    return max(grid_max, float(refined))
