"""Circle quadrature and Hardy-space norms.

Convention: the unit circle carries the normalised arc-length measure ``m``,
so ``||z**k||_2 = 1`` and the H^2 norm is the l^2 norm of Taylor coefficients.
Inner products are linear in the first argument and conjugate-linear in the
second.

Taylor coefficients are read off by the trapezoidal rule on M-th roots of
unity, which is the DFT ``fft(samples) / M``.  For a function analytic in
``|z| < rho`` the k-th coefficient picks up an aliasing error of order
``rho**-(M - k)``, so M is chosen from the pole geometry (see
:func:`quadrature_size`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .config import TOL
from .errors import AnalyticityError, InvalidArgumentError

MIN_SAMPLES = 64
DEFAULT_SAMPLES = 4096


def quadrature_size(n: int, r: float) -> int:
    """Smallest power of two >= max(4096, 64 n / (1 - r)).

    Coefficients of functions in a model space with poles of modulus <= r
    decay like r**k after a transient of length ~ n (1 + r) / (1 - r); this
    size leaves the aliased tail well below double-precision roundoff.
    """
    target = max(DEFAULT_SAMPLES, 64.0 * n / (1.0 - r))
    return 1 << int(math.ceil(math.log2(target)))


@dataclass(frozen=True)
class QuadratureSpec:
    sample_count: int = DEFAULT_SAMPLES
    tolerance: float = TOL.analyticity

    def __post_init__(self):
        m = self.sample_count
        if m < MIN_SAMPLES or m & (m - 1):
            raise InvalidArgumentError("sample_count must be a power of two >= 64")

    @classmethod
    def for_model_space(cls, n: int, r: float, tolerance: float = TOL.analyticity):
        return cls(quadrature_size(n, r), tolerance)

    def nodes(self) -> np.ndarray:
        return roots_of_unity(self.sample_count)


def roots_of_unity(m: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(m) / m)


@dataclass(frozen=True, eq=False)
class AnalyticFunction:
    """A disc-analytic function: evaluator, circle samples and Taylor coefficients.

    ``taylor[k]`` approximates f^(k)(0) / k! for k < M; ``samples`` are the
    values at the M-th roots of unity that produced it.
    """

    evaluator: Callable
    taylor: np.ndarray
    samples: np.ndarray
    decay_radius: float = math.inf
    aliasing_bound: float = 0.0
    derivative_evaluator: Optional[Callable] = field(default=None, repr=False)

    @property
    def truncation_length(self) -> int:
        return len(self.taylor)

    @property
    def sample_count(self) -> int:
        return len(self.samples)

    def __call__(self, z):
        return self.evaluator(z)


def analyze(
    evaluator: Callable,
    spec: QuadratureSpec = QuadratureSpec(),
    decay_radius: float = math.inf,
    derivative_evaluator: Optional[Callable] = None,
) -> AnalyticFunction:
    """Sample ``evaluator`` on the circle and extract its Taylor coefficients.

    Raises AnalyticityError when any negative-frequency bin (index > M/2)
    exceeds ``spec.tolerance * max(1, sup |f|)``.
    """
    m = spec.sample_count
    samples = np.asarray(evaluator(spec.nodes()), dtype=complex)
    if samples.shape != (m,):
        samples = np.broadcast_to(samples, (m,)).astype(complex)
    if not np.all(np.isfinite(samples)):
        raise AnalyticityError("evaluator is not finite on the circle grid")
    taylor = np.fft.fft(samples) / m
    scale = max(1.0, float(np.max(np.abs(samples))))
    leak = float(np.max(np.abs(taylor[m // 2 + 1:]))) if m > 2 else 0.0
    if leak > spec.tolerance * scale:
        raise AnalyticityError(
            f"negative-frequency content {leak:.3e} exceeds {spec.tolerance:.1e} "
            f"(scale {scale:.3e}); function not in H^2 or M={m} too small"
        )
    alias = 0.0 if math.isinf(decay_radius) else scale * decay_radius ** (-m)
    return AnalyticFunction(evaluator, taylor, samples, decay_radius, alias,
                            derivative_evaluator)


def from_taylor(taylor) -> AnalyticFunction:
    """Wrap a coefficient array (length a power of two >= 64) as an AnalyticFunction."""
    taylor = np.asarray(taylor, dtype=complex)
    m = len(taylor)
    QuadratureSpec(m)  # validates the length
    samples = np.fft.ifft(taylor) * m

    def evaluator(z, _c=taylor):
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), _c)

    return AnalyticFunction(evaluator, taylor, samples)


def _padded(a: np.ndarray, m: int) -> np.ndarray:
    if len(a) == m:
        return a
    out = np.zeros(m, dtype=complex)
    out[: len(a)] = a
    return out


def inner_product(f: AnalyticFunction, g: AnalyticFunction) -> complex:
    """(f, g)_{H^2} = sum_k f^(k) conj(g^(k)); shorter expansions are zero-padded."""
    m = max(f.truncation_length, g.truncation_length)
    return complex(np.sum(_padded(f.taylor, m) * np.conj(_padded(g.taylor, m))))


def szego_kernel(lam: complex) -> Callable:
    """Evaluator of the reproducing kernel k_lam(z) = 1 / (1 - conj(lam) z)."""
    lam = complex(lam)

    def k(z):
        return 1.0 / (1.0 - np.conj(lam) * np.asarray(z, dtype=complex))

    return k


def szego_inner_oracle(a: complex, b: complex) -> complex:
    """Closed form (k_a, k_b) = 1 / (1 - conj(a) b)."""
    a, b = complex(a), complex(b)
    if abs(a) >= 1 or abs(b) >= 1:
        raise InvalidArgumentError("kernel points must lie in the open disc")
    return 1.0 / (1.0 - a.conjugate() * b)


@dataclass(frozen=True)
class Besov:
    """B^s_{2,2}: weights (k + 1)**(2 s) on |f^(k)|**2.  s = 0 is H^2."""

    s: float


H2 = "H2"
H1 = "H1"
WIENER = "Wiener"

Space = Union[str, Besov]


def parse_space(text: str) -> Space:
    """'H2', 'H1', 'Wiener', or 'Besov(s)' / 'besov:s'."""
    t = text.strip()
    low = t.lower()
    if low in ("h2", "hardy"):
        return H2
    if low == "h1":
        return H1
    if low in ("wiener", "w"):
        return WIENER
    for prefix in ("besov(", "besov:", "besov="):
        if low.startswith(prefix):
            return Besov(float(low[len(prefix):].rstrip(")")))
    raise InvalidArgumentError(f"unknown function space {text!r}")


def space_norm(f: AnalyticFunction, space: Space) -> float:
    c = f.taylor
    if isinstance(space, Besov):
        if space.s == 0:
            return float(np.linalg.norm(c))
        w = np.arange(1, len(c) + 1, dtype=float) ** space.s
        return float(np.linalg.norm(w * c))
    if space == H2:
        return float(np.linalg.norm(c))
    if space == WIENER:
        return float(np.sum(np.abs(c)))
    if space == H1:
        return float(np.mean(np.abs(f.samples)))
    raise InvalidArgumentError(f"unknown function space {space!r}")


def derivative(f: AnalyticFunction) -> AnalyticFunction:
    """f' via the coefficient shift g^(k) = (k + 1) f^(k + 1).

    Circle samples of f' are recomputed from the shifted coefficients.  If f
    carries an analytic derivative evaluator it becomes the evaluator of f';
    otherwise the truncated series is evaluated.
    """
    c = f.taylor
    m = len(c)
    g = np.zeros(m, dtype=complex)
    g[:-1] = np.arange(1, m) * c[1:]
    samples = np.fft.ifft(g) * m
    if f.derivative_evaluator is not None:
        evaluator = f.derivative_evaluator
    else:
        def evaluator(z, _g=g):
            return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), _g)
    return AnalyticFunction(evaluator, g, samples, f.decay_radius, f.aliasing_bound)
