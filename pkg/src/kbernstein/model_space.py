"""Malmquist-Walsh basis of K_B and the norm of differentiation on it.

For poles lam_1..lam_n (repetition allowed) the functions

    e_k(z) = sqrt(1 - |lam_k|^2) / (1 - conj(lam_k) z) * prod_{j<k} b_{lam_j}(z)

form an orthonormal basis of K_B = H^2 (-) B H^2.  With f = sum_k a_k e_k we
have ||f'||^2 = a^H G a where G[j, k] = (e_k', e_j'), hence
||D||_{K_B -> H^2} = sqrt(lambda_max(G)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
import scipy.linalg
from scipy.linalg.blas import zherk

from .blaschke import PoleConfiguration, blaschke_eval, factor_and_derivative
from .config import TOL
from .errors import ConvergenceError, InvalidArgumentError
from .hardy import AnalyticFunction, QuadratureSpec, analyze

# grid points per block when streaming over the circle
CHUNK = 8192


def default_spec(config: PoleConfiguration) -> QuadratureSpec:
    return QuadratureSpec.for_model_space(config.n, config.r)


class MalmquistWalshBasis:
    """Orthonormal basis e_1..e_n of K_B in the order of ``config.poles``.

    Values and derivatives are evaluated in closed form; derivatives use the
    product rule on the partial Blaschke products, never differencing.
    """

    def __init__(self, config: PoleConfiguration, spec: Optional[QuadratureSpec] = None):
        self.config = config
        self.spec = spec if spec is not None else default_spec(config)
        self._poles = config.as_array()
        self._scale = np.sqrt(1.0 - np.abs(self._poles) ** 2)

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def decay_radius(self) -> float:
        r = self.config.r
        return math.inf if r == 0 else 1.0 / r

    def evaluate(self, z, derivatives: bool = True):
        """Arrays (E, dE) of shape (n, len(z)) with E[k] = e_{k+1}(z)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        n = self.n
        E = np.empty((n, z.size), dtype=complex)
        dE = np.empty((n, z.size), dtype=complex) if derivatives else None
        P = np.ones_like(z)
        dP = np.zeros_like(z)
        for k, lam in enumerate(self._poles):
            kern = 1.0 / (1.0 - np.conj(lam) * z)
            E[k] = self._scale[k] * kern * P
            if derivatives:
                dE[k] = self._scale[k] * kern * (np.conj(lam) * kern * P + dP)
            b, db = factor_and_derivative(lam, z)
            if derivatives:
                dP = dP * b + P * db
            P = P * b
        return E, dE

    def combination(self, coords, z, derivative: bool = False):
        """sum_k coords[k] e_{k+1}(z) (or its derivative), streamed over poles."""
        coords = np.asarray(coords, dtype=complex)
        if coords.shape != (self.n,):
            raise InvalidArgumentError(f"expected {self.n} coordinates")
        z = np.asarray(z, dtype=complex)
        shape = z.shape
        z = np.atleast_1d(z).ravel()
        out = np.zeros_like(z)
        P = np.ones_like(z)
        dP = np.zeros_like(z)
        last = int(np.max(np.nonzero(coords)[0])) if np.any(coords) else -1
        for k, lam in enumerate(self._poles[: last + 1]):
            kern = 1.0 / (1.0 - np.conj(lam) * z)
            if coords[k] != 0:
                if derivative:
                    out += coords[k] * self._scale[k] * kern * (np.conj(lam) * kern * P + dP)
                else:
                    out += coords[k] * self._scale[k] * kern * P
            b, db = factor_and_derivative(lam, z)
            if derivative:
                dP = dP * b + P * db
            P = P * b
        return out.reshape(shape) if shape else out[0]

    def function(self, coords) -> AnalyticFunction:
        """sum_k coords[k] e_{k+1} as an analysed function with analytic derivative."""
        coords = np.array(coords, dtype=complex)
        return analyze(
            lambda z: self.combination(coords, z),
            self.spec,
            self.decay_radius,
            derivative_evaluator=lambda z: self.combination(coords, z, derivative=True),
        )

    def element(self, k: int) -> AnalyticFunction:
        """e_{k+1} (0-based ``k``)."""
        coords = np.zeros(self.n, dtype=complex)
        coords[k] = 1.0
        return self.function(coords)

    @cached_property
    def elements(self) -> list:
        return [self.element(k) for k in range(self.n)]

    @cached_property
    def element_derivatives(self) -> list:
        def make(k):
            coords = np.zeros(self.n, dtype=complex)
            coords[k] = 1.0
            return lambda z: self.combination(coords, z, derivative=True)
        return [make(k) for k in range(self.n)]


def build_basis(config: PoleConfiguration, spec: Optional[QuadratureSpec] = None):
    return MalmquistWalshBasis(config, spec)


def _circle_hermitian_gram(basis: MalmquistWalshBasis, derivatives: bool) -> np.ndarray:
    """mean over the circle grid of conj(F_j) F_k, streamed in blocks."""
    m = basis.spec.sample_count
    n = basis.n
    acc = np.zeros((n, n), dtype=complex)
    for start in range(0, m, CHUNK):
        idx = np.arange(start, min(start + CHUNK, m))
        z = np.exp(2j * np.pi * idx / m)
        E, dE = basis.evaluate(z, derivatives=derivatives)
        F = dE if derivatives else E
        # upper triangle of conj(F) @ F.T
        acc = zherk(1.0, np.conj(F), beta=1.0, c=acc, overwrite_c=1)
    upper = np.triu(acc)
    full = upper + np.conj(np.triu(acc, 1)).T
    return full / m


def basis_gram(basis: MalmquistWalshBasis) -> np.ndarray:
    """Matrix of (e_k, e_j); the identity for an orthonormal basis."""
    return _circle_hermitian_gram(basis, derivatives=False)


@dataclass(frozen=True)
class DerivativeGram:
    matrix: np.ndarray
    config: PoleConfiguration

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def hermitian_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.matrix))


def derivative_gram(basis: MalmquistWalshBasis) -> DerivativeGram:
    """G[j, k] = (e_{k+1}', e_{j+1}')_{H^2}, so that ||sum a_k e_k'||^2 = a^H G a."""
    return DerivativeGram(_circle_hermitian_gram(basis, derivatives=True), basis.config)


@dataclass(frozen=True)
class OperatorNormResult:
    norm: float
    lambda_max: float
    iterations: int
    residual: float
    eigenvector: Optional[np.ndarray] = None
    gram_size: int = 0


def largest_eigenpair(G: np.ndarray, tol: float = TOL.eigen_residual, max_iter=None):
    """Top eigenpair of a Hermitian PSD matrix.

    A LAPACK tridiagonal solve gives the pair; if its relative residual
    ||G v - lam v|| / lam is above ``tol`` the pair is polished by power
    iteration, capped at 10 n steps.  Returns (lam, v, iterations, residual).
    """
    n = G.shape[0]
    cap = 10 * n if max_iter is None else max_iter
    w, V = scipy.linalg.eigh(G, subset_by_index=[n - 1, n - 1], driver="evr")
    lam = float(w[0])
    v = V[:, 0]

    def rel_residual(lam, v):
        res = float(np.linalg.norm(G @ v - lam * v))
        return res / lam if lam > 0 else res

    residual = rel_residual(lam, v)
    it = 0
    while residual > tol and it < cap:
        y = G @ v
        v = y / np.linalg.norm(y)
        lam = float(np.real(np.vdot(v, G @ v)))
        residual = rel_residual(lam, v)
        it += 1
    if residual > tol:
        raise ConvergenceError(
            f"eigen residual {residual:.3e} above {tol:.1e} after {it} iterations"
        )
    return lam, v, it, residual


def norm_from_gram(G: np.ndarray) -> OperatorNormResult:
    lam, v, it, res = largest_eigenpair(G)
    lam = max(lam, 0.0)
    return OperatorNormResult(math.sqrt(lam), lam, it, res, v, G.shape[0])


def operator_norm(config: PoleConfiguration, spec: Optional[QuadratureSpec] = None):
    """||D||_{K_B -> H^2} as sqrt of the top eigenvalue of the derivative Gram."""
    return norm_from_gram(derivative_gram(build_basis(config, spec)).matrix)


# -- confluent configuration B = b_r**n -------------------------------------


def confluent_radius(config: PoleConfiguration) -> float:
    """The common real pole r >= 0, or InvalidArgumentError."""
    lam = config.common_pole()
    if lam is None or lam.imag != 0 or lam.real < 0:
        raise InvalidArgumentError("all poles must equal one real r in [0, 1)")
    return float(lam.real)


def alternating_coordinates(n: int, s: int) -> np.ndarray:
    """Coordinates of e_n - e_{n-1} + ... + e_{n-s-2} (s + 3 alternating terms)."""
    if s < 0 or s % 2:
        raise InvalidArgumentError("s must be a non-negative even integer")
    if n < s + 3:
        raise InvalidArgumentError(f"need n >= s + 3, got n={n}, s={s}")
    a = np.zeros(n)
    for k in range(s + 3):
        a[n - 1 - k] = (-1.0) ** k
    return a


def test_function(config: PoleConfiguration, s: int,
                  spec: Optional[QuadratureSpec] = None) -> AnalyticFunction:
    """f = sum_{k=0}^{s+2} (-1)**k e_{n-k} for a confluent configuration."""
    confluent_radius(config)
    coords = alternating_coordinates(config.n, s)
    return build_basis(config, spec).function(coords)


test_function.__test__ = False  # not a pytest test despite the name


def transformed_polynomials(r: float, coords):
    """Coefficient vectors (P, Q), both of length n + 1, such that

        ||f'||^2 = ||Q - P||^2 / (1 - r^2)^2,
        P(v) = (1 - r v)^2 sum_{k=0}^{n-2} (k + 1) a_{k+2} v^k,
        Q(v) = r (1 - r v) sum_{k=0}^{n-1} a_{k+1} v^k,

    with a_k = (f, e_k) in the confluent basis (pulled back by v = b_r(z)).
    """
    a = np.asarray(coords, dtype=complex)
    n = len(a)
    deriv = np.arange(1, n) * a[1:]  # (k + 1) a_{k+2}, k = 0..n-2
    P = np.zeros(n + 1, dtype=complex)
    P[: n + 1] = np.convolve([1.0, -2.0 * r, r * r], deriv)[: n + 1] if n > 1 else 0.0
    Q = np.zeros(n + 1, dtype=complex)
    Q[: n + 1] = r * np.convolve([1.0, -r], a)
    return P, Q


def expanded_derivative_coefficients(r: float, coords) -> np.ndarray:
    """Coefficients of P(v) written out term by term.

    c_k = (k + 1) a_{k+2} - 2 r k a_{k+1} + r^2 (k - 1) a_k for k = 0..n, with
    a_j = 0 outside 1..n; this covers the boundary terms k = 0, 1, n - 1, n.
    """
    a = np.asarray(coords, dtype=complex)
    n = len(a)
    padded = np.zeros(n + 3, dtype=complex)  # padded[j] = a_j, j = 0..n+2
    padded[1: n + 1] = a
    k = np.arange(n + 1)
    return (k + 1) * padded[k + 2] - 2 * r * k * padded[k + 1] + r * r * (k - 1) * padded[k]


def confluent_gram_oracle(n: int, r: float) -> np.ndarray:
    """Derivative Gram of the confluent basis from the pulled-back polynomials.

    Independent of circle quadrature of e_k': column k of T is Q - P for
    a = unit vector k, and G = T^T T / (1 - r^2)^2.
    """
    T = np.zeros((n + 1, n))
    for k in range(n):
        a = np.zeros(n)
        a[k] = 1.0
        P, Q = transformed_polynomials(r, a)
        T[:, k] = np.real(Q - P)
    return T.T @ T / (1.0 - r * r) ** 2


@dataclass(frozen=True)
class ExpansionCheck:
    pointwise_residual: float
    integral_residual: float
    derivative_norm_sq: float
    norm_P: float
    norm_Q: float


def verify_derivative_expansion(config: PoleConfiguration, coords,
                                spec: Optional[QuadratureSpec] = None) -> ExpansionCheck:
    """Check the b_r-coordinate expansion of f' for f = sum a_k e_k.

    Pointwise: direct f' against
        -b_r'(z) [ r / sqrt(1 - r^2) sum_k a_k b^{k-1}
                   + sqrt(1 - r^2) / (z - r) sum_k (k - 1) a_k b^{k-1} ]
    on the circle grid.  Integral: ||f'||^2 from the z-grid against the mean of
    |Q - P|^2 / (1 - r^2)^2 over the v-grid.
    """
    r = confluent_radius(config)
    basis = build_basis(config, spec)
    a = np.asarray(coords, dtype=complex)
    n = config.n
    m = basis.spec.sample_count
    k1 = np.arange(n)  # k - 1 for k = 1..n
    pointwise = 0.0
    norm_sq = 0.0
    for start in range(0, m, CHUNK):
        z = np.exp(2j * np.pi * np.arange(start, min(start + CHUNK, m)) / m)
        direct = basis.combination(a, z, derivative=True)
        b, db = factor_and_derivative(r, z)
        # polyval wants highest degree first
        s1 = np.polyval(a[::-1], b)
        s2 = np.polyval((k1 * a)[::-1], b)
        q = 1.0 - r * r
        expanded = -db * (r / math.sqrt(q) * s1 + math.sqrt(q) / (z - r) * s2)
        pointwise = max(pointwise, float(np.max(np.abs(direct - expanded))))
        norm_sq += float(np.sum(np.abs(direct) ** 2))
    norm_sq /= m

    P, Q = transformed_polynomials(r, a)
    v = np.exp(2j * np.pi * np.arange(m) / m)
    integrand = np.abs(np.polyval((Q - P)[::-1], v)) ** 2
    integral = float(np.mean(integrand)) / (1.0 - r * r) ** 2
    return ExpansionCheck(
        pointwise,
        abs(norm_sq - integral),
        norm_sq,
        float(np.linalg.norm(P)),
        float(np.linalg.norm(Q)),
    )


def span_defect(basis: MalmquistWalshBasis) -> float:
    """max |(e_k, B z^m)| over k, m < n; zero iff every e_k is orthogonal to B H^2 up to degree n."""
    n = basis.n
    m = basis.spec.sample_count
    z = basis.spec.nodes()
    E, _ = basis.evaluate(z, derivatives=False)
    B = blaschke_eval(basis.config, z)
    W = np.vstack([B * z**j for j in range(n)])
    return float(np.max(np.abs(E @ np.conj(W).T / m)))
