"""Closed-form Bernstein-type bounds on model spaces and the experiments around them.

C(n, r) is the supremum of ||D||_{K_B -> H^2} over Blaschke products of degree
at most n with zeros in the closed disc of radius r.  It is bracketed by

    a(n, r) n / (1 - r) <= C(n, r) <= A(n, r) n / (1 - r),

and (1 - r) C(n, r) / n -> 1 + r.  Nothing here computes C(n, r) itself; the
experiments measure ||D|| on concrete configurations and check them against
the brackets.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .blaschke import PoleConfiguration, sup_norm_derivative_on_circle
from .config import TOL
from .errors import BoundViolation, InvalidArgumentError
from .hardy import (H2, WIENER, Besov, QuadratureSpec, derivative, quadrature_size,
                    space_norm)
from .model_space import (alternating_coordinates, build_basis, operator_norm,
                          test_function)

THREADS_ENV = "KBERNSTEIN_THREADS"

# Dyakonov's constants: a ||B'||_inf <= ||D|| <= A ||B'||_inf
DYAKONOV_C = 2.0 * math.sqrt(3.0 * math.pi)
DYAKONOV_LOWER = 1.0 / (36.0 * DYAKONOV_C)
DYAKONOV_UPPER = (36.0 + DYAKONOV_C) / (2.0 * math.pi)

MAX_SWEEP_RADIUS = 0.95


def worker_count() -> int:
    value = os.environ.get(THREADS_ENV)
    if value:
        return max(1, int(value))
    return 1


def _check_radius(r: float, upper: float = 1.0, closed: bool = False):
    ok = 0.0 <= r <= upper if closed else 0.0 <= r < upper
    if not ok:
        raise InvalidArgumentError(f"r={r} outside the admissible range")


@dataclass(frozen=True)
class BoundCoefficients:
    a_lower: float
    A_upper: float
    legacy_52: float


def bound_coefficients(n: int, r: float) -> BoundCoefficients:
    """a(n, r), A(n, r) and the absolute bound (5/2) n / (1 - r), for n >= 2."""
    if n < 2:
        raise InvalidArgumentError("the (a, A) bracket is stated for n >= 2")
    _check_radius(r)
    r4 = r**4
    a = math.sqrt(1.0 + 5.0 * r4 - 4.0 * r4 / n - min(0.75, 2.0 / n)) / (1.0 + r)
    A = 1.0 + r + 1.0 / math.sqrt(n)
    return BoundCoefficients(a, A, 2.5 * n / (1.0 - r))


def n1_exact_norm(lam) -> float:
    """||D|| on the one-dimensional space spanned by k_lam.

    e_1' has Taylor coefficients (k + 1) conj(lam)^(k+1) sqrt(1 - |lam|^2), so
    ||e_1'||^2 = |lam|^2 (1 + |lam|^2) / (1 - |lam|^2)^2.
    """
    t = abs(complex(lam))
    if t >= 1:
        raise InvalidArgumentError("lam must lie in the open disc")
    return t * math.sqrt(1.0 + t * t) / (1.0 - t * t)


def n1_published_norm(lam) -> float:
    """|lam| / sqrt(1 - |lam|^2): the value obtained by summing (k + 1)|lam|^(2k)
    instead of (k + 1)^2 |lam|^(2k).  Kept for comparison only; it
    underestimates :func:`n1_exact_norm` for every lam != 0.
    """
    t = abs(complex(lam))
    if t >= 1:
        raise InvalidArgumentError("lam must lie in the open disc")
    return t / math.sqrt(1.0 - t * t)


def confluent_derivative_norm_closed_form(n: int, r: float) -> float:
    """||e_n'||^2 for B = b_r**n."""
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    _check_radius(r)
    return ((n - 1) ** 2 + (2 * n - 1) ** 2 * r * r + n * n * r**4) / (1.0 - r * r) ** 2


def phi_n_coefficients(n: int, r: float):
    """Coefficients of (1 + r z)(r z + (n - 1)(1 + r z)) in 1, z, z^2.

    r = 1 is accepted since the identity is purely algebraic.
    """
    if n < 2:
        raise InvalidArgumentError("n must be >= 2")
    _check_radius(r, closed=True)
    return (float(n - 1), (2 * n - 1) * r, n * r * r)


@dataclass(frozen=True)
class ExtremalCertificate:
    n: int
    s: int
    r: float
    Q: float
    certified_lower: float
    measured: float
    norm_sq: float

    @property
    def holds(self) -> bool:
        return self.measured >= self.certified_lower - TOL.bound_slack


def certificate_Q(n: int, s: int, r: float) -> float:
    return (n - s) + 2.0 * r * (n - s - 1) + r * r * (n - s - 2)


def certified_lower_bound(n: int, s: int, r: float) -> float:
    """Guaranteed lower bound on ||f'|| / ||f|| for the alternating test function.

    (1 - r^2)||f'|| >= ||P|| - ||Q_poly||, ||P|| >= sqrt(s) Q and
    ||Q_poly|| <= r (1 + r) ||f|| with ||f||^2 = s + 3.
    """
    alternating_coordinates(n, s)  # validates n, s
    _check_radius(r)
    q = certificate_Q(n, s, r)
    root = math.sqrt(s + 3)
    return (math.sqrt(s) * q - r * (1.0 + r) * root) / ((1.0 - r * r) * root)


def default_s(n: int) -> int:
    """Largest even s <= sqrt(n), clipped so that n >= s + 3."""
    s = int(math.isqrt(n))
    s -= s % 2
    while s > 0 and n < s + 3:
        s -= 2
    return s


def extremal_certificate(n: int, r: float, s: Optional[int] = None,
                         spec: Optional[QuadratureSpec] = None) -> ExtremalCertificate:
    if s is None:
        s = default_s(n)
    lower = certified_lower_bound(n, s, r)
    f = test_function(PoleConfiguration.confluent(n, r), s, spec)
    norm_f = space_norm(f, H2)
    measured = space_norm(derivative(f), H2) / norm_f
    cert = ExtremalCertificate(n, s, r, certificate_Q(n, s, r), lower, measured, norm_f**2)
    if not cert.holds:
        raise BoundViolation(f"measured {measured} below certified {lower} at n={n}, s={s}, r={r}")
    return cert


@dataclass(frozen=True)
class DyakonovBracket:
    lower: float
    upper: float
    norm: float
    sup_derivative: float
    holds: bool


def dyakonov_bracket(config: PoleConfiguration, grid_size: Optional[int] = None,
                     spec: Optional[QuadratureSpec] = None) -> DyakonovBracket:
    if grid_size is None:
        grid_size = quadrature_size(config.n, config.r)
    sup = sup_norm_derivative_on_circle(config, grid_size)
    norm = operator_norm(config, spec).norm
    lower, upper = DYAKONOV_LOWER * sup, DYAKONOV_UPPER * sup
    tol = TOL.bound_slack
    return DyakonovBracket(lower, upper, norm, sup, lower - tol <= norm <= upper + tol)


@dataclass(frozen=True)
class BoundReport:
    n: int
    r: float
    norm_confluent: float
    a_lower: float
    A_upper: float
    legacy_52: float
    ratio: float

    @property
    def limit(self) -> float:
        """Limit of ||D|| / n along the confluent family, (1 + r) / (1 - r)."""
        return (1.0 + self.r) / (1.0 - self.r)

    @property
    def distance(self) -> float:
        return abs(self.ratio - (1.0 + self.r))

    def record(self) -> dict:
        return {
            "n": self.n, "r": self.r, "norm": self.norm_confluent, "ratio": self.ratio,
            "a_lower": self.a_lower, "A_upper": self.A_upper,
            "legacy_52": self.legacy_52, "limit": self.limit,
        }


def _check_against_upper(norm: float, n: int, r: float, coeffs: BoundCoefficients, what: str):
    tol = TOL.bound_slack
    scale = n / (1.0 - r)
    if norm > coeffs.A_upper * scale + tol:
        raise BoundViolation(f"{what}: norm {norm} above A(n,r) n/(1-r) at n={n}, r={r}")
    if norm > coeffs.legacy_52 + tol:
        raise BoundViolation(f"{what}: norm {norm} above 5/2 n/(1-r) at n={n}, r={r}")


def bound_report(n: int, r: float, spec: Optional[QuadratureSpec] = None) -> BoundReport:
    coeffs = bound_coefficients(n, r)
    norm = operator_norm(PoleConfiguration.confluent(n, r), spec).norm
    _check_against_upper(norm, n, r, coeffs, "confluent")
    return BoundReport(n, r, norm, coeffs.a_lower, coeffs.A_upper, coeffs.legacy_52,
                       (1.0 - r) * norm / n)


def _cells(n_list: Iterable[int], r_list: Iterable[float]):
    cells = sorted({(int(n), float(r)) for n in n_list for r in r_list})
    if not cells:
        raise InvalidArgumentError("empty sweep")
    for n, r in cells:
        if n < 2:
            raise InvalidArgumentError("sweeps need n >= 2")
        _check_radius(r, MAX_SWEEP_RADIUS, closed=True)
    return cells


def _map_cells(func, cells, workers):
    workers = worker_count() if workers is None else workers
    if workers <= 1:
        return [func(*c) for c in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # map preserves input order, so output order never depends on scheduling
        return list(pool.map(lambda c: func(*c), cells))


def convergence_sweep(n_list: Sequence[int], r_list: Sequence[float],
                      workers: Optional[int] = None) -> list:
    """One BoundReport per (n, r), sorted by (n, r)."""
    return _map_cells(bound_report, _cells(n_list, r_list), workers)


def random_configuration(n: int, r: float, rng: np.random.Generator) -> PoleConfiguration:
    """n poles uniform (by area) in the closed disc of radius r."""
    modulus = r * np.sqrt(rng.random(n))
    angle = 2.0 * np.pi * rng.random(n)
    poles = modulus * np.exp(1j * angle)
    return PoleConfiguration(poles)


def randomized_configuration_max(n: int, r: float, trials: int, seed: int = 0) -> float:
    """Max ||D|| over the confluent, all-zero and ``trials`` random configurations.

    Every sample is checked against both upper bounds.  This estimates
    C(n, r) from below; it is not claimed to attain it.
    """
    if trials < 1:
        raise InvalidArgumentError("trials must be >= 1")
    coeffs = bound_coefficients(n, r)
    rng = np.random.default_rng(seed)
    configs = [PoleConfiguration.confluent(n, r), PoleConfiguration.zeros(n)]
    configs += [random_configuration(n, r, rng) for _ in range(trials)]
    best = 0.0
    for cfg in configs:
        norm = operator_norm(cfg).norm
        _check_against_upper(norm, n, r, coeffs, "sample")
        best = max(best, norm)
    return best


@dataclass(frozen=True)
class EmbeddingRecord:
    space: str
    n: int
    r: float
    trials: int
    max_ratio: float
    growth: float
    normalized: float

    def record(self) -> dict:
        return asdict(self)


def _space_label(space) -> str:
    return f"Besov({space.s:g})" if isinstance(space, Besov) else str(space)


def embedding_growth(space, n: int, r: float) -> float:
    if isinstance(space, Besov):
        return (n / (1.0 - r)) ** space.s
    if space == WIENER:
        return math.sqrt(n * n / (1.0 - r))
    raise InvalidArgumentError("embedding sweeps take Besov(s) or Wiener")


def embedding_ratio(space, n: int, r: float, trials: int, seed: int = 0) -> EmbeddingRecord:
    """max ||f||_space / ||f||_2 over random f in random K_B.

    Trial 0 uses the confluent configuration; the rest draw poles uniformly in
    the r-disc.  Coordinates in the basis are complex Gaussian.
    """
    if trials < 1:
        raise InvalidArgumentError("trials must be >= 1")
    if isinstance(space, Besov) and space.s < 0:
        raise InvalidArgumentError("Besov embedding sweeps need s >= 0")
    _check_radius(r)
    growth = embedding_growth(space, n, r)
    rng = np.random.default_rng(seed)
    spec = QuadratureSpec.for_model_space(n, r)
    best = 0.0
    for t in range(trials):
        cfg = PoleConfiguration.confluent(n, r) if t == 0 else random_configuration(n, r, rng)
        coords = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        f = build_basis(cfg, spec).function(coords)
        ratio = space_norm(f, space) / space_norm(f, H2)
        if not math.isfinite(ratio):
            raise BoundViolation(f"non-finite embedding ratio at n={n}, r={r}")
        if isinstance(space, Besov) and space.s == 0 and abs(ratio - 1.0) > 1e-12:
            raise BoundViolation(f"Besov(0) ratio {ratio} differs from 1")
        best = max(best, ratio)
    return EmbeddingRecord(_space_label(space), n, r, trials, best, growth, best / growth)


def embedding_ratio_sweep(space, n_list: Sequence[int], r_list: Sequence[float],
                          trials: int, seed: int = 0, workers: Optional[int] = None) -> list:
    cells = sorted({(int(n), float(r)) for n in n_list for r in r_list})
    if not cells:
        raise InvalidArgumentError("empty sweep")
    return _map_cells(lambda n, r: embedding_ratio(space, n, r, trials, seed), cells, workers)
