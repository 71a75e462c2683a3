"""The invariant suite run by ``kbernstein verify``.

Each check returns a :class:`CheckResult`; the suite passes iff every gating
check passes.  Informational checks are reported but never change the exit
code.
"""

from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from . import bounds, hardy
from .blaschke import PoleConfiguration
from .model_space import (basis_gram, build_basis, derivative_gram, norm_from_gram,
                          operator_norm, verify_derivative_expansion)

SEED = 20110152


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float
    gating: bool = True

    def line(self) -> str:
        status = "PASS" if self.passed else ("FAIL" if self.gating else "INFO")
        return f"{status:4s} {self.name:34s} {self.seconds:7.2f}s  {self.detail}"


def _rng(offset: int = 0) -> np.random.Generator:
    return np.random.default_rng(SEED + offset)


def _random_config(rng, n_max: int, r_max: float) -> PoleConfiguration:
    n = int(rng.integers(1, n_max + 1))
    r = float(rng.uniform(0.0, r_max))
    return bounds.random_configuration(n, r, rng)


def check_n1_exact():
    lams = [0.0, 0.3 * cmath.exp(1j * math.pi / 7), 0.5, 0.9]
    err = max(abs(operator_norm(PoleConfiguration([lam])).norm - bounds.n1_exact_norm(lam))
              for lam in lams)
    return err <= 1e-10, f"max |norm - |l|sqrt(1+|l|^2)/(1-|l|^2)| = {err:.2e}"


def check_n1_published():
    lam = 0.5
    got = operator_norm(PoleConfiguration([lam])).norm
    pub = bounds.n1_published_norm(lam)
    return abs(got - pub) <= 1e-10, f"lam=0.5: computed {got:.10f}, published formula {pub:.10f}"


def check_monomial():
    err = max(abs(operator_norm(PoleConfiguration.zeros(n)).norm - (n - 1))
              for n in (2, 4, 8, 16, 32, 64))
    return err <= 1e-9, f"max |norm - (n-1)| = {err:.2e}"


def check_confluent_diagonal():
    worst = 0.0
    for n in (2, 10, 100):
        for r in (0.1, 0.5, 0.9):
            G = derivative_gram(build_basis(PoleConfiguration.confluent(n, r)))
            exact = bounds.confluent_derivative_norm_closed_form(n, r)
            worst = max(worst, abs(G.diagonal()[-1] - exact) / exact)
    return worst <= 1e-8, f"max relative error {worst:.2e}"


def check_bracket_grid():
    tol = 1e-8
    bad = []
    for n in (2, 4, 8, 16, 32, 64):
        for r in np.round(np.arange(10) / 10.0, 1):
            c = bounds.bound_coefficients(n, r)
            scale = n / (1.0 - r)
            G = derivative_gram(build_basis(PoleConfiguration.confluent(n, r))).matrix
            en = math.sqrt(G[-1, -1].real)
            norm = norm_from_gram(G).norm
            if not (en >= c.a_lower * scale - tol and norm <= c.A_upper * scale + tol
                    and norm <= c.legacy_52 + tol):
                bad.append((n, float(r)))
    return not bad, "60 cells" if not bad else f"violations at {bad}"


def check_asymptotic_ratio():
    big = bounds.bound_report(1024, 0.5)
    small = bounds.bound_report(8, 0.5)
    ok = big.a_lower <= big.ratio <= big.A_upper and big.ratio > small.ratio
    return ok, (f"ratio(1024)={big.ratio:.6f} in [{big.a_lower:.4f}, {big.A_upper:.4f}], "
                f"ratio(8)={small.ratio:.6f}, limit 1.5")


def check_extremal():
    parts = []
    ok = True
    for n, s, r in ((100, 10, 0.5), (400, 20, 0.5), (400, 20, 0.9)):
        c = bounds.extremal_certificate(n, r, s)
        ok &= c.measured >= c.certified_lower and abs(c.norm_sq - (s + 3)) <= 1e-10
        parts.append(f"({n},{s},{r}): {c.measured:.1f}>={c.certified_lower:.1f}")
    return ok, "; ".join(parts)


def check_szego():
    rng = _rng(7)
    worst = 0.0
    for _ in range(200):
        a, b = (0.9 * math.sqrt(rng.random()) * cmath.exp(2j * math.pi * rng.random())
                for _ in range(2))
        spec = hardy.QuadratureSpec.for_model_space(1, max(abs(a), abs(b)))
        fa = hardy.analyze(hardy.szego_kernel(a), spec)
        fb = hardy.analyze(hardy.szego_kernel(b), spec)
        worst = max(worst, abs(hardy.inner_product(fa, fb) - hardy.szego_inner_oracle(a, b)))
    return worst <= 1e-12, f"max error {worst:.2e} over 200 pairs"


def check_orthonormality_and_expansion():
    rng = _rng(8)
    worst_gram = 0.0
    for _ in range(50):
        cfg = _random_config(rng, 32, 0.9)
        E = basis_gram(build_basis(cfg))
        worst_gram = max(worst_gram, float(np.max(np.abs(E - np.eye(cfg.n)))))
    worst_exp = 0.0
    for _ in range(20):
        n = int(rng.integers(1, 17))
        r = float(rng.uniform(0.0, 0.7))
        coords = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        chk = verify_derivative_expansion(PoleConfiguration.confluent(n, r), coords)
        worst_exp = max(worst_exp, chk.pointwise_residual, chk.integral_residual)
    ok = worst_gram <= 1e-10 and worst_exp <= 1e-8
    return ok, f"|Gram - I| {worst_gram:.2e}; expansion residual {worst_exp:.2e}"


def check_dyakonov():
    rng = _rng(9)
    failures = 0
    for _ in range(100):
        cfg = _random_config(rng, 16, 0.9)
        if not bounds.dyakonov_bracket(cfg).holds:
            failures += 1
    return failures == 0, f"{100 - failures}/100 configurations inside the bracket"


def check_hardy_inequality():
    rng = _rng(10)
    worst = -math.inf
    besov_gap = 0.0
    for _ in range(100):
        cfg = _random_config(rng, 16, 0.9)
        coords = rng.standard_normal(cfg.n) + 1j * rng.standard_normal(cfg.n)
        f = build_basis(cfg).function(coords)
        lhs = hardy.space_norm(f, hardy.WIENER)
        rhs = math.pi * hardy.space_norm(hardy.derivative(f), hardy.H1) + abs(f.taylor[0])
        worst = max(worst, lhs - rhs)
        besov_gap = max(besov_gap, abs(hardy.space_norm(f, hardy.Besov(0))
                                       - hardy.space_norm(f, hardy.H2)))
    ok = worst <= 1e-8 and besov_gap <= 1e-12
    return ok, f"max(W - rhs) = {worst:.3e}; |Besov(0) - H2| = {besov_gap:.1e}"


CHECKS: List[tuple] = [
    ("n=1 exact norm", check_n1_exact, True),
    ("n=1 published formula", check_n1_published, False),
    ("monomial case", check_monomial, True),
    ("confluent ||e_n'||^2", check_confluent_diagonal, True),
    ("(a, A) bracket grid", check_bracket_grid, True),
    ("asymptotic ratio r=0.5", check_asymptotic_ratio, True),
    ("extremal certificates", check_extremal, True),
    ("Szego kernel quadrature", check_szego, True),
    ("orthonormality + expansion", check_orthonormality_and_expansion, True),
    ("Dyakonov bracket", check_dyakonov, True),
    ("Hardy inequality + Besov(0)", check_hardy_inequality, True),
]


def run_checks(report: Callable[[CheckResult], None] = None) -> List[CheckResult]:
    results = []
    for name, func, gating in CHECKS:
        t0 = time.perf_counter()
        try:
            passed, detail = func()
        except Exception as exc:  # a crash is a failed check, not an aborted suite
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        res = CheckResult(name, bool(passed), detail, time.perf_counter() - t0, gating)
        results.append(res)
        if report is not None:
            report(res)
    return results


def suite_passed(results) -> bool:
    return all(r.passed for r in results if r.gating)
