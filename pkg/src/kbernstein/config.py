"""Numerical tolerances shared by every module.

All thresholds live here so that tests and the ``verify`` command agree on
what "equal" means.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # |1 - conj(lam) z| below this is treated as evaluation at a pole
    pole_guard: float = 1e-14
    # negative-frequency DFT bins allowed, relative to max(1, sup |f|)
    analyticity: float = 1e-10
    # relative eigen-residual ||G v - lam v|| / lam_max
    eigen_residual: float = 1e-10
    # slack when checking bounds that are exact in real arithmetic
    bound_slack: float = 1e-8
    orthonormality: float = 1e-10
    hermitian: float = 1e-12
    golden_section: float = 1e-12


TOL = Tolerances()
