"""Differentiation on model spaces K_B of the Hardy space H^2.

Computes ||D||_{K_B -> H^2} from the Malmquist-Walsh basis and checks it
against closed-form Bernstein-type bounds.
"""

from .blaschke import (DiscPoint, PoleConfiguration, blaschke_derivative, blaschke_eval,
                       sup_norm_derivative_on_circle)
from .bounds import (bound_coefficients, confluent_derivative_norm_closed_form,
                     convergence_sweep, dyakonov_bracket, embedding_ratio_sweep,
                     extremal_certificate, n1_exact_norm, phi_n_coefficients,
                     randomized_configuration_max)
from .hardy import (AnalyticFunction, Besov, QuadratureSpec, analyze, derivative,
                    inner_product, space_norm, szego_inner_oracle)
from .model_space import (MalmquistWalshBasis, build_basis, derivative_gram, operator_norm,
                          test_function, verify_derivative_expansion)

__version__ = "0.1.0"
