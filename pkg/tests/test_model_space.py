import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kbernstein import bounds, hardy
from kbernstein.blaschke import PoleConfiguration
from kbernstein.errors import ConvergenceError, InvalidArgumentError
from kbernstein.model_space import (alternating_coordinates, basis_gram, build_basis,
                                    confluent_gram_oracle, derivative_gram,
                                    expanded_derivative_coefficients, largest_eigenpair,
                                    norm_from_gram, operator_norm, span_defect,
                                    test_function, transformed_polynomials,
                                    verify_derivative_expansion)


def random_config(rng, n_max=32, r_max=0.9):
    n = int(rng.integers(1, n_max + 1))
    return bounds.random_configuration(n, float(rng.uniform(0, r_max)), rng)


def series_norm_sq_of_derivative(lam):
    """||k_lam'||^2 scaled by (1 - |lam|^2), summed term by term."""
    x = abs(lam) ** 2
    k = np.arange(1, 4000)
    return (1 - x) * float(np.sum(k**2 * x**k))


# -- basis ------------------------------------------------------------------


def test_orthonormal_for_random_configurations():
    rng = np.random.default_rng(21)
    for _ in range(30):
        cfg = random_config(rng)
        E = basis_gram(build_basis(cfg))
        assert np.max(np.abs(E - np.eye(cfg.n))) <= 1e-10


def test_basis_orthogonal_to_b_h2():
    rng = np.random.default_rng(22)
    for _ in range(5):
        cfg = random_config(rng, n_max=12)
        assert span_defect(build_basis(cfg)) <= 1e-12


def test_zero_poles_give_monomials():
    basis = build_basis(PoleConfiguration.zeros(5))
    z = np.exp(1j * np.linspace(0, 6, 17)) * 0.7
    E, dE = basis.evaluate(z)
    for k in range(5):
        # e_{k+1} = (-z)^k since every factor is b_0 = -z
        np.testing.assert_allclose(E[k], (-z) ** k, atol=1e-15)
        if k:
            np.testing.assert_allclose(dE[k], k * (-1) ** k * z ** (k - 1), atol=1e-14)


def test_double_pole_orthonormal():
    E = basis_gram(build_basis(PoleConfiguration([0.5, 0.5])))
    assert np.max(np.abs(E - np.eye(2))) <= 1e-12


def test_combination_matches_evaluate():
    rng = np.random.default_rng(23)
    cfg = random_config(rng, n_max=10)
    basis = build_basis(cfg)
    a = rng.standard_normal(cfg.n) + 1j * rng.standard_normal(cfg.n)
    z = 0.8 * np.exp(2j * np.pi * rng.random(9))
    E, dE = basis.evaluate(z)
    np.testing.assert_allclose(basis.combination(a, z), a @ E, atol=1e-12)
    np.testing.assert_allclose(basis.combination(a, z, derivative=True), a @ dE, atol=1e-11)
    with pytest.raises(InvalidArgumentError):
        basis.combination(a[:-1], z)


def test_element_derivative_against_finite_differences():
    cfg = PoleConfiguration([0.3j, -0.6, 0.2 + 0.5j])
    basis = build_basis(cfg)
    z0, h = 0.1 - 0.2j, 1e-6
    for k in range(3):
        f = basis.element_derivatives[k]
        e = basis.elements[k]
        fd = (e(z0 + h) - e(z0 - h)) / (2 * h)
        assert abs(f(z0) - fd) <= 1e-8


# -- derivative Gram and the norm ---------------------------------------------


def test_single_pole_gram():
    # (1 - x) sum k^2 x^k with x = 1/4 equals 5/9
    G = derivative_gram(build_basis(PoleConfiguration([0.5]))).matrix
    assert G.shape == (1, 1)
    assert G[0, 0].real == pytest.approx(5 / 9, abs=1e-12)
    assert G[0, 0].real == pytest.approx(series_norm_sq_of_derivative(0.5), abs=1e-12)


def test_double_zero_gram():
    G = derivative_gram(build_basis(PoleConfiguration.zeros(2))).matrix
    np.testing.assert_allclose(G, np.diag([0.0, 1.0]), atol=1e-15)


def test_double_pole_gram_and_norm():
    G = derivative_gram(build_basis(PoleConfiguration([0.5, 0.5]))).matrix
    assert G[1, 1].real == pytest.approx(56 / 9, abs=1e-10)  # (1 + 9/4 + 1/4) / (3/4)^2
    oracle = confluent_gram_oracle(2, 0.5)
    np.testing.assert_allclose(G, oracle, atol=1e-13)
    a, d, b = oracle[0, 0], oracle[1, 1], oracle[0, 1]
    lam = (a + d) / 2 + math.sqrt(((a - d) / 2) ** 2 + b * b)
    assert operator_norm(PoleConfiguration([0.5, 0.5])).norm == pytest.approx(math.sqrt(lam),
                                                                              abs=1e-12)


@pytest.mark.parametrize("n", [2, 4, 8, 16, 32, 64])
def test_monomial_norm(n):
    assert abs(operator_norm(PoleConfiguration.zeros(n)).norm - (n - 1)) <= 1e-9


def test_single_pole_identity_over_random_points():
    rng = np.random.default_rng(24)
    for _ in range(50):
        lam = 0.95 * math.sqrt(rng.random()) * cmath.exp(2j * math.pi * rng.random())
        got = operator_norm(PoleConfiguration([lam])).norm
        x = abs(lam) ** 2
        # independent of the closed form: direct series with many terms
        assert got == pytest.approx(math.sqrt(series_norm_sq_of_derivative(lam)), abs=1e-10)
        assert got == pytest.approx(bounds.n1_exact_norm(lam), abs=1e-10)
        assert got == pytest.approx(math.sqrt(x * (1 + x)) / (1 - x), abs=1e-10)


@pytest.mark.parametrize("n", [2, 10, 100])
@pytest.mark.parametrize("r", [0.1, 0.5, 0.9])
def test_confluent_last_diagonal(n, r):
    G = derivative_gram(build_basis(PoleConfiguration.confluent(n, r)))
    exact = ((n - 1) ** 2 + (2 * n - 1) ** 2 * r**2 + n**2 * r**4) / (1 - r * r) ** 2
    assert abs(G.diagonal()[-1] - exact) <= 1e-8 * exact


@pytest.mark.parametrize("n, r", [(1, 0.3), (5, 0.0), (12, 0.5), (40, 0.9)])
def test_quadrature_gram_matches_polynomial_oracle(n, r):
    G = derivative_gram(build_basis(PoleConfiguration.confluent(n, r))).matrix
    oracle = confluent_gram_oracle(n, r)
    assert np.max(np.abs(G - oracle)) <= 1e-10 * np.max(np.abs(oracle))


def test_gram_structure():
    rng = np.random.default_rng(25)
    for _ in range(10):
        cfg = random_config(rng, n_max=20)
        G = derivative_gram(build_basis(cfg))
        assert G.hermitian_defect() <= 1e-12 * max(1.0, np.max(np.abs(G.matrix)))
        w = np.linalg.eigvalsh(G.matrix)
        assert w[0] >= -1e-10 * w[-1]
        res = norm_from_gram(G.matrix)
        assert res.lambda_max >= np.max(G.diagonal()) * (1 - 1e-12)
        assert res.lambda_max <= np.sum(G.diagonal()) * (1 + 1e-12)
        assert res.lambda_max == pytest.approx(w[-1], rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_norm_invariances(seed):
    rng = np.random.default_rng(seed)
    cfg = random_config(rng, n_max=8)
    poles = np.array(cfg.poles)
    base = operator_norm(cfg).norm
    phase = cmath.exp(2j * math.pi * rng.random())
    for other in (rng.permutation(poles), poles * phase, np.conj(poles)):
        got = operator_norm(PoleConfiguration(other)).norm
        assert abs(got - base) <= 1e-9 * max(1.0, base)


# -- eigen solver -------------------------------------------------------------


def test_largest_eigenpair_against_eigvalsh():
    rng = np.random.default_rng(26)
    X = rng.standard_normal((30, 30)) + 1j * rng.standard_normal((30, 30))
    G = X @ X.conj().T
    lam, v, _, res = largest_eigenpair(G)
    assert lam == pytest.approx(np.linalg.eigvalsh(G)[-1], rel=1e-12)
    assert res <= 1e-10
    assert np.linalg.norm(v) == pytest.approx(1.0)


def test_power_iteration_polish_and_failure():
    G = np.diag([1.0, 2.0, 3.0]) + 0.1
    # a negative tolerance can never be met: the polish runs to the cap and raises
    with pytest.raises(ConvergenceError, match="after 5 iterations"):
        largest_eigenpair(G, tol=-1.0, max_iter=5)
    lam, v, it, _ = largest_eigenpair(G, tol=1e-10)
    assert it == 0
    # the polish keeps a converged pair converged
    w = np.linalg.eigvalsh(G)[-1]
    lam2, _, _, _ = largest_eigenpair(G, tol=1e-10, max_iter=0)
    assert lam == pytest.approx(w, rel=1e-14) and lam2 == lam


# -- confluent test function and the b_r expansion ---------------------------


def test_alternating_coordinates():
    np.testing.assert_array_equal(alternating_coordinates(5, 0), [0, 0, 1, -1, 1])
    with pytest.raises(InvalidArgumentError):
        alternating_coordinates(10, 3)
    with pytest.raises(InvalidArgumentError):
        alternating_coordinates(4, 2)


@pytest.mark.parametrize("n, s, r", [(4, 0, 0.5), (20, 4, 0.3), (100, 10, 0.5)])
def test_test_function_norm(n, s, r):
    f = test_function(PoleConfiguration.confluent(n, r), s)
    assert abs(hardy.space_norm(f, hardy.H2) ** 2 - (s + 3)) <= 1e-10


def test_test_function_needs_confluent_real_poles():
    with pytest.raises(InvalidArgumentError):
        test_function(PoleConfiguration([0.5, 0.5, 0.4]), 0)
    with pytest.raises(InvalidArgumentError):
        test_function(PoleConfiguration([0.5j] * 3), 0)


def test_expanded_coefficients_against_convolution():
    rng = np.random.default_rng(27)
    for n in (1, 2, 3, 7, 20):
        r = float(rng.uniform(0, 0.95))
        a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        P, _ = transformed_polynomials(r, a)
        deriv = np.arange(1, n) * a[1:]
        ref = np.zeros(n + 1, dtype=complex)
        if n > 1:
            ref[: n + 1] = np.convolve([1, -2 * r, r * r], deriv)
        np.testing.assert_allclose(expanded_derivative_coefficients(r, a), ref, atol=1e-13)
        np.testing.assert_allclose(P, ref, atol=1e-13)


def test_derivative_expansion_residuals():
    rng = np.random.default_rng(28)
    for _ in range(20):
        n = int(rng.integers(1, 17))
        r = float(rng.uniform(0, 0.7))
        a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        chk = verify_derivative_expansion(PoleConfiguration.confluent(n, r), a)
        assert chk.pointwise_residual <= 1e-8
        assert chk.integral_residual <= 1e-8


def test_triangle_bracket_and_q_bound():
    rng = np.random.default_rng(29)
    for _ in range(20):
        n = int(rng.integers(2, 30))
        r = float(rng.uniform(0, 0.9))
        a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        chk = verify_derivative_expansion(PoleConfiguration.confluent(n, r), a)
        mid = (1 - r * r) * math.sqrt(chk.derivative_norm_sq)
        tol = 1e-9 * max(1.0, mid)
        assert abs(chk.norm_P - chk.norm_Q) <= mid + tol
        assert mid <= chk.norm_P + chk.norm_Q + tol
        assert chk.norm_Q <= r * (1 + r) * np.linalg.norm(a) + tol


def test_zero_radius_expansion_reduces_to_shift():
    # r = 0: e_k = (-z)^(k-1), so the expansion is plain differentiation
    a = np.array([1.0, 2.0, 3.0])
    chk = verify_derivative_expansion(PoleConfiguration.zeros(3), a)
    assert chk.norm_Q == 0.0
    assert chk.derivative_norm_sq == pytest.approx(4 + 36, abs=1e-12)
