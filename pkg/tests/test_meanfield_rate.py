import math

import numpy as np
import pytest

from gibbs_scope.circle_kernel import ConditioningMeasure, Convention, HeatKernelSpec, QuadratureGrid
from gibbs_scope.errors import InvalidParameterError, KernelUndefinedError
from gibbs_scope.meanfield_rate import (
    MeanFieldModel,
    U_to_u,
    check_convergence,
    log_moment_L,
    make_F0_evaluator,
    make_F_evaluator,
    make_G_evaluator,
    make_L_evaluator,
    make_gamma_evaluator,
    make_lambda_epsilon,
    reduced_G,
    rotate,
    u_domain,
    u_to_U,
    variational_distance,
)
from oracles import G_oracle, L_oracle

U_POINTS = np.linspace(-9.0, 9.0, 37)


@pytest.mark.parametrize("epsilon, t", [(0.0, 0.3), (0.3, 1.0), (0.4, 1.0), (1.2, 2.5), (2.9, 0.1)])
def test_L_matches_bessel_series(epsilon, t):
    got = make_L_evaluator(epsilon, t)(U_POINTS)
    ref = L_oracle(U_POINTS, epsilon, t)
    # at (2.9, 0.1) and U = -9 the integrand cancels heavily; both routes agree to ~4e-11
    assert np.max(np.abs(got - ref)) < 1e-10


def test_G_matches_oracle_at_two_basin_point():
    got = make_G_evaluator(5.0, 0.16, 0.4, 1.0)(U_POINTS)
    assert np.max(np.abs(got - G_oracle(U_POINTS, 5.0, 0.16, 0.4, 1.0))) < 1e-11


@pytest.mark.parametrize("epsilon", [0.1, 0.3, 0.5])
@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_L_convex(epsilon, t):
    step = 0.05
    U = np.arange(-10.0, 10.0 + step / 2, step)
    L = make_L_evaluator(epsilon, t)(U)
    second = (L[2:] - 2 * L[1:-1] + L[:-2]) / step ** 2
    assert second.min() >= -1e-9


def test_G_equals_axis_restriction_of_F():
    beta, hb, eps, t = 5.0, 0.16, 0.3, 1.0
    model = MeanFieldModel(beta, hb)
    F = make_F_evaluator(model, t, make_lambda_epsilon(eps))
    u = np.linspace(-1, 1, 21)
    m = np.stack([u, np.zeros_like(u)], axis=-1)
    G = make_G_evaluator(beta, hb, eps, t)(u_to_U(u, beta, hb))
    assert np.max(np.abs(F(m) - beta * hb ** 2 / 2 - G)) < 1e-12


def test_G_mirror_identity_without_field():
    U = np.linspace(-4, 4, 17)
    a = reduced_G(-U, 3.0, 0.0, 0.4, 1.0)
    b = reduced_G(U, 3.0, 0.0, math.pi - 0.4, 1.0)
    assert np.max(np.abs(a - b)) < 1e-12


def test_F0_rotational_covariance():
    rng = np.random.default_rng(1)
    m = rng.uniform(-0.7, 0.7, size=(50, 2))
    h = np.array([0.3, -0.2])
    F0 = make_F0_evaluator(MeanFieldModel(2.0, tuple(h)))
    for phi in (0.4, 2.0, -1.1):
        Fr = make_F0_evaluator(MeanFieldModel(2.0, tuple(rotate(h, phi))))
        assert np.max(np.abs(F0(m) - Fr(rotate(m, phi)))) < 1e-12


def test_F_reflection_symmetry():
    F = make_F_evaluator(MeanFieldModel(5.0, 0.16), 1.0, make_lambda_epsilon(0.3))
    rng = np.random.default_rng(2)
    m = rng.uniform(-0.7, 0.7, size=(40, 2))
    assert np.max(np.abs(F(m) - F(m * [1, -1]))) < 1e-12


def test_F0_against_bessel():
    # with h = 0 the log-partition is log I0(beta |m|)
    from scipy import special

    beta = 3.0
    F0 = make_F0_evaluator(MeanFieldModel(beta))
    m = np.array([[0.2, 0.1], [0.0, 0.9]])
    r = np.hypot(m[:, 0], m[:, 1])
    ref = beta * r * r / 2 - np.log(special.iv(0, beta * r))
    assert np.allclose(F0(m), ref, atol=1e-13, rtol=0)


def test_lambda_epsilon():
    lam = make_lambda_epsilon(0.3)
    assert sorted(lam.angle_array) == pytest.approx(sorted([math.pi - 0.3, math.pi + 0.3]))
    assert len(make_lambda_epsilon(0.0).angles) == 1
    for bad in (-0.1, math.pi, 4.0):
        with pytest.raises(InvalidParameterError):
            make_lambda_epsilon(bad)


def test_domain_maps():
    lo, hi = u_domain(5.0, 0.16)
    assert (lo, hi) == pytest.approx((-4.2, 5.8))
    assert U_to_u(u_to_U(0.37, 5.0, 0.16), 5.0, 0.16) == pytest.approx(0.37)


def test_G_requires_positive_beta():
    with pytest.raises(InvalidParameterError):
        make_G_evaluator(0.0, 0.1, 0.2, 1.0)


def test_convergence_flag():
    rep = check_convergence(log_moment_L, U_POINTS, 0.3, 1.0)
    assert rep.converged and rep.change < 1e-12
    coarse = check_convergence(log_moment_L, np.array([60.0]), 0.3, 0.01, grid=QuadratureGrid(16))
    assert not coarse.converged


def test_spec_time_must_match():
    with pytest.raises(InvalidParameterError):
        make_L_evaluator(0.3, 1.0, spec=HeatKernelSpec(2.0))


def test_gamma_is_density():
    model = MeanFieldModel(2.0, 0.3)
    gamma = make_gamma_evaluator(model, 0.5, (0.4, 0.0))
    grid = QuadratureGrid(512)
    assert gamma(grid.nodes) @ grid.weights == pytest.approx(1.0, abs=1e-12)
    assert variational_distance(gamma, gamma, grid) == 0.0
    other = make_gamma_evaluator(model, 0.5, (-0.4, 0.0))
    d = variational_distance(gamma, other, grid)
    assert 0 < d <= 1


def test_gamma_needs_unique_minimizer():
    class Report:
        unique = False
        global_minima = ()

    with pytest.raises(KernelUndefinedError):
        make_gamma_evaluator(MeanFieldModel(1.0), 1.0, Report())


def test_generic_model_rejected_for_rotator_functions():
    with pytest.raises(InvalidParameterError):
        make_F0_evaluator(MeanFieldModel(1.0, interaction="generic"))


def test_conventions_differ():
    # the alternate convention halves the effective time, so G changes
    U = np.array([2.0])
    a = make_G_evaluator(5.0, 0.16, 0.3, 1.0)(U)
    b = make_G_evaluator(5.0, 0.16, 0.3, 1.0, spec=HeatKernelSpec(1.0, Convention.WRAPPED_PT))(U)
    c = make_G_evaluator(5.0, 0.16, 0.3, 1.0, spec=None)(U)
    assert a == c and abs(a - b) > 1e-3
