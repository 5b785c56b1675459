import math

import numpy as np
import pytest
from scipy import optimize

from gibbs_scope.certificates import lattice as lat
from gibbs_scope.certificates import meanfield as mf
from gibbs_scope.circle_kernel import HeatKernelSpec, std_alpha_heat
from gibbs_scope.errors import (
    DivergenceError,
    InvalidKernelError,
    InvalidParameterError,
)

BETAS = [0.1, 0.5, 1.0, 2.0, 5.0]


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("beta", BETAS)
def test_cfg_constant_closed_form(beta, n):
    C = mf.mf_cfg_constant(mf.quadratic_rotator_spec(beta, n))
    assert C.converged
    assert C.value == pytest.approx(4 * beta * (n + 1) * math.exp(beta), rel=1e-8)
    assert C.delta_g == pytest.approx(2.0 * (n + 1))
    assert C.lipschitz_norm == pytest.approx(1.0)
    assert C.delta_Fg == pytest.approx(2 * beta)


def test_sphere_points_on_unit_sphere():
    for n in (1, 2):
        p = mf.sphere_points(n, 9)
        assert p.shape[1] == n + 1
        assert np.allclose(np.linalg.norm(p, axis=1), 1.0)
    with pytest.raises(InvalidParameterError):
        mf.sphere_points(3)


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("beta", BETAS)
def test_thm2_threshold_inversion(beta, n):
    th = mf.cor3(beta, n)
    closed = -math.log(1 - 1 / (32 * beta ** 2 * (n + 1) ** 2 * math.exp(2 * beta))) / n
    root = optimize.brentq(lambda t: th.condition(t) - 1.0, 0.0, 10 * closed, xtol=1e-300, rtol=1e-15)
    assert th.t_max == pytest.approx(closed, rel=1e-12)
    assert th.t_max == pytest.approx(root, rel=1e-12)


@pytest.mark.parametrize("t", [1e-6, 0.01, 0.3])
def test_cor3_coefficient_identity(t):
    beta, n = 0.7, 2
    th = mf.thm2_threshold(beta, n, mf.cor3_constant(beta, n))
    direct = 4 * math.sqrt(2) * beta * (n + 1) * math.exp(beta) * math.sqrt(1 - math.exp(-n * t))
    assert th.condition(t) == pytest.approx(direct, rel=1e-14)


def test_cor3_weak_coupling_holds_for_all_t():
    th = mf.cor3(0.05, 1)
    assert th.holds_for_all_t and math.isinf(th.t_max)
    assert th.holds_at(1e6)


def test_thm2_monotone_in_beta_and_t():
    betas = np.linspace(0.01, 3, 30)
    times = np.geomspace(1e-8, 10, 30)
    grid = np.array([[mf.cor3(b).holds_at(t) for t in times] for b in betas])
    # once false, stays false along increasing beta and increasing t
    assert np.all(np.diff(grid.astype(int), axis=0) <= 0)
    assert np.all(np.diff(grid.astype(int), axis=1) <= 0)


def test_generalint_certificate_with_heat_kernel():
    C = mf.cor3_constant(0.05, 1)
    sk = std_alpha_heat(HeatKernelSpec(0.1))
    cert = mf.mf_gibbs_certificate(C, sk)
    assert cert.holds
    assert cert.margin == pytest.approx(1 - C * sk, rel=1e-12)
    # the scalar thm2 bound is the same product when std_alpha(k_t) takes its closed form
    th = mf.thm2_threshold(0.05, 1, C)
    assert C * sk == pytest.approx(th.condition(0.1), rel=1e-8)


@pytest.mark.parametrize("beta", [0.05, 0.3, 1.0])
def test_prop1_arc_count(beta):
    C = mf.cor3_constant(beta, 1)
    cert = mf.fineness_certificate_mf(C, 1e-4)
    assert 0 < cert.rho_max < math.inf
    M = mf.minimal_arc_count(cert.rho_max)
    assert mf.arc_diameter(M) < cert.rho_max
    assert M == 1 or mf.arc_diameter(M - 1) >= cert.rho_max


def test_arc_diameter_values():
    assert mf.arc_diameter(1) == 2.0
    assert mf.arc_diameter(2) == pytest.approx(2.0)
    assert mf.arc_diameter(6) == pytest.approx(1.0)


# --------------------------------------------------------------------- lattice


@pytest.mark.parametrize("beta, J, h", [(0.1, 1.0, 0.0), (0.3, 0.5, 0.4), (1.0, 1.0, 2.0)])
def test_lipschitz_constants_match_envelopes(beta, J, h):
    spec = lat.LatticeInteractionSpec(beta, J, h)
    L = lat.lattice_L_constants(spec)
    assert L.converged
    assert L.L_pair == pytest.approx(L.pair_envelope, rel=1e-9)
    assert L.L_site <= L.site_envelope * (1 + 1e-12)
    assert L.L_site == pytest.approx(L.site_envelope, rel=1e-9)


def test_matrices_translation_invariant():
    spec = lat.LatticeInteractionSpec(0.1, Ls=5)
    C = lat.cbar_matrix_t(spec, 0.5)
    D = lat.neumann_series(C)
    for M in (C, D):
        dense = M.to_dense()
        sites = [(i, j) for i in range(5) for j in range(5)]
        for a, (i1, j1) in enumerate(sites):
            for b, (i2, j2) in enumerate(sites):
                shifted = ((i1 + 2) % 5, (j1 + 3) % 5), ((i2 + 2) % 5, (j2 + 3) % 5)
                assert dense[a, b] == M.entry(*shifted)


def test_neumann_ring_geometric():
    c = 0.2
    C = lat.DobrushinMatrix.from_offsets(8, 1, {(1,): c, (-1,): c})
    D = lat.neumann_series(C)
    assert abs(D.row_sum_sup - 1 / (1 - 2 * c)) < 1e-12


def test_neumann_matches_dense_inverse():
    spec = lat.LatticeInteractionSpec(0.1, Ls=4)
    C = lat.cbar_matrix_t(spec, 1.0)
    D = lat.neumann_series(C).to_dense()
    ref = np.linalg.inv(np.eye(16) - C.to_dense())
    assert np.max(np.abs(D - ref)) < 1e-11


def test_neumann_divergence():
    C = lat.DobrushinMatrix.from_offsets(6, 1, {(1,): 0.5, (-1,): 0.5})
    with pytest.raises(DivergenceError):
        lat.neumann_series(C)


def test_genthm_t_max_trend():
    t_max = [lat.genthm_t_max(lat.LatticeInteractionSpec(b)) for b in (0.05, 0.1, 0.2, 0.4)]
    assert t_max[0] == t_max[1] == math.inf
    assert t_max[1] > t_max[2] > t_max[3]
    assert t_max[2] == pytest.approx(-math.log1p(-1 / (2 * 16 * 0.04 * math.exp(0.4))), rel=1e-9)


def test_genthm_beta_zero_holds_for_all_t():
    spec = lat.LatticeInteractionSpec(0.0)
    for t in (0.1, 10.0, 1e4):
        cert = lat.genthm_certificate(spec, t)
        assert cert.holds and cert.row_sum == 0.0
    assert math.isinf(lat.genthm_t_max(spec))


def test_genthm_qbar_decay():
    cert = lat.genthm_certificate(lat.LatticeInteractionSpec(0.1), 0.5)
    prof = cert.Qbar.graph_distance_profile()
    assert cert.holds
    assert all(a >= b for a, b in zip(prof[1:], prof[2:]))
    assert prof[-1] < 1e-8 * prof[1]


def test_genthm_monotone():
    betas = [0.05, 0.1, 0.2, 0.3, 0.4, 0.6]
    times = [0.01, 0.1, 0.5, 1.0, 5.0]
    grid = np.array([[lat.genthm_certificate(lat.LatticeInteractionSpec(b), t).holds for t in times]
                     for b in betas]).astype(int)
    assert np.all(np.diff(grid, axis=0) <= 0)
    assert np.all(np.diff(grid, axis=1) <= 0)


def test_fineapp_threshold():
    spec = lat.LatticeInteractionSpec(0.3)
    cert = lat.fineapp_certificate(spec, 0.1)
    assert cert.holds
    assert cert.rho_max == pytest.approx(2 / (4 * math.exp(0.3) * 0.6), rel=1e-9)
    M = cert.min_arcs
    assert mf.arc_diameter(M) < cert.rho_max <= mf.arc_diameter(M - 1)
    assert not lat.fineapp_certificate(spec, 1.0).holds


def test_posterior_metric():
    k_short, k_long = lat.heat_kernel_k(0.5), lat.heat_kernel_k(2.0)
    d_short = lat.posterior_metric_distance(k_short, 0.0, math.pi)
    d_long = lat.posterior_metric_distance(k_long, 0.0, math.pi)
    assert 0 < d_long < d_short <= 1
    assert lat.posterior_metric_distance(k_short, 1.0, 1.0) == 0.0
    with pytest.raises(InvalidKernelError):
        lat.posterior_metric_distance(lambda s, e: np.cos(s - e), 0.0, 1.0)


@pytest.mark.parametrize("t", [0.2, 0.5, 2.0])
def test_std_ij_direct_below_bound(t):
    cmp = lat.std_ij_comparison(lat.LatticeInteractionSpec(0.1), t)
    assert cmp.direct <= cmp.bound * (1 + 1e-9)


def test_spec_validation():
    with pytest.raises(InvalidParameterError):
        lat.LatticeInteractionSpec(-1.0)
    with pytest.raises(InvalidParameterError):
        lat.LatticeInteractionSpec(1.0, Ls=2)
