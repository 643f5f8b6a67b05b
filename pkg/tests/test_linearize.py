import numpy as np
import pytest

from sjclab import components as C
from sjclab.fields import ComponentMap, Gravitino
from sjclab.patch import ReducedPatch
from sjclab.suites import holomorphic_base_map, random_direction_fields
from sjclab.targets import make_const_hsc, make_flat


@pytest.fixture(scope="module")
def setup():
    rng = np.random.default_rng(0)
    L, M = 2, 32
    model = make_flat(1)
    patch = ReducedPatch(M)
    cmap = holomorphic_base_map(L, M, model.dim)
    dirs = random_direction_fields(rng, L, M, model.dim)
    return L, M, model, patch, cmap, dirs


def test_xi_block_is_linearized_cauchy_riemann(setup):
    L, M, model, patch, cmap, (rho, xi, zeta, sigma) = setup
    rep = C.linearization_fd_check(cmap, patch, model, C.Directions(xi=xi))
    assert rep["passed"]
    # the only responding block is the third
    assert rep["blocks"]["cauchy_riemann"]["rel_error_h2"] <= 1e-6


def test_sigma_block_is_quarter(setup):
    L, M, model, patch, cmap, (rho, xi, zeta, sigma) = setup
    rep = C.linearization_fd_check(cmap, patch, model, C.Directions(sigma=sigma))
    assert rep["passed"]
    # explicit quarter: the finite difference of the second component is sigma/4
    grav0 = Gravitino.zero(L, M)
    h = 1e-3
    plus, minus = cmap.copy(), cmap.copy()
    plus.F = plus.F + h * sigma
    minus.F = minus.F - h * sigma
    d = (
        C.operator_components(plus, grav0, patch, model).c2
        - C.operator_components(minus, grav0, patch, model).c2
    ) / (2 * h)
    assert np.abs(d - 0.25 * sigma).max() <= 1e-9


def test_rho_block_responds_only_in_dirac_slot(setup):
    L, M, model, patch, cmap, (rho, xi, zeta, sigma) = setup
    grav0 = Gravitino.zero(L, M)
    h = 1e-3
    chi_plus = Gravitino(L=L, chi=h * rho)
    chi_minus = Gravitino(L=L, chi=-h * rho)
    cp = C.operator_components(cmap, chi_plus, patch, model)
    cm = C.operator_components(cmap, chi_minus, patch, model)
    d4 = (cp.c4 - cm.c4) / (2 * h)
    _, qrho = C.project_PQ(Gravitino(L=L, chi=rho))
    expected = 2.0 * C.vee_q_pairing(qrho, C.dphi_frame(cmap, patch), L)
    assert np.abs(d4 - expected).max() <= 1e-9
    for block in ((cp.c1 - cm.c1), (cp.c2 - cm.c2), (cp.c3 - cm.c3)):
        assert np.abs(block / (2 * h)).max() <= 1e-9


def test_zeta_block(setup):
    L, M, model, patch, cmap, (rho, xi, zeta, sigma) = setup
    rep = C.linearization_fd_check(cmap, patch, model, C.Directions(zeta=zeta))
    assert rep["passed"]


def test_combined_directions_with_richardson(setup):
    L, M, model, patch, cmap, dirs_tuple = setup
    rho, xi, zeta, sigma = dirs_tuple
    rep = C.linearization_fd_check(
        cmap, patch, model, C.Directions(rho=rho, xi=xi, zeta=zeta, sigma=sigma)
    )
    assert rep["passed"]
    for block in rep["blocks"].values():
        assert block["richardson_error"] <= 1e-6


def test_constant_hsc_model():
    rng = np.random.default_rng(1)
    L, M = 2, 16
    model = make_const_hsc(4.0, 1)
    patch = ReducedPatch(M)
    cmap = holomorphic_base_map(L, M, model.dim)
    dirs = random_direction_fields(rng, L, M, model.dim)
    rep = C.linearization_fd_check(
        cmap, patch, model, C.Directions(rho=dirs[0], xi=dirs[1], zeta=dirs[2], sigma=dirs[3])
    )
    assert rep["passed"]


def test_precondition_rejects_nonholomorphic_base():
    rng = np.random.default_rng(2)
    L, M = 2, 16
    model = make_flat(1)
    patch = ReducedPatch(M)
    cmap = ComponentMap.zero(L, M, 2)
    cmap.phi_linear = np.array([[1.0, 0.0], [0.0, -1.0]])  # antiholomorphic
    dirs = random_direction_fields(rng, L, M, 2)
    with pytest.raises(C.PreconditionError):
        C.linearization_fd_check(cmap, patch, model, C.Directions(xi=dirs[1]))


def test_operator_components_rejects_non_kahler():
    from sjclab.targets import with_synthetic_nablaJ

    rng = np.random.default_rng(3)
    L, M = 2, 8
    model = with_synthetic_nablaJ(make_flat(2), rng.standard_normal((4, 4, 4)))
    cmap = ComponentMap.zero(L, M, 4)
    with pytest.raises(C.PreconditionError):
        C.operator_components(cmap, Gravitino.zero(L, M), ReducedPatch(M), model)
