import numpy as np
import pytest

from sjclab import components as C
from sjclab.fields import ComponentMap, FieldError, Gravitino, gzeros, odd_masks
from sjclab.patch import ReducedPatch
from sjclab.spin import GAMMA
from sjclab.suites import holomorphic_base_map, random_direction_fields
from sjclab.targets import make_const_hsc, make_flat, make_fs_cp1, with_synthetic_nablaJ


def grid_waves(M):
    xs = np.arange(M) / M
    return np.meshgrid(xs, xs, indexing="ij")


def constrained_constant_psi(L, M, model, rng):
    """Constant spinor field with the chirality constraint psi_4 = J psi_3."""
    J0 = model.J_at(np.zeros(model.dim))
    psi = gzeros(L, (M, M, 2, model.dim))
    for m in odd_masks(L):
        v = rng.integers(-2, 3, size=model.dim).astype(complex)
        psi[m, :, :, 0, :] = v
        psi[m, :, :, 1, :] = v @ J0
    return psi


class TestTwistedDirac:
    def test_constant_spinor_flat(self):
        L, M = 2, 8
        patch = ReducedPatch(M)
        model = make_flat(1)
        cmap = ComponentMap.zero(L, M, 2)
        psi = gzeros(L, (M, M, 2, 2))
        psi[1] = 1.0
        out = C.twisted_dirac(psi, patch, model, cmap)
        assert np.abs(out).max() == 0.0

    def test_plane_wave_symbol(self):
        # Fourier symbol oracle: D(e^{2 pi i k x} c) = -2 pi i (k1 g1 + k2 g2) c
        L, M = 1, 32
        patch = ReducedPatch(M)
        model = make_flat(1)
        cmap = ComponentMap.zero(L, M, 2)
        x1, x2 = grid_waves(M)
        rng = np.random.default_rng(0)
        for k1, k2 in [(1, 0), (3, -2), (-5, 7)]:
            c = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
            psi = gzeros(L, (M, M, 2, 2))
            psi[1] = np.exp(2j * np.pi * (k1 * x1 + k2 * x2))[..., None, None] * c
            out = C.twisted_dirac(psi, patch, model, cmap)
            symbol = -2j * np.pi * (k1 * GAMMA[0] + k2 * GAMMA[1])
            expected = np.einsum("ba,xyae->xybe", symbol, psi[1])
            assert np.abs(out[1] - expected).max() <= 1e-10

    def test_chirality_commutation_flat_target(self):
        # (1 + I x J) D psi = D (1 - I x J) psi when the J-derivative vanishes
        L, M = 2, 16
        patch = ReducedPatch(M)
        model = make_flat(1)
        cmap = ComponentMap.zero(L, M, 2)
        rng = np.random.default_rng(1)
        _, _, zeta, _ = random_direction_fields(rng, L, M, 2)
        J, _, _, _ = C.model_grids(model, cmap, patch)
        lhs = 2 * C.spinor_antiholomorphic_part(C.twisted_dirac(zeta, patch, model, cmap), J)
        rhs = C.twisted_dirac(2 * C.spinor_holomorphic_part(zeta, J), patch, model, cmap)
        assert np.abs(lhs - rhs).max() <= 1e-9
        # and with the signs swapped
        lhs2 = 2 * C.spinor_holomorphic_part(C.twisted_dirac(zeta, patch, model, cmap), J)
        rhs2 = C.twisted_dirac(2 * C.spinor_antiholomorphic_part(zeta, J), patch, model, cmap)
        assert np.abs(lhs2 - rhs2).max() <= 1e-9

    def test_anti_self_adjoint_curved_gauge(self):
        L, M = 1, 48
        x1, x2 = grid_waves(M)
        lam = np.exp(0.1 * np.sin(2 * np.pi * x1) + 0.07 * np.cos(2 * np.pi * x2))
        patch = ReducedPatch(M, lam=lam)
        model = make_flat(1)
        cmap = ComponentMap.zero(L, M, 2)
        rng = np.random.default_rng(2)

        def rand_spinor():
            f = gzeros(L, (M, M, 2, 2))
            for kk1 in range(-2, 3):
                for kk2 in range(-2, 3):
                    amp = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
                    f[1] += np.exp(2j * np.pi * (kk1 * x1 + kk2 * x2))[..., None, None] * amp
            return f

        psi, Psi = rand_spinor(), rand_spinor()
        w = patch.dvol()

        def pair(a, b):
            return np.sum(a[1] * b[1] * w[..., None, None])

        val = pair(C.twisted_dirac(psi, patch, model, cmap), Psi) + pair(
            psi, C.twisted_dirac(Psi, patch, model, cmap)
        )
        scale = abs(pair(psi, psi)) + abs(pair(Psi, Psi))
        assert abs(val) / scale <= 1e-4

    def test_resolution_guard(self):
        with pytest.raises(Exception):
            ReducedPatch(3)


class TestResiduals:
    def test_all_zero_data(self):
        L, M = 2, 8
        res = C.residual_components(
            ComponentMap.zero(L, M, 2), Gravitino.zero(L, M), ReducedPatch(M), make_flat(1)
        )
        assert res.max_norm() == 0.0

    def test_affine_holomorphic_map(self):
        L, M = 2, 32
        cmap = holomorphic_base_map(L, M, 2, slope=1.5 - 0.25j)
        res = C.residual_components(cmap, Gravitino.zero(L, M), ReducedPatch(M), make_flat(1))
        assert res.max_norm() <= 1e-12

    def test_antiholomorphic_map_fails(self):
        L, M = 2, 16
        cmap = ComponentMap.zero(L, M, 2)
        cmap.phi_linear = np.array([[1.0, 0.0], [0.0, -1.0]])
        res = C.residual_components(cmap, Gravitino.zero(L, M), ReducedPatch(M), make_flat(1))
        assert res.max_norms()["cauchy_riemann"] > 0.5

    def test_holomorphic_section_flat_and_curved(self):
        rng = np.random.default_rng(3)
        for model in (make_flat(1), make_const_hsc(4.0, 1)):
            L, M = 4, 8
            cmap = (
                holomorphic_base_map(L, M, 2)
                if model.kind == "flat"
                else ComponentMap.zero(L, M, 2)
            )
            cmap.psi = constrained_constant_psi(L, M, model, rng)
            res = C.residual_components(cmap, Gravitino.zero(L, M), ReducedPatch(M), model)
            assert res.max_norm() == 0.0, model.kind

    def test_wrong_chirality_detected(self):
        L, M = 2, 8
        model = make_flat(1)
        J0 = model.J_at(np.zeros(2))
        cmap = ComponentMap.zero(L, M, 2)
        v = np.array([1.0, 2.0])
        cmap.psi[1, :, :, 0, :] = v
        cmap.psi[1, :, :, 1, :] = -(v @ J0)
        res = C.residual_components(cmap, Gravitino.zero(L, M), ReducedPatch(M), model)
        assert res.max_norms()["chirality"] > 1.0

    def test_residual_parity(self):
        from sjclab.fields import even_masks

        rng = np.random.default_rng(4)
        L, M = 2, 8
        model = make_flat(1)
        rho, xi, zeta, sigma = random_direction_fields(rng, L, M, 2)
        cmap = holomorphic_base_map(L, M, 2)
        cmap.phi_periodic = xi
        cmap.psi = zeta
        cmap.F = sigma
        res = C.residual_components(cmap, Gravitino(L=L, chi=rho), ReducedPatch(M), model)
        for name, parity in [
            ("chirality", "odd"),
            ("auxiliary", "even"),
            ("cauchy_riemann", "even"),
            ("dirac", "odd"),
        ]:
            block = res.blocks()[name]
            wrong = even_masks(L) if parity == "odd" else odd_masks(L)
            for m in wrong:
                assert np.abs(block[m]).max() == 0.0, (name, m)

    def test_grid_mismatch_error(self):
        with pytest.raises(FieldError):
            C.residual_components(
                ComponentMap.zero(2, 8, 2), Gravitino.zero(2, 16), ReducedPatch(16), make_flat(1)
            )

    def test_curved_chart_needs_soulless_phi(self):
        L, M = 2, 8
        cmap = ComponentMap.zero(L, M, 2)
        cmap.phi_periodic[3] = 0.1  # even soul correction
        with pytest.raises(FieldError):
            C.residual_components(cmap, Gravitino.zero(L, M), ReducedPatch(M), make_fs_cp1())

    def test_fubini_study_constant_map_with_section(self):
        # position-dependent chart tensors: constant map based away from the
        # chart origin, with a covariantly constant constrained section
        rng = np.random.default_rng(13)
        L, M = 4, 8
        model = make_fs_cp1()
        cmap = ComponentMap.zero(L, M, 2)
        cmap.phi_periodic[0, :, :, :] = np.array([0.3, -0.2])
        cmap.psi = constrained_constant_psi(L, M, model, rng)
        res = C.residual_components(cmap, Gravitino.zero(L, M), ReducedPatch(M), model)
        assert res.max_norm() <= 1e-12

    def test_fubini_study_nonconstant_map_cauchy_riemann_block(self):
        # the Cauchy-Riemann block only sees dphi and J, independent of Gamma
        L, M = 2, 16
        model = make_fs_cp1()
        cmap = ComponentMap.zero(L, M, 2)
        x1, x2 = grid_waves(M)
        cmap.phi_periodic[0, :, :, 0] = 0.1 * np.sin(2 * np.pi * x1)
        cmap.phi_periodic[0, :, :, 1] = 0.1 * np.cos(2 * np.pi * x2)
        patch = ReducedPatch(M)
        res = C.residual_components(cmap, Gravitino.zero(L, M), patch, model)
        J0 = model.J_at(np.zeros(2))
        dphi = C.dphi_frame(cmap, patch)
        expected = 0.5 * (
            dphi
            + np.einsum(
                "kl,sxylb,bc->sxykc",
                np.array([[0.0, 1.0], [-1.0, 0.0]]),
                dphi,
                J0,
            )
        )
        assert np.abs(res.blocks()["cauchy_riemann"] - expected).max() <= 1e-12

    def test_grid_sr_matches_exact_engine(self):
        # the vectorized grid contraction and the exact scalar engine were
        # written independently; they must agree coefficient by coefficient
        from sjclab.fierz import random_admissible_curvature, random_odd_spinor, sr_vector

        rng = np.random.default_rng(21)
        L, M, dim = 4, 4, 2
        psi_exact = random_odd_spinor(rng, L=L, dim=dim)
        R = random_admissible_curvature(rng, dim)
        psi_grid = gzeros(L, (M, M, 2, dim))
        for alpha in range(2):
            for a in range(dim):
                for mask, coeff in psi_exact[alpha][a].terms.items():
                    psi_grid[mask, :, :, alpha, a] = coeff
        Rop = np.broadcast_to(R, (M, M, dim, dim, dim, dim))
        sr_grid = C.sr_contraction(psi_grid, Rop, L)
        sr_exact = sr_vector(psi_exact, R)
        for alpha in range(2):
            for e in range(dim):
                for mask in range(1 << L):
                    expect = sr_exact[alpha][e].terms.get(mask, 0.0)
                    assert np.abs(sr_grid[mask, :, :, alpha, e] - expect).max() <= 1e-12

    def test_sr_collapse_on_kahler_constraint(self):
        rng = np.random.default_rng(5)
        L, M = 4, 4
        model = make_const_hsc(4.0, 1)
        psi = constrained_constant_psi(L, M, model, rng)
        Rop = np.broadcast_to(model.curvature_op_at(np.zeros(2)), (M, M, 2, 2, 2, 2))
        assert np.abs(C.sr_contraction(psi, Rop, L)).max() == 0.0
        # unconstrained control is nonzero
        psi2 = psi.copy()
        psi2[1, :, :, 1, :] = np.array([1.0, 3.0])
        psi2[2, :, :, 1, :] = np.array([-2.0, 1.0])
        psi2[4, :, :, 1, :] = np.array([1.0, -1.0])
        assert np.abs(C.sr_contraction(psi2, Rop, L)).max() > 0.0


class TestChiralReduction:
    def test_holomorphic_half_is_clifford_contraction_of_dbar(self):
        # D^{1,0} zeta = delta_gamma((0,1)-part of nabla zeta) exactly, where
        # the Clifford action on dual spinors carries the dual-action sign;
        # this identification is what reduces the sphere operators to dbar
        rng = np.random.default_rng(20)
        L, M = 2, 16
        model = make_flat(1)
        patch = ReducedPatch(M)
        cmap = ComponentMap.zero(L, M, 2)
        J, _, _, _ = C.model_grids(model, cmap, patch)
        _, _, zeta, _ = random_direction_fields(rng, L, M, 2)
        z10 = C.spinor_holomorphic_part(zeta, J)
        lhs = C.spinor_antiholomorphic_part(C.twisted_dirac(z10, patch, model, cmap), J)
        dz = np.stack(
            [patch.diff(z10, 1, grid_axes=(1, 2)), patch.diff(z10, 2, grid_axes=(1, 2))],
            axis=3,
        )
        from sjclab.spin import IFRAME

        rot = np.einsum("kl,sxylae->sxykae", IFRAME, dz)
        antihol_form = 0.5 * (dz + np.einsum("sxykae,xyef->sxykaf", rot, J))
        rhs = -np.einsum("kba,sxykae->sxybe", GAMMA, antihol_form)
        assert np.abs(lhs - rhs).max() <= 1e-10


class TestGravitinoTerms:
    def test_pairing_antiholomorphic_at_holomorphic_map(self):
        rng = np.random.default_rng(6)
        L, M = 2, 16
        model = make_flat(1)
        patch = ReducedPatch(M)
        cmap = holomorphic_base_map(L, M, 2, slope=1.0 + 0.5j)
        J, _, _, _ = C.model_grids(model, cmap, patch)
        rho, _, _, _ = random_direction_fields(rng, L, M, 2)
        _, qrho = C.project_PQ(Gravitino(L=L, chi=rho))
        T = C.vee_q_pairing(qrho, C.dphi_frame(cmap, patch), L)
        assert np.abs(2 * C.spinor_antiholomorphic_part(T, J) - 2 * T).max() <= 1e-12

    def test_pure_gauge_gravitino_drops_out(self):
        # chi_k = gamma_k s has Q chi = 0, so it cannot move the residual
        rng = np.random.default_rng(7)
        L, M = 2, 16
        model = make_flat(1)
        patch = ReducedPatch(M)
        cmap = holomorphic_base_map(L, M, 2)
        s = gzeros(L, (M, M, 2))
        s[1] = rng.standard_normal((M, M, 2))
        chi = np.einsum("kab,sxyb->sxyka", GAMMA, s)
        res = C.residual_components(cmap, Gravitino(L=L, chi=chi), patch, model)
        assert res.max_norm() <= 1e-12

    def test_q_norm_parity_and_reality(self):
        rng = np.random.default_rng(8)
        L, M = 2, 8
        rho, _, _, _ = random_direction_fields(rng, L, M, 2)
        _, q = C.project_PQ(Gravitino(L=L, chi=rho))
        nq = C.q_norm_squared(q, L)
        assert np.abs(nq[0]).max() == 0.0  # no body: quadratic in odd values
        assert np.abs(nq[1]).max() == 0.0 and np.abs(nq[2]).max() == 0.0


class TestJEndomorphism:
    def test_vanishes_for_kahler_models(self):
        L, M = 2, 8
        for model in (make_flat(2), make_const_hsc(4.0, 2), make_fs_cp1()):
            dim = model.dim
            nablaJ = np.broadcast_to(
                model.nablaJ_at(np.zeros(dim)), (M, M, dim, dim, dim)
            )
            psi = gzeros(L, (M, M, 2, dim))
            psi[1] = 1.0
            jend = C.j_endomorphism(psi, nablaJ, L)
            assert np.abs(jend).max() == 0.0

    def test_anticommutes_with_J_synthetic(self):
        # two complex target dimensions: in one, all antisymmetric seeds
        # commute with J and the synthetic derivative collapses to zero
        rng = np.random.default_rng(9)
        L, M, dim = 2, 4, 4
        base = make_flat(2)
        model = with_synthetic_nablaJ(base, rng.standard_normal((dim, dim, dim)))
        J0 = model.J_at(np.zeros(dim))
        nJ0 = model.nablaJ_at(np.zeros(dim))
        assert np.abs(nJ0).max() > 0.1
        nablaJ = np.broadcast_to(nJ0, (M, M, dim, dim, dim))
        psi = gzeros(L, (M, M, 2, dim))
        psi[1] = rng.standard_normal((M, M, 2, dim))
        jend = C.j_endomorphism(psi, nablaJ, L)
        anti = np.einsum("sxymbc,cd->sxymbd", jend, J0) + np.einsum(
            "bc,sxymcd->sxymbd", J0, jend
        )
        assert np.abs(anti).max() <= 1e-12

    def test_j_terms_regression_values(self):
        # non-Kahler code path: frozen numbers pin the reconstructed
        # contraction order of the trace terms
        L, M, dim = 2, 4, 4
        base = make_flat(2)
        seeds = np.zeros((dim, dim, dim))
        seeds[0][0, 2] = 1.0
        seeds[0][2, 0] = -1.0
        model = with_synthetic_nablaJ(base, seeds)
        nJ0 = model.nablaJ_at(np.zeros(dim))
        assert np.abs(nJ0).max() > 0.0
        cmap = ComponentMap.zero(L, M, dim)
        cmap.psi[1, :, :, 0, 0] = 1.0
        cmap.psi[2, :, :, 1, 2] = 2.0
        res = C.residual_components(cmap, Gravitino.zero(L, M), ReducedPatch(M), model)
        norms = res.max_norms()
        assert norms["chirality"] == pytest.approx(2.0, abs=1e-14)
        assert norms["cauchy_riemann"] == pytest.approx(0.5, abs=1e-14)
        assert norms["auxiliary"] == 0.0
        assert norms["dirac"] == 0.0


class TestWeylCovariance:
    def _data(self, rng, L, M):
        model = make_flat(1)
        cmap = holomorphic_base_map(L, M, 2)
        rho, xi, zeta, sigma = random_direction_fields(rng, L, M, 2)
        cmap.phi_periodic = xi
        cmap.psi = zeta
        cmap.F = sigma
        return cmap, Gravitino(L=L, chi=rho), model

    def test_identity_rescale(self):
        rng = np.random.default_rng(10)
        cmap, grav, model = self._data(rng, 2, 16)
        rep = C.weyl_covariance_check(cmap, grav, ReducedPatch(16), model, 1.0)
        assert rep["passed"]
        assert all(b["max_deviation"] == 0.0 for b in rep["blocks"].values())

    def test_constant_rescale_exact_weights(self):
        rng = np.random.default_rng(11)
        cmap, grav, model = self._data(rng, 2, 16)
        rep = C.weyl_covariance_check(cmap, grav, ReducedPatch(16), model, 2.0)
        assert rep["passed"]
        assert [b["frame_weight_exponent"] for b in rep["blocks"].values()] == [-1, -2, -2, -3]
        assert [b["abstract_weight_exponent"] for b in rep["blocks"].values()] == [-1, -2, 0, -3]

    def test_random_rescale_preserves_solutions(self):
        rng = np.random.default_rng(12)
        L, M = 2, 32
        model = make_flat(1)
        sol = holomorphic_base_map(L, M, 2)
        sol.psi = constrained_constant_psi(L, M, model, rng)
        grav = Gravitino.zero(L, M)
        assert C.residual_components(sol, grav, ReducedPatch(M), model).max_norm() == 0.0
        x1, x2 = grid_waves(M)
        u = np.exp(0.05 * np.sin(2 * np.pi * x1) + 0.03 * np.cos(2 * np.pi * x2))
        sol2, grav2 = C.weyl_rescale_fields(sol, grav, u)
        res = C.residual_components(sol2, grav2, ReducedPatch(M, lam=u), model)
        assert res.max_norm() <= 1e-4
