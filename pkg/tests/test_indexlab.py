import numpy as np
import pytest

from sjclab import indexlab as il


class TestOracles:
    def test_h_oracle_examples(self):
        assert il.h_oracle(3) == (4, 0)
        assert il.h_oracle(-1) == (0, 0)
        assert il.h_oracle(-3) == (0, 2)
        assert il.h_oracle(0) == (1, 0)

    def test_euler_characteristic(self):
        for k in range(-6, 7):
            h0, h1 = il.h_oracle(k)
            assert h0 - h1 == k + 1

    def test_formula_values(self):
        assert il.riemann_roch(3, 0, 0) == 6
        assert il.riemann_roch(2, 1, 0) == 0
        assert il.dirac10_index(2) == 4
        # the degree-1 sphere-to-sphere holomorphic Dirac half twists the
        # tangent pullback (c1 = 2) by the dual spinor bundle (c1 = -1)
        assert il.riemann_roch(1, 0, 2 - 1) == il.dirac10_index(2) == 4
        assert il.riemann_roch(1, 0, 2) == 6  # untwisted rank-1 operator


class TestSphereOperators:
    @pytest.mark.parametrize("k", range(-4, 7))
    def test_kernel_matches_oracle(self, k):
        M = abs(k) + 4
        rep = il.numeric_index(il.build_dbar_sphere(k, M))
        h0, h1 = il.h_oracle(k)
        assert rep.kernel_dim == h0
        assert rep.cokernel_dim == h1
        assert rep.conclusive
        assert rep.numeric_index_real == il.riemann_roch(1, 0, k)

    def test_exact_kernel_representatives(self):
        for k in (0, 2, 4):
            M = k + 4
            op = il.build_dbar_sphere(k, M)
            dom = il.LineBundleBasis(degree=k, level=M)
            vecs = dom.holomorphic_kernel_vectors()
            assert vecs.shape[0] == k + 1
            assert np.abs(op.matrix @ vecs.T).max() == 0.0

    def test_cutoff_stability_of_index(self):
        for k in (-3, -1, 0, 2, 4):
            r1 = il.numeric_index(il.build_dbar_sphere(k, abs(k) + 4))
            r2 = il.numeric_index(il.build_dbar_sphere(k, abs(k) + 6))
            assert r1.numeric_index == r2.numeric_index

    def test_dirac10_for_low_degree_maps(self):
        for d in (1, 2, 3):
            op = il.build_dirac10_sphere(d, 8 + 2 * d)
            rep = il.numeric_index(op)
            assert rep.numeric_index_real == 4 * d
            assert rep.kernel_dim == 2 * d
            assert rep.cokernel_dim == 0

    def test_cutoff_guard(self):
        with pytest.raises(il.IndexLabError):
            il.build_dbar_sphere(3, 2)

    def test_index_additivity_on_pairs(self):
        pairs = [(2, -3), (0, 1), (-2, 4)]
        for k1, k2 in pairs:
            o1 = il.build_dbar_sphere(k1, abs(k1) + 4)
            o2 = il.build_dbar_sphere(k2, abs(k2) + 4)
            s = il.direct_sum(o1, o2)
            assert (
                il.numeric_index(s).numeric_index
                == il.numeric_index(o1).numeric_index + il.numeric_index(o2).numeric_index
            )


class TestTorusOperators:
    def test_anti_self_adjoint(self):
        op = il.build_dirac_torus(1, 8)
        assert np.abs(op.matrix + op.matrix.conj().T).max() <= 1e-12

    @pytest.mark.parametrize("n", [1, 2])
    def test_kernel_and_index(self, n):
        rep = il.numeric_index(il.build_dirac_torus(n, 6), formula_index=0)
        assert rep.kernel_dim == 4 * n
        assert rep.numeric_index == 0

    def test_kernel_matches_fourier_zero_modes(self):
        # the kernel is exactly the k = 0 Fourier block
        op = il.build_dirac_torus(1, 6)
        sv = op.singular_values()
        zero = (sv <= 1e-12).sum()
        assert zero == 4

    def test_chiral_halves_have_half_kernel(self):
        d10 = il.build_dirac_torus_chiral(1, 6, "10")
        d01 = il.build_dirac_torus_chiral(1, 6, "01")
        assert il.numeric_index(d10).kernel_dim == 2
        assert il.numeric_index(d01).kernel_dim == 2


class TestAdjointRelation:
    def test_full_report(self):
        rep = il.adjoint_relation_check(6)
        assert rep["passed"], rep["checks"]

    def test_gram_adjoint_is_honest(self):
        # <A v, w>_cod = <v, A* w>_dom for random vectors
        rng = np.random.default_rng(0)
        op = il.build_dbar_sphere(1, 6)
        a_star = op.gram_adjoint()
        for _ in range(5):
            v = rng.standard_normal(op.matrix.shape[1])
            w = rng.standard_normal(op.matrix.shape[0])
            lhs = (op.matrix @ v).conj() @ op.gram_codomain @ w
            rhs = v.conj() @ op.gram_domain @ (a_star @ w)
            assert abs(lhs - rhs) <= 1e-9 * (1 + abs(lhs))


class TestBochnerGap:
    def test_sphere_flat_target_gap_matches_curvature_bound(self):
        gap = il.bochner_gap(il.build_dirac01_sphere(-1, 10), scalar_curvature=2.0)
        assert gap.kernel_dim == 0
        assert gap.sigma_min > 0.1
        # round normalization: the lowest mode saturates the curvature bound
        assert abs(gap.sigma_min - np.sqrt(0.5)) <= 1e-9

    def test_adjoint_half_has_identical_singular_values(self):
        a = np.sort(il.build_dbar_sphere(-1, 8).singular_values())
        b = np.sort(il.build_dirac01_sphere(-1, 8).singular_values())
        assert np.abs(a - b).max() <= 1e-10

    def test_torus_flat_target_zero_modes(self):
        gap = il.bochner_gap(il.build_dirac_torus_chiral(1, 8, "01"), scalar_curvature=0.0)
        assert gap.sigma_min <= 1e-12
        assert gap.kernel_dim > 0

    def test_positive_degree_control(self):
        rep = il.numeric_index(il.build_dbar_sphere(3, 9))
        sv = rep.singular_values
        assert rep.kernel_dim == 4 and rep.cokernel_dim == 0
        assert sv[sv > 1e-8 * sv.max()].min() > 0.1


class TestReports:
    def test_inconclusive_flag_on_tiny_gap(self):
        # a singular value just below threshold with one barely above trips
        # the gap sanity requirement
        mat = np.diag([1.0, 5e-9, 1e-9])
        op = il.OperatorMatrix(
            matrix=mat.astype(complex),
            gram_domain=np.eye(3),
            gram_codomain=np.eye(3),
            tag="synthetic",
            is_complex_linear=True,
        )
        rep = il.numeric_index(op, threshold=2e-9)
        assert not rep.conclusive

    def test_real_complex_bookkeeping(self):
        rep = il.numeric_index(il.build_dbar_sphere(2, 6))
        assert rep.kernel_dim_real == 2 * rep.kernel_dim
        assert rep.numeric_index_real == 2 * rep.numeric_index
        top = il.numeric_index(il.build_dirac_torus(1, 4))
        assert top.kernel_dim_real == top.kernel_dim  # real representation

    def test_ill_conditioned_gram_rejected(self):
        g = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-16]])
        op = il.OperatorMatrix(
            matrix=np.eye(2, dtype=complex),
            gram_domain=g,
            gram_codomain=np.eye(2),
            tag="bad",
            is_complex_linear=True,
        )
        with pytest.raises(il.IndexLabError):
            il.numeric_index(op)

    def test_report_dict(self):
        rep = il.numeric_index(il.build_dbar_sphere(1, 6), formula_index=4)
        d = rep.as_dict()
        assert d["formula_index"] == 4
        assert d["numeric_index_real"] == 4
