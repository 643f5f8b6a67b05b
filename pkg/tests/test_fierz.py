import numpy as np
import pytest

from sjclab.fierz import (
    CurvatureSymmetryError,
    _CubicCache,
    _contract_R,
    check_curvature_symmetries,
    fierz_check,
    random_admissible_curvature,
    random_admissible_nabla_curvature,
    random_odd_spinor,
    sr_vector,
)
from sjclab.grassmann import GrassmannElement
from sjclab.spin import GAMMA_EPS, GAMMA_SYM, ISPIN
from sjclab.targets import hsc_curvature_lowered, standard_J


def brute_force_sr(psi, R):
    """Independent expansion of the cubic contraction, no caching or reuse."""
    dim = len(psi[0])
    L = psi[0][0].L
    eps = {(0, 1): 1.0, (1, 0): -1.0}
    out = []
    for alpha in range(2):
        acc = [GrassmannElement.zero(L) for _ in range(dim)]
        for (kappa, lam), w in eps.items():
            for a in range(dim):
                for b in range(dim):
                    for c in range(dim):
                        mono = psi[alpha][a] * psi[kappa][b] * psi[lam][c]
                        for e in range(dim):
                            if R[a, b, c, e]:
                                acc[e] = acc[e] + mono * (w * R[a, b, c, e])
        out.append(acc)
    return out


class TestSRContraction:
    def test_zero_curvature(self):
        rng = np.random.default_rng(0)
        psi = random_odd_spinor(rng, L=4, dim=2)
        sr = sr_vector(psi, np.zeros((2, 2, 2, 2)))
        assert all(g == GrassmannElement.zero(4) for row in sr for g in row)

    def test_vanishes_when_one_spinor_component_vanishes(self):
        # every monomial of the contraction contains a factor from each row
        rng = np.random.default_rng(1)
        psi = random_odd_spinor(rng, L=4, dim=2)
        psi[1] = [GrassmannElement.zero(4) for _ in range(2)]
        R = random_admissible_curvature(rng, 2)
        sr = sr_vector(psi, R)
        assert all(g == GrassmannElement.zero(4) for row in sr for g in row)

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(2)
        for t in range(5):
            dim = 2 if t % 2 else 4
            psi = random_odd_spinor(rng, L=4, dim=dim)
            R = random_admissible_curvature(rng, dim)
            assert sr_vector(psi, R) == brute_force_sr(psi, R)

    def test_cubic_vanishes_below_three_generators(self):
        rng = np.random.default_rng(3)
        psi = random_odd_spinor(rng, L=2, dim=2)
        R = random_admissible_curvature(rng, 2)
        sr = sr_vector(psi, R)
        assert all(g == GrassmannElement.zero(2) for row in sr for g in row)


class TestIdentityChains:
    def test_random_admissible_tensors_exact(self):
        rng = np.random.default_rng(4)
        for t in range(20):
            dim = 4 if t % 5 == 4 else 2
            R = random_admissible_curvature(rng, dim)
            psi = random_odd_spinor(rng, L=4, dim=dim)
            rep = fierz_check(R, psi)
            assert rep["chain_a"] == 0.0
            assert rep["chain_b"] == 0.0

    def test_constant_hsc_tensor_exact(self):
        rng = np.random.default_rng(5)
        for dim in (2, 4):
            R = hsc_curvature_lowered(4.0, np.eye(dim), standard_J(dim // 2))
            psi = random_odd_spinor(rng, L=4, dim=dim)
            rep = fierz_check(R, psi)
            assert rep["max_deviation"] == 0.0

    def test_derivative_variant_exact(self):
        rng = np.random.default_rng(6)
        for _ in range(5):
            R = random_admissible_curvature(rng, 2)
            dR = random_admissible_nabla_curvature(rng, 2)
            psi = random_odd_spinor(rng, L=4, dim=2)
            rep = fierz_check(R, psi, nablaR=dR, with_derivative=True)
            assert rep["chain_a_derivative"] == 0.0
            assert rep["chain_b_derivative"] == 0.0

    def test_two_term_second_chain_fails(self):
        # the antisymmetric completion term in chain B is genuinely needed
        rng = np.random.default_rng(7)
        psi = random_odd_spinor(rng, L=4, dim=2)
        R = random_admissible_curvature(rng, 2)
        cache = _CubicCache(psi)
        sr = sr_vector(psi, R, cache)
        bad = 0.0
        for mu in range(2):
            for nu in range(2):
                for sg in range(2):
                    lhs = [g * 6.0 for g in _contract_R(cache, R, mu, nu, sg)]
                    rhs = [GrassmannElement.zero(4) for _ in range(2)]
                    for tau in range(2):
                        c = (nu == sg) * ISPIN[mu, tau] - sum(
                            GAMMA_SYM[t][nu, sg] * GAMMA_EPS[t][mu, tau] for t in range(2)
                        )
                        if c:
                            rhs = [x + g * c for x, g in zip(rhs, sr[tau])]
                    bad = max(
                        bad,
                        max(
                            (abs(v) for l, r in zip(lhs, rhs) for v in (l - r).terms.values()),
                            default=0.0,
                        ),
                    )
        assert bad > 0.0

    def test_derivative_variant_needs_four_generators(self):
        rng = np.random.default_rng(8)
        psi = random_odd_spinor(rng, L=2, dim=2)
        R = random_admissible_curvature(rng, 2)
        dR = random_admissible_nabla_curvature(rng, 2)
        with pytest.raises(ValueError):
            fierz_check(R, psi, nablaR=dR, with_derivative=True)


class TestAdmissibility:
    def test_random_generator_has_all_symmetries(self):
        rng = np.random.default_rng(9)
        for dim in (2, 4, 6):
            R = random_admissible_curvature(rng, dim)
            check_curvature_symmetries(R)
            assert R.dtype == float and np.all(R == np.round(R))

    def test_symmetry_violation_rejected_with_diagnosis(self):
        rng = np.random.default_rng(10)
        T = rng.standard_normal((2, 2, 2, 2))
        psi = random_odd_spinor(rng, L=4, dim=2)
        with pytest.raises(CurvatureSymmetryError) as err:
            fierz_check(T, psi)
        assert "antisymmetric" in str(err.value) or "Bianchi" in str(err.value)

    def test_bianchi_violation_diagnosed(self):
        # antisymmetrized and pair-symmetrized, but without the cyclic projection
        rng = np.random.default_rng(11)
        T = rng.integers(-3, 4, size=(4, 4, 4, 4)).astype(float)
        A = T - np.einsum("bacd->abcd", T)
        A = A - np.einsum("abdc->abcd", A)
        S = A + np.einsum("cdab->abcd", A)
        with pytest.raises(CurvatureSymmetryError) as err:
            check_curvature_symmetries(S)
        assert "Bianchi" in str(err.value)
