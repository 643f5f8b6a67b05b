"""Exact cubic curvature-contraction identities in Grassmann arithmetic.

For an admissible curvature tensor R and odd spinor coefficients
psi_mu (mu in {3, 4}), with SR_alpha = eps^{kappa lambda}
R(psi_alpha, psi_kappa) psi_lambda, the following hold for every index
triple (mu, nu, sigma):

  (A)  6 R(psi_mu, psi_nu) psi_sigma
          = 2 (Gamma^t_{mu nu} G_t[sigma, tau] - delta_{mu nu} I[sigma, tau]) SR_tau

  (B)  6 R(psi_mu, psi_nu) psi_sigma
          = (delta_{nu sigma} I[mu, tau] - Gamma^t_{nu sigma} G_t[mu, tau]
             + 3 I[nu, sigma] delta[mu, tau]) SR_tau

where G_t are the gamma matrices with the second spinor index lowered by
eps.  Chain (B) carries the antisymmetric completion term
3 I[nu, sigma] SR_mu; without it the two-term form fails on mixed triples
(checked exactly), since the map (nu, sigma) -> R(psi_mu, psi_nu) psi_sigma
is not symmetric.  Both chains also hold with R replaced by a derivative
tensor contracted with a fourth odd spinor coefficient.

Everything here is exact: inputs are integer-valued tensors and Gaussian
integer spinor coefficients, so deviations of identically-zero quantities
are exactly 0.0.
"""

from __future__ import annotations

import numpy as np

from .grassmann import GrassmannElement
from .spin import EPS_UPPER, GAMMA_EPS, GAMMA_SYM, ISPIN


class CurvatureSymmetryError(ValueError):
    pass


def check_curvature_symmetries(R: np.ndarray, tol: float = 0.0) -> None:
    """Reject tensors without the full curvature symmetries, with diagnosis."""
    R = np.asarray(R)
    problems = []
    if np.abs(R + np.einsum("bacd->abcd", R)).max() > tol:
        problems.append("not antisymmetric in the first index pair")
    if np.abs(R + np.einsum("abdc->abcd", R)).max() > tol:
        problems.append("not antisymmetric in the second index pair")
    if np.abs(R - np.einsum("cdab->abcd", R)).max() > tol:
        problems.append("pair symmetry fails")
    bianchi = R + np.einsum("acdb->abcd", R) + np.einsum("adbc->abcd", R)
    if np.abs(bianchi).max() > tol:
        problems.append("first Bianchi identity fails")
    if problems:
        raise CurvatureSymmetryError("; ".join(problems))


def check_nabla_curvature_symmetries(dR: np.ndarray, tol: float = 0.0) -> None:
    dR = np.asarray(dR)
    for p in range(dR.shape[0]):
        try:
            check_curvature_symmetries(dR[p], tol)
        except CurvatureSymmetryError as exc:
            raise CurvatureSymmetryError(f"slot {p}: {exc}") from None


def random_admissible_curvature(
    rng: np.random.Generator, dim: int, scale: int = 3
) -> np.ndarray:
    """Integer-valued tensor with all algebraic curvature symmetries.

    Antisymmetrize both pairs, symmetrize the pair exchange, then remove
    the cyclic part; every step preserves integrality (an overall factor 3
    is kept to clear the Bianchi projector's denominator).
    """
    T = rng.integers(-scale, scale + 1, size=(dim, dim, dim, dim)).astype(float)
    A = T - np.einsum("bacd->abcd", T)
    A = A - np.einsum("abdc->abcd", A)
    S = A + np.einsum("cdab->abcd", A)
    cyc = S + np.einsum("acdb->abcd", S) + np.einsum("adbc->abcd", S)
    R = 3.0 * S - cyc
    check_curvature_symmetries(R)
    return R


def random_admissible_nabla_curvature(
    rng: np.random.Generator, dim: int, scale: int = 2
) -> np.ndarray:
    return np.stack(
        [random_admissible_curvature(rng, dim, scale) for _ in range(dim)]
    )


def random_odd_spinor(
    rng: np.random.Generator, L: int, dim: int, scale: int = 2
) -> list[list[GrassmannElement]]:
    """psi[mu][a]: odd Gaussian-integer Grassmann elements over L generators."""
    odd = [m for m in range(1 << L) if bin(m).count("1") % 2 == 1]
    out = []
    for _ in range(2):
        row = []
        for _ in range(dim):
            terms = {}
            for m in odd:
                re = int(rng.integers(-scale, scale + 1))
                im = int(rng.integers(-scale, scale + 1))
                if re or im:
                    terms[m] = complex(re, im)
            row.append(GrassmannElement(L, terms))
        out.append(row)
    return out


class _CubicCache:
    """Cached Grassmann monomials psi_mu^a psi_nu^b psi_sigma^c."""

    def __init__(self, psi: list[list[GrassmannElement]]):
        self.psi = psi
        self.dim = len(psi[0])
        self._pairs: dict = {}
        self._triples: dict = {}

    def pair(self, mu, a, nu, b) -> GrassmannElement:
        key = (mu, a, nu, b)
        if key not in self._pairs:
            self._pairs[key] = self.psi[mu][a] * self.psi[nu][b]
        return self._pairs[key]

    def triple(self, mu, a, nu, b, sg, c) -> GrassmannElement:
        key = (mu, a, nu, b, sg, c)
        if key not in self._triples:
            self._triples[key] = self.pair(mu, a, nu, b) * self.psi[sg][c]
        return self._triples[key]


def _contract_R(cache: _CubicCache, R: np.ndarray, mu: int, nu: int, sg: int) -> list[GrassmannElement]:
    """Vector R(psi_mu, psi_nu) psi_sigma (index pattern R[a,b,c,e])."""
    dim = cache.dim
    L = cache.psi[0][0].L
    out = [GrassmannElement.zero(L) for _ in range(dim)]
    for a in range(dim):
        for b in range(dim):
            for c in range(dim):
                col = R[a, b, c]
                if not col.any():
                    continue
                t = cache.triple(mu, a, nu, b, sg, c)
                if not t:
                    continue
                for e in range(dim):
                    if col[e]:
                        out[e] = out[e] + t * complex(col[e])
    return out


def sr_vector(
    psi: list[list[GrassmannElement]], R: np.ndarray, cache: _CubicCache | None = None
) -> list[list[GrassmannElement]]:
    """SR_alpha^e = eps^{kappa lambda} (R(psi_alpha, psi_kappa) psi_lambda)^e."""
    if cache is None:
        cache = _CubicCache(psi)
    dim = cache.dim
    L = psi[0][0].L
    out = []
    for alpha in range(2):
        acc = [GrassmannElement.zero(L) for _ in range(dim)]
        for kappa in range(2):
            for lam in range(2):
                w = EPS_UPPER[kappa, lam]
                if not w:
                    continue
                vec = _contract_R(cache, R, alpha, kappa, lam)
                acc = [x + v * w for x, v in zip(acc, vec)]
        out.append(acc)
    return out


def _max_coeff(vec: list[GrassmannElement]) -> float:
    dev = 0.0
    for g in vec:
        for c in g.terms.values():
            dev = max(dev, abs(c))
    return dev


def _chain_deviations(
    cache: _CubicCache, R: np.ndarray, sr: list[list[GrassmannElement]]
) -> tuple[float, float]:
    dim = cache.dim
    L = cache.psi[0][0].L
    dev_a = dev_b = 0.0
    for mu in range(2):
        for nu in range(2):
            for sg in range(2):
                lhs = [g * 6.0 for g in _contract_R(cache, R, mu, nu, sg)]
                rhs_a = [GrassmannElement.zero(L) for _ in range(dim)]
                rhs_b = [GrassmannElement.zero(L) for _ in range(dim)]
                for tau in range(2):
                    coeff_a = 2.0 * (
                        sum(GAMMA_SYM[t][mu, nu] * GAMMA_EPS[t][sg, tau] for t in range(2))
                        - (mu == nu) * ISPIN[sg, tau]
                    )
                    coeff_b = (
                        (nu == sg) * ISPIN[mu, tau]
                        - sum(GAMMA_SYM[t][nu, sg] * GAMMA_EPS[t][mu, tau] for t in range(2))
                        + 3.0 * ISPIN[nu, sg] * (mu == tau)
                    )
                    if coeff_a:
                        rhs_a = [x + g * coeff_a for x, g in zip(rhs_a, sr[tau])]
                    if coeff_b:
                        rhs_b = [x + g * coeff_b for x, g in zip(rhs_b, sr[tau])]
                dev_a = max(dev_a, _max_coeff([l - r for l, r in zip(lhs, rhs_a)]))
                dev_b = max(dev_b, _max_coeff([l - r for l, r in zip(lhs, rhs_b)]))
    return dev_a, dev_b


def fierz_check(
    R: np.ndarray,
    psi: list[list[GrassmannElement]],
    nablaR: np.ndarray | None = None,
    with_derivative: bool = False,
) -> dict:
    """Evaluate both identity chains; returns per-chain max coefficient deviation.

    With ``with_derivative`` the same chains are evaluated for the
    derivative tensor contracted against each psi_rho; this needs at least
    four base generators for a nonvacuous quartic test.
    """
    R = np.asarray(R, dtype=float)
    check_curvature_symmetries(R)
    cache = _CubicCache(psi)
    sr = sr_vector(psi, R, cache)
    dev_a, dev_b = _chain_deviations(cache, R, sr)
    report = {"chain_a": dev_a, "chain_b": dev_b, "max_deviation": max(dev_a, dev_b)}
    if with_derivative:
        if nablaR is None:
            raise ValueError("with_derivative requires a derivative tensor")
        L = psi[0][0].L
        if L < 4:
            raise ValueError("the derivative identities need at least 4 generators")
        nablaR = np.asarray(nablaR, dtype=float)
        check_nabla_curvature_symmetries(nablaR)
        dim = cache.dim
        dev_da = dev_db = 0.0
        for rho in range(2):
            def dvec(mu: int, nu: int, sg: int) -> list[GrassmannElement]:
                # quartic contraction: psi_rho^p (nabla_p R)(psi_mu, psi_nu) psi_sigma
                acc = [GrassmannElement.zero(L) for _ in range(dim)]
                for p in range(dim):
                    coeff = cache.psi[rho][p]
                    if not coeff:
                        continue
                    vec = _contract_R(cache, nablaR[p], mu, nu, sg)
                    acc = [x + coeff * v for x, v in zip(acc, vec)]
                return acc

            sdr = []
            for tau in range(2):
                acc = [GrassmannElement.zero(L) for _ in range(dim)]
                for kappa in range(2):
                    for lam in range(2):
                        w = EPS_UPPER[kappa, lam]
                        if w:
                            acc = [x + v * w for x, v in zip(acc, dvec(tau, kappa, lam))]
                sdr.append(acc)
            for mu in range(2):
                for nu in range(2):
                    for sg in range(2):
                        lhs = [g * 6.0 for g in dvec(mu, nu, sg)]
                        rhs_a = [GrassmannElement.zero(L) for _ in range(dim)]
                        rhs_b = [GrassmannElement.zero(L) for _ in range(dim)]
                        for tau in range(2):
                            coeff_a = 2.0 * (
                                sum(GAMMA_SYM[t][mu, nu] * GAMMA_EPS[t][sg, tau] for t in range(2))
                                - (mu == nu) * ISPIN[sg, tau]
                            )
                            coeff_b = (
                                (nu == sg) * ISPIN[mu, tau]
                                - sum(GAMMA_SYM[t][nu, sg] * GAMMA_EPS[t][mu, tau] for t in range(2))
                                + 3.0 * ISPIN[nu, sg] * (mu == tau)
                            )
                            if coeff_a:
                                rhs_a = [x + g * coeff_a for x, g in zip(rhs_a, sdr[tau])]
                            if coeff_b:
                                rhs_b = [x + g * coeff_b for x, g in zip(rhs_b, sdr[tau])]
                        dev_da = max(dev_da, _max_coeff([l - r for l, r in zip(lhs, rhs_a)]))
                        dev_db = max(dev_db, _max_coeff([l - r for l, r in zip(lhs, rhs_b)]))
        report["chain_a_derivative"] = dev_da
        report["chain_b_derivative"] = dev_db
        report["max_deviation"] = max(report["max_deviation"], dev_da, dev_db)
    return report
