"""Discretized Cauchy-Riemann and Dirac operators with exact index bookkeeping.

Sphere operators act on degree-k line bundles over the projective line,
realized on the affine chart by level-m weighted monomial bases

    e_ab = z^a zbar^b (1 + |z|^2)^(-m),   0 <= a <= k+m, 0 <= b <= m,

which are exactly the restrictions of bidegree-(k+m, m) bihomogeneous
functions; the chart dbar maps the level-m box into the level-(m+1)
codomain box (0 <= c <= k+m+1, 0 <= d <= m-1) with

    dbar e_ab = b e'_{a, b-1} + (b - m) e'_{a+1, b},

so at every admissible cutoff the kernel is exactly the degree-<=k
holomorphic polynomials and the complex index is exactly k + 1.
Inner products use the round metrics (domain weight (1+|z|^2)^(-k-2)
pattern times the level weight), all radial integrals in closed form.

Torus operators are Fourier-diagonal on the flat square torus with the
periodic spin structure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .spin import GAMMA, ISPIN
from .targets import standard_J


class IndexLabError(ValueError):
    pass


# -- dimension-count oracles ---------------------------------------------------


def h_oracle(k: int) -> tuple[int, int]:
    """(h0, h1) for the degree-k line bundle by two-chart monomial counting."""
    h0 = 0
    if k >= 0:
        for a in range(k + 1):
            # z^a is a global section iff the second chart sees w^(k-a)
            if k - a >= 0:
                h0 += 1
    h1 = 0
    dual = -k - 2
    if dual >= 0:
        for a in range(dual + 1):
            if dual - a >= 0:
                h1 += 1
    return h0, h1


def riemann_roch(n: int, p: int, c1A: int) -> int:
    """Real index of a rank-n Cauchy-Riemann operator over genus p."""
    return 2 * n * (1 - p) + 2 * c1A


def dirac10_index(c1A: int) -> int:
    """Real index of the holomorphic half of the twisted Dirac operator."""
    return 2 * c1A


# -- sphere line-bundle bases ---------------------------------------------------


def _radial_integral(p: int, s: int) -> float:
    """integral over the plane of r^{2p} (1+r^2)^(-s), equal to pi p! (s-p-2)!/(s-1)!."""
    if p > s - 2:
        raise IndexLabError("divergent weight integral: cutoff exceeds the weight")
    return math.pi * math.factorial(p) * math.factorial(s - p - 2) / math.factorial(s - 1)


def _gram(monomials: list[tuple[int, int]], s: int, scale: float) -> np.ndarray:
    size = len(monomials)
    g = np.zeros((size, size))
    for i, (a, b) in enumerate(monomials):
        for j, (c, d) in enumerate(monomials):
            if a - b != c - d:
                continue
            p = (a + b + c + d) // 2
            g[i, j] = scale * _radial_integral(p, s)
    return g


@dataclass
class LineBundleBasis:
    """Level-m weighted monomial basis for the degree-k bundle over the sphere."""

    degree: int
    level: int
    monomials: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        k, m = self.degree, self.level
        if k + m < 0 or m < 0:
            raise IndexLabError("level cutoff too small for this degree")
        if not self.monomials:
            self.monomials = [
                (a, b) for a in range(k + m + 1) for b in range(m + 1)
            ]

    @property
    def size(self) -> int:
        return len(self.monomials)

    def gram(self) -> np.ndarray:
        # weight 2^{k/2} (1+r^2)^{-k} for the bundle metric, (1+r^2)^{-2m}
        # for the level weight, 4 (1+r^2)^{-2} for the round area form
        k, m = self.degree, self.level
        return _gram(self.monomials, 2 * m + k + 2, scale=4.0 * 2.0 ** (k / 2.0))

    def holomorphic_kernel_vectors(self) -> np.ndarray:
        """Coefficient vectors of the exact kernel representatives.

        The section z^a0 expands as sum_j binom(m, j) e_{a0+j, j}; these
        vectors span the kernel for a0 <= k and are annihilated exactly.
        """
        k, m = self.degree, self.level
        index = {mon: i for i, mon in enumerate(self.monomials)}
        vecs = []
        for a0 in range(k + 1):
            v = np.zeros(self.size)
            for j in range(m + 1):
                v[index[(a0 + j, j)]] = math.comb(m, j)
            vecs.append(v)
        return np.array(vecs) if vecs else np.zeros((0, self.size))


@dataclass
class AntiholFormBasis:
    """Codomain basis: (0,1)-forms valued in the degree-k bundle, level m+1."""

    degree: int
    level: int
    monomials: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        k, m = self.degree, self.level
        if not self.monomials:
            self.monomials = [
                (c, d) for c in range(k + m + 2) for d in range(m)
            ]

    @property
    def size(self) -> int:
        return len(self.monomials)

    def gram(self) -> np.ndarray:
        k, m = self.degree, self.level
        # bundle weight times the pointwise norm of dzbar and the area form
        return _gram(self.monomials, 2 * m + k + 2, scale=2.0 * 2.0 ** (k / 2.0))


@dataclass
class OperatorMatrix:
    matrix: np.ndarray
    gram_domain: np.ndarray
    gram_codomain: np.ndarray
    tag: str
    is_complex_linear: bool
    meta: dict = field(default_factory=dict)

    def _normalized(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Diagonal rescale to unit-norm basis vectors (spectrum unchanged)."""
        sd = np.sqrt(np.diag(self.gram_domain).real)
        sc = np.sqrt(np.diag(self.gram_codomain).real)
        sd[sd == 0] = 1.0
        sc[sc == 0] = 1.0
        gd = self.gram_domain / np.outer(sd, sd)
        gc = self.gram_codomain / np.outer(sc, sc)
        a = self.matrix * sc[:, None] / sd[None, :]
        return a, gd, gc

    def whitened(self) -> np.ndarray:
        a, gd, gc = self._normalized()
        ld = np.linalg.cholesky(gd)
        lc = np.linalg.cholesky(gc)
        return lc.conj().T @ a @ np.linalg.inv(ld.conj().T)

    def gram_adjoint(self) -> np.ndarray:
        """Adjoint with respect to the two Gram inner products."""
        return np.linalg.solve(
            self.gram_domain, self.matrix.conj().T @ self.gram_codomain
        )

    def singular_values(self) -> np.ndarray:
        if self.matrix.size == 0:
            return np.zeros(0)
        return np.linalg.svd(self.whitened(), compute_uv=False)


def build_dbar_sphere(k: int, M: int) -> OperatorMatrix:
    """Matrix of dbar on the degree-k bundle at level cutoff M.

    M >= |k| + 2 is required so both boxes are nonempty and resolved.
    """
    if M < abs(k) + 2:
        raise IndexLabError(f"cutoff {M} too small for degree {k}")
    dom = LineBundleBasis(degree=k, level=M)
    cod = AntiholFormBasis(degree=k, level=M)
    cod_index = {mon: i for i, mon in enumerate(cod.monomials)}
    A = np.zeros((cod.size, dom.size), dtype=complex)
    m = M
    for j, (a, b) in enumerate(dom.monomials):
        if b > 0:
            A[cod_index[(a, b - 1)], j] += b
        if b - m != 0:
            A[cod_index[(a + 1, b)], j] += b - m
    return OperatorMatrix(
        matrix=A,
        gram_domain=dom.gram(),
        gram_codomain=cod.gram(),
        tag=f"dbar O({k})",
        is_complex_linear=True,
        meta={"degree": k, "level": M, "surface": "sphere"},
    )


def build_dirac10_sphere(target_degree_d: int, M: int) -> OperatorMatrix:
    """Holomorphic Dirac half along a degree-d sphere-to-sphere map.

    The pulled-back tangent bundle has splitting type O(2d); twisting by
    the dual spinor bundle O(-1) reduces the operator to dbar on O(2d-1).
    """
    op = build_dbar_sphere(2 * target_degree_d - 1, M)
    op.tag = f"D10 degree-{target_degree_d} sphere map"
    op.meta["target_degree"] = target_degree_d
    return op


def build_dirac01_sphere(k: int, M: int) -> OperatorMatrix:
    """Antiholomorphic Dirac half: minus the Gram adjoint of the dbar matrix."""
    op = build_dbar_sphere(k, M)
    return OperatorMatrix(
        matrix=-op.gram_adjoint(),
        gram_domain=op.gram_codomain,
        gram_codomain=op.gram_domain,
        tag=f"D01 O({k})",
        is_complex_linear=True,
        meta=dict(op.meta, adjoint_of=op.tag),
    )


# -- torus operators -------------------------------------------------------------


def _torus_modes(M: int) -> list[tuple[int, int]]:
    freqs = np.fft.fftfreq(M, d=1.0 / M).astype(int)
    return [(int(k1), int(k2)) for k1 in freqs for k2 in freqs]


def build_dirac_torus(n_target: int, M: int) -> OperatorMatrix:
    """Twisted Dirac operator on the flat square torus, Fourier modes.

    Block-diagonal over modes with block -2 pi i (k1 gamma^1 + k2 gamma^2)
    per complexified target component; anti-self-adjoint; kernel = the
    constant spinors.
    """
    if M < 4:
        raise IndexLabError("resolution too small")
    modes = _torus_modes(M)
    dim_t = 2 * n_target
    size = len(modes) * 2 * dim_t
    A = np.zeros((size, size), dtype=complex)
    for i, (k1, k2) in enumerate(modes):
        block = -2j * np.pi * (k1 * GAMMA[0] + k2 * GAMMA[1])
        full = np.kron(block, np.eye(dim_t))
        s = i * 2 * dim_t
        A[s : s + 2 * dim_t, s : s + 2 * dim_t] = full
    return OperatorMatrix(
        matrix=A,
        gram_domain=np.eye(size),
        gram_codomain=np.eye(size),
        tag=f"Dirac torus n={n_target}",
        is_complex_linear=False,
        meta={"surface": "torus", "modes": len(modes), "n_target": n_target, "M": M},
    )


def _chirality_bases(n_target: int) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal bases of the (1,0) and (0,1) subspaces of spinor x target.

    On coefficients v[alpha, b] the tensor structure acts by
    ((I x J) v)[alpha, c] = ISPIN[alpha, beta] J[b, c] v[beta, b]; it squares
    to +1, so the chirality halves are its eigenspaces.
    """
    dim_t = 2 * n_target
    J = standard_J(n_target)
    big = np.einsum("ab,dc->acbd", ISPIN, J).reshape(2 * dim_t, 2 * dim_t)
    p01 = 0.5 * (np.eye(2 * dim_t) + big)
    p10 = 0.5 * (np.eye(2 * dim_t) - big)

    def image_basis(P):
        u, s, _ = np.linalg.svd(P)
        rank = int(np.sum(s > 0.5))
        return u[:, :rank]

    return image_basis(p10), image_basis(p01)


def build_dirac_torus_chiral(n_target: int, M: int, part: str) -> OperatorMatrix:
    """Chiral halves of the torus Dirac operator.

    ``part`` is "10" (holomorphic domain) or "01".  The operator swaps the
    two chirality subspaces, so the matrix is rectangular square with the
    opposite basis on the codomain.
    """
    full = build_dirac_torus(n_target, M)
    b10, b01 = _chirality_bases(n_target)
    modes = full.meta["modes"]
    big10 = np.kron(np.eye(modes), b10)
    big01 = np.kron(np.eye(modes), b01)
    if part == "10":
        A = big01.conj().T @ full.matrix @ big10
        dom, cod = big10.shape[1], big01.shape[1]
    elif part == "01":
        A = big10.conj().T @ full.matrix @ big01
        dom, cod = big01.shape[1], big10.shape[1]
    else:
        raise IndexLabError("part must be '10' or '01'")
    return OperatorMatrix(
        matrix=A,
        gram_domain=np.eye(A.shape[1]),
        gram_codomain=np.eye(A.shape[0]),
        tag=f"D{part} torus n={n_target}",
        is_complex_linear=False,
        meta=dict(full.meta, part=part),
    )


# -- kernel / cokernel / index reports -------------------------------------------


@dataclass
class IndexReport:
    tag: str
    kernel_dim: int
    cokernel_dim: int
    numeric_index: int
    formula_index: int | None
    singular_gap_ratio: float
    threshold: float
    conclusive: bool
    is_complex_linear: bool
    singular_values: np.ndarray

    @property
    def kernel_dim_real(self) -> int:
        return 2 * self.kernel_dim if self.is_complex_linear else self.kernel_dim

    @property
    def cokernel_dim_real(self) -> int:
        return 2 * self.cokernel_dim if self.is_complex_linear else self.cokernel_dim

    @property
    def numeric_index_real(self) -> int:
        return 2 * self.numeric_index if self.is_complex_linear else self.numeric_index

    def as_dict(self) -> dict:
        gap = self.singular_gap_ratio
        return {
            "tag": self.tag,
            "kernel_dim": self.kernel_dim,
            "cokernel_dim": self.cokernel_dim,
            "numeric_index": self.numeric_index,
            "kernel_dim_real": self.kernel_dim_real,
            "cokernel_dim_real": self.cokernel_dim_real,
            "numeric_index_real": self.numeric_index_real,
            "formula_index": self.formula_index,
            # None encodes an unbounded ratio (exact zero modes)
            "singular_gap_ratio": gap if np.isfinite(gap) else None,
            "threshold": self.threshold,
            "conclusive": self.conclusive,
            "is_complex_linear": self.is_complex_linear,
        }


def numeric_index(
    op: OperatorMatrix,
    threshold: float = 1e-8,
    formula_index: int | None = None,
    gap_requirement: float = 1e3,
) -> IndexReport:
    """Kernel/cokernel dimensions from singular values below a relative threshold."""
    _, ngd, ngc = op._normalized()
    gd = np.linalg.eigvalsh(ngd)
    gc = np.linalg.eigvalsh(ngc)
    if gd.min() <= 0 or gc.min() <= 0 or gd.max() / gd.min() > 1e14 or gc.max() / gc.min() > 1e14:
        raise IndexLabError("ill-conditioned Gram matrix")
    sv = op.singular_values()
    ncod, ndom = op.matrix.shape
    if sv.size == 0:
        rank = 0
        gap = np.inf
    else:
        smax = sv.max()
        cut = threshold * max(smax, 1.0)
        nonzero = sv[sv > cut]
        zero = sv[sv <= cut]
        rank = nonzero.size
        if zero.size and nonzero.size:
            gap = float(nonzero.min() / max(zero.max(), 1e-300))
        else:
            gap = np.inf
    kernel = ndom - rank
    coker = ncod - rank
    conclusive = bool(gap >= gap_requirement)
    return IndexReport(
        tag=op.tag,
        kernel_dim=kernel,
        cokernel_dim=coker,
        numeric_index=kernel - coker,
        formula_index=formula_index,
        singular_gap_ratio=float(gap),
        threshold=threshold,
        conclusive=conclusive,
        is_complex_linear=op.is_complex_linear,
        singular_values=sv,
    )


def direct_sum(op1: OperatorMatrix, op2: OperatorMatrix) -> OperatorMatrix:
    def blockdiag(a, b):
        out = np.zeros((a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]), dtype=complex)
        out[: a.shape[0], : a.shape[1]] = a
        out[a.shape[0] :, a.shape[1] :] = b
        return out

    return OperatorMatrix(
        matrix=blockdiag(op1.matrix, op2.matrix),
        gram_domain=blockdiag(op1.gram_domain, op2.gram_domain).real,
        gram_codomain=blockdiag(op1.gram_codomain, op2.gram_codomain).real,
        tag=f"{op1.tag} (+) {op2.tag}",
        is_complex_linear=op1.is_complex_linear and op2.is_complex_linear,
        meta={"summands": [op1.tag, op2.tag]},
    )


def adjoint_relation_check(M_cutoff: int, n_target: int = 1, sphere_degrees=(0, 1, 3)) -> dict:
    """The antiholomorphic half is minus the adjoint of the holomorphic half.

    On the torus both halves are built independently from the full Fourier
    operator and compared; on the sphere the adjoint realization is used and
    the index sum is checked against the kernel/cokernel counts.
    """
    report: dict = {"checks": []}
    d10 = build_dirac_torus_chiral(n_target, M_cutoff, "10")
    d01 = build_dirac_torus_chiral(n_target, M_cutoff, "01")
    dev = float(np.abs(d10.gram_adjoint() + d01.matrix).max())
    r10 = numeric_index(d10)
    r01 = numeric_index(d01)
    report["checks"].append(
        {
            "name": "torus adjoint deviation",
            "value": dev,
            "tol": 1e-10,
            "passed": bool(dev <= 1e-10),
        }
    )
    report["checks"].append(
        {
            "name": "torus index sum",
            "value": r10.numeric_index + r01.numeric_index,
            "tol": 0,
            "passed": r10.numeric_index + r01.numeric_index == 0,
        }
    )
    for k in sphere_degrees:
        op = build_dbar_sphere(k, M_cutoff + abs(k))
        rep = numeric_index(op)
        opa = build_dirac01_sphere(k, M_cutoff + abs(k))
        repa = numeric_index(opa)
        total = rep.numeric_index + repa.numeric_index
        report["checks"].append(
            {
                "name": f"sphere index sum O({k})",
                "value": total,
                "tol": 0,
                "passed": total == 0,
            }
        )
    zero_op = OperatorMatrix(
        matrix=np.zeros((3, 3), dtype=complex),
        gram_domain=np.eye(3),
        gram_codomain=np.eye(3),
        tag="zero",
        is_complex_linear=True,
    )
    zdev = float(np.abs(zero_op.gram_adjoint()).max())
    report["checks"].append(
        {"name": "zero operator adjoint", "value": zdev, "tol": 0.0, "passed": zdev == 0.0}
    )
    report["passed"] = all(c["passed"] for c in report["checks"])
    return report


@dataclass
class GapReport:
    tag: str
    sigma_min: float
    kernel_dim: int
    scalar_curvature: float
    bochner_bound: float | None

    def as_dict(self) -> dict:
        return {
            "tag": self.tag,
            "sigma_min": self.sigma_min,
            "kernel_dim": self.kernel_dim,
            "scalar_curvature": self.scalar_curvature,
            "bochner_bound": self.bochner_bound,
        }


def bochner_gap(op: OperatorMatrix, scalar_curvature: float, threshold: float = 1e-8) -> GapReport:
    """Smallest singular value of an antiholomorphic-half realization.

    A strictly positive value certifies the trivial kernel predicted by
    positive curvature; sqrt(s/4) is reported as the flat-target curvature
    bound for orientation (the chart realization normalization may differ
    from it by a bounded factor).
    """
    rep = numeric_index(op, threshold=threshold)
    sv = rep.singular_values
    sigma_min = float(sv.min()) if sv.size else 0.0
    bound = math.sqrt(scalar_curvature / 4.0) if scalar_curvature > 0 else None
    return GapReport(
        tag=op.tag,
        sigma_min=sigma_min,
        kernel_dim=rep.kernel_dim,
        scalar_curvature=scalar_curvature,
        bochner_bound=bound,
    )
