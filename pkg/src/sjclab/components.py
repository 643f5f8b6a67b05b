"""Component-field form of the first-order operator on the periodic patch.

Implements the gravitino projectors, the endomorphism built from the
derivative of J, the cubic curvature contraction, the twisted Dirac
operator, the four residual fields whose joint vanishing characterizes
solutions, conformal covariance checks, and the finite-difference
validation of the linearization blocks.

Field layout follows :mod:`sjclab.fields`; spinor-index conventions follow
:mod:`sjclab.spin`.  The pairings written with a spinor-index lowering use
eps (eps_{34} = +1); the metric dual on form indices is trivial in
orthonormal frames.  These two reconstructions are each isolated in one
helper (``vee_q_pairing``, ``q_norm_squared``) and validated through the
linearization and covariance tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import ComponentMap, FieldError, Gravitino, gzeros, max_abs
from .patch import ReducedPatch
from .spin import EPS_LOWER, EPS_UPPER, GAMMA, IFRAME, ISPIN, PMAT, QMAT
from .targets import AlmostKahlerModel


class PreconditionError(ValueError):
    pass


# -- Grassmann-valued contractions ------------------------------------------


def gcontract(a: np.ndarray, b: np.ndarray, spec: str, L: int) -> np.ndarray:
    """Mask-convolved einsum: Grassmann product with index contraction.

    ``spec`` is an einsum signature for the per-mask blocks (without the
    leading mask axis).
    """
    from .fields import _mul_table

    out = None
    for ma, mb, mo, s in _mul_table(L):
        av, bv = a[ma], b[mb]
        if not av.any() or not bv.any():
            continue
        piece = np.einsum(spec, av, bv)
        if out is None:
            size = a.shape[0]
            out = np.zeros((size,) + piece.shape, dtype=complex)
        out[mo] += s * piece
    if out is None:
        probe = np.einsum(spec, a[0], b[0])
        out = np.zeros((a.shape[0],) + probe.shape, dtype=complex)
    return out


# -- basic geometric data along the map ---------------------------------------


def model_grids(model: AlmostKahlerModel, cmap: ComponentMap, patch: ReducedPatch):
    """Chart tensors along the body of phi.

    Position-dependent models require phi to have no nilpotent (soul)
    corrections; constant-chart models accept any even phi.
    """
    dim = model.dim
    if cmap.dim != dim:
        raise FieldError(f"map has {cmap.dim} target components, model needs {dim}")
    M = cmap.M
    body = cmap.phi_body(patch.x1, patch.x2)
    constant_chart = model.kind in ("flat", "constant-hsc") or model.kind.startswith(
        ("flat+", "constant-hsc+")
    )
    if not constant_chart:
        soul = cmap.phi_periodic.copy()
        soul[0] = 0
        if max_abs(soul) > 0:
            raise FieldError(
                "position-dependent chart tensors need a soul-free phi"
            )
    J = np.empty((M, M, dim, dim))
    Gamma = np.empty((M, M, dim, dim, dim))
    nablaJ = np.empty((M, M, dim, dim, dim))
    Rop = np.empty((M, M, dim, dim, dim, dim))
    if constant_chart:
        y0 = np.zeros(dim)
        J[:] = model.J_at(y0)
        Gamma[:] = model.christoffel_at(y0)
        nablaJ[:] = model.nablaJ_at(y0)
        Rop[:] = model.curvature_op_at(y0)
    else:
        for i in range(M):
            for j in range(M):
                y = body[i, j]
                J[i, j] = model.J_at(y)
                Gamma[i, j] = model.christoffel_at(y)
                nablaJ[i, j] = model.nablaJ_at(y)
                Rop[i, j] = model.curvature_op_at(y)
    return J, Gamma, nablaJ, Rop


def dphi_frame(cmap: ComponentMap, patch: ReducedPatch) -> np.ndarray:
    """Frame derivative of phi: (2^L, M, M, 2, dim); index order (k, b)."""
    d1 = patch.diff(cmap.phi_periodic, 1, grid_axes=(1, 2))
    d2 = patch.diff(cmap.phi_periodic, 2, grid_axes=(1, 2))
    d = np.stack([d1, d2], axis=3)  # (S, M, M, 2, dim)
    d[0, :, :, 0, :] += cmap.phi_linear[:, 0]
    d[0, :, :, 1, :] += cmap.phi_linear[:, 1]
    return d * patch.frame_factor()[None, :, :, None, None]


def project_PQ(grav: Gravitino) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise spin-1/2 / spin-3/2 split of the gravitino."""
    p = np.einsum("aibj,sxybj->sxyai", PMAT, grav.chi)
    q = np.einsum("aibj,sxybj->sxyai", QMAT, grav.chi)
    return p, q


def oneform_antiholomorphic_part(T: np.ndarray, J: np.ndarray) -> np.ndarray:
    """(1/2)(1 + I (x) J) on a one-form-valued field T[..., k, b]."""
    rot = np.einsum("kl,sxylb->sxykb", IFRAME, T)
    return 0.5 * (T + np.einsum("sxykb,xybc->sxykc", rot, J))


def spinor_antiholomorphic_part(psi: np.ndarray, J: np.ndarray) -> np.ndarray:
    """(1/2)(1 + I (x) J) on a spinor-valued field psi[..., alpha, b]."""
    rot = np.einsum("ab,sxybc->sxyac", ISPIN, psi)
    return 0.5 * (psi + np.einsum("sxyac,xycd->sxyad", rot, J))


def spinor_holomorphic_part(psi: np.ndarray, J: np.ndarray) -> np.ndarray:
    """(1/2)(1 - I (x) J) on a spinor-valued field."""
    rot = np.einsum("ab,sxybc->sxyac", ISPIN, psi)
    return 0.5 * (psi - np.einsum("sxyac,xycd->sxyad", rot, J))


def j_endomorphism(psi: np.ndarray, nablaJ: np.ndarray, L: int) -> np.ndarray:
    """j_mu = contraction of psi_mu with the derivative of J.

    Returns (2^L, M, M, 2, dim, dim): for each spinor index an odd
    endomorphism of the pulled-back tangent space.
    """
    return np.einsum("sxyma,xyabc->sxymbc", psi, nablaJ)


def sr_contraction(psi: np.ndarray, Rop: np.ndarray, L: int) -> np.ndarray:
    """Cubic curvature contraction SR(psi)_alpha = eps^{kl} R(psi_alpha, psi_k) psi_l."""
    pair = gcontract(psi, psi, "xyma,xynb->xymanb", L)  # (S,M,M,2,dim,2,dim)
    tri = gcontract(pair, psi, "xymanb,xyoc->xymanboc", L)
    return np.einsum("sxymanboc,no,xyabce->sxyme", tri, EPS_UPPER, Rop)


def twisted_dirac(
    psi: np.ndarray,
    patch: ReducedPatch,
    model: AlmostKahlerModel,
    cmap: ComponentMap,
    grids=None,
) -> np.ndarray:
    """Twisted Dirac operator on the spinor-valued field psi.

    (D psi)_beta = (1/2) omega_k (gamma^k I)[beta, alpha] psi_alpha
                   - gamma^k[beta, alpha] nabla_k psi_alpha
    with the pullback connection nabla_k psi = f_k psi + Gamma(dphi_k, psi).
    """
    if patch.M < 4:
        raise PreconditionError("resolution too small")
    if grids is None:
        grids = model_grids(model, cmap, patch)
    _, Gamma, _, _ = grids
    L = cmap.L
    ff = patch.frame_factor()[None, :, :, None, None, None]
    dpsi = np.stack(
        [
            patch.diff(psi, 1, grid_axes=(1, 2)),
            patch.diff(psi, 2, grid_axes=(1, 2)),
        ],
        axis=3,
    ) * ff  # (S, M, M, k, alpha, dim)
    dphi = dphi_frame(cmap, patch)
    if np.abs(Gamma).max() > 0:
        conn = np.einsum("xyecd,sxykc->sxyked", Gamma, dphi)  # Gamma(dphi_k, .)
        gterm = gcontract(conn, psi, "xyked,xyad->xykae", L)
        nabla = dpsi + gterm
    else:
        nabla = dpsi
    gamma_i = np.einsum("kab,bc->kac", GAMMA, ISPIN)
    omega = patch.spin_connection()
    out = -np.einsum("kba,sxykae->sxybe", GAMMA, nabla)
    if np.abs(omega).max() > 0:
        out = out + 0.5 * np.einsum(
            "kxy,kba,sxyae->sxybe", omega, gamma_i, psi
        )
    return out


def vee_q_pairing(qchi: np.ndarray, oneform: np.ndarray, L: int) -> np.ndarray:
    """<vee Q chi, T> for a one-form-valued T: spinor-valued output.

    The form slot is dualized with the (orthonormal-frame) metric and
    contracted against T's form slot; the free spinor index is lowered
    with eps.
    """
    paired = gcontract(qchi, oneform, "xykc,xykb->xycb", L)  # sum over k
    return np.einsum("ac,sxycb->sxyab", EPS_LOWER, paired)


def q_norm_squared(qchi: np.ndarray, L: int) -> np.ndarray:
    """|Q chi|^2 with the eps pairing on spinor indices, g on form indices."""
    sq = gcontract(qchi, qchi, "xykc,xykt->xyct", L)
    return np.einsum("ct,sxyct->sxy", EPS_LOWER, sq)


def gravitino_psi_pairing(chi_part: np.ndarray, psi: np.ndarray, L: int) -> np.ndarray:
    """<chi, psi>_k = chi_k^kappa psi_kappa: one-form-valued."""
    return gcontract(chi_part, psi, "xykc,xycb->xykb", L)


def delta_gamma_tensor_F(chi: np.ndarray, F: np.ndarray, L: int) -> np.ndarray:
    """delta_gamma(chi) (x) F with the spinor index lowered by eps."""
    dg = np.einsum("kct,sxykt->sxyc", GAMMA, chi)  # spinor-valued, upper index
    lowered = np.einsum("ac,sxyc->sxya", EPS_LOWER, dg)
    return gcontract(lowered, F, "xya,xyb->xyab", L)


def j_trace_block2(jend: np.ndarray, psi: np.ndarray, J: np.ndarray, L: int) -> np.ndarray:
    """(1/8) Tr(id (x) jJ + I (x) j) psi: the auxiliary-field correction."""
    jJ = np.einsum("sxymbc,xycd->sxymbd", jend, J)
    t1 = gcontract(jJ, psi, "xymbc,xyab->xymac", L)  # (psi_alpha) acted by j_mu J
    term1 = np.einsum("ma,sxymac->sxyc", EPS_UPPER, t1)
    t2 = gcontract(jend, psi, "xymbc,xyab->xymac", L)
    term2 = np.einsum("mn,na,sxymac->sxyc", EPS_UPPER, ISPIN, t2)
    return 0.125 * (term1 + term2)


def j_trace_block3(jend: np.ndarray, psi: np.ndarray, J: np.ndarray, L: int) -> np.ndarray:
    """(1/4) Tr(gamma (x) jJ) psi: one-form-valued correction in block 3."""
    jJ = np.einsum("sxymbc,xycd->sxymbd", jend, J)
    t = gcontract(jJ, psi, "xymbc,xyab->xymac", L)
    return 0.25 * np.einsum("mn,kna,sxymac->sxykc", EPS_UPPER, GAMMA, t)


@dataclass
class Residuals:
    """The four residual fields; all vanish exactly on solutions."""

    chirality: np.ndarray      # (1 + I (x) J) psi
    auxiliary: np.ndarray      # F
    cauchy_riemann: np.ndarray  # dbar phi + <Q chi, psi> + j-term
    dirac: np.ndarray          # D psi - 2 <vee Q chi, dphi> + |Q chi|^2 psi - SR/3

    def blocks(self) -> dict[str, np.ndarray]:
        return {
            "chirality": self.chirality,
            "auxiliary": self.auxiliary,
            "cauchy_riemann": self.cauchy_riemann,
            "dirac": self.dirac,
        }

    def max_norms(self) -> dict[str, float]:
        return {k: max_abs(v) for k, v in self.blocks().items()}

    def max_norm(self) -> float:
        return max(self.max_norms().values())


def residual_components(
    cmap: ComponentMap,
    grav: Gravitino,
    patch: ReducedPatch,
    model: AlmostKahlerModel,
) -> Residuals:
    """The four component equations of the first-order system."""
    if cmap.M != patch.M or grav.M != patch.M:
        raise FieldError("grid size mismatch")
    L = cmap.L
    J, Gamma, nablaJ, Rop = grids = model_grids(model, cmap, patch)

    # block 1: chirality constraint
    rot = np.einsum("ab,sxybc->sxyac", ISPIN, cmap.psi)
    r1 = cmap.psi + np.einsum("sxyac,xycd->sxyad", rot, J)

    # block 2: auxiliary field
    r2 = cmap.F.copy()

    # block 3: perturbed Cauchy-Riemann equation
    dphi = dphi_frame(cmap, patch)
    dbar_phi = oneform_antiholomorphic_part(dphi, J)
    _, qchi = project_PQ(grav)
    r3 = dbar_phi + gravitino_psi_pairing(qchi, cmap.psi, L)
    if np.abs(nablaJ).max() > 0:
        jend = j_endomorphism(cmap.psi, nablaJ, L)
        r3 = r3 + j_trace_block3(jend, cmap.psi, J, L)

    # block 4: Dirac-type equation
    r4 = twisted_dirac(cmap.psi, patch, model, cmap, grids=grids)
    r4 = r4 - 2.0 * vee_q_pairing(qchi, dphi, L)
    nq = q_norm_squared(qchi, L)
    r4 = r4 + gcontract(nq, cmap.psi, "xy,xyab->xyab", L)
    if np.abs(Rop).max() > 0:
        r4 = r4 - sr_contraction(cmap.psi, Rop, L) / 3.0

    return Residuals(chirality=r1, auxiliary=r2, cauchy_riemann=r3, dirac=r4)


@dataclass
class OperatorComponents:
    """Component fields of the first-order operator itself (not the zero set).

    These carry the normalization whose linearization at a holomorphic map
    has the block form (zeta^{0,1}, sigma/4, -D_phi xi, -Dhat zeta + ...).
    Restricted to Kahler models, where the J-derivative terms vanish.
    """

    c1: np.ndarray
    c2: np.ndarray
    c3: np.ndarray
    c4: np.ndarray

    def stack_like(self) -> tuple[np.ndarray, ...]:
        return (self.c1, self.c2, self.c3, self.c4)


def operator_components(
    cmap: ComponentMap,
    grav: Gravitino,
    patch: ReducedPatch,
    model: AlmostKahlerModel,
) -> OperatorComponents:
    if np.abs(model.nablaJ_at(np.zeros(model.dim))).max() > 0:
        raise PreconditionError(
            "operator components are implemented for Kahler models only"
        )
    L = cmap.L
    J, Gamma, nablaJ, Rop = grids = model_grids(model, cmap, patch)

    c1 = spinor_antiholomorphic_part(cmap.psi, J)
    c2 = 0.25 * cmap.F.copy()

    dphi = dphi_frame(cmap, patch)
    pairing = gravitino_psi_pairing(grav.chi, cmap.psi, L)
    c3 = -oneform_antiholomorphic_part(dphi + pairing, J)

    _, qchi = project_PQ(grav)
    inner = twisted_dirac(cmap.psi, patch, model, cmap, grids=grids)
    inner = inner - 2.0 * vee_q_pairing(qchi, dphi, L)
    nq = q_norm_squared(qchi, L)
    inner = inner + gcontract(nq, cmap.psi, "xy,xyab->xyab", L)
    inner = inner + delta_gamma_tensor_F(grav.chi, cmap.F, L)
    if np.abs(Rop).max() > 0:
        inner = inner - sr_contraction(cmap.psi, Rop, L) / 6.0
    c4 = -spinor_antiholomorphic_part(inner, J)
    return OperatorComponents(c1=c1, c2=c2, c3=c3, c4=c4)


# -- conformal covariance ------------------------------------------------------


def weyl_rescale_fields(
    cmap: ComponentMap, grav: Gravitino, factor: np.ndarray
) -> tuple[ComponentMap, Gravitino]:
    """Transform frame components under a conformal rescaling by ``factor``.

    phi is unchanged; psi and the gravitino components pick up factor^{-1},
    F picks up factor^{-2}.
    """
    u = np.asarray(factor, dtype=float)
    new = cmap.copy()
    new.psi = new.psi / u[None, :, :, None, None]
    new.F = new.F / u[None, :, :, None] ** 2
    newg = grav.copy()
    newg.chi = newg.chi / u[None, :, :, None, None]
    return new, newg


def weyl_covariance_check(
    cmap: ComponentMap,
    grav: Gravitino,
    patch: ReducedPatch,
    model: AlmostKahlerModel,
    rescale: np.ndarray | float,
    tol: float = 1e-8,
) -> dict:
    """Check homogeneous scaling of the residual blocks under conformal rescaling.

    Frame-component weights are (u^-1, u^-2, u^-2, u^-3); the third block is
    invariant as a one-form (its u^-2 is the frame conversion).  Returns a
    report with per-block deviations between the transformed-data residuals
    and the rescaled originals.
    """
    M = patch.M
    u = np.full((M, M), float(rescale)) if np.isscalar(rescale) else np.asarray(rescale, dtype=float)
    base = residual_components(cmap, grav, patch, model)
    patch2 = ReducedPatch(M, lam=patch.lam * u)
    cmap2, grav2 = weyl_rescale_fields(cmap, grav, u)
    new = residual_components(cmap2, grav2, patch2, model)
    weights = {
        "chirality": -1,
        "auxiliary": -2,
        "cauchy_riemann": -2,
        "dirac": -3,
    }
    abstract = {
        "chirality": -1,
        "auxiliary": -2,
        "cauchy_riemann": 0,   # invariant once the frame factor is removed
        "dirac": -3,
    }
    report = {"blocks": {}, "passed": True}
    for name, expected in weights.items():
        b = base.blocks()[name]
        nvals = new.blocks()[name]
        extra = (1,) * (b.ndim - 3)
        w = u.reshape((1, M, M) + extra) ** expected
        dev = max_abs(nvals - w * b)
        scale = 1.0 + max_abs(b)
        entry = {
            "frame_weight_exponent": expected,
            "abstract_weight_exponent": abstract[name],
            "max_deviation": dev,
            "relative_deviation": dev / scale,
            "passed": bool(dev / scale <= tol),
        }
        report["blocks"][name] = entry
        report["passed"] = report["passed"] and entry["passed"]
    return report


# -- linearization -------------------------------------------------------------


@dataclass
class Directions:
    """Tangent directions (rho, xi, zeta, sigma) at (phi, 0, 0) with chi = 0."""

    rho: np.ndarray | None = None    # gravitino direction (odd)
    xi: np.ndarray | None = None     # even map direction
    zeta: np.ndarray | None = None   # odd spinor direction
    sigma: np.ndarray | None = None  # even auxiliary direction


def d_phi_operator(
    xi: np.ndarray, cmap: ComponentMap, patch: ReducedPatch, model: AlmostKahlerModel
) -> np.ndarray:
    """Linearized Cauchy-Riemann operator at phi applied to xi."""
    L = cmap.L
    J, Gamma, nablaJ, _ = model_grids(model, cmap, patch)
    ff = patch.frame_factor()[None, :, :, None, None]
    dxi = np.stack(
        [patch.diff(xi, 1, grid_axes=(1, 2)), patch.diff(xi, 2, grid_axes=(1, 2))],
        axis=3,
    ) * ff
    if np.abs(Gamma).max() > 0:
        dphi = dphi_frame(cmap, patch)
        conn = np.einsum("xyecd,sxykc->sxyked", Gamma, dphi)
        dxi = dxi + gcontract(conn, xi, "xyked,xyd->xyke", L)
    if np.abs(nablaJ).max() > 0:
        dphi = dphi_frame(cmap, patch)
        jxi = gcontract(
            np.einsum("xyabc,sxya->sxybc", nablaJ, xi), dphi, "xybc,xykc->xykb", L
        )
        dxi = dxi - 0.5 * np.einsum("sxykb,xybc->sxykc", jxi, J)
    return oneform_antiholomorphic_part(dxi, J)


def analytic_linearization_blocks(
    dirs: Directions,
    cmap: ComponentMap,
    grav_zero: Gravitino,
    patch: ReducedPatch,
    model: AlmostKahlerModel,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Expected derivative blocks (zeta^{0,1}, sigma/4, -D_phi xi, -Dhat zeta + rho term)."""
    L = cmap.L
    M = patch.M
    dim = cmap.dim
    J, _, nablaJ, _ = model_grids(model, cmap, patch)
    if np.abs(nablaJ).max() > 0:
        raise PreconditionError("analytic blocks implemented for Kahler models")
    b1 = gzeros(L, (M, M, 2, dim))
    b2 = gzeros(L, (M, M, dim))
    b3 = gzeros(L, (M, M, 2, dim))
    b4 = gzeros(L, (M, M, 2, dim))
    if dirs.zeta is not None:
        b1 = spinor_antiholomorphic_part(dirs.zeta, J)
        dz = twisted_dirac(dirs.zeta, patch, model, cmap)
        b4 = b4 - spinor_antiholomorphic_part(dz, J)
    if dirs.sigma is not None:
        b2 = 0.25 * dirs.sigma
    if dirs.xi is not None:
        b3 = -d_phi_operator(dirs.xi, cmap, patch, model)
    if dirs.rho is not None:
        grav_dir = Gravitino(L=L, chi=dirs.rho)
        _, qrho = project_PQ(grav_dir)
        dphi = dphi_frame(cmap, patch)
        b4 = b4 + 2.0 * vee_q_pairing(qrho, dphi, L)
    return b1, b2, b3, b4


def linearization_fd_check(
    cmap: ComponentMap,
    patch: ReducedPatch,
    model: AlmostKahlerModel,
    dirs: Directions,
    h: float = 1e-3,
    rel_tol: float = 1e-6,
    precondition_tol: float = 1e-8,
) -> dict:
    """Central finite differences of the operator components versus the blocks.

    The base point must be a holomorphic map with vanishing odd and
    auxiliary data; the step is Richardson-halved and both approximations
    are compared against the analytic blocks.
    """
    L = cmap.L
    M = patch.M
    dim = cmap.dim
    grav0 = Gravitino.zero(L, M)
    base = residual_components(cmap, grav0, patch, model)
    if base.max_norm() > precondition_tol:
        raise PreconditionError(
            f"base map is not holomorphic: residual {base.max_norm():.3e}"
        )

    def at(t: float) -> tuple[np.ndarray, ...]:
        pert = cmap.copy()
        if dirs.xi is not None:
            pert.phi_periodic = pert.phi_periodic + t * dirs.xi
        if dirs.zeta is not None:
            pert.psi = pert.psi + t * dirs.zeta
        if dirs.sigma is not None:
            pert.F = pert.F + t * dirs.sigma
        chi = gzeros(L, (M, M, 2, 2))
        if dirs.rho is not None:
            chi = chi + t * dirs.rho
        comps = operator_components(pert, Gravitino(L=L, chi=chi), patch, model)
        return comps.stack_like()

    def central(step: float) -> tuple[np.ndarray, ...]:
        plus = at(step)
        minus = at(-step)
        return tuple((p - m) / (2.0 * step) for p, m in zip(plus, minus))

    d_h = central(h)
    d_h2 = central(h / 2.0)
    analytic = analytic_linearization_blocks(dirs, cmap, grav0, patch, model)
    names = ["chirality", "auxiliary", "cauchy_riemann", "dirac"]
    report = {"blocks": {}, "passed": True, "step": h}
    for name, fd_h, fd_h2, ref in zip(names, d_h, d_h2, analytic):
        scale = 1.0 + max_abs(ref)
        err_h = max_abs(fd_h - ref) / scale
        err_h2 = max_abs(fd_h2 - ref) / scale
        richardson = max_abs((4.0 * fd_h2 - fd_h) / 3.0 - ref) / scale
        entry = {
            "rel_error_h": err_h,
            "rel_error_h2": err_h2,
            "richardson_error": richardson,
            "passed": bool(err_h2 <= rel_tol and richardson <= rel_tol),
        }
        report["blocks"][name] = entry
        report["passed"] = report["passed"] and entry["passed"]
    return report
