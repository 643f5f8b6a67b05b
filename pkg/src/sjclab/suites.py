"""Batch verification suites behind the command-line interface.

Every suite returns a report dict with ``schema`` 1, a list of checks
(each carrying its tolerance and the kind of evidence backing the
expected value: ``identity`` for exact-arithmetic zeros, ``oracle`` for
independently counted/derived values, ``formula`` for closed-form
arithmetic, ``spectral`` for singular-value assertions), and a global
``passed`` flag.  Reports are deterministic for a fixed seed and config.
"""

from __future__ import annotations

import numpy as np

from . import classify as clf
from . import components as comp
from . import indexlab as il
from .energy import energy_identity_residual
from .fields import ComponentMap, gzeros
from .fierz import (
    fierz_check,
    random_admissible_curvature,
    random_admissible_nabla_curvature,
    random_odd_spinor,
)
from .patch import ReducedPatch
from .spin import GAMMA, ISPIN, clifford_deviation, gamma_sandwich_deviation, project_pq_pointwise, delta_gamma
from .superfield import (
    FlatTargetJ,
    PolyFn,
    SuperField,
    apply_Dbar,
    components_from_complex,
    flat_sjc_residual,
    holomorphy_equivalence_check,
)
from .targets import hsc_curvature_lowered, make_const_hsc, make_flat, make_model, standard_J, validate_model


def _check(name: str, passed: bool, value, tol, kind: str) -> dict:
    return {
        "name": name,
        "passed": bool(passed),
        "value": value,
        "tol": tol,
        "kind": kind,
    }


def _report(suite: str, config: dict, checks: list[dict]) -> dict:
    from . import __version__

    return {
        "schema": 1,
        "version": __version__,
        "suite": suite,
        "config": config,
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }


# -- random flat-model data ------------------------------------------------------


def _gauss_int(rng, scale=2) -> complex:
    return complex(int(rng.integers(-scale, scale + 1)), int(rng.integers(-scale, scale + 1)))


def _random_poly(rng, holomorphic: bool, max_deg=2) -> PolyFn:
    coeffs = {}
    for a in range(max_deg + 1):
        for b in range(0, (0 if holomorphic else max_deg - a) + 1):
            if a == 0 and b == 0 and rng.random() < 0.5:
                continue
            if rng.random() < 0.6:
                c = _gauss_int(rng)
                if c:
                    coeffs[(a, b)] = c
    return PolyFn.from_z_poly(coeffs)


def _random_odd_fn(rng, L: int, holomorphic: bool) -> SuperField:
    out = SuperField.zero(L)
    for gen in range(1, L + 1):
        if rng.random() < 0.7:
            out = out + SuperField.base_generator(L, gen) * _random_poly(rng, holomorphic, max_deg=1)
    return out


def random_flat_z_component(rng, L: int, holomorphic: bool) -> SuperField:
    f = SuperField.from_poly(L, _random_poly(rng, holomorphic))
    g = _random_odd_fn(rng, L, holomorphic)
    z = f + SuperField.theta(L) * g
    if not holomorphic:
        h = _random_odd_fn(rng, L, False)
        k = SuperField.from_poly(L, _random_poly(rng, False, max_deg=1))
        z = z + SuperField.theta_bar(L) * h + SuperField.theta(L) * SuperField.theta_bar(L) * k
        if apply_Dbar(z).is_zero():
            # force a violation so the negative branch is genuinely negative
            z = z + SuperField.theta_bar(L) * SuperField.base_generator(L, 1)
    return z


def suite_flat(seed: int = 7, trials: int = 100, L: int = 2) -> dict:
    rng = np.random.default_rng(seed)
    checks = []
    J = FlatTargetJ.standard(1)

    zero_res = flat_sjc_residual(
        [SuperField.const(L, 1.0), SuperField.const(L, -2.0)], J
    )
    checks.append(
        _check("constant map residual", all(r.is_zero() for r in zero_res), 0.0, 0.0, "identity")
    )
    hol = components_from_complex([SuperField.coordinate_z(L)])
    checks.append(
        _check(
            "holomorphic coordinate map residual",
            all(r.is_zero() for r in flat_sjc_residual(hol, J)),
            0.0,
            0.0,
            "identity",
        )
    )
    anti = [SuperField.coordinate_x1(L), -SuperField.coordinate_x2(L)]
    checks.append(
        _check(
            "antiholomorphic map fails",
            not all(r.is_zero() for r in flat_sjc_residual(anti, J)),
            1.0,
            0.0,
            "identity",
        )
    )

    agreements = 0
    for t in range(trials):
        holo = t % 2 == 0
        z = random_flat_z_component(rng, L, holo)
        ys = components_from_complex([z])
        res_zero = all(r.is_zero() for r in flat_sjc_residual(ys, J))
        equiv = holomorphy_equivalence_check([z])
        if res_zero == equiv == holo:
            agreements += 1
    checks.append(
        _check(
            f"residual/holomorphy equivalence on {trials} random superfields",
            agreements == trials,
            agreements,
            0,
            "identity",
        )
    )
    return _report("flat", {"seed": seed, "trials": trials, "L": L}, checks)


def suite_identities(seed: int = 7, trials: int = 50, energy_trials: int = 20) -> dict:
    rng = np.random.default_rng(seed)
    checks = []
    checks.append(
        _check("Clifford relation", clifford_deviation() == 0.0, clifford_deviation(), 0.0, "identity")
    )
    checks.append(
        _check(
            "two-dimensional gamma sandwich",
            gamma_sandwich_deviation() == 0.0,
            gamma_sandwich_deviation(),
            0.0,
            "identity",
        )
    )
    ispin_dev = float(np.abs(GAMMA[0] @ GAMMA[1] - ISPIN).max())
    checks.append(_check("spinor complex structure", ispin_dev == 0.0, ispin_dev, 0.0, "identity"))

    chi = rng.standard_normal((5, 2, 2))
    p, q = project_pq_pointwise(chi)
    dev = max(
        float(np.abs(p + q - chi).max()),
        float(np.abs(project_pq_pointwise(p)[0] - p).max()),
        float(np.abs(project_pq_pointwise(q)[1] - q).max()),
        float(np.abs(project_pq_pointwise(q)[0]).max()),
        float(np.abs(delta_gamma(q)).max()),
    )
    checks.append(_check("gravitino projector identities", dev <= 1e-14, dev, 1e-14, "identity"))

    worst = 0.0
    derivative_worst = 0.0
    for t in range(trials):
        dim = 4 if t % 5 == 4 else 2
        if t % 7 == 0:
            R = hsc_curvature_lowered(4.0, np.eye(dim), standard_J(dim // 2))
        else:
            R = random_admissible_curvature(rng, dim)
        psi = random_odd_spinor(rng, L=4, dim=dim)
        dR = random_admissible_nabla_curvature(rng, dim)
        rep = fierz_check(R, psi, nablaR=dR, with_derivative=True)
        worst = max(worst, rep["chain_a"], rep["chain_b"])
        derivative_worst = max(
            derivative_worst, rep["chain_a_derivative"], rep["chain_b_derivative"]
        )
    checks.append(
        _check(
            f"cubic curvature identity chains ({trials} tensors)",
            worst == 0.0,
            worst,
            0.0,
            "identity",
        )
    )
    checks.append(
        _check(
            f"derivative-tensor identity chains ({trials} tensors)",
            derivative_worst == 0.0,
            derivative_worst,
            0.0,
            "identity",
        )
    )

    n_targets = [1, 2]
    energy_ok = True
    for t in range(energy_trials):
        n = n_targets[t % 2]
        J = FlatTargetJ.standard(n)
        comps = []
        for _ in range(n):
            comps.append(random_flat_z_component(rng, 2, holomorphic=bool(rng.random() < 0.3)))
        ys = components_from_complex(comps)
        resid = energy_identity_residual(ys, J)
        if not resid.is_zero():
            energy_ok = False
    checks.append(
        _check(
            f"pointwise energy identity ({energy_trials} random maps)",
            energy_ok,
            0.0,
            0.0,
            "identity",
        )
    )
    return _report(
        "identities", {"seed": seed, "trials": trials, "energy_trials": energy_trials}, checks
    )


def run_suite(name: str, **config):
    """Programmatic dispatcher mirroring the command-line verbs.

    Returns (report, extra_files); extra_files maps CSV names to rows.
    """
    table = {
        "flat": (suite_flat, False),
        "identities": (suite_identities, False),
        "index": (suite_index, True),
        "bochner": (suite_bochner, True),
        "moduli": (suite_moduli, False),
        "linearize": (suite_linearize, False),
        "verify-flat": (suite_verify_flat, False),
        "verify-components": (suite_verify_components, True),
        "models": (suite_models, False),
    }
    if name not in table:
        raise ValueError(f"unknown suite {name!r}")
    fn, has_files = table[name]
    out = fn(**config)
    if has_files:
        return out
    return out, {}


def suite_index(
    surface: str = "sphere",
    degree: int = 1,
    cutoff: int = 8,
    target_rank: int = 1,
    threshold: float = 1e-8,
) -> tuple[dict, dict]:
    checks = []
    csvs: dict[str, list[str]] = {}
    if surface == "sphere":
        op = il.build_dbar_sphere(degree, cutoff)
        h0, h1 = il.h_oracle(degree)
        rep = il.numeric_index(op, threshold=threshold, formula_index=il.riemann_roch(1, 0, degree))
        checks.append(
            _check(
                f"kernel of dbar on O({degree})",
                rep.kernel_dim == h0 and rep.conclusive,
                rep.kernel_dim,
                threshold,
                "oracle",
            )
        )
        checks.append(
            _check(
                f"cokernel of dbar on O({degree})",
                rep.cokernel_dim == h1,
                rep.cokernel_dim,
                threshold,
                "oracle",
            )
        )
        checks.append(
            _check(
                f"real index of dbar on O({degree})",
                rep.numeric_index_real == il.riemann_roch(1, 0, degree),
                rep.numeric_index_real,
                0,
                "formula",
            )
        )
        if degree >= 1:
            d10 = il.build_dirac10_sphere(degree, cutoff + 2 * degree)
            rep10 = il.numeric_index(
                d10, threshold=threshold, formula_index=il.dirac10_index(2 * degree)
            )
            checks.append(
                _check(
                    f"real index of the holomorphic Dirac half, degree {degree}",
                    rep10.numeric_index_real == 4 * degree,
                    rep10.numeric_index_real,
                    0,
                    "formula",
                )
            )
        csvs["singular_values.csv"] = ["index,sigma"] + [
            f"{i},{s!r}" for i, s in enumerate(rep.singular_values)
        ]
        extra_report = rep.as_dict()
    elif surface == "torus":
        op = il.build_dirac_torus(target_rank, cutoff)
        asa = float(np.abs(op.matrix + op.matrix.conj().T).max())
        checks.append(_check("torus Dirac anti-self-adjointness", asa <= 1e-12, asa, 1e-12, "identity"))
        rep = il.numeric_index(op, threshold=threshold, formula_index=0)
        checks.append(
            _check(
                "torus Dirac kernel (constant spinors)",
                rep.kernel_dim == 4 * target_rank,
                rep.kernel_dim,
                threshold,
                "oracle",
            )
        )
        checks.append(
            _check("torus Dirac index", rep.numeric_index == 0, rep.numeric_index, 0, "formula")
        )
        adj = il.adjoint_relation_check(min(cutoff, 6), n_target=target_rank)
        for c in adj["checks"]:
            checks.append(_check(c["name"], c["passed"], c["value"], c["tol"], "identity"))
        csvs["singular_values.csv"] = ["index,sigma"] + [
            f"{i},{s!r}" for i, s in enumerate(rep.singular_values)
        ]
        extra_report = rep.as_dict()
    else:
        raise ValueError("surface must be 'sphere' or 'torus'")
    cfg = {
        "surface": surface,
        "degree": degree,
        "cutoff": cutoff,
        "target_rank": target_rank,
        "threshold": threshold,
    }
    report = _report("index", cfg, checks)
    report["index_report"] = extra_report
    return report, csvs


_BOCHNER_TABLE = [
    # (genus, sigma, emin, emax, expected D10, expected D01)
    (0, 4.0, 0.0, 0.125, "bijective", "injective"),
    (0, 4.0, 0.0, 0.5, "surjective", "injective"),
    (0, 0.0, 0.0, 0.3, "bijective", "bijective"),
    (1, 4.0, 0.1, 0.5, "surjective", "injective"),
    (1, 4.0, 0.0, 0.0, "inconclusive", "inconclusive"),
    (2, 4.0, 0.0, 0.5, "surjective", "injective"),
    (0, -4.0, 0.0, 0.125, "injective", "bijective"),
    (0, -4.0, 0.0, 0.5, "injective", "surjective"),
    (1, -4.0, 0.1, 0.5, "injective", "surjective"),
    (2, -4.0, 0.0, 0.5, "injective", "surjective"),
    (1, 0.0, 0.0, 0.3, "inconclusive", "inconclusive"),
    (2, 0.0, 0.0, 0.3, "inconclusive", "inconclusive"),
]


def suite_bochner(cutoff: int = 10, seed: int = 7) -> tuple[dict, dict]:
    rng = np.random.default_rng(seed)
    checks = []
    table_ok = True
    for genus, sigma, emin, emax, exp10, exp01 in _BOCHNER_TABLE:
        v = clf.bochner_classify(
            clf.BochnerInput(genus=genus, sigma=sigma, energy_min=emin, energy_max=emax)
        )
        if (v.D10, v.D01) != (exp10, exp01):
            table_ok = False
    checks.append(_check("constant-curvature case table", table_ok, None, None, "oracle"))

    swap_ok = True
    for _ in range(25):
        genus = int(rng.integers(0, 3))
        sigma = float(rng.choice([-6.0, -4.0, -1.0, 1.0, 4.0, 6.0]))
        emin = float(rng.uniform(0, 0.5))
        emax = emin + float(rng.uniform(0, 0.5))
        a = clf.bochner_classify(clf.BochnerInput(genus, sigma, emin, emax))
        b = clf.bochner_classify(clf.BochnerInput(genus, -sigma, emin, emax))
        if (a.D10, a.D01) != (b.D01, b.D10):
            swap_ok = False
    checks.append(_check("verdict swap under sigma negation", swap_ok, None, None, "identity"))

    gap_sphere = il.bochner_gap(il.build_dirac01_sphere(-1, cutoff), scalar_curvature=2.0)
    checks.append(
        _check(
            "sphere antiholomorphic-half spectral gap (flat target)",
            gap_sphere.sigma_min > 0.1 and gap_sphere.kernel_dim == 0,
            gap_sphere.sigma_min,
            0.1,
            "spectral",
        )
    )
    d01_torus = il.build_dirac_torus_chiral(1, 8, "01")
    gap_torus = il.bochner_gap(d01_torus, scalar_curvature=0.0)
    checks.append(
        _check(
            "flat torus has zero modes and no gap",
            gap_torus.sigma_min <= 1e-12 and gap_torus.kernel_dim > 0,
            gap_torus.sigma_min,
            1e-12,
            "oracle",
        )
    )
    neg = il.numeric_index(il.build_dbar_sphere(3, cutoff))
    sv = neg.singular_values
    nonzero_min = float(sv[sv > 1e-8 * sv.max()].min())
    checks.append(
        _check(
            "positive-degree control: kernel 4, surjective with gap",
            neg.kernel_dim == 4 and neg.cokernel_dim == 0 and nonzero_min > 0.1,
            nonzero_min,
            0.1,
            "spectral",
        )
    )
    csvs = {
        "singular_values.csv": ["index,sigma"]
        + [
            f"{i},{s!r}"
            for i, s in enumerate(il.build_dirac01_sphere(-1, cutoff).singular_values())
        ]
    }
    return _report("bochner", {"cutoff": cutoff, "seed": seed}, checks), csvs


def suite_moduli(n: int = 2, genus: int = 0, c1a: int = 3, dimx: int = 0) -> dict:
    checks = []
    dims = clf.moduli_dimension(clf.ModuliDimQuery(n=n, genus=genus, c1A=c1a, dimX=dimx))
    checks.append(
        _check(
            "requested dimensions",
            True,
            dims.as_dict()["total"],
            None,
            "formula",
        )
    )
    flat = clf.moduli_dimension(clf.ModuliDimQuery(n=n, genus=0, c1A=0, dimX=0))
    checks.append(
        _check(
            "trivial-class genus-zero dimension 2n|0",
            (flat.relative_even, flat.relative_odd) == (2 * n, 0),
            flat.as_dict()["relative"],
            None,
            "formula",
        )
    )
    proj_ok = True
    for k in range(0, 4):
        c1 = clf.projective_target_c1A(n, k)
        d = clf.moduli_dimension(clf.ModuliDimQuery(n=n, genus=0, c1A=c1, dimX=0))
        if (d.relative_even, d.relative_odd) != (2 * n + 2 * k * (n + 1), 2 * k * (n + 1)):
            proj_ok = False
    checks.append(
        _check("projective-target dimension formula", proj_ok, None, None, "formula")
    )
    euler_ok = True
    for nn in range(1, 4):
        for p in range(0, 3):
            for c1 in range(-3, 4):
                d = clf.moduli_dimension(clf.ModuliDimQuery(n=nn, genus=p, c1A=c1, dimX=0))
                if d.relative_even - d.relative_odd != 2 * nn * (1 - p):
                    euler_ok = False
    checks.append(
        _check("even-minus-odd equals 2n(1-p)", euler_ok, None, None, "identity")
    )
    return _report("moduli", {"n": n, "genus": genus, "c1a": c1a, "dimx": dimx}, checks)


def holomorphic_base_map(L: int, M: int, dim: int, slope: complex = 1.0 + 0.5j) -> ComponentMap:
    """Affine holomorphic torus map: first complex component z -> slope z."""
    cmap = ComponentMap.zero(L, M, dim)
    lin = np.zeros((dim, 2))
    lin[0, 0], lin[0, 1] = slope.real, -slope.imag
    lin[1, 0], lin[1, 1] = slope.imag, slope.real
    cmap.phi_linear = lin
    return cmap


def random_direction_fields(rng, L: int, M: int, dim: int, modes: int = 2):
    """Band-limited periodic direction fields (rho, xi, zeta, sigma)."""

    def trig_field(shape, parity):
        from .fields import even_masks, odd_masks

        out = gzeros(L, (M, M) + shape)
        xs = np.arange(M) / M
        x1, x2 = np.meshgrid(xs, xs, indexing="ij")
        masks = even_masks(L) if parity == "even" else odd_masks(L)
        for m in masks:
            for _ in range(modes):
                k1, k2 = int(rng.integers(-2, 3)), int(rng.integers(-2, 3))
                amp = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
                wave = np.exp(2j * np.pi * (k1 * x1 + k2 * x2))
                out[m] += wave.reshape((M, M) + (1,) * len(shape)) * amp
        return out

    xi = trig_field((dim,), "even")
    sigma = trig_field((dim,), "even")
    zeta = trig_field((2, dim), "odd")
    rho = trig_field((2, 2), "odd")
    # map directions stay chart-valued: real in every even subset
    xi = xi.real.astype(complex)
    return rho, xi, zeta, sigma


def suite_linearize(
    M: int = 32,
    model_kind: str = "flat",
    seed: int = 7,
    h: float = 1e-3,
    rel_tol: float = 1e-6,
) -> dict:
    rng = np.random.default_rng(seed)
    L = 2
    if model_kind == "flat":
        model = make_flat(1)
    elif model_kind == "constant-hsc":
        model = make_const_hsc(4.0, 1)
    else:
        raise ValueError("model_kind must be 'flat' or 'constant-hsc'")
    patch = ReducedPatch(M)
    cmap = holomorphic_base_map(L, M, model.dim)
    rho, xi, zeta, sigma = random_direction_fields(rng, L, M, model.dim)
    checks = []
    for name, dirs in [
        ("xi", comp.Directions(xi=xi)),
        ("sigma", comp.Directions(sigma=sigma)),
        ("zeta", comp.Directions(zeta=zeta)),
        ("rho", comp.Directions(rho=rho)),
        ("combined", comp.Directions(rho=rho, xi=xi, zeta=zeta, sigma=sigma)),
    ]:
        rep = comp.linearization_fd_check(cmap, patch, model, dirs, h=h, rel_tol=rel_tol)
        worst = max(b["rel_error_h2"] for b in rep["blocks"].values())
        checks.append(
            _check(f"linearization blocks along {name}", rep["passed"], worst, rel_tol, "oracle")
        )
    return _report(
        "linearize",
        {"M": M, "model": model_kind, "seed": seed, "h": h, "rel_tol": rel_tol},
        checks,
    )


def suite_verify_flat(path: str) -> dict:
    from .serialize import read_flat_map

    L, comps = read_flat_map(path)
    J = FlatTargetJ.standard(len(comps))
    ys = components_from_complex(comps)
    residuals = flat_sjc_residual(ys, J)
    res_zero = all(r.is_zero() for r in residuals)
    equivalent = holomorphy_equivalence_check(comps)
    checks = [
        _check("first-order residual vanishes", res_zero, None, 0.0, "identity"),
        _check(
            "residual agrees with the holomorphy criterion",
            res_zero == equivalent,
            None,
            0.0,
            "identity",
        ),
    ]
    return _report("verify-flat", {"path": str(path), "L": L, "n": len(comps)}, checks)


def suite_verify_components(path: str, tol: float = 1e-8) -> tuple[dict, dict]:
    from .serialize import read_field_bundle

    cmap, grav, patch, model_desc = read_field_bundle(path)
    model = make_model(model_desc)
    res = comp.residual_components(cmap, grav, patch, model)
    norms = res.max_norms()
    checks = [
        _check(f"residual block {name}", value <= tol, value, tol, "oracle")
        for name, value in norms.items()
    ]
    rows = ["i,j,chirality,auxiliary,cauchy_riemann,dirac"]
    blocks = res.blocks()
    M = patch.M
    for i in range(M):
        for j in range(M):
            vals = [
                float(np.abs(blocks[name][:, i, j]).max())
                for name in ("chirality", "auxiliary", "cauchy_riemann", "dirac")
            ]
            rows.append(f"{i},{j}," + ",".join(repr(v) for v in vals))
    report = _report(
        "verify-components", {"path": str(path), "tol": tol, "model": model_desc}, checks
    )
    return report, {"residual_field.csv": rows}


def suite_models(seed: int = 7) -> dict:
    """Model invariant sweep; not exposed as a CLI verb but used by tests."""
    rng = np.random.default_rng(seed)
    checks = []
    for model, tol in [
        (make_flat(2), 1e-12),
        (make_const_hsc(4.0, 2), 1e-12),
        (make_const_hsc(-4.0, 1), 1e-12),
        (make_model({"kind": "fubini-study-CP1"}), 1e-9),
    ]:
        pts = rng.uniform(-0.8, 0.8, size=(100, model.dim))
        rep = validate_model(model, pts, tol=tol)
        checks.append(_check(f"invariants: {model.kind}", rep.passed, None, tol, "identity"))
    return _report("models", {"seed": seed}, checks)
