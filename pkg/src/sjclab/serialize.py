"""File formats: superfield literal inputs and component-field bundles.

A flat-map file (for ``sjc verify-flat``) is JSON:

    {"schema": 1, "L": 2, "n": 1,
     "components_z": ["x1 + (0+1j) * x2 + e3 * l1", ...]}

listing the complex target components as superfield literals.

A field bundle (for ``sjc verify-components``) is a JSON header line
followed by one text record per grid point:

    i j lam  phi...  psi...  F...  chi...

where each field block lists, for every base-monomial mask in increasing
order, the real and imaginary parts of every component.  phi carries an
affine part in the header.
"""

from __future__ import annotations

import json

import numpy as np

from .fields import ComponentMap, Gravitino, gzeros
from .patch import ReducedPatch
from .superfield import SuperField


def write_flat_map(path, L: int, components_z: list[SuperField]) -> None:
    payload = {
        "schema": 1,
        "L": L,
        "n": len(components_z),
        "components_z": [c.to_text() for c in components_z],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_flat_map(path) -> tuple[int, list[SuperField]]:
    with open(path) as fh:
        payload = json.load(fh)
    if payload.get("schema") != 1:
        raise ValueError("unsupported flat-map schema")
    L = int(payload["L"])
    comps = [SuperField.from_text(L, text) for text in payload["components_z"]]
    return L, comps


def _field_values(arr: np.ndarray, i: int, j: int) -> list[float]:
    vals = []
    block = arr[:, i, j]
    flat = block.reshape(block.shape[0], -1)
    for mask in range(flat.shape[0]):
        for v in flat[mask]:
            vals.extend([float(v.real), float(v.imag)])
    return vals


def write_field_bundle(
    path,
    cmap: ComponentMap,
    grav: Gravitino,
    patch: ReducedPatch,
    model_descriptor: dict,
) -> None:
    M = patch.M
    header = {
        "schema": 1,
        "M": M,
        "L": cmap.L,
        "dim": cmap.dim,
        "model": model_descriptor,
        "lambda": "flat" if patch.flat_gauge else "grid",
        "phi_linear": [list(map(float, row)) for row in cmap.phi_linear],
    }
    with open(path, "w") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for i in range(M):
            for j in range(M):
                rec = [str(i), str(j), repr(float(patch.lam[i, j]))]
                for arr in (cmap.phi_periodic, cmap.psi, cmap.F, grav.chi):
                    rec.extend(repr(v) for v in _field_values(arr, i, j))
                fh.write(" ".join(rec) + "\n")


def read_field_bundle(path):
    with open(path) as fh:
        header = json.loads(fh.readline())
        if header.get("schema") != 1:
            raise ValueError("unsupported field bundle schema")
        M = int(header["M"])
        L = int(header["L"])
        dim = int(header["dim"])
        S = 1 << L
        lam = np.ones((M, M))
        phi = gzeros(L, (M, M, dim))
        psi = gzeros(L, (M, M, 2, dim))
        F = gzeros(L, (M, M, dim))
        chi = gzeros(L, (M, M, 2, 2))
        sizes = [S * dim, S * 2 * dim, S * dim, S * 2 * 2]
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            i, j = int(parts[0]), int(parts[1])
            lam[i, j] = float(parts[2])
            vals = np.array([float(t) for t in parts[3:]])
            if vals.size != 2 * sum(sizes):
                raise ValueError(f"malformed record at ({i}, {j})")
            cvals = vals[0::2] + 1j * vals[1::2]
            off = 0
            for arr, size, shape in (
                (phi, sizes[0], (S, dim)),
                (psi, sizes[1], (S, 2, dim)),
                (F, sizes[2], (S, dim)),
                (chi, sizes[3], (S, 2, 2)),
            ):
                arr[:, i, j] = cvals[off : off + size].reshape(shape)
                off += size
    patch = ReducedPatch(M, lam=None if np.all(lam == 1.0) else lam)
    cmap = ComponentMap(
        L=L,
        phi_linear=np.array(header["phi_linear"], dtype=float),
        phi_periodic=phi,
        psi=psi,
        F=F,
    )
    grav = Gravitino(L=L, chi=chi)
    return cmap, grav, patch, header["model"]
