"""Grid fields with Grassmann-valued components, and the (phi, psi, F) + chi data.

A Grassmann-valued grid field over the base algebra on L generators is a
complex array whose leading axis runs over the 2^L basis monomial masks.
Products are mask convolutions with anticommutation signs.

The map component phi is stored as an affine part plus a periodic part:
phi(x) = linear . x + periodic(x).  Only the periodic part is ever
differentiated, so maps with non-periodic affine behaviour (the torus
covers) keep exact derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grassmann import merge_sign


class FieldError(ValueError):
    pass


@lru_cache(maxsize=None)
def _mul_table(L: int) -> tuple[tuple[int, int, int, int], ...]:
    size = 1 << L
    table = []
    for ma in range(size):
        for mb in range(size):
            s = merge_sign(ma, mb)
            if s:
                table.append((ma, mb, ma | mb, s))
    return tuple(table)


def gmul(a: np.ndarray, b: np.ndarray, L: int) -> np.ndarray:
    """Graded product of Grassmann-valued arrays (leading axis = basis mask).

    Broadcasting applies to the trailing axes, so pointwise field products,
    matrix actions and scalar multiples all route through here.
    """
    size = 1 << L
    if a.shape[0] != size or b.shape[0] != size:
        raise FieldError("leading axis must enumerate the 2^L basis masks")
    shape = np.broadcast_shapes(a.shape[1:], b.shape[1:])
    out = np.zeros((size,) + shape, dtype=complex)
    for ma, mb, mo, s in _mul_table(L):
        av = a[ma]
        bv = b[mb]
        if not av.any() or not bv.any():
            continue
        out[mo] += s * av * bv
    return out


def gzeros(L: int, shape: tuple[int, ...]) -> np.ndarray:
    return np.zeros((1 << L,) + tuple(shape), dtype=complex)


def gscalar(L: int, value: np.ndarray) -> np.ndarray:
    """Embed an ordinary (body) array as a Grassmann-valued one."""
    value = np.asarray(value)
    out = gzeros(L, value.shape)
    out[0] = value
    return out


def even_masks(L: int) -> list[int]:
    return [m for m in range(1 << L) if bin(m).count("1") % 2 == 0]


def odd_masks(L: int) -> list[int]:
    return [m for m in range(1 << L) if bin(m).count("1") % 2 == 1]


def check_parity(field: np.ndarray, L: int, parity: str, what: str) -> None:
    masks = odd_masks(L) if parity == "even" else even_masks(L)
    for m in masks:
        if np.any(field[m]):
            raise FieldError(f"{what} must be {parity}: mask {m:#b} is populated")


def max_abs(field: np.ndarray) -> float:
    return float(np.abs(field).max()) if field.size else 0.0


@dataclass
class ComponentMap:
    """The even/odd/auxiliary component fields of a map on the patch.

    phi_linear: (2n, 2) real matrix (the affine part phi^b = sum_k c[b,k] x^k);
    phi_periodic: (2^L, M, M, 2n) even Grassmann-valued periodic part;
    psi: (2^L, M, M, 2, 2n) odd, spinor index 0 <-> s^3, 1 <-> s^4;
    F: (2^L, M, M, 2n) even.
    """

    L: int
    phi_linear: np.ndarray
    phi_periodic: np.ndarray
    psi: np.ndarray
    F: np.ndarray

    def __post_init__(self):
        self.phi_linear = np.asarray(self.phi_linear, dtype=float)
        self.phi_periodic = np.asarray(self.phi_periodic, dtype=complex)
        self.psi = np.asarray(self.psi, dtype=complex)
        self.F = np.asarray(self.F, dtype=complex)
        size = 1 << self.L
        if self.phi_periodic.shape[0] != size or self.psi.shape[0] != size or self.F.shape[0] != size:
            raise FieldError("leading axes must have length 2^L")
        if self.phi_linear.shape != (self.dim, 2):
            raise FieldError("phi_linear must have shape (2n, 2)")
        check_parity(self.phi_periodic, self.L, "even", "phi")
        check_parity(self.F, self.L, "even", "F")
        check_parity(self.psi, self.L, "odd", "psi")
        if np.abs(self.phi_periodic.imag).max(initial=0.0) > 0:
            raise FieldError("phi takes chart values: real per even subset")

    @property
    def M(self) -> int:
        return self.phi_periodic.shape[1]

    @property
    def dim(self) -> int:
        return self.phi_periodic.shape[-1]

    @classmethod
    def zero(cls, L: int, M: int, dim: int) -> "ComponentMap":
        return cls(
            L=L,
            phi_linear=np.zeros((dim, 2)),
            phi_periodic=gzeros(L, (M, M, dim)),
            psi=gzeros(L, (M, M, 2, dim)),
            F=gzeros(L, (M, M, dim)),
        )

    def phi_body(self, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
        """Body of phi on the grid, shape (M, M, 2n)."""
        lin = np.einsum("bk,kxy->xyb", self.phi_linear, np.stack([x1, x2]))
        return lin + self.phi_periodic[0].real

    def copy(self) -> "ComponentMap":
        return ComponentMap(
            L=self.L,
            phi_linear=self.phi_linear.copy(),
            phi_periodic=self.phi_periodic.copy(),
            psi=self.psi.copy(),
            F=self.F.copy(),
        )


@dataclass
class Gravitino:
    """chi: (2^L, M, M, 2, 2) odd; indices (form k, spinor kappa)."""

    L: int
    chi: np.ndarray

    def __post_init__(self):
        self.chi = np.asarray(self.chi, dtype=complex)
        if self.chi.shape[0] != 1 << self.L:
            raise FieldError("leading axis must have length 2^L")
        check_parity(self.chi, self.L, "odd", "chi")

    @property
    def M(self) -> int:
        return self.chi.shape[1]

    @classmethod
    def zero(cls, L: int, M: int) -> "Gravitino":
        return cls(L=L, chi=gzeros(L, (M, M, 2, 2)))

    def copy(self) -> "Gravitino":
        return Gravitino(L=self.L, chi=self.chi.copy())
